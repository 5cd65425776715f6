"""Counter-based random streams.

Every simulation draw is addressed by an explicit key (seed, step, phase,
entity, draw index) instead of a hidden generator cursor, so the value of a
draw never depends on thread count, worker assignment, or iteration schedule.
This is what makes a distributed run bit-identical to a local one.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_DOMAIN = 0x8BADF00DC0FFEE11


def _mix64(x: int) -> int:
    # splitmix64 finalizer: full avalanche over 64 bits
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return (x ^ (x >> 31)) & MASK64


def hash_key(*parts: int) -> int:
    """Hash an integer tuple to a 64-bit value. Pure function of the tuple."""
    h = _DOMAIN
    for p in parts:
        h = _mix64(h ^ _mix64((p + _GOLDEN) & MASK64))
    return h


class Stream:
    """A random stream identified by a fixed integer key tuple.

    Draw ``i`` of a stream is ``hash_key(*key, i)``: a pure function of the
    key and the position, independent of when or where it is evaluated. The
    key fold is cached, so a draw only mixes the counter in.
    """

    __slots__ = ("key", "_prefix", "_n")

    def __init__(self, *key: int):
        self.key = tuple(int(k) for k in key)
        h = _DOMAIN
        for p in self.key:
            h = _mix64(h ^ _mix64((p + _GOLDEN) & MASK64))
        self._prefix = h
        self._n = 0

    def substream(self, *extra: int) -> "Stream":
        """Independent child stream with an extended key and a fresh counter."""
        return Stream(*self.key, *extra)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        h = _mix64(self._prefix ^ _mix64((self._n + _GOLDEN) & MASK64))
        self._n += 1
        return (h >> 11) * 2.0**-53

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n). Modulo bias is ~n/2^64, negligible here."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        h = _mix64(self._prefix ^ _mix64((self._n + _GOLDEN) & MASK64))
        self._n += 1
        return h % n

    def weighted_index(self, weights: list[float]) -> int:
        """Index drawn with probability proportional to its (finite, >=0) weight."""
        total = 0.0
        for w in weights:
            if w < 0:
                raise ValueError("negative weight")
            total += w
        if total <= 0:
            raise ValueError("weights sum to zero")
        u = self.random() * total
        acc = 0.0
        last = 0
        for i, w in enumerate(weights):
            if w <= 0:
                continue
            acc += w
            last = i
            if u < acc:
                return i
        return last


def per_entity(rng, entity_id: int):
    """Entity-scoped child stream when available, the stream itself otherwise.

    Lets module-level operations accept either a counter-based Stream (the
    engine's case, schedule-independent) or any object with .random()
    (e.g. random.Random in statistical tests).
    """
    sub = getattr(rng, "substream", None)
    if sub is not None:
        return sub(entity_id)
    return rng
