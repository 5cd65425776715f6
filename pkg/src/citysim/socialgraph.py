"""Static friendship network from demographics via a logistic tie model.

Each unordered pair is linked independently with sigmoid(intercept + weighted
match/distance features). The graph is fixed at initialization and answers
referral and contagion-neighborhood queries thereafter.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

if TYPE_CHECKING:
    from .agents import Person
    from .popgen import Demographics


@dataclass(frozen=True)
class FriendshipCoefficients:
    """Logistic model weights. Defaults are synthetic, not estimated values."""

    intercept: float = -4.0
    race_match: float = 1.5
    sex_match: float = 0.3
    age_distance: float = -0.4
    education_distance: float = -0.3

    @classmethod
    def from_mapping(cls, doc: Mapping[str, float]) -> "FriendshipCoefficients":
        return cls(**{k: float(v) for k, v in doc.items()})

    @classmethod
    def from_file(cls, path: str | Path) -> "FriendshipCoefficients":
        return cls.from_mapping(json.loads(Path(path).read_text()))


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def friendship_probability(
    a: "Demographics", b: "Demographics", c: FriendshipCoefficients
) -> float:
    """Tie probability; all features are symmetric in (a, b)."""
    z = c.intercept
    z += c.race_match * (a.race == b.race)
    z += c.sex_match * (a.sex == b.sex)
    z += c.age_distance * abs(a.age_level - b.age_level)
    z += c.education_distance * abs(a.education_level - b.education_level)
    return _sigmoid(z)


class SocialGraph:
    """Undirected adjacency with sorted neighbor lists for deterministic walks."""

    def __init__(self, ids: Iterable[int], edges: Iterable[tuple[int, int]] = ()):
        self._adj: dict[int, list[int]] = {int(i): [] for i in ids}
        for a, b in edges:
            self.add_edge(a, b)

    def add_edge(self, a: int, b: int) -> None:
        if a == b:
            raise ValueError("self-loops not allowed")
        if b not in self._adj[a]:
            self._adj[a].append(b)
            self._adj[b].append(a)
            self._adj[a].sort()
            self._adj[b].sort()

    def neighbors(self, pid: int) -> tuple[int, ...]:
        return tuple(self._adj.get(pid, ()))

    def ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._adj))

    def edge_count(self) -> int:
        return sum(len(v) for v in self._adj.values()) // 2

    def edges(self):
        for a in sorted(self._adj):
            for b in self._adj[a]:
                if a < b:
                    yield a, b

    def write_edge_list(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for a, b in self.edges():
                fh.write(f"{a} {b}\n")


def build_graph(
    persons: Sequence["Person"],
    c: FriendshipCoefficients,
    rng,
    pair_subsample: float = 1.0,
) -> SocialGraph:
    """Independent Bernoulli draw per unordered pair, in fixed (i, j) i<j order.

    ``pair_subsample`` < 1 evaluates only that fraction of pairs and rescales
    the link probability by 1/fraction, for populations where the full O(n^2)
    sweep is too slow. Probabilities are capped at 1.
    """
    if not 0.0 < pair_subsample <= 1.0:
        raise ValueError("pair_subsample must be in (0, 1]")
    graph = SocialGraph(p.id for p in persons)
    for i in range(len(persons)):
        a = persons[i]
        for j in range(i + 1, len(persons)):
            b = persons[j]
            if pair_subsample < 1.0 and rng.random() >= pair_subsample:
                continue
            p = friendship_probability(a.demographics, b.demographics, c)
            if pair_subsample < 1.0:
                p = min(1.0, p / pair_subsample)
            if rng.random() < p:
                graph.add_edge(a.id, b.id)
    return graph


def referral_weight(
    applicant: int, firm_employees: set[int], g: SocialGraph, multiplier: float
) -> float:
    """``multiplier`` when any friend works at the firm, else 1 (presence, not count)."""
    if multiplier < 1.0:
        raise ValueError("multiplier must be >= 1")
    for nb in g.neighbors(applicant):
        if nb in firm_employees:
            return multiplier
    return 1.0
