"""Tabular Q-learning over discretized signals, shared by firms and government.

One table per learner, joint actions over its two levers. Margin/supply and
tax/welfare adjustments are each a 3x3 grid of {down, hold, up} pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

StateKey = tuple[int, ...]

# joint action decode: index -> (first lever dir, second lever dir).
# hold comes first so an untrained table (all zeros, ties to lowest index)
# defaults to no-op instead of ratcheting both levers down.
JOINT_ACTION_COUNT = 9
_DIRS = (0, -1, 1)


def joint_action_dirs(action: int) -> tuple[int, int]:
    if not 0 <= action < JOINT_ACTION_COUNT:
        raise ValueError(f"action index {action} out of range")
    return _DIRS[action // 3], _DIRS[action % 3]


@dataclass
class QTable:
    """Q-values with default 0 for unseen (state, action) pairs."""

    actions: int = JOINT_ACTION_COUNT
    alpha: float = 0.1
    gamma: float = 0.9
    epsilon: float = 0.1
    epsilon_decay: float = 0.999
    epsilon_floor: float = 0.01
    values: dict[StateKey, list[float]] = field(default_factory=dict)

    def row(self, s: StateKey) -> list[float]:
        r = self.values.get(s)
        return r if r is not None else [0.0] * self.actions

    def value(self, s: StateKey, a: int) -> float:
        return self.row(s)[a]

    def decay_epsilon(self) -> None:
        self.epsilon = max(self.epsilon_floor, self.epsilon * self.epsilon_decay)

    def to_wire(self) -> dict:
        return {
            "actions": self.actions,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "epsilon": self.epsilon,
            "epsilon_decay": self.epsilon_decay,
            "epsilon_floor": self.epsilon_floor,
            "values": {",".join(map(str, s)): row for s, row in self.values.items()},
        }

    @classmethod
    def from_wire(cls, doc: dict) -> "QTable":
        values = {
            tuple(int(x) for x in key.split(",")) if key else (): list(row)
            for key, row in doc["values"].items()
        }
        return cls(
            actions=doc["actions"],
            alpha=doc["alpha"],
            gamma=doc["gamma"],
            epsilon=doc["epsilon"],
            epsilon_decay=doc["epsilon_decay"],
            epsilon_floor=doc["epsilon_floor"],
            values=values,
        )

    def dump_rows(self):
        """Diagnostic rows ``state,action,value`` for every stored cell."""
        for s in sorted(self.values):
            for a, v in enumerate(self.values[s]):
                yield f"{':'.join(map(str, s))},{a},{v!r}"


@dataclass(frozen=True)
class SignalThresholds:
    """Per-signal (low, high) cut points for the three-bin discretizer."""

    sold: tuple[float, float] = (1.0, 10.0)
    leftover: tuple[float, float] = (1.0, 10.0)
    profit: tuple[float, float] = (1.0, 100.0)


def bin_signal(value: float, low: float, high: float) -> int:
    """0 below ``low`` (zero/negative), 2 above ``high``, 1 between."""
    if value < low:
        return 0
    if value > high:
        return 2
    return 1


def discretize_signals(
    sold: float, leftover: float, profit_delta: float, t: SignalThresholds = SignalThresholds()
) -> StateKey:
    return (
        bin_signal(sold, *t.sold),
        bin_signal(leftover, *t.leftover),
        bin_signal(profit_delta, *t.profit),
    )


def select_action(q: QTable, s: StateKey, rng) -> int:
    """Epsilon-greedy over the table row; greedy ties break to the lowest index."""
    if q.actions < 1:
        raise ValueError("action list is empty")
    if rng.random() < q.epsilon:
        return rng.randrange(q.actions)
    row = q.row(s)
    best = 0
    for a in range(1, q.actions):
        if row[a] > row[best]:
            best = a
    return best


def update(q: QTable, s: StateKey, a: int, reward: float, s_next: StateKey) -> QTable:
    """Standard one-step backup; mutates and returns the table."""
    row = q.values.get(s)
    if row is None:
        row = [0.0] * q.actions
        q.values[s] = row
    target = reward + q.gamma * max(q.row(s_next))
    row[a] = (1.0 - q.alpha) * row[a] + q.alpha * target
    return q
