from .governance import (
    AlreadyVoted,
    BallotClosed,
    GovernanceError,
    GovernanceState,
    MalformedLegislation,
    NoCitizensAvailable,
    NotYourTurn,
    replay_command_log,
)
from .host import SimulationHost

__all__ = [
    "AlreadyVoted",
    "BallotClosed",
    "GovernanceError",
    "GovernanceState",
    "MalformedLegislation",
    "NoCitizensAvailable",
    "NotYourTurn",
    "replay_command_log",
    "SimulationHost",
]
