"""citysim: a deterministic, distributable city-economy simulator.

Synthesized citizens, learning firms and government, markets, contagion, and
a live governance service through which players vote on legislation that
alters the running simulation.
"""

__version__ = "0.1.0"
