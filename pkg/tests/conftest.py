from __future__ import annotations

import pytest

from citysim.popgen import BayesNet, NodeSpec, build_net, fixture_net4


@pytest.fixture
def net4() -> BayesNet:
    """The bundled 4-node fixture net (A -> B, A -> C, {B,C} -> D)."""
    return fixture_net4()


@pytest.fixture
def chain_net() -> BayesNet:
    """Tiny hand-written net with easily enumerable probabilities."""
    return build_net([
        NodeSpec(id="A", domain=("x", "y"), parents=(), cpt={(): (0.7, 0.3)}),
        NodeSpec(
            id="B",
            domain=("u", "v"),
            parents=("A",),
            cpt={("x",): (0.9, 0.1), ("y",): (0.2, 0.8)},
        ),
    ])


def enumerate_joint(net: BayesNet) -> dict[tuple[str, ...], float]:
    """Oracle: the exact joint by full enumeration over all value tuples."""
    order = net.topological_order
    joint: dict[tuple[str, ...], float] = {(): 1.0}
    assignments: list[dict[str, str]] = [{}]
    probs = [1.0]
    for node_id in order:
        spec = net.node(node_id)
        new_assignments, new_probs = [], []
        for a, p in zip(assignments, probs):
            row = spec.cpt[tuple(a[parent] for parent in spec.parents)]
            for value, pv in zip(spec.domain, row):
                if pv == 0.0:
                    continue
                b = dict(a)
                b[node_id] = value
                new_assignments.append(b)
                new_probs.append(p * pv)
        assignments, probs = new_assignments, new_probs
    return {
        tuple(a[n] for n in order): p for a, p in zip(assignments, probs)
    }
