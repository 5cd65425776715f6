"""Population synthesis from a Bayesian network over categorical demographics.

The net is a DAG of categorical nodes with conditional probability tables.
Prior sampling walks the topological order, drawing each node from the CPT
row selected by its already-sampled parents, which yields whole plausible
persons rather than independently-drawn attributes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Mapping

if TYPE_CHECKING:
    from .agents import Person

NORMALIZATION_TOL = 1e-9


class PopgenError(Exception):
    """Base class for net loading/validation failures."""


class CptNotNormalized(PopgenError):
    pass


class CycleDetected(PopgenError):
    pass


class MissingCptRow(PopgenError):
    pass


class UnknownParentId(PopgenError):
    pass


@dataclass(frozen=True)
class NodeSpec:
    """One categorical variable: its domain, parents, and CPT.

    CPT keys are tuples of parent values (empty tuple for roots); each value
    is a probability vector over the node's domain.
    """

    id: str
    domain: tuple[str, ...]
    parents: tuple[str, ...]
    cpt: dict[tuple[str, ...], tuple[float, ...]]


@dataclass(frozen=True)
class BayesNet:
    nodes: tuple[NodeSpec, ...]
    topological_order: tuple[str, ...]

    def node(self, node_id: str) -> NodeSpec:
        return self._by_id[node_id]

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {n.id: n for n in self.nodes})


@dataclass(frozen=True)
class Demographics:
    """Sampled demographic categories; bracketed fields carry their domain index."""

    race: str
    sex: str
    age: str
    education: str
    neighborhood: str
    income: str
    age_level: int = 0
    education_level: int = 0


@dataclass(frozen=True)
class NameTables:
    surnames: tuple[tuple[str, float], ...]
    female_given: tuple[tuple[str, float], ...]
    male_given: tuple[tuple[str, float], ...]

    def __post_init__(self):
        for label, table in (
            ("surnames", self.surnames),
            ("female_given", self.female_given),
            ("male_given", self.male_given),
        ):
            if not table:
                raise ValueError(f"name table {label} is empty")
            if any(w <= 0 for _, w in table):
                raise ValueError(f"name table {label} has non-positive weight")


def _validate_cpt(spec: NodeSpec, domains: Mapping[str, tuple[str, ...]]) -> None:
    expected = [()]
    for parent in spec.parents:
        if parent not in domains:
            raise UnknownParentId(f"node {spec.id!r}: unknown parent {parent!r}")
        expected = [row + (v,) for row in expected for v in domains[parent]]
    seen = set(spec.cpt)
    for row_key in expected:
        if row_key not in seen:
            raise MissingCptRow(f"node {spec.id!r}: no CPT row for parents {row_key!r}")
    extra = seen - set(expected)
    if extra:
        raise MissingCptRow(f"node {spec.id!r}: unexpected CPT rows {sorted(extra)!r}")
    for row_key, probs in spec.cpt.items():
        if len(probs) != len(spec.domain):
            raise CptNotNormalized(
                f"node {spec.id!r} row {row_key!r}: {len(probs)} entries for "
                f"{len(spec.domain)} categories"
            )
        if any(p != p or p < 0.0 or p > 1.0 for p in probs):  # rejects NaN too
            raise CptNotNormalized(f"node {spec.id!r} row {row_key!r}: entries outside [0,1]")
        total = sum(probs)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise CptNotNormalized(f"node {spec.id!r} row {row_key!r}: sums to {total!r}")


def _topological_order(nodes: Iterable[NodeSpec]) -> tuple[str, ...]:
    ids = [n.id for n in nodes]
    children: dict[str, list[str]] = {i: [] for i in ids}
    indegree = {i: 0 for i in ids}
    for n in nodes:
        for parent in n.parents:
            if parent not in children:
                raise UnknownParentId(f"node {n.id!r}: unknown parent {parent!r}")
            children[parent].append(n.id)
            indegree[n.id] += 1
    ready = [i for i in ids if indegree[i] == 0]
    order: list[str] = []
    while ready:
        node_id = ready.pop(0)
        order.append(node_id)
        for child in children[node_id]:
            indegree[child] -= 1
            if indegree[child] == 0:
                ready.append(child)
    if len(order) != len(ids):
        stuck = sorted(i for i in ids if indegree[i] > 0)
        raise CycleDetected(f"cycle through nodes {stuck!r}")
    return tuple(order)


def build_net(node_specs: Iterable[NodeSpec]) -> BayesNet:
    """Validate node specs and assemble a net with a computed topological order."""
    nodes = tuple(node_specs)
    if len({n.id for n in nodes}) != len(nodes):
        raise PopgenError("duplicate node ids")
    order = _topological_order(nodes)
    domains = {n.id: n.domain for n in nodes}
    for spec in nodes:
        _validate_cpt(spec, domains)
    return BayesNet(nodes=nodes, topological_order=order)


def load_bayes_net(source: str | Path | Mapping) -> BayesNet:
    """Load a net from its JSON document format.

    Format: ``{"nodes": [{"id", "domain", "parents", "cpt"}]}`` where cpt keys
    are parent values joined by ``"|"`` (empty string for root nodes) and cpt
    values are probability arrays over the domain.
    """
    if isinstance(source, Mapping):
        doc = source
    else:
        path = Path(source)
        if path.exists():
            doc = json.loads(path.read_text())
        else:
            doc = json.loads(str(source))
    specs = []
    for raw in doc["nodes"]:
        parents = tuple(raw.get("parents", ()))
        cpt: dict[tuple[str, ...], tuple[float, ...]] = {}
        for row_key, probs in raw["cpt"].items():
            key = tuple(row_key.split("|")) if row_key else ()
            if len(key) != len(parents):
                raise MissingCptRow(
                    f"node {raw['id']!r}: row key {row_key!r} does not match "
                    f"{len(parents)} parents"
                )
            cpt[key] = tuple(float(p) for p in probs)
        specs.append(
            NodeSpec(
                id=str(raw["id"]),
                domain=tuple(str(v) for v in raw["domain"]),
                parents=parents,
                cpt=cpt,
            )
        )
    return build_net(specs)


def prior_sample(net: BayesNet, rng) -> dict[str, str]:
    """Draw one full joint assignment by sampling nodes in topological order."""
    assignment: dict[str, str] = {}
    for node_id in net.topological_order:
        spec = net.node(node_id)
        row = spec.cpt[tuple(assignment[p] for p in spec.parents)]
        u = rng.random()
        acc = 0.0
        chosen = None
        for category, p in zip(spec.domain, row):
            if p <= 0.0:
                continue
            acc += p
            chosen = category
            if u < acc:
                break
        assignment[node_id] = chosen if chosen is not None else spec.domain[0]
    return assignment


def _pick_name(table: tuple[tuple[str, float], ...], rng) -> str:
    total = sum(w for _, w in table)
    u = rng.random() * total
    acc = 0.0
    for name, w in table:
        acc += w
        if u < acc:
            return name
    return table[-1][0]


DEFAULT_ANNUAL_INCOME = 36_000

# Annual midpoints for the bundled net's income brackets; open-ended top
# bracket uses 1.5x its lower bound.
DEFAULT_INCOME_BRACKET_CASH: dict[str, int] = {
    "under_25k": 12_500,
    "25k_60k": 42_500,
    "60k_120k": 90_000,
    "over_120k": 180_000,
}


def demographics_from_assignment(net: BayesNet, assignment: Mapping[str, str]) -> Demographics:
    age = assignment["age"]
    education = assignment["education"]
    return Demographics(
        race=assignment["race"],
        sex=assignment["sex"],
        age=age,
        education=education,
        neighborhood=assignment["neighborhood"],
        income=assignment["income"],
        age_level=net.node("age").domain.index(age),
        education_level=net.node("education").domain.index(education),
    )


def generate_population(
    net: BayesNet,
    names: NameTables,
    n: int,
    rng,
    income_bracket_cash: Mapping[str, int] | None = None,
    start_id: int = 0,
) -> list["Person"]:
    """Synthesize ``n`` persons with demographics drawn from the net.

    Each person consumes an independent substream of ``rng`` so populations
    are reproducible per seed regardless of how sampling is scheduled.
    Initial cash is one month of the sampled income bracket's midpoint; wage
    starts at 0 (unmatched) and frugality is uniform in [0, 1].
    """
    from .agents import Person

    if n < 0:
        raise ValueError("population size must be >= 0")
    brackets = income_bracket_cash or DEFAULT_INCOME_BRACKET_CASH
    persons: list[Person] = []
    for i in range(n):
        stream = rng.substream(i) if hasattr(rng, "substream") else rng
        assignment = prior_sample(net, stream)
        demo = demographics_from_assignment(net, assignment)
        given_table = names.female_given if demo.sex == "female" else names.male_given
        given = _pick_name(given_table, stream)
        surname = _pick_name(names.surnames, stream)
        annual = brackets.get(demo.income, DEFAULT_ANNUAL_INCOME)
        persons.append(
            Person(
                id=start_id + i,
                demographics=demo,
                name=f"{given} {surname}",
                cash=annual // 12,
                frugality=stream.random(),
            )
        )
    return persons


def load_name_table(path: str | Path) -> tuple[tuple[str, float], ...]:
    """Read a two-column delimited file of (name, weight) rows."""
    rows: list[tuple[str, float]] = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].startswith("#"):
                continue
            rows.append((rec[0].strip(), float(rec[1])))
    return tuple(rows)


def load_name_tables(surnames: str | Path, female: str | Path, male: str | Path) -> NameTables:
    return NameTables(
        surnames=load_name_table(surnames),
        female_given=load_name_table(female),
        male_given=load_name_table(male),
    )


def _data_path(filename: str) -> Path:
    return Path(__file__).parent / "data" / filename


def default_net() -> BayesNet:
    """The bundled six-node synthetic demographic net."""
    return load_bayes_net(_data_path("default_net.json"))


def fixture_net4() -> BayesNet:
    """The bundled four-node net used by distribution-fidelity tests."""
    return load_bayes_net(_data_path("fixture_net4.json"))


def default_name_tables() -> NameTables:
    return load_name_tables(
        _data_path("surnames.csv"),
        _data_path("female_given.csv"),
        _data_path("male_given.csv"),
    )
