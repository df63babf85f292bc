"""Generation plan and record generation.

Each variable in a descriptor is an entity whose fields come from a catalog
of :class:`AttributeGenerator` objects built from the fixture directory.  The
plan holds the fields the descriptor needs (plus their prerequisites) and the
descriptor's output attributes, in one dependency order.  Every record draws
from its own :class:`~synthcensus.rng.RandomStream`, consuming draws in plan
order, so records can be produced in any order or in parallel.
"""

from __future__ import annotations

import heapq
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping

from synthcensus.errors import (
    CyclicDependency,
    FixtureMissing,
    MissingDependency,
    UnknownGenerator,
)
from synthcensus.fixtures import Fixtures
from synthcensus.rng import RandomStream
from synthcensus.schema import DescriptorModel, ScriptExpr, evaluate_script
from synthcensus.weights import AGE_KEYED, CategoricalDistribution, age_bucket

INDEPENDENT = "independent"
AGE_KEYED_KIND = "age_keyed"
AGE_GENDER_KEYED_KIND = "age_gender_keyed"
COMPOSED = "composed"
NAME_PART = "name_part"
MAPPED = "mapped"

# kinds whose value is drawn conditionally on earlier fields
DEPENDENT_KINDS = frozenset({AGE_KEYED_KIND, AGE_GENDER_KEYED_KIND, NAME_PART})

PERSON_GENERATOR = "PersonCensusGenerator"
SELF = "self"

Record = dict


@dataclass(frozen=True)
class AttributeGenerator:
    name: str
    kind: str
    depends_on: frozenset = frozenset()
    source: str | None = None  # table/grouped/mapping field, or "given"/"family" for name parts
    expr: ScriptExpr | None = None

    def __post_init__(self) -> None:
        expected = {
            INDEPENDENT: frozenset(),
            AGE_KEYED_KIND: frozenset({"age"}),
            AGE_GENDER_KEYED_KIND: frozenset({"age", "gender"}),
        }.get(self.kind)
        if expected is not None and self.depends_on != expected:
            raise ValueError(f"{self.kind} generator {self.name!r} must depend on {sorted(expected)}")
        if self.kind == NAME_PART:
            want = {"given": {"gender", "nationality"}, "family": {"nationality"}}[self.source]
            if self.depends_on != want:
                raise ValueError(f"{self.source} name generator must depend on {sorted(want)}")


def catalog_from_fixtures(fx: Fixtures) -> dict[str, AttributeGenerator]:
    """Sub-generators a person entity offers, derived from the fixture files."""
    catalog: dict[str, AttributeGenerator] = {}
    for name in fx.tables:
        catalog[name] = AttributeGenerator(name, INDEPENDENT, source=name)
    for name, grouped in fx.grouped.items():
        if grouped.group_key_kind == AGE_KEYED:
            catalog[name] = AttributeGenerator(name, AGE_KEYED_KIND, frozenset({"age"}), source=name)
        else:
            catalog[name] = AttributeGenerator(
                name, AGE_GENDER_KEYED_KIND, frozenset({"age", "gender"}), source=name
            )
    for name, (source, _) in fx.mappings.items():
        catalog[name] = AttributeGenerator(name, MAPPED, frozenset({source}), source=name)
    if fx.given_names:
        catalog["givenName"] = AttributeGenerator(
            "givenName", NAME_PART, frozenset({"gender", "nationality"}), source="given"
        )
    if fx.family_names:
        catalog["familyName"] = AttributeGenerator(
            "familyName", NAME_PART, frozenset({"nationality"}), source="family"
        )
    for name, expr in fx.composed.items():
        deps = frozenset(ref.field for ref in expr.field_refs())
        catalog[name] = AttributeGenerator(name, COMPOSED, deps, expr=expr)
    return catalog


@dataclass(frozen=True)
class PlanStep:
    """One node of the plan: a variable's field, or (variable None) an output attribute."""

    variable: str | None
    generator: AttributeGenerator

    @property
    def key(self) -> str:
        return self.generator.name if self.variable is None else f"{self.variable}.{self.generator.name}"


@dataclass(frozen=True)
class GenerationPlan:
    entity_type: str
    steps: tuple[PlanStep, ...]
    attributes: tuple[str, ...]

    @property
    def field_steps(self) -> list[PlanStep]:
        return [s for s in self.steps if s.variable is not None]

    def describe(self) -> list[str]:
        lines = []
        for i, step in enumerate(self.steps, 1):
            gen = step.generator
            if step.variable is None:
                lines.append(f"{i:3d}. attribute {gen.name} = {gen.expr}")
            else:
                deps = ", ".join(sorted(gen.depends_on)) or "-"
                lines.append(f"{i:3d}. {step.key} [{gen.kind}] depends on: {deps}")
        return lines


def _find_cycle(graph: Mapping[str, list[str]]) -> list[str] | None:
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in graph}
    stack: list[str] = []

    def visit(node: str) -> list[str] | None:
        color[node] = GREY
        stack.append(node)
        for dep in graph[node]:
            if color[dep] == GREY:
                return stack[stack.index(dep):] + [dep]
            if color[dep] == WHITE:
                found = visit(dep)
                if found:
                    return found
        stack.pop()
        color[node] = BLACK
        return None

    for node in graph:
        if color[node] == WHITE:
            found = visit(node)
            if found:
                return found
    return None


def build_plan(
    model: DescriptorModel,
    catalog: Mapping[str, AttributeGenerator],
    known_generators: tuple[str, ...] = (PERSON_GENERATOR,),
) -> GenerationPlan:
    """Order every needed field and output attribute by dependency.

    Prerequisites missing from the descriptor are pulled in from the catalog
    (the entity generator always produces them); a prerequisite the catalog
    cannot produce is a :class:`MissingDependency`.  Ready nodes are taken
    independent-first, then by descriptor declaration order.
    """
    for var in model.variables:
        if var.generator_id not in known_generators:
            raise UnknownGenerator(f"variable {var.name!r} uses unknown generator {var.generator_id!r}")

    steps: dict[str, PlanStep] = {}
    deps: dict[str, list[str]] = {}
    priority: dict[str, int] = {}
    seq: dict[str, int] = {}

    def add_field(variable: str, name: str, prio: int, needed_by: str) -> str:
        key = f"{variable}.{name}"
        if key in steps:
            priority[key] = min(priority[key], prio)
            return key
        gen = catalog.get(name)
        if gen is None:
            if needed_by.startswith("attribute"):
                raise UnknownGenerator(f"{needed_by} references {key}, which no generator provides")
            raise MissingDependency(f"{needed_by} requires {name!r}, which the catalog does not provide")
        steps[key] = PlanStep(variable, gen)
        priority[key] = prio
        seq[key] = len(seq)
        deps[key] = []
        for dep in sorted(gen.depends_on):
            deps[key].append(add_field(variable, dep, prio, f"{gen.kind} generator {name!r}"))
        return key

    for index, attr in enumerate(model.attributes):
        field_keys = [
            add_field(ref.variable, ref.field, index, f"attribute {attr.name!r}")
            for ref in attr.source.field_refs()
        ]
        out = PlanStep(None, AttributeGenerator(attr.name, COMPOSED, frozenset(field_keys), expr=attr.source))
        key = "@" + attr.name
        steps[key] = out
        deps[key] = field_keys
        priority[key] = index
        seq[key] = len(seq)

    # propagate attribute priority down to prerequisites
    changed = True
    while changed:
        changed = False
        for key in steps:
            for dep in deps[key]:
                if priority[key] < priority[dep]:
                    priority[dep] = priority[key]
                    changed = True

    cycle = _find_cycle(deps)
    if cycle:
        raise CyclicDependency(cycle)

    tier: dict[str, int] = {}

    def tier_of(key: str) -> int:
        if key not in tier:
            own = 1 if steps[key].generator.kind in DEPENDENT_KINDS else 0
            tier[key] = max([own] + [tier_of(d) for d in deps[key]])
        return tier[key]

    dependents: dict[str, list[str]] = {k: [] for k in steps}
    pending = {k: len(v) for k, v in deps.items()}
    for key, ds in deps.items():
        for d in ds:
            dependents[d].append(key)

    def rank(key: str) -> tuple:
        return (tier_of(key), priority[key], steps[key].variable is None, seq[key])

    ready = [(rank(k), k) for k, n in pending.items() if n == 0]
    heapq.heapify(ready)
    ordered: list[PlanStep] = []
    while ready:
        _, key = heapq.heappop(ready)
        ordered.append(steps[key])
        for nxt in dependents[key]:
            pending[nxt] -= 1
            if pending[nxt] == 0:
                heapq.heappush(ready, (rank(nxt), nxt))
    return GenerationPlan(
        entity_type=model.entity_type,
        steps=tuple(ordered),
        attributes=tuple(a.name for a in model.attributes),
    )


def draw_categorical(dist: CategoricalDistribution, stream: RandomStream) -> str:
    """Draw ``r`` uniform in ``[0, total)`` and return the first category with cumulative > r."""
    return dist.locate(stream.below(dist.total_weight))


Step = Callable[[dict, dict, RandomStream], str]


def _compile_step(step: PlanStep, fx: Fixtures) -> Step:
    gen = step.generator
    name, kind = gen.name, gen.kind
    var = step.variable

    if var is None:
        expr = gen.expr

        def output(values: dict, bindings: dict, stream: RandomStream) -> str:
            return evaluate_script(expr, bindings)

        return output

    if kind == INDEPENDENT:
        dist = fx.tables.get(gen.source)
        if dist is None:
            raise FixtureMissing(f"no weight table loaded for {name!r}")
        return lambda values, bindings, stream: draw_categorical(dist, stream)

    if kind in (AGE_KEYED_KIND, AGE_GENDER_KEYED_KIND):
        grouped = fx.grouped.get(gen.source)
        if grouped is None:
            raise FixtureMissing(f"no grouped weight tables loaded for {name!r}")
        if kind == AGE_KEYED_KIND:

            def by_age(values: dict, bindings: dict, stream: RandomStream) -> str:
                return draw_categorical(grouped.groups[age_bucket(int(values["age"]))], stream)

            return by_age

        def by_age_gender(values: dict, bindings: dict, stream: RandomStream) -> str:
            return draw_categorical(grouped.get(age_bucket(int(values["age"])), values["gender"]), stream)

        return by_age_gender

    if kind == MAPPED:
        if name not in fx.mappings:
            raise FixtureMissing(f"no mapping file loaded for {name!r}")
        source, mapping = fx.mappings[name]

        def mapped(values: dict, bindings: dict, stream: RandomStream) -> str:
            try:
                return mapping[values[source]]
            except KeyError:
                raise FixtureMissing(f"no {name} mapping for {source} {values[source]!r}") from None

        return mapped

    if kind == NAME_PART:
        if gen.source == "given":
            return lambda values, bindings, stream: draw_categorical(
                fx.given_name_table(values["nationality"], values["gender"]), stream
            )
        return lambda values, bindings, stream: draw_categorical(
            fx.family_name_table(values["nationality"]), stream
        )

    if kind == COMPOSED:
        expr = gen.expr
        return lambda values, bindings, stream: evaluate_script(expr, {SELF: values})

    raise FixtureMissing(f"generator {name!r} has unsupported kind {kind!r}")


class _Runner:
    def __init__(self, plan: GenerationPlan, fx: Fixtures):
        self.plan = plan
        self.compiled = [(s.variable, s.generator.name, _compile_step(s, fx)) for s in plan.steps]

    def record(self, index: int, master_seed: int) -> Record:
        stream = RandomStream(master_seed, index)
        bindings: dict[str, dict] = {}
        outputs: dict[str, str] = {}
        for variable, name, fn in self.compiled:
            if variable is None:
                outputs[name] = fn(outputs, bindings, stream)
            else:
                values = bindings.get(variable)
                if values is None:
                    values = bindings[variable] = {}
                values[name] = fn(values, bindings, stream)
        return {name: outputs[name] for name in self.plan.attributes}

    def chunk(self, start: int, stop: int, master_seed: int) -> list[Record]:
        return [self.record(i, master_seed) for i in range(start, stop)]


def generate_record(plan: GenerationPlan, index: int, master_seed: int, fixtures: Fixtures) -> Record:
    return _Runner(plan, fixtures).record(index, master_seed)


def generate_dataset(
    plan: GenerationPlan,
    count: int,
    master_seed: int,
    fixtures: Fixtures,
    threads: int = 1,
    chunk_size: int = 2048,
) -> Iterator[Record]:
    """Yield records ``0 .. count-1`` in order.

    With ``threads > 1`` index ranges are generated concurrently and
    reassembled in order; the output is identical to a sequential run.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    runner = _Runner(plan, fixtures)
    if threads <= 1:
        for i in range(count):
            yield runner.record(i, master_seed)
        return
    starts = iter(range(0, count, chunk_size))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        window: deque = deque()

        def submit_next() -> None:
            start = next(starts, None)
            if start is not None:
                window.append(pool.submit(runner.chunk, start, min(start + chunk_size, count), master_seed))

        for _ in range(threads * 2):
            submit_next()
        while window:
            records = window.popleft().result()
            submit_next()
            yield from records
