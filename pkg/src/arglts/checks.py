"""Runtime invariant checks over seeded random (or given) instances.

Each run is checked for: no argument both in and out; quiescence coinciding
with the complete argumentative-state predicate; bounded cascades; complete
final labellings (against the brute-force oracle); and byte-identical
re-runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .aaf import AAF, enumerate_complete_labellings
from .adl import Fluent, Setting, is_quiescent, run
from .analysis import (
    associated_graph,
    associated_labelling,
    check_correctness,
    is_sigma_c_state,
    ordered_partitions,
    random_ordered_partition,
)
from .errors import ArgLtsError, BudgetError
from .io_formats import emit_trace
from .transform import TransformKind, build_context, enunciate
from .adl import Sequence

CHECKS = ("in_and_out", "quiescence", "termination", "completeness", "determinism")

ARG_NAMES = "abcdefghijklmnopqrstuvwxyz"


@dataclass
class Finding:
    check: str
    message: str
    af: AAF
    order: tuple
    transform: str
    t: int | None = None

    def as_dict(self):
        return {
            "check": self.check,
            "message": self.message,
            "transform": self.transform,
            "arguments": list(self.af.arguments),
            "attacks": [list(p) for p in self.af.sorted_attacks()],
            "order": [list(b) for b in self.order],
            "t": self.t,
        }


@dataclass
class SuiteResult:
    runs: int = 0
    max_cascade_ratio: float = 0.0
    findings: list[Finding] = field(default_factory=list)

    @property
    def ok(self):
        return not self.findings

    def failures_by_check(self) -> dict[str, int]:
        counts = {c: 0 for c in CHECKS}
        for f in self.findings:
            counts[f.check] = counts.get(f.check, 0) + 1
        return counts


def random_aaf(rng: np.random.Generator, max_args: int = 7, density: float = 0.3) -> AAF:
    n = int(rng.integers(1, max_args + 1))
    args = tuple(ARG_NAMES[:n])
    hits = rng.random((n, n)) < density
    attacks = frozenset((args[y], args[x]) for y in range(n) for x in range(n) if hits[y, x])
    return AAF(args, attacks)


def random_instances(count: int, seed: int, max_args: int = 7, density: float = 0.3):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        af = random_aaf(rng, max_args, density)
        yield af, random_ordered_partition(list(af.arguments), rng)


def order_sequence(order) -> Sequence:
    return Sequence(frozenset((enunciate(x), r) for r, block in enumerate(order) for x in block))


def check_run(af: AAF, order, kind, disabled_rules=(), oracle_cache=None, result: SuiteResult | None = None) -> list[Finding]:
    kind = TransformKind.parse(kind)
    cache = {} if oracle_cache is None else oracle_cache
    found: list[Finding] = []

    def note(check, msg, t=None):
        found.append(Finding(check, msg, af, tuple(order), kind.value, t))

    ctx = build_context(af, kind, disabled_rules=disabled_rules)
    setting = Setting(order_sequence(order), ctx)
    try:
        trace = run(setting)
    except BudgetError as exc:
        note("termination", str(exc))
        return found
    except ArgLtsError as exc:
        note("in_and_out", f"{type(exc).__name__}: {exc}")
        return found

    for t, state in enumerate(trace.states):
        for x in af.arguments:
            if state[Fluent("i", (x,))] and state[Fluent("o", (x,))]:
                note("in_and_out", f"{x} is both in and out", t)
        if is_sigma_c_state(state) != is_quiescent(ctx, state):
            note("quiescence", "quiescence and argumentative-state predicate disagree", t)

    if kind is TransformKind.BASE and trace.cascade_lengths:
        bound = 4 * len(af.arguments)
        worst = max(trace.cascade_lengths)
        if result is not None and bound:
            result.max_cascade_ratio = max(result.max_cascade_ratio, worst / bound)
        if worst > bound:
            note("termination", f"cascade of {worst} steps exceeds 4|A| = {bound}")

    report = check_correctness(trace, af)
    if not report.ok:
        note("completeness", report.violation[1], report.violation[0])
    else:
        final = trace.final_state
        graph = associated_graph(final, af)
        key = (graph.arguments, graph.attacks)
        if key not in cache:
            cache[key] = enumerate_complete_labellings(graph)
        if associated_labelling(final) not in cache[key]:
            note("completeness", "final labelling missing from the oracle's complete labellings", len(trace))

    again = run(setting)
    if emit_trace(again) != emit_trace(trace):
        note("determinism", "re-running the same setting changed the trace document")
    return found


def run_suite(instances: Iterable[tuple[AAF, tuple]], kinds=("base", "lelu"), disabled_rules=()) -> SuiteResult:
    result = SuiteResult()
    cache: dict = {}
    for af, order in instances:
        for kind in kinds:
            result.runs += 1
            result.findings += check_run(af, order, kind, disabled_rules, cache, result)
    return result


def fixed_instances(af: AAF, sample: int | None = None, seed: int = 0, limit: int = 6):
    """Orders for one graph: every ordered partition when small, else a sample."""
    items = list(af.arguments)
    if sample is None and len(items) <= limit:
        for order in ordered_partitions(items):
            yield af, order
        return
    rng = np.random.default_rng(seed)
    for _ in range(sample or 100):
        yield af, random_ordered_partition(items, rng)
