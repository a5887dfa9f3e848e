"""Argumentation-level views over executed traces.

Reads labellings and induced graphs off states, checks the complete and
stable argumentative-state conditions, verifies traces against the
brute-force oracle, synthesizes a dialogue for a target labelling and maps
enunciation orders to outcomes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .aaf import AAF, Labelling, is_complete_labelling
from .adl import Fluent, Setting, Sequence, State, Trace, run
from .errors import CapacityError, DomainError, IntegrityError
from .transform import TransformKind, build_context, enunciate

ATLAS_LIMIT = 6


def _arguments(state: State) -> list[str]:
    return [f.args[0] for f in state.space.fluents if f.kind == "p"]


def _attacks(state: State) -> list[tuple[str, str]]:
    return [f.args for f in state.space.fluents if f.kind == "cA" and state.get(f)]


def _flag(state: State, kind: str, x: str) -> bool:
    return bool(state.get(Fluent(kind, (x,)), False))


def present_arguments(state: State) -> list[str]:
    return [x for x in _arguments(state) if _flag(state, "p", x)]


def _sigma_c_conditions(state: State) -> bool:
    args = _arguments(state)
    attackers: dict[str, list[str]] = {x: [] for x in args}
    for y, x in _attacks(state):
        attackers[x].append(y)
    p = {x: _flag(state, "p", x) for x in args}
    i = {x: _flag(state, "i", x) for x in args}
    o = {x: _flag(state, "o", x) for x in args}
    for x in args:
        lhs_in = p[x] and i[x] and not o[x]
        rhs_in = p[x] and all((not i[y]) and o[y] for y in attackers[x])
        if lhs_in != rhs_in:
            return False
        lhs_out = p[x] and (not i[x]) and o[x]
        rhs_out = p[x] and any(p[y] and i[y] and not o[y] for y in attackers[x])
        if lhs_out != rhs_out:
            return False
    return True


def is_sigma_c_state(state: State) -> bool:
    """Complete-semantics argumentative state; in LELU states every last flag must be clear."""
    if any(state.get(f) for f in state.space.fluents if f.kind == "l"):
        return False
    return _sigma_c_conditions(state)


def is_sigma_s_state(state: State) -> bool:
    """Stable-semantics argumentative state: complete, and no present argument undecided."""
    if not is_sigma_c_state(state):
        return False
    for x in present_arguments(state):
        if _flag(state, "i", x) == _flag(state, "o", x):
            return False
    return True


def associated_labelling(state: State) -> Labelling:
    ins, outs, undecs = set(), set(), set()
    for x in present_arguments(state):
        i, o = _flag(state, "i", x), _flag(state, "o", x)
        if i and o:
            raise IntegrityError(f"argument {x} is both in and out")
        (ins if i else outs if o else undecs).add(x)
    return Labelling(frozenset(ins), frozenset(outs), frozenset(undecs))


def associated_graph(state: State, af: AAF) -> AAF:
    """Subgraph of ``af`` induced by the present arguments, restricted to live attack fluents."""
    pres = set(present_arguments(state))
    live = {tuple(p) for p in _attacks(state)}
    args = tuple(a for a in af.arguments if a in pres)
    return AAF(args, frozenset(p for p in af.attacks if p[0] in pres and p[1] in pres and p in live))


@dataclass(frozen=True)
class ArgumentativeStateReport:
    time: int
    is_sigma_c: bool
    is_sigma_s: bool
    labelling: Labelling
    associated_graph: AAF


def state_report(state: State, af: AAF, time: int) -> ArgumentativeStateReport:
    return ArgumentativeStateReport(
        time=time,
        is_sigma_c=is_sigma_c_state(state),
        is_sigma_s=is_sigma_s_state(state),
        labelling=associated_labelling(state),
        associated_graph=associated_graph(state, af),
    )


@dataclass
class CorrectnessReport:
    ok: bool
    checked: list[int] = field(default_factory=list)
    violation: tuple[int, str] | None = None

    def as_dict(self):
        return {
            "ok": self.ok,
            "checked": list(self.checked),
            "violation": None if self.violation is None else {"t": self.violation[0], "reason": self.violation[1]},
        }


def check_correctness(trace: Trace, af: AAF) -> CorrectnessReport:
    """At every quiescent index, the associated labelling must be complete for the associated graph."""
    report = CorrectnessReport(ok=True)
    for t in trace.argumentative_marks:
        state = trace.states[t]
        try:
            lab = associated_labelling(state)
        except IntegrityError as exc:
            report.ok, report.violation = False, (t, str(exc))
            return report
        graph = associated_graph(state, af)
        report.checked.append(t)
        if not is_complete_labelling(graph, lab):
            report.ok = False
            report.violation = (t, f"labelling {lab} is not complete for the associated graph")
            return report
    return report


def _order_to_sequence(groups: Iterable[Iterable[str]]) -> Sequence:
    return Sequence(frozenset((enunciate(x), r) for r, g in enumerate(groups) for x in g))


def final_labelling(af: AAF, groups, kind=TransformKind.BASE, context=None) -> Labelling:
    ctx = context if context is not None else build_context(af, kind)
    return associated_labelling(run(Setting(_order_to_sequence(groups), ctx)).final_state)


def synthesize_sequence(af: AAF, target: Labelling, verify: bool = True) -> Sequence:
    """A LELU sequence whose final labelling is ``target``: OUT first, then IN, then UNDEC."""
    if target.universe != frozenset(af.arguments) or not is_complete_labelling(af, target):
        raise DomainError("target is not a complete labelling of the framework")
    groups = []
    for part in (target.out_set, target.in_set, target.undec_set):
        g = [x for x in af.arguments if x in part]
        if g:
            groups.append(g)
    seq = _order_to_sequence(groups)
    if verify:
        got = associated_labelling(run(Setting(seq, build_context(af, TransformKind.LELU))).final_state)
        if got != target:
            raise IntegrityError(f"synthesized sequence reached {got}, expected {target}")
    return seq


def ordered_partitions(items: list[str]):
    """Every ordered set partition of ``items``; blocks keep the input order."""
    if not items:
        yield ()
        return
    n = len(items)
    for size in range(1, n + 1):
        for first in itertools.combinations(range(n), size):
            block = tuple(items[i] for i in first)
            rest = [items[i] for i in range(n) if i not in first]
            for tail in ordered_partitions(rest):
                yield (block,) + tail


def random_ordered_partition(items: list[str], rng: np.random.Generator) -> tuple[tuple[str, ...], ...]:
    if not items:
        return ()
    order = [items[i] for i in rng.permutation(len(items))]
    blocks, current = [], [order[0]]
    for x in order[1:]:
        if rng.random() < 0.5:
            blocks.append(current)
            current = []
        current.append(x)
    blocks.append(current)
    pos = {a: i for i, a in enumerate(items)}
    return tuple(tuple(sorted(b, key=pos.__getitem__)) for b in blocks)


@dataclass
class Atlas:
    transform_kind: TransformKind
    af: AAF
    entries: dict[tuple[tuple[str, ...], ...], Labelling]

    def image(self) -> set[Labelling]:
        return set(self.entries.values())

    def sorted_items(self):
        return sorted(self.entries.items(), key=lambda kv: (len(kv[0]), kv[0]))


def atlas(af: AAF, kind=TransformKind.BASE, enumeration="all-orders", limit: int = ATLAS_LIMIT) -> Atlas:
    """Final labelling of every enumerated enunciation order.

    ``enumeration`` is ``"all-orders"`` or ``("sampled", n, seed)``.
    """
    kind = TransformKind.parse(kind)
    items = list(af.arguments)
    if enumeration == "all-orders":
        if len(items) > limit:
            raise CapacityError(f"all-orders atlas limited to {limit} arguments, got {len(items)}")
        orders = ordered_partitions(items)
    else:
        try:
            tag, n, seed = enumeration
        except (TypeError, ValueError):
            raise DomainError(f"bad atlas enumeration {enumeration!r}") from None
        if tag != "sampled":
            raise DomainError(f"bad atlas enumeration {enumeration!r}")
        rng = np.random.default_rng(seed)
        orders = dict.fromkeys(random_ordered_partition(items, rng) for _ in range(int(n)))
    ctx = build_context(af, kind)
    entries = {order: final_labelling(af, order, context=ctx) for order in orders}
    return Atlas(kind, af, entries)
