"""Action description language core: fluents, states, events and the executor.

A :class:`Context` bundles fluents, events (actions and exogenous events with
trigger formulas and effects), an initial state, a strict priority order and
a per-cascade step budget. :func:`run` executes a ranked :class:`Sequence`
of actions against a context and returns the unique :class:`Trace`.

Trigger formulas are compiled to CNF clause matrices once per context so
the per-step work is a couple of array kernels (see :mod:`arglts.kernels`).
:func:`validate_trace` replays the path definition literally with
:func:`evaluate` and plain Python sets, independently of that compiled path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Mapping

import numpy as np

from . import kernels
from .errors import BudgetError, ConflictError, DomainError

ACTION = "action"
EXOGENOUS = "exogenous"


# --------------------------------------------------------------------------
# fluents, literals, formulas
# --------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Fluent:
    kind: str
    args: tuple[str, ...]

    def __str__(self):
        return f"{self.kind}({','.join(self.args)})"


@dataclass(frozen=True)
class Literal:
    fluent: Fluent
    positive: bool = True

    def __invert__(self) -> "Literal":
        return Literal(self.fluent, not self.positive)

    def __str__(self):
        return str(self.fluent) if self.positive else f"-{self.fluent}"


@dataclass(frozen=True)
class Lit:
    literal: Literal


@dataclass(frozen=True)
class And:
    parts: tuple = ()


@dataclass(frozen=True)
class Or:
    parts: tuple = ()


@dataclass(frozen=True)
class Not:
    part: Any


TOP = And(())
BOTTOM = Or(())


def pos(f: Fluent) -> Lit:
    return Lit(Literal(f, True))


def neg(f: Fluent) -> Lit:
    return Lit(Literal(f, False))


def conj(*parts) -> And:
    return And(tuple(parts))


def disj(*parts) -> Or:
    return Or(tuple(parts))


def formula_fluents(formula) -> set[Fluent]:
    if isinstance(formula, Lit):
        return {formula.literal.fluent}
    if isinstance(formula, Not):
        return formula_fluents(formula.part)
    out: set[Fluent] = set()
    for p in formula.parts:
        out |= formula_fluents(p)
    return out


def _nnf(formula, negate=False):
    if isinstance(formula, Lit):
        return Lit(~formula.literal) if negate else formula
    if isinstance(formula, Not):
        return _nnf(formula.part, not negate)
    if isinstance(formula, And):
        parts = tuple(_nnf(p, negate) for p in formula.parts)
        return Or(parts) if negate else And(parts)
    if isinstance(formula, Or):
        parts = tuple(_nnf(p, negate) for p in formula.parts)
        return And(parts) if negate else Or(parts)
    raise TypeError(f"not a state formula: {formula!r}")


def _cnf(formula) -> list[frozenset]:
    if isinstance(formula, Lit):
        return [frozenset([formula.literal])]
    if isinstance(formula, And):
        clauses = []
        for p in formula.parts:
            clauses.extend(_cnf(p))
        return clauses
    # Or: distribute over the conjunct lists of each disjunct
    clauses = [frozenset()]
    for p in formula.parts:
        sub = _cnf(p)
        clauses = [a | b for a in clauses for b in sub]
    return clauses


def to_cnf(formula) -> list[frozenset]:
    """Clauses (sets of literals) whose conjunction is equivalent to ``formula``.

    Tautological clauses are dropped; an empty clause stands for falsity.
    """
    result = []
    seen = set()
    for clause in _cnf(_nnf(formula)):
        if any(~lit in clause for lit in clause):
            continue
        if clause not in seen:
            seen.add(clause)
            result.append(clause)
    return result


# --------------------------------------------------------------------------
# states
# --------------------------------------------------------------------------


class FluentSpace:
    """An ordered, fixed universe of fluents with an index lookup."""

    __slots__ = ("fluents", "index")

    def __init__(self, fluents: Iterable[Fluent]):
        self.fluents = tuple(fluents)
        self.index = {f: i for i, f in enumerate(self.fluents)}
        if len(self.index) != len(self.fluents):
            raise DomainError("duplicate fluent in fluent space")

    def __len__(self):
        return len(self.fluents)

    def __contains__(self, f):
        return f in self.index

    def __eq__(self, other):
        return isinstance(other, FluentSpace) and self.fluents == other.fluents

    def __hash__(self):
        return hash(self.fluents)


class State:
    """A complete, coherent assignment of truth values to a fluent space."""

    __slots__ = ("space", "values", "_hash")

    def __init__(self, space: FluentSpace, values):
        arr = np.array(values, dtype=np.uint8)
        if arr.shape != (len(space),):
            raise DomainError("state vector does not match the fluent space")
        if arr.size and arr.max() > 1:
            raise DomainError("state values must be 0/1")
        arr.setflags(write=False)
        self.space = space
        self.values = arr
        self._hash = None

    @classmethod
    def from_mapping(cls, space: FluentSpace, assignment: Mapping[Fluent, bool]) -> "State":
        missing = [f for f in space.fluents if f not in assignment]
        if missing:
            raise DomainError(f"state is incomplete: no value for {missing[0]}")
        extra = [f for f in assignment if f not in space]
        if extra:
            raise DomainError(f"unknown fluent {extra[0]}")
        return cls(space, [1 if assignment[f] else 0 for f in space.fluents])

    def __getitem__(self, f: Fluent) -> bool:
        try:
            return bool(self.values[self.space.index[f]])
        except KeyError:
            raise DomainError(f"unknown fluent {f}") from None

    def get(self, f: Fluent, default=None):
        i = self.space.index.get(f)
        return default if i is None else bool(self.values[i])

    def holds(self, lit: Literal) -> bool:
        return self[lit.fluent] == lit.positive

    def literals(self) -> frozenset[Literal]:
        return frozenset(Literal(f, bool(v)) for f, v in zip(self.space.fluents, self.values))

    def as_dict(self) -> dict[Fluent, bool]:
        return {f: bool(v) for f, v in zip(self.space.fluents, self.values)}

    def replace(self, updates: Mapping[Fluent, bool]) -> "State":
        arr = self.values.copy()
        for f, v in updates.items():
            if f not in self.space:
                raise DomainError(f"unknown fluent {f}")
            arr[self.space.index[f]] = 1 if v else 0
        return State(self.space, arr)

    def __eq__(self, other):
        return (
            isinstance(other, State)
            and self.space == other.space
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.space, self.values.tobytes()))
        return self._hash

    def __repr__(self):
        on = [str(f) for f, v in zip(self.space.fluents, self.values) if v]
        return f"State({{{', '.join(on)}}})"


def evaluate(state: State, formula) -> bool:
    """Classical truth of ``formula`` in ``state``."""
    if isinstance(formula, Lit):
        return state.holds(formula.literal)
    if isinstance(formula, And):
        return all(evaluate(state, p) for p in formula.parts)
    if isinstance(formula, Or):
        return any(evaluate(state, p) for p in formula.parts)
    if isinstance(formula, Not):
        return not evaluate(state, formula.part)
    raise TypeError(f"not a state formula: {formula!r}")


# --------------------------------------------------------------------------
# events, contexts
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Event:
    id: Hashable
    kind: str
    pre: Any = TOP
    tri: Any = TOP
    eff: frozenset[Literal] = frozenset()

    def __post_init__(self):
        if self.kind not in (ACTION, EXOGENOUS):
            raise DomainError(f"event kind must be action or exogenous, got {self.kind!r}")
        eff = frozenset(self.eff)
        object.__setattr__(self, "eff", eff)
        if any(~lit in eff for lit in eff):
            raise DomainError(f"event {self.id} has incoherent effects")
        if self.kind == EXOGENOUS and self.pre != self.tri:
            raise DomainError(f"exogenous event {self.id} must have pre == tri")
        if self.kind == ACTION and to_cnf(self.pre):
            raise DomainError(f"action {self.id} must have a trivially true precondition")

    @classmethod
    def exogenous(cls, id, tri, eff) -> "Event":
        return cls(id, EXOGENOUS, tri, tri, frozenset(eff))

    @classmethod
    def action(cls, id, eff) -> "Event":
        return cls(id, ACTION, TOP, TOP, frozenset(eff))

    @property
    def is_action(self):
        return self.kind == ACTION


def default_horizon(n_fluents: int) -> int:
    return 16 * (n_fluents + 1)


class Context:
    """Events, fluents, initial state, priority order and cascade budget.

    ``priority`` holds ``(dominant id, dominated id)`` pairs; its transitive
    closure must be irreflexive. ``info`` is free-form metadata carried into
    traces (transform kind, source graph).
    """

    def __init__(
        self,
        fluents: FluentSpace,
        events: Iterable[Event],
        initial_state: State,
        priority: Iterable[tuple[Hashable, Hashable]] = (),
        horizon: int | None = None,
        info: Mapping[str, Any] | None = None,
    ):
        self.fluents = fluents
        self.events = tuple(events)
        self.by_id = {e.id: e for e in self.events}
        if len(self.by_id) != len(self.events):
            raise DomainError("duplicate event id")
        if initial_state.space != fluents:
            raise DomainError("initial state is not over the context fluents")
        self.initial_state = initial_state
        self.priority = frozenset(priority)
        self.horizon = default_horizon(len(fluents)) if horizon is None else int(horizon)
        if self.horizon < 1:
            raise DomainError("horizon must be positive")
        self.info = dict(info or {})
        for e in self.events:
            for f in formula_fluents(e.tri) | formula_fluents(e.pre) | {l.fluent for l in e.eff}:
                if f not in fluents:
                    raise DomainError(f"event {e.id} mentions unknown fluent {f}")
        self.actions = tuple(e for e in self.events if e.is_action)
        self.exogenous = tuple(e for e in self.events if not e.is_action)
        self._compile()

    def _compile(self):
        exo = self.exogenous
        self._exo_pos = {e.id: i for i, e in enumerate(exo)}
        rows, owners = [], []
        for i, e in enumerate(exo):
            for clause in to_cnf(e.tri):
                lits = sorted(2 * self.fluents.index[l.fluent] + int(l.positive) for l in clause)
                rows.append(lits)
                owners.append(i)
        width = max((len(r) for r in rows), default=1) or 1
        mat = np.full((len(rows), width), -1, dtype=np.int32)
        for r, lits in enumerate(rows):
            mat[r, : len(lits)] = lits
        self._clauses = mat
        self._owners = np.array(owners, dtype=np.int32)

        # closure over all events, for validation; exogenous block for selection
        all_pos = {e.id: i for i, e in enumerate(self.events)}
        try:
            rows_i = [all_pos[a] for a, _ in self.priority]
            cols_i = [all_pos[b] for _, b in self.priority]
        except KeyError as exc:
            raise DomainError(f"priority pair names an unknown event {exc.args[0]}") from None
        adj = np.zeros((len(self.events), len(self.events)), dtype=np.bool_)
        adj[rows_i, cols_i] = True
        closure = kernels.transitive_closure(adj)
        if closure.size and np.any(np.diag(closure)):
            bad = self.events[int(np.nonzero(np.diag(closure))[0][0])].id
            raise DomainError(f"priority relation is not a strict partial order (cycle through {bad})")
        idx = np.array([all_pos[e.id] for e in exo], dtype=np.int64)
        self._dominance = np.ascontiguousarray(closure[np.ix_(idx, idx)]) if len(idx) else np.zeros((0, 0), np.bool_)
        self._closure = closure
        self._all_pos = all_pos

        nf = len(self.fluents)
        self._set = np.zeros((len(self.events), nf), dtype=np.bool_)
        self._clear = np.zeros((len(self.events), nf), dtype=np.bool_)
        for i, e in enumerate(self.events):
            for lit in e.eff:
                (self._set if lit.positive else self._clear)[i, self.fluents.index[lit.fluent]] = True

    def dominates(self, a: Hashable, b: Hashable) -> bool:
        """Whether ``a`` strictly precedes ``b`` in the closed priority order."""
        return bool(self._closure[self._all_pos[a], self._all_pos[b]])

    def event(self, eid: Hashable) -> Event:
        try:
            return self.by_id[eid]
        except KeyError:
            raise DomainError(f"unknown event {eid}") from None

    # vector-level helpers used by the executor

    def _triggered_mask(self, values: np.ndarray) -> np.ndarray:
        return kernels.triggered(values, self._clauses, self._owners, len(self.exogenous))

    def _effects(self, event_ids: Iterable[Hashable]):
        rows = [self._all_pos[e] for e in event_ids]
        s = self._set[rows].any(axis=0)
        c = self._clear[rows].any(axis=0)
        return s, c


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------


def _check_state(context: Context, state: State):
    if state.space != context.fluents:
        raise DomainError("state is not over the context fluents")


def triggered_exogenous(context: Context, state: State) -> set[Event]:
    _check_state(context, state)
    mask = context._triggered_mask(state.values)
    return {context.exogenous[i] for i in np.nonzero(mask)[0]}


def is_quiescent(context: Context, state: State) -> bool:
    _check_state(context, state)
    return not context._triggered_mask(state.values).any()


def _select_ids(context: Context, values: np.ndarray, due_actions) -> list:
    mask = context._triggered_mask(values)
    if mask.any():
        chosen = kernels.maximal(mask, context._dominance)
        return [context.exogenous[i].id for i in np.nonzero(chosen)[0]]
    return list(due_actions)


def select_events(context: Context, state: State, due_actions: Iterable[Event] = ()) -> set[Event]:
    """The event set fired from ``state``.

    Triggered exogenous events win over actions; among them, only those not
    dominated by another triggered event are kept.
    """
    _check_state(context, state)
    due = [e.id if isinstance(e, Event) else e for e in due_actions]
    for eid in due:
        if not context.event(eid).is_action:
            raise DomainError(f"{eid} is not an action")
    ids = _select_ids(context, state.values, due)
    if ids:
        s, c = context._effects(ids)
        if np.any(s & c):
            raise ConflictError(_conflict_message(context, ids, s & c))
    return {context.by_id[i] for i in ids}


def _conflict_message(context, ids, clash):
    f = context.fluents.fluents[int(np.nonzero(clash)[0][0])]
    return f"events {sorted(map(str, ids))} disagree on {f}"


def apply_effects(state: State, events: Iterable[Event]) -> State:
    """Successor state: effect literals override, everything else persists."""
    events = list(events)
    setv: dict[Fluent, bool] = {}
    for e in events:
        for lit in e.eff:
            if setv.get(lit.fluent, lit.positive) != lit.positive:
                raise ConflictError(f"complementary effects on {lit.fluent}")
            setv[lit.fluent] = lit.positive
    return state.replace(setv)


@dataclass(frozen=True)
class Sequence:
    """Ranked actions; equal ranks fire together."""

    ranked_actions: frozenset = frozenset()

    def __post_init__(self):
        ra = frozenset((a, r) for a, r in self.ranked_actions)
        for _, r in ra:
            if isinstance(r, bool) or not isinstance(r, int) or r < 0:
                raise DomainError(f"rank must be a non-negative integer, got {r!r}")
        object.__setattr__(self, "ranked_actions", ra)

    def rank_groups(self) -> list[list]:
        groups: dict[int, set] = {}
        for a, r in self.ranked_actions:
            groups.setdefault(r, set()).add(a)
        return [sorted(groups[r], key=str) for r in sorted(groups)]

    def sorted_pairs(self) -> list[tuple]:
        return sorted(self.ranked_actions, key=lambda p: (p[1], str(p[0])))


@dataclass(frozen=True)
class Setting:
    sequence: Sequence
    context: Context

    def __post_init__(self):
        for a, _ in self.sequence.ranked_actions:
            e = self.context.by_id.get(a)
            if e is None:
                raise DomainError(f"sequence names unknown action {a}")
            if not e.is_action:
                raise DomainError(f"sequence entry {a} is not an action")


@dataclass(frozen=True)
class Trace:
    """States S(0..N), event sets E(0..N-1) and the quiescent time indices."""

    states: tuple[State, ...]
    event_sets: tuple[frozenset, ...]
    argumentative_marks: tuple[int, ...]
    cascade_lengths: tuple[int, ...] = ()
    context: Context | None = field(default=None, compare=False, repr=False)
    sequence: Sequence | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.states) != len(self.event_sets) + 1:
            raise DomainError("trace needs exactly one more state than event sets")

    @property
    def final_state(self) -> State:
        return self.states[-1]

    def __len__(self):
        return len(self.event_sets)


class Executor:
    """Incremental runner: fire an action group, then settle to quiescence.

    Backs both :func:`run` and the interactive stepping session.
    """

    def __init__(self, context: Context):
        self.context = context
        self._values = [context.initial_state.values]
        self._events: list[frozenset] = []
        self._marks: list[int] = []
        self._cascades: list[int] = []
        self._pairs: list[tuple] = []
        self._rank = 0
        steps = self._settle()
        if steps:
            self._cascades.append(steps)

    @property
    def time(self) -> int:
        return len(self._events)

    @property
    def state(self) -> State:
        return State(self.context.fluents, self._values[-1])

    def _step(self, ids):
        s, c = self.context._effects(ids)
        if np.any(s & c):
            raise ConflictError(_conflict_message(self.context, ids, s & c))
        cur = self._values[-1]
        nxt = ((cur.astype(np.bool_) | s) & ~c).astype(np.uint8)
        self._events.append(frozenset(ids))
        self._values.append(nxt)

    def _settle(self) -> int:
        ctx = self.context
        steps = 0
        while True:
            mask = ctx._triggered_mask(self._values[-1])
            if not mask.any():
                self._marks.append(self.time)
                return steps
            if steps >= ctx.horizon:
                raise BudgetError(
                    f"no quiescent state within {ctx.horizon} steps after t={self.time - steps}"
                )
            chosen = kernels.maximal(mask, ctx._dominance)
            self._step([ctx.exogenous[i].id for i in np.nonzero(chosen)[0]])
            steps += 1

    def fire(self, action_ids: Iterable[Hashable]) -> int:
        """Fire one rank group simultaneously and return the cascade length."""
        ids = list(dict.fromkeys(action_ids))
        if not ids:
            return 0
        for a in ids:
            if not self.context.event(a).is_action:
                raise DomainError(f"{a} is not an action")
        self._step(ids)
        self._pairs.extend((a, self._rank) for a in ids)
        self._rank += 1
        steps = self._settle()
        self._cascades.append(steps)
        return steps

    def trace(self) -> Trace:
        sp = self.context.fluents
        return Trace(
            states=tuple(State(sp, v) for v in self._values),
            event_sets=tuple(self._events),
            argumentative_marks=tuple(self._marks),
            cascade_lengths=tuple(self._cascades),
            context=self.context,
            sequence=Sequence(frozenset(self._pairs)),
        )


def run(setting: Setting) -> Trace:
    """Execute the unique valid path of ``setting``."""
    ex = Executor(setting.context)
    for group in setting.sequence.rank_groups():
        ex.fire(group)
    tr = ex.trace()
    return Trace(tr.states, tr.event_sets, tr.argumentative_marks, tr.cascade_lengths,
                 setting.context, setting.sequence)


# --------------------------------------------------------------------------
# independent validator
# --------------------------------------------------------------------------


def _closure_pairs(pairs) -> set[tuple]:
    succ: dict[Hashable, set] = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
    closed = set()
    for start in list(succ):
        stack, seen = list(succ[start]), set()
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(succ.get(n, ()))
        closed.update((start, n) for n in seen)
    return closed


def validate_trace(trace: Trace, context: Context, sequence: Sequence | None = None) -> list[str]:
    """Replay the valid-path conditions on ``trace``; return human-readable violations.

    Uses :func:`evaluate` over literal sets and a DFS closure of the priority
    pairs, sharing nothing with the compiled executor path.
    """
    problems = []
    dom = _closure_pairs(context.priority)
    if any(a == b for a, b in dom):
        problems.append("priority closure is reflexive")
    exo = [e for e in context.events if not e.is_action]
    lit_universe = {Literal(f, v) for f in context.fluents.fluents for v in (True, False)}
    if trace.states[0] != context.initial_state:
        problems.append("S(0) differs from the initial state")
    for t, ev_ids in enumerate(trace.event_sets):
        s = trace.states[t]
        lits = s.literals()
        if any(~l in lits for l in lits) or len(lits) != len(context.fluents):
            problems.append(f"t={t}: S(t) is not a state")
        events = [context.by_id[e] for e in ev_ids]
        for e in events:
            if not evaluate(s, e.pre):
                problems.append(f"t={t}: precondition of {e.id} fails")
        for e, f in itertools.permutations(ev_ids, 2):
            if (e, f) in dom:
                problems.append(f"t={t}: {e} dominates {f} inside E(t)")
        fired = [e for e in exo if evaluate(s, e.tri)]
        for e in fired:
            if e.id not in ev_ids and not any((f, e.id) in dom for f in ev_ids):
                problems.append(f"t={t}: triggered {e.id} neither fired nor dominated")
        if any(e.is_action for e in events) and fired:
            problems.append(f"t={t}: action fired while exogenous events were triggered")
        if not events:
            problems.append(f"t={t}: empty event set")
        effects = set()
        for e in events:
            effects |= e.eff
        expected = {l for l in lits if ~l not in effects} | {l for l in lit_universe if l in effects}
        if expected != trace.states[t + 1].literals():
            problems.append(f"t={t}: S(t+1) does not follow from S(t) and E(t)")
    if sequence is not None:
        fire_times: dict[tuple, list[int]] = {}
        allowed = {a for a, _ in sequence.ranked_actions}
        for t, ev_ids in enumerate(trace.event_sets):
            for e in ev_ids:
                if context.by_id[e].is_action and e not in allowed:
                    problems.append(f"t={t}: action {e} not in the sequence")
        # match each ranked action to its occurrence in rank order
        occurrences: dict[Hashable, list[int]] = {}
        for t, ev_ids in enumerate(trace.event_sets):
            for e in ev_ids:
                if context.by_id[e].is_action:
                    occurrences.setdefault(e, []).append(t)
        for a, r in sorted(sequence.ranked_actions, key=lambda p: p[1]):
            times = occurrences.get(a, [])
            if not times:
                problems.append(f"ranked action ({a},{r}) never fired")
                continue
            fire_times[(a, r)] = [times.pop(0)]
        pairs = list(fire_times.items())
        for (ka, ta), (kb, tb) in itertools.permutations(pairs, 2):
            if ka[1] < kb[1] and not ta[0] < tb[0]:
                problems.append(f"{ka} fired no earlier than {kb}")
            if ka[1] == kb[1] and ta[0] != tb[0]:
                problems.append(f"{ka} and {kb} share a rank but fired apart")
    last = trace.states[-1]
    if any(evaluate(last, e.tri) for e in exo):
        problems.append("final state is not quiescent")
    return problems
