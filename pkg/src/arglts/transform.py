"""Compile an argumentation framework into an action-language context.

Two transformations are provided:

``base``
    Four exogenous update families per argument (acceptable -> undecided,
    undecided -> unacceptable, unacceptable -> undecided, undecided ->
    acceptable) ordered by rules R1, R'1, R2 and R3.

``lelu``
    "Last enunciated, last updated": a ``last`` flag set by enunciation
    splits every update into a *first* variant (flag clear) and a *last*
    variant (flag set), every first-variant event outranks every
    last-variant event, and a lowest-priority cleanup event clears any
    flag left over once nothing else can fire.

By default Δ events are generated for every ordered pair of distinct
arguments, plus self-attacks; ``prune=True`` keeps only pairs in the attack
relation. Pairs outside the relation carry an unsatisfiable trigger, so
both variants produce identical traces.
"""

from __future__ import annotations

import enum
from typing import Iterable, NamedTuple

from .aaf import AAF, Dialogue
from .adl import (
    BOTTOM,
    TOP,
    Context,
    Event,
    Fluent,
    FluentSpace,
    Literal,
    Sequence,
    State,
    conj,
    disj,
    neg,
    pos,
)
from .errors import DomainError

RULES = ("R1", "R'1", "R2", "R3")


class TransformKind(str, enum.Enum):
    BASE = "base"
    LELU = "lelu"

    @classmethod
    def parse(cls, value) -> "TransformKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown transform {value!r} (expected base or lelu)") from None


class EventLabel(NamedTuple):
    family: str
    args: tuple[str, ...]

    def __str__(self):
        return f"{self.family}({','.join(self.args)})"

    @classmethod
    def parse(cls, text: str) -> "EventLabel":
        text = text.strip()
        if not text.endswith(")") or "(" not in text:
            raise DomainError(f"malformed event label {text!r}")
        family, _, rest = text[:-1].partition("(")
        return cls(family, tuple(a for a in rest.split(",") if a))


def present(x):
    return Fluent("p", (x,))


def is_in(x):
    return Fluent("i", (x,))


def is_out(x):
    return Fluent("o", (x,))


def can_attack(y, x):
    return Fluent("cA", (y, x))


def last(x):
    return Fluent("l", (x,))


def enunciate(x) -> EventLabel:
    return EventLabel("enunciate", (x,))


def fluent_space(af: AAF, kind=TransformKind.BASE) -> FluentSpace:
    kind = TransformKind.parse(kind)
    fl = []
    for x in af.arguments:
        fl += [present(x), is_in(x), is_out(x)]
    fl += [can_attack(y, x) for y, x in af.sorted_attacks()]
    if kind is TransformKind.LELU:
        fl += [last(x) for x in af.arguments]
    return FluentSpace(fl)


def initial_state(af: AAF, kind=TransformKind.BASE) -> State:
    """Nothing present, every argument unacceptable, attack fluents true."""
    space = fluent_space(af, kind)
    values = {f: (f.kind in ("o", "cA")) for f in space.fluents}
    return State.from_mapping(space, values)


def delta_pairs(af: AAF, prune: bool = False) -> list[tuple[str, str]]:
    if prune:
        return af.sorted_attacks()
    return [(y, x) for x in af.arguments for y in af.arguments if y != x or (y, x) in af.attacks]


def _ca(af: AAF, y, x, positive=True):
    # attack fluents outside the relation do not exist; they are constantly false
    if (y, x) in af.attacks:
        f = can_attack(y, x)
        return pos(f) if positive else neg(f)
    return BOTTOM if positive else TOP


def _base_families(af: AAF, prune: bool):
    """(family, target, args, tri, eff) for the four update families."""
    out = []
    for y, x in delta_pairs(af, prune):
        tri1 = conj(pos(present(x)), pos(is_in(x)), pos(present(y)), _ca(af, y, x), neg(is_out(y)))
        out.append(("D1", x, (y, x), tri1, {Literal(is_in(x), False)}))
        tri2 = conj(pos(present(x)), neg(is_out(x)), pos(present(y)), _ca(af, y, x), pos(is_in(y)))
        out.append(("D2", x, (y, x), tri2, {Literal(is_out(x), True)}))
    for x in af.arguments:
        atts = af.attackers(x)
        tri_i1 = conj(
            pos(present(x)),
            pos(is_out(x)),
            *[disj(conj(_ca(af, y, x), neg(is_in(y))), _ca(af, y, x, False)) for y in atts],
        )
        out.append(("I1", x, (x,), tri_i1, {Literal(is_out(x), False)}))
        tri_i2 = conj(
            pos(present(x)),
            neg(is_in(x)),
            *[disj(conj(_ca(af, y, x), pos(is_out(y))), _ca(af, y, x, False)) for y in atts],
        )
        out.append(("I2", x, (x,), tri_i2, {Literal(is_in(x), True)}))
    return out


def _rule_pairs(labels_by_family: dict[str, list[EventLabel]], disabled: set[str]):
    """Priority pairs of the four base rules over one family catalogue."""
    pairs = set()
    d1 = labels_by_family.get("D1", [])
    d2 = labels_by_family.get("D2", [])
    i1 = labels_by_family.get("I1", [])
    i2 = labels_by_family.get("I2", [])
    if "R1" not in disabled:
        i2_by_arg = {lab.args: lab for lab in i2}
        pairs |= {(a, i2_by_arg[a.args]) for a in i1 if a.args in i2_by_arg}
    if "R'1" not in disabled:
        d2_by_pair = {lab.args: lab for lab in d2}
        pairs |= {(a, d2_by_pair[a.args]) for a in d1 if a.args in d2_by_pair}
    if "R2" not in disabled:
        pairs |= {(a, b) for a in i1 for b in d2}
    if "R3" not in disabled:
        pairs |= {(a, b) for a in d1 for b in d2}
    return pairs


def _rename(lab: EventLabel, suffix: str) -> EventLabel:
    return EventLabel(lab.family + suffix, lab.args)


def _check_rules(disabled_rules: Iterable[str]) -> set[str]:
    disabled = set(disabled_rules)
    unknown = disabled - set(RULES)
    if unknown:
        raise DomainError(f"unknown priority rule(s): {sorted(unknown)}")
    return disabled


def build_base_context(
    af: AAF, prune: bool = False, horizon: int | None = None, disabled_rules: Iterable[str] = ()
) -> Context:
    disabled = _check_rules(disabled_rules)
    space = fluent_space(af, TransformKind.BASE)
    events = [
        Event.action(enunciate(x), {Literal(present(x)), Literal(is_in(x)), Literal(is_out(x), False)})
        for x in af.arguments
    ]
    by_family: dict[str, list[EventLabel]] = {}
    for family, _x, args, tri, eff in _base_families(af, prune):
        lab = EventLabel(family, args)
        events.append(Event.exogenous(lab, tri, eff))
        by_family.setdefault(family, []).append(lab)
    priority = _rule_pairs(by_family, disabled)
    return Context(
        space,
        events,
        initial_state(af, TransformKind.BASE),
        priority,
        horizon,
        info={"transform": TransformKind.BASE.value, "aaf": af, "prune": prune,
              "disabled_rules": sorted(disabled)},
    )


def build_lelu_context(
    af: AAF, prune: bool = False, horizon: int | None = None, disabled_rules: Iterable[str] = ()
) -> Context:
    disabled = _check_rules(disabled_rules)
    space = fluent_space(af, TransformKind.LELU)
    events = [
        Event.action(
            enunciate(x),
            {Literal(present(x)), Literal(last(x)), Literal(is_in(x)), Literal(is_out(x), False)},
        )
        for x in af.arguments
    ]
    variants: dict[str, dict[str, list[EventLabel]]] = {"f": {}, "l": {}}
    for family, x, args, tri, eff in _base_families(af, prune):
        lab_f = EventLabel(family + "f", args)
        events.append(Event.exogenous(lab_f, conj(tri, neg(last(x))), eff))
        variants["f"].setdefault(family, []).append(lab_f)
        lab_l = EventLabel(family + "l", args)
        events.append(Event.exogenous(lab_l, conj(tri, pos(last(x))), eff | {Literal(last(x), False)}))
        variants["l"].setdefault(family, []).append(lab_l)
    cleanups = []
    for x in af.arguments:
        lab = EventLabel("cleanup", (x,))
        events.append(Event.exogenous(lab, pos(last(x)), {Literal(last(x), False)}))
        cleanups.append(lab)

    priority = set()
    # the four base rules hold within each variant, never across
    for fams in variants.values():
        priority |= _rule_pairs(fams, disabled)
    firsts = [lab for fams in variants["f"].values() for lab in fams]
    lasts = [lab for fams in variants["l"].values() for lab in fams]
    priority |= {(a, b) for a in firsts for b in lasts}
    priority |= {(a, c) for a in firsts + lasts for c in cleanups}
    return Context(
        space,
        events,
        initial_state(af, TransformKind.LELU),
        priority,
        horizon,
        info={"transform": TransformKind.LELU.value, "aaf": af, "prune": prune,
              "disabled_rules": sorted(disabled)},
    )


def build_context(af: AAF, kind=TransformKind.BASE, **kwargs) -> Context:
    kind = TransformKind.parse(kind)
    if kind is TransformKind.BASE:
        return build_base_context(af, **kwargs)
    return build_lelu_context(af, **kwargs)


def dialogue_to_sequence(dialogue: Dialogue, af: AAF) -> Sequence:
    dialogue.check_against(af)
    return Sequence(frozenset((enunciate(a), r) for a, r in dialogue.entries))


def sequence_to_dialogue(sequence: Sequence) -> Dialogue:
    entries = set()
    for label, r in sequence.ranked_actions:
        if not isinstance(label, EventLabel) or label.family != "enunciate":
            raise DomainError(f"{label} is not an enunciation")
        entries.add((label.args[0], r))
    return Dialogue(frozenset(entries))
