"""Abstract argumentation frameworks, labellings and brute-force semantics.

Everything here is static: a graph of arguments and attacks, three-way
labellings over it, and exhaustive enumeration of the complete labellings
used as ground truth by the rest of the package.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .errors import CapacityError, DomainError

ARGUMENT_RE = re.compile(r"^[A-Za-z0-9_]+$")

DEFAULT_ORACLE_LIMIT = 12

SEMANTICS = ("complete", "grounded", "preferred", "stable")


def check_argument_id(name) -> str:
    if not isinstance(name, str) or not ARGUMENT_RE.match(name):
        raise DomainError(f"invalid argument identifier {name!r}")
    return name


@dataclass(frozen=True)
class AAF:
    """Argument graph ``(A, R)``; ``attacks`` holds ``(attacker, target)`` pairs."""

    arguments: tuple[str, ...] = ()
    attacks: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        args = tuple(self.arguments)
        for a in args:
            check_argument_id(a)
        if len(set(args)) != len(args):
            raise DomainError("duplicate argument identifier")
        attacks = frozenset((y, x) for y, x in self.attacks)
        declared = set(args)
        for y, x in attacks:
            for end in (y, x):
                if end not in declared:
                    raise DomainError(f"attack ({y},{x}) names undeclared argument {end}")
        object.__setattr__(self, "arguments", args)
        object.__setattr__(self, "attacks", attacks)

    @classmethod
    def build(cls, arguments: Iterable[str], attacks: Iterable[tuple[str, str]] = ()) -> "AAF":
        return cls(tuple(arguments), frozenset(tuple(p) for p in attacks))

    def __len__(self):
        return len(self.arguments)

    def attackers(self, x: str) -> list[str]:
        return [y for y in self.arguments if (y, x) in self.attacks]

    def sorted_attacks(self) -> list[tuple[str, str]]:
        pos = {a: i for i, a in enumerate(self.arguments)}
        return sorted(self.attacks, key=lambda p: (pos[p[0]], pos[p[1]]))

    def induced(self, keep: Iterable[str]) -> "AAF":
        keep = set(keep)
        args = tuple(a for a in self.arguments if a in keep)
        return AAF(args, frozenset(p for p in self.attacks if p[0] in keep and p[1] in keep))

    def adjacency(self) -> np.ndarray:
        pos = {a: i for i, a in enumerate(self.arguments)}
        adj = np.zeros((len(self.arguments), len(self.arguments)), dtype=np.bool_)
        for y, x in self.attacks:
            adj[pos[y], pos[x]] = True
        return adj

    def digest(self) -> str:
        """sha256 over a canonical, order-insensitive rendering of the graph."""
        text = "args:" + ",".join(sorted(self.arguments)) + ";atts:"
        text += ",".join(f"{y}>{x}" for y, x in sorted(self.attacks))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Labelling:
    """A total IN/OUT/UNDEC assignment, stored as a partition of its universe."""

    in_set: frozenset[str] = frozenset()
    out_set: frozenset[str] = frozenset()
    undec_set: frozenset[str] = frozenset()

    def __post_init__(self):
        i, o, u = frozenset(self.in_set), frozenset(self.out_set), frozenset(self.undec_set)
        if i & o or i & u or o & u:
            raise DomainError("labelling sets overlap")
        object.__setattr__(self, "in_set", i)
        object.__setattr__(self, "out_set", o)
        object.__setattr__(self, "undec_set", u)

    @classmethod
    def from_mapping(cls, labels: Mapping[str, str]) -> "Labelling":
        parts = {"IN": set(), "OUT": set(), "UNDEC": set()}
        for arg, lab in labels.items():
            key = lab.upper()
            if key not in parts:
                raise DomainError(f"unknown label {lab!r} for {arg}")
            parts[key].add(arg)
        return cls(frozenset(parts["IN"]), frozenset(parts["OUT"]), frozenset(parts["UNDEC"]))

    @property
    def universe(self) -> frozenset[str]:
        return self.in_set | self.out_set | self.undec_set

    def label(self, x: str) -> str:
        if x in self.in_set:
            return "IN"
        if x in self.out_set:
            return "OUT"
        if x in self.undec_set:
            return "UNDEC"
        raise KeyError(x)

    def as_dict(self) -> dict[str, list[str]]:
        return {
            "in": sorted(self.in_set),
            "out": sorted(self.out_set),
            "undec": sorted(self.undec_set),
        }

    def sort_key(self):
        return (sorted(self.in_set), sorted(self.out_set), sorted(self.undec_set))

    def __str__(self):
        parts = []
        for name, s in (("IN", self.in_set), ("OUT", self.out_set), ("UNDEC", self.undec_set)):
            if s:
                parts.append(f"{name}: {','.join(sorted(s))}")
        return "; ".join(parts) if parts else "(empty)"


@dataclass(frozen=True)
class Dialogue:
    """Arguments paired with enunciation ranks. Repeats and shared ranks allowed."""

    entries: frozenset[tuple[str, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        entries = frozenset((a, r) for a, r in self.entries)
        for a, r in entries:
            check_argument_id(a)
            if isinstance(r, bool) or not isinstance(r, int) or r < 0:
                raise DomainError(f"rank for {a} must be a non-negative integer, got {r!r}")
        object.__setattr__(self, "entries", entries)

    def sorted_entries(self) -> list[tuple[str, int]]:
        return sorted(self.entries, key=lambda e: (e[1], e[0]))

    def rank_groups(self) -> list[list[str]]:
        groups: dict[int, list[str]] = {}
        for a, r in self.sorted_entries():
            groups.setdefault(r, []).append(a)
        return [groups[r] for r in sorted(groups)]

    def check_against(self, af: AAF) -> None:
        known = set(af.arguments)
        for a, _ in self.entries:
            if a not in known:
                raise DomainError(f"dialogue names unknown argument {a}")


def is_complete_labelling(af: AAF, lab: Labelling) -> bool:
    """Check the IN/OUT characterisation of complete labellings, argument by argument."""
    if lab.universe != frozenset(af.arguments):
        raise DomainError("labelling universe differs from the framework's arguments")
    for x in af.arguments:
        atts = af.attackers(x)
        all_out = all(y in lab.out_set for y in atts)
        some_in = any(y in lab.in_set for y in atts)
        if (x in lab.in_set) != all_out or (x in lab.out_set) != some_in:
            return False
    return True


def _decode(af: AAF, codes: np.ndarray) -> set[Labelling]:
    result = set()
    args = af.arguments
    for row in codes:
        parts = ([], [], [])
        for a, c in zip(args, row):
            parts[int(c)].append(a)
        result.add(Labelling(frozenset(parts[0]), frozenset(parts[1]), frozenset(parts[2])))
    return result


def enumerate_complete_labellings(af: AAF, limit: int = DEFAULT_ORACLE_LIMIT) -> set[Labelling]:
    """Every complete labelling of ``af`` by exhaustive 3^|A| search."""
    if len(af.arguments) > limit:
        raise CapacityError(
            f"{len(af.arguments)} arguments exceeds the oracle limit of {limit}"
        )
    return _decode(af, kernels.complete_codes(af.adjacency()))


def filter_semantics(labs: Iterable[Labelling], semantics: str) -> set[Labelling]:
    labs = set(labs)
    if semantics == "complete":
        return labs
    if semantics == "stable":
        return {lab for lab in labs if not lab.undec_set}
    if semantics == "preferred":
        return {lab for lab in labs if not any(lab.in_set < other.in_set for other in labs)}
    if semantics == "grounded":
        if not labs:
            raise DomainError("grounded filter needs at least one complete labelling")
        minimal = [lab for lab in labs if all(lab.in_set <= other.in_set for other in labs)]
        if len(minimal) != 1:
            raise DomainError("input has no unique IN-minimum; not a complete labelling set")
        return set(minimal)
    raise DomainError(f"unknown semantics {semantics!r}")


def sorted_labellings(labs: Iterable[Labelling]) -> list[Labelling]:
    return sorted(labs, key=Labelling.sort_key)
