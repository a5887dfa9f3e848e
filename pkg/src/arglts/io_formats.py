"""Text formats: APX/TGF graphs, dialogue files, traces, atlases and DOT.

All emitters are canonical (sorted keys, sorted sets, LF newlines, UTF-8),
so equal values always serialize to equal bytes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import __version__
from .aaf import AAF, ARGUMENT_RE, Dialogue, Labelling
from .adl import Fluent, State, Trace
from .analysis import Atlas, associated_graph
from .errors import DomainError, ParseError

# --------------------------------------------------------------------------
# graphs
# --------------------------------------------------------------------------

_APX_STMT = re.compile(
    r"(arg|att)\s*\(\s*([A-Za-z0-9_]+)\s*(?:,\s*([A-Za-z0-9_]+)\s*)?\)\s*\."
)


def _line_col(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def parse_apx(text: str) -> AAF:
    """Parse ``arg(x).`` / ``att(x,y).`` statements; ``#`` starts a line comment."""
    clean = re.sub(r"#[^\n]*", lambda m: " " * len(m.group(0)), text)
    args: list[str] = []
    seen: set[str] = set()
    attacks: set[tuple[str, str]] = set()
    pos = 0
    ws = re.compile(r"\s*")
    while True:
        pos = ws.match(clean, pos).end()
        if pos >= len(clean):
            break
        m = _APX_STMT.match(clean, pos)
        if not m:
            raise ParseError("expected arg(<id>). or att(<id>,<id>).", *_line_col(text, pos))
        kind, first, second = m.groups()
        if kind == "arg":
            if second is not None:
                raise ParseError("arg takes exactly one identifier", *_line_col(text, pos))
            if first not in seen:
                seen.add(first)
                args.append(first)
        else:
            if second is None:
                raise ParseError("att takes two identifiers", *_line_col(text, pos))
            for end in (first, second):
                if end not in seen:
                    raise ParseError(f"undeclared argument {end}", *_line_col(text, pos))
            attacks.add((first, second))
        pos = m.end()
    return AAF(tuple(args), frozenset(attacks))


def emit_apx(af: AAF) -> str:
    lines = [f"arg({a})." for a in af.arguments]
    lines += [f"att({y},{x})." for y, x in af.sorted_attacks()]
    return "".join(line + "\n" for line in lines)


def parse_tgf(text: str) -> AAF:
    """Trivial Graph Format: node lines, a ``#`` separator, then ``src dst`` lines."""
    args: list[str] = []
    attacks = set()
    in_edges = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line == "#":
            in_edges = True
            continue
        toks = line.split()
        if not in_edges:
            if not ARGUMENT_RE.match(toks[0]):
                raise ParseError(f"bad node identifier {toks[0]!r}", lineno, 1)
            if toks[0] not in args:
                args.append(toks[0])
        else:
            if len(toks) < 2:
                raise ParseError("edge line needs a source and a target", lineno, 1)
            for end in toks[:2]:
                if end not in args:
                    raise ParseError(f"undeclared argument {end}", lineno, raw.find(end) + 1)
            attacks.add((toks[0], toks[1]))
    return AAF(tuple(args), frozenset(attacks))


def emit_tgf(af: AAF) -> str:
    lines = list(af.arguments) + ["#"] + [f"{y} {x}" for y, x in af.sorted_attacks()]
    return "".join(line + "\n" for line in lines)


def aaf_to_json(af: AAF) -> dict:
    return {"arguments": list(af.arguments), "attacks": [list(p) for p in af.sorted_attacks()]}


def aaf_from_json(data) -> AAF:
    try:
        return AAF(tuple(data["arguments"]), frozenset(tuple(p) for p in data.get("attacks", [])))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed framework JSON: {exc}") from None


def parse_aaf(text: str, fmt: str = "apx") -> AAF:
    fmt = fmt.lower().lstrip(".")
    if fmt == "apx":
        return parse_apx(text)
    if fmt == "tgf":
        return parse_tgf(text)
    if fmt == "json":
        return aaf_from_json(_load_json(text))
    raise DomainError(f"unknown graph format {fmt!r}")


def load_aaf(path) -> AAF:
    path = Path(path)
    suffix = path.suffix.lower().lstrip(".") or "apx"
    return parse_aaf(path.read_text(encoding="utf-8"), suffix if suffix in ("apx", "tgf", "json") else "apx")


def _load_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


# --------------------------------------------------------------------------
# dialogues and labellings
# --------------------------------------------------------------------------


def parse_dialogue(text: str) -> Dialogue:
    """``<arg> <rank>`` per line, or a JSON list of ``[arg, rank]`` pairs."""
    if text.lstrip().startswith(("[", "{")):
        data = _load_json(text)
        if isinstance(data, dict):
            data = data.get("entries", [])
        try:
            return Dialogue(frozenset((str(a), r) for a, r in data))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"malformed dialogue JSON: {exc}") from None
    entries = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 2:
            raise ParseError("expected '<argument> <rank>'", lineno, 1)
        name, rank = toks
        if not ARGUMENT_RE.match(name):
            raise ParseError(f"bad argument name {name!r}", lineno, 1)
        if not re.fullmatch(r"\d+", rank):
            raise ParseError(f"rank must be a non-negative integer, got {rank!r}", lineno, raw.find(rank) + 1)
        entries.add((name, int(rank)))
    return Dialogue(frozenset(entries))


def emit_dialogue(dialogue: Dialogue) -> str:
    return "".join(f"{a} {r}\n" for a, r in dialogue.sorted_entries())


def parse_labelling(text: str) -> Labelling:
    """JSON ``{"in": [...], "out": [...], "undec": [...]}`` or ``<arg> IN|OUT|UNDEC`` lines."""
    if text.lstrip().startswith("{"):
        data = _load_json(text)
        return Labelling(
            frozenset(data.get("in", [])), frozenset(data.get("out", [])), frozenset(data.get("undec", []))
        )
    labels = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 2:
            raise ParseError("expected '<argument> IN|OUT|UNDEC'", lineno, 1)
        if toks[0] in labels:
            raise ParseError(f"argument {toks[0]} labelled twice", lineno, 1)
        labels[toks[0]] = toks[1]
    return Labelling.from_mapping(labels)


def emit_labelling(lab: Labelling) -> str:
    return canonical_json(lab.as_dict())


# --------------------------------------------------------------------------
# trace documents
# --------------------------------------------------------------------------


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def state_summary(state: State) -> dict[str, list[str]]:
    args = [f.args[0] for f in state.space.fluents if f.kind == "p"]
    v = lambda k, x: bool(state.get(Fluent(k, (x,)), False))  # noqa: E731
    pres = [x for x in args if v("p", x)]
    return {
        "present": sorted(pres),
        "in": sorted(x for x in pres if v("i", x)),
        "out": sorted(x for x in pres if v("o", x)),
        "undec": sorted(x for x in pres if not v("i", x) and not v("o", x)),
        "last": sorted(x for x in args if v("l", x)),
    }


@dataclass
class TraceDocument:
    metadata: dict
    steps: list = field(default_factory=list)
    argumentative_marks: list = field(default_factory=list)
    final_labelling: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "metadata": self.metadata,
            "steps": self.steps,
            "argumentative_marks": self.argumentative_marks,
            "final_labelling": self.final_labelling,
        }


def document_from_trace(trace: Trace) -> TraceDocument:
    ctx = trace.context
    info = ctx.info if ctx is not None else {}
    af: AAF | None = info.get("aaf")
    meta = {
        "aaf_digest": af.digest() if af is not None else None,
        "arguments": list(af.arguments) if af is not None else [],
        "attacks": [list(p) for p in af.sorted_attacks()] if af is not None else [],
        "transform": info.get("transform"),
        "sequence": [[str(a), r] for a, r in trace.sequence.sorted_pairs()] if trace.sequence else [],
        "horizon": ctx.horizon if ctx is not None else None,
        "tool_version": __version__,
    }
    if info.get("disabled_rules"):
        meta["disabled_rules"] = list(info["disabled_rules"])
    steps = []
    for t, state in enumerate(trace.states):
        events = sorted(str(e) for e in trace.event_sets[t - 1]) if t else []
        steps.append({"t": t, "events": events, "state": state_summary(state)})
    final = state_summary(trace.final_state)
    return TraceDocument(
        metadata=meta,
        steps=steps,
        argumentative_marks=list(trace.argumentative_marks),
        final_labelling={k: final[k] for k in ("in", "out", "undec")},
    )


def emit_document(doc: TraceDocument) -> str:
    return canonical_json(doc.to_json())


def emit_trace(trace: Trace) -> str:
    return emit_document(document_from_trace(trace))


def parse_trace_document(text: str) -> TraceDocument:
    data = _load_json(text)
    missing = {"metadata", "steps", "argumentative_marks", "final_labelling"} - set(data)
    if missing:
        raise DomainError(f"trace document lacks {sorted(missing)}")
    steps = data["steps"]
    for i, step in enumerate(steps):
        if step.get("t") != i or "events" not in step or "state" not in step:
            raise DomainError(f"malformed trace step {i}")
    return TraceDocument(data["metadata"], steps, data["argumentative_marks"], data["final_labelling"])


# --------------------------------------------------------------------------
# atlas
# --------------------------------------------------------------------------


def atlas_to_json(at: Atlas) -> dict:
    return {
        "transform": at.transform_kind.value,
        "aaf_digest": at.af.digest(),
        "arguments": list(at.af.arguments),
        "attacks": [list(p) for p in at.af.sorted_attacks()],
        "entries": [
            {"order": [list(b) for b in order], "final_labelling": lab.as_dict()}
            for order, lab in at.sorted_items()
        ],
        "image": [lab.as_dict() for lab in sorted(at.image(), key=Labelling.sort_key)],
    }


def emit_atlas(at: Atlas) -> str:
    return canonical_json(atlas_to_json(at))


# --------------------------------------------------------------------------
# DOT
# --------------------------------------------------------------------------

FILL = {"IN": "palegreen", "OUT": "lightcoral", "UNDEC": "khaki"}


def emit_dot(state: State, af: AAF, name: str = "dialogue") -> str:
    summary = state_summary(state)
    pres = set(summary["present"])
    status = {x: "IN" for x in summary["in"]}
    status.update({x: "OUT" for x in summary["out"] if x not in status})
    status.update({x: "UNDEC" for x in summary["undec"]})
    live = associated_graph(state, af).attacks
    lines = [f'digraph "{name}" {{', "  node [shape=circle];"]
    for x in af.arguments:
        if x in pres:
            lines.append(f'  "{x}" [style=filled, fillcolor={FILL[status[x]]}, label="{x}\\n{status[x]}"];')
        else:
            lines.append(f'  "{x}" [style=dashed];')
    for y, x in af.sorted_attacks():
        if (y, x) in live:
            lines.append(f'  "{y}" -> "{x}";')
        elif y not in pres or x not in pres:
            lines.append(f'  "{y}" -> "{x}" [style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"
