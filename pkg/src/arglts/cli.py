"""Command-line entry point: ``arglts <subcommand> ...``.

Exit codes: 0 success, 1 domain or parse error, 2 capacity or budget
error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import cmd
import json
import logging
import sys
from pathlib import Path

from . import __version__, io_formats
from .aaf import DEFAULT_ORACLE_LIMIT, SEMANTICS, enumerate_complete_labellings, filter_semantics, sorted_labellings
from .adl import Executor, Setting, run
from .analysis import ATLAS_LIMIT, associated_labelling, atlas, synthesize_sequence
from .checks import fixed_instances, random_instances, run_suite
from .errors import ArgLtsError, DomainError
from .transform import TransformKind, build_context, dialogue_to_sequence, enunciate, sequence_to_dialogue

log = logging.getLogger("arglts")

EXIT_OK, EXIT_DOMAIN, EXIT_CAPACITY, EXIT_VIOLATION = 0, 1, 2, 3

FAULTS = {"no-r3": ("R3",), "no-r2": ("R2",), "no-r1": ("R1", "R'1")}


def _labelling_lines(lab) -> str:
    return "\n".join(
        f"{name}: {','.join(sorted(s))}"
        for name, s in (("IN", lab.in_set), ("OUT", lab.out_set), ("UNDEC", lab.undec_set))
    )


def _labelling_line(lab) -> str:
    return " ".join(
        f"{name} {{{','.join(sorted(s))}}}"
        for name, s in (("IN", lab.in_set), ("OUT", lab.out_set), ("UNDEC", lab.undec_set))
    )


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _load_dialogue(path):
    return io_formats.parse_dialogue(Path(path).read_text(encoding="utf-8"))


def cmd_run(args) -> int:
    af = io_formats.load_aaf(args.aaf)
    dialogue = _load_dialogue(args.dialogue)
    ctx = build_context(af, args.transform, prune=args.prune, horizon=args.horizon)
    trace = run(Setting(dialogue_to_sequence(dialogue, af), ctx))
    if args.trace_out:
        _write(args.trace_out, io_formats.emit_trace(trace))
    if args.dot_dir:
        out = Path(args.dot_dir)
        out.mkdir(parents=True, exist_ok=True)
        for t in trace.argumentative_marks:
            (out / f"state_{t:04d}.dot").write_text(io_formats.emit_dot(trace.states[t], af), encoding="utf-8")
    if args.trace_out != "-":
        print(_labelling_lines(associated_labelling(trace.final_state)))
    return EXIT_OK


def cmd_oracle(args) -> int:
    af = io_formats.load_aaf(args.aaf)
    labs = filter_semantics(enumerate_complete_labellings(af, limit=args.oracle_limit), args.semantics)
    for lab in sorted_labellings(labs):
        print(_labelling_line(lab))
    return EXIT_OK


def cmd_synth(args) -> int:
    af = io_formats.load_aaf(args.aaf)
    target = io_formats.parse_labelling(Path(args.target).read_text(encoding="utf-8"))
    seq = synthesize_sequence(af, target, verify=True)
    sys.stdout.write(io_formats.emit_dialogue(sequence_to_dialogue(seq)))
    return EXIT_OK


def cmd_atlas(args) -> int:
    af = io_formats.load_aaf(args.aaf)
    enumeration = ("sampled", args.sample, args.seed) if args.sample else "all-orders"
    at = atlas(af, args.transform, enumeration, limit=args.atlas_limit)
    text = io_formats.emit_atlas(at)
    _write(args.out, text)
    if args.out not in (None, "-"):
        print(f"{len(at.entries)} orders, {len(at.image())} distinct final labellings")
        for lab in sorted_labellings(at.image()):
            print("  " + _labelling_line(lab))
    return EXIT_OK


def cmd_check(args) -> int:
    kinds = ("base", "lelu") if args.transform == "both" else (args.transform,)
    if args.aaf:
        af = io_formats.load_aaf(args.aaf)
        instances = fixed_instances(af, sample=args.sample, seed=args.seed)
    else:
        instances = random_instances(args.random, args.seed)
    disabled = FAULTS[args.fault] if args.fault else ()
    result = run_suite(instances, kinds, disabled_rules=disabled)
    counts = result.failures_by_check()
    for name, n in counts.items():
        print(f"{name:12s} {'PASS' if n == 0 else 'FAIL'} ({n} failures)")
    print(f"runs: {result.runs}")
    if result.findings:
        first = result.findings[0]
        print("first counterexample: " + json.dumps(first.as_dict(), sort_keys=True))
    if args.report:
        report = {
            "ok": result.ok,
            "runs": result.runs,
            "failures": counts,
            "findings": [f.as_dict() for f in result.findings[:100]],
        }
        _write(args.report, io_formats.canonical_json(report))
    return EXIT_OK if result.ok else EXIT_VIOLATION


class StepShell(cmd.Cmd):
    """Interactive stepping: every ``say`` fires one rank and settles."""

    intro = None

    def __init__(self, af, kind, horizon=None, stdin=None, stdout=None):
        super().__init__(stdin=stdin, stdout=stdout)
        if stdin is not None:
            self.use_rawinput = False
        self.af = af
        self.executor = Executor(build_context(af, kind, horizon=horizon))
        interactive = (stdin or sys.stdin).isatty() if hasattr(stdin or sys.stdin, "isatty") else False
        self.prompt = "arglts> " if interactive else ""
        self.errors = 0

    def _out(self, text):
        self.stdout.write(text + "\n")

    def emptyline(self):
        return False

    def default(self, line):
        self._out(f"error: unknown command {line.split()[0]!r}")
        self.errors += 1

    def do_say(self, arg):
        """say <arg> [<arg> ...]: enunciate now (several at once share a rank)."""
        names = arg.split()
        if not names:
            self._out("error: say needs an argument")
            self.errors += 1
            return
        unknown = [n for n in names if n not in self.af.arguments]
        if unknown:
            self._out(f"error: unknown argument {unknown[0]}")
            self.errors += 1
            return
        self.executor.fire(enunciate(n) for n in names)
        self._out(_labelling_line(associated_labelling(self.executor.state)))

    def do_show(self, arg):
        """show: current labelling and time step."""
        self._out(f"t={self.executor.time} " + _labelling_line(associated_labelling(self.executor.state)))

    def do_graph(self, arg):
        """graph [path]: DOT snapshot of the current state."""
        text = io_formats.emit_dot(self.executor.state, self.af)
        if arg.strip():
            Path(arg.strip()).write_text(text, encoding="utf-8")
        else:
            self.stdout.write(text)

    def do_trace(self, arg):
        """trace [path]: trace document of the session so far."""
        text = io_formats.emit_trace(self.executor.trace())
        if arg.strip():
            Path(arg.strip()).write_text(text, encoding="utf-8", newline="\n")
        else:
            self.stdout.write(text)

    def do_quit(self, arg):
        """quit: end the session."""
        return True

    do_EOF = do_quit


def cmd_step(args) -> int:
    af = io_formats.load_aaf(args.aaf)
    shell = StepShell(af, args.transform, horizon=args.horizon)
    shell.cmdloop()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arglts",
        description="Argumentative dialogues as labelled transition systems.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, transform=True):
        p.add_argument("--aaf", required=True, help="graph file (.apx, .tgf or .json)")
        if transform:
            p.add_argument("--transform", choices=["base", "lelu"], default="base")
        p.add_argument("--horizon", type=int, default=None, help="cascade step budget (default 16*(|fluents|+1))")

    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = sub.add_parser("run", help="execute a dialogue and print the final labelling", formatter_class=fmt)
    common(p)
    p.add_argument("--dialogue", required=True, help="'<arg> <rank>' lines or JSON pairs")
    p.add_argument("--trace-out", help="write the trace document here ('-' for stdout)")
    p.add_argument("--dot-dir", help="write one DOT file per argumentative state")
    p.add_argument("--prune", action="store_true", help="only generate update events for actual attacks")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("oracle", help="enumerate labellings of a semantics", formatter_class=fmt)
    p.add_argument("--aaf", required=True)
    p.add_argument("--semantics", choices=SEMANTICS, default="complete")
    p.add_argument("--oracle-limit", type=int, default=DEFAULT_ORACLE_LIMIT)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("synth", help="dialogue reaching a target complete labelling (lelu)", formatter_class=fmt)
    p.add_argument("--aaf", required=True)
    p.add_argument("--target", required=True, help="labelling JSON or '<arg> IN|OUT|UNDEC' lines")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("atlas", help="final labelling of every enunciation order", formatter_class=fmt)
    common(p)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--all-orders", action="store_true", default=True)
    group.add_argument("--sample", type=int, default=None, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--atlas-limit", type=int, default=ATLAS_LIMIT)
    p.add_argument("--out", help="atlas JSON path (stdout when omitted)")
    p.set_defaults(func=cmd_atlas)

    p = sub.add_parser("check", help="run the invariant suite", formatter_class=fmt)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--aaf")
    src.add_argument("--random", type=int, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample", type=int, default=None, help="sample N orders instead of all orders")
    p.add_argument("--transform", choices=["base", "lelu", "both"], default="both")
    p.add_argument("--report", help="write a JSON report")
    p.add_argument("--fault", choices=sorted(FAULTS), help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("step", help="interactive stepping session", formatter_class=fmt)
    common(p)
    p.set_defaults(func=cmd_step)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    if getattr(args, "transform", None) in ("base", "lelu"):
        args.transform = TransformKind.parse(args.transform)
    try:
        return args.func(args)
    except ArgLtsError as exc:
        print(f"arglts: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"arglts: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
