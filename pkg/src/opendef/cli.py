"""Command-line front end.

Exit codes: 0 whenever the computation finished (whatever the verdict),
2 for usage or input errors, 3 when an enumeration budget is exceeded.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import sys
from pathlib import Path
from typing import Sequence

from . import decider, formulas, hard, model, reductions, synthesizer
from .formulas import FormulaSyntaxError
from .model import BudgetExceeded, InstanceError

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str | None, text: str, out) -> None:
    if path is None or path == "-":
        out.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _verdict_text(v: decider.Verdict) -> str:
    if v.definable:
        return "DEFINABLE\n"
    return f"NOT_DEFINABLE\n{v.witness.to_text()}\n"


def cmd_decide(args, out):
    s, t = model.parse_instance(_read(args.file))
    if args.oracle:
        v = decider.decide_naive_slice(s, t)
    else:
        v = decider.decide(s, t, threads=args.threads)
    out.write(_verdict_text(v))


def cmd_witness(args, out):
    s, t = model.parse_instance(_read(args.file))
    v = decider.decide(s, t, threads=args.threads)
    out.write(("NONE" if v.definable else v.witness.to_text()) + "\n")


def cmd_synth(args, out):
    s, t = model.parse_instance(_read(args.file))
    try:
        f = synthesizer.synthesize(s, t, verify=not args.no_verify, threads=args.threads)
    except synthesizer.NotDefinable as e:
        out.write(f"NOT_DEFINABLE\n{e.witness.to_text()}\n")
        return
    out.write(formulas.to_text(f) + "\n")


def cmd_mc(args, out):
    s, _, embedded = model.parse_structure(_read(args.file))
    text = args.sentence or embedded
    if text is None:
        raise UsageError("no sentence: pass --sentence or use a file written by 'reduce mc'")
    phi = formulas.parse_sentence(text)
    ok, a = formulas.mc_exists(s, phi)
    out.write("TRUE\nassignment: " + " ".join(map(str, a)) + "\n" if ok else "FALSE\n")


def cmd_reduce(args, out):
    if args.kind == "mc":
        s, t = model.parse_instance(_read(args.file))
        s, phi = reductions.reduce_to_mc(s, t)
        text = ("# reduced from open definability; the sentence holds iff the target is not definable\n"
                + model.print_structure(s) + formulas.sentence_to_text(phi) + "\n")
        _write(args.output, text, out)
        return
    if args.k is None:
        raise UsageError(f"reduce {args.kind} needs -k")
    g, _, _ = model.parse_structure(_read(args.file))
    if args.kind == "induced-path":
        gi = reductions.reduce_induced_path(g, args.k)
    else:
        gi = reductions.reduce_clique(g, args.k)
    text = "\n".join(gi.comment_lines()) + "\n" + model.print_instance(gi.structure, gi.target)
    _write(args.output, text, out)


def cmd_gen(args, out):
    inst = hard.gen_hard(args.n)
    text = f"# hard family n={args.n}\n" + model.print_instance(inst.structure, inst.target)
    _write(args.output, text, out)


def cmd_check_family(args, out):
    report = hard.verify_family(args.n, args.alpha)
    out.write("\n".join(hard.report_lines(report)) + "\n")


def cmd_stats(args, out):
    s, t = model.parse_instance(_read(args.file))
    r = model.size_measures(s, t)
    out.write(f"size_vocab: {r.size_vocab:.3f}\n"
              f"size_structure: {r.size_structure:.3f}\n"
              f"size_instance: {r.size_instance:.3f}\n"
              f"kappa: {model.param_kappa(t)}\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="opendef", description="Open first-order definability toolkit")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def threads(sp):
        sp.add_argument("--threads", type=int, default=1, metavar="N",
                        help="worker processes for the decider (output does not depend on N)")

    sp = sub.add_parser("decide", help="decide definability of the target")
    sp.add_argument("file")
    sp.add_argument("--oracle", action="store_true", help="use the naive slice enumerator")
    threads(sp)
    sp.set_defaults(func=cmd_decide)

    sp = sub.add_parser("witness", help="print the non-definability witness or NONE")
    sp.add_argument("file")
    threads(sp)
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("synth", help="print a defining open formula")
    sp.add_argument("file")
    sp.add_argument("--no-verify", action="store_true", help="skip the extension check")
    threads(sp)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("mc", help="model-check an existential sentence")
    sp.add_argument("file")
    sp.add_argument("--sentence")
    sp.set_defaults(func=cmd_mc)

    sp = sub.add_parser("reduce", help="build gadget instances")
    sp.add_argument("kind", choices=["induced-path", "clique", "mc"])
    sp.add_argument("file")
    sp.add_argument("-k", type=int)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("gen", help="generate instances")
    sp.add_argument("family", choices=["hard"])
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("check-family", help="verify the hard family's claims")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--alpha", choices=["rows", "columns"], default="rows")
    sp.set_defaults(func=cmd_check_family)

    sp = sub.add_parser("stats", help="size measures and parameter")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_stats)
    return p


def run(argv: Sequence[str]) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    try:
        with contextlib.redirect_stderr(err):
            args = build_parser().parse_args(list(argv))
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be at least 1")
        args.func(args, out)
        code = EXIT_OK
    except (UsageError, InstanceError, FormulaSyntaxError, ValueError, KeyError) as e:
        err.write(f"error: {e}\n")
        code = EXIT_USAGE
    except BudgetExceeded as e:
        err.write(f"budget exceeded: {e}\n")
        code = EXIT_BUDGET
    except SystemExit as e:  # --help
        code = e.code if isinstance(e.code, int) else EXIT_USAGE
    return code, out.getvalue(), err.getvalue()


def main(argv: Sequence[str] | None = None) -> int:
    code, out, err = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
