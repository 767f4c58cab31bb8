"""Command-line front end.

Exit codes: 0 pass/true, 1 fail/false (report carries the witness),
2 vacuous or failed precondition, 3 usage error or unreadable input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import core, finprob as fp, gauss as G, io, matcat as mc, stats
from .errors import (
    EntryError, FormatError, MarginalMismatch, NormalizationError, NotDeterministic,
    SizeBoundExceeded, TypeMismatch,
)
from .gauss import GaussMorphism
from .matcat import FinSet, Kernel

OK, FALSE, PRECONDITION, USAGE = 0, 1, 2, 3

_VERDICT_CODES = {core.PASS: OK, core.FAIL: FALSE, core.VACUOUS: PRECONDITION}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    return io.parse(text)


def _kernel(path: str) -> Kernel:
    k = _load(path)
    if not isinstance(k, Kernel):
        raise UsageError(f"{path}: expected a kernel document")
    return k


def _report(command: str, **fields) -> dict:
    return {"command": command, **fields}


def _bool(command: str, verdict: bool, **fields) -> tuple[int, dict]:
    return (OK if verdict else FALSE), _report(command, verdict=verdict, **fields)


def _law(command: str, rep: core.LawReport) -> tuple[int, dict]:
    return _VERDICT_CODES[rep.verdict], _report(command, **rep.to_dict(io.encode))


def _tol(args) -> float:
    return args.tol if args.tol is not None else G.DEFAULT_TOL


# -- subcommand handlers -------------------------------------------------------
def cmd_compose(args):
    g, f = _load(args.g), _load(args.f)
    if isinstance(f, GaussMorphism) and isinstance(g, GaussMorphism):
        return OK, _report("compose", result=G.g_compose(g, f))
    if isinstance(f, Kernel) and isinstance(g, Kernel):
        return OK, _report("compose", result=mc.compose(g, f))
    raise TypeMismatch("cannot compose a kernel with a Gaussian morphism")


def cmd_tensor(args):
    f, g = _load(args.f), _load(args.g)
    if isinstance(f, GaussMorphism) and isinstance(g, GaussMorphism):
        return OK, _report("tensor", result=G.g_tensor(f, g))
    if isinstance(f, Kernel) and isinstance(g, Kernel):
        return OK, _report("tensor", result=mc.tensor(f, g))
    raise TypeMismatch("cannot tensor a kernel with a Gaussian morphism")


def cmd_marginal(args):
    f = _load(args.f)
    if isinstance(f, GaussMorphism):
        return OK, _report("marginal", result=G.g_marginalize(f, args.keep))
    return OK, _report("marginal", result=mc.marginalize(f, args.keep))


def cmd_condition(args):
    f = _load(args.f)
    if isinstance(f, GaussMorphism):
        return OK, _report("condition", result=G.g_conditional(f, args.nx))
    return OK, _report("condition", result=fp.conditional(f, args.nx))


def cmd_support(args):
    r = fp.support(_kernel(args.p))
    return OK, _report("support", support=list(r.labels), inclusion=r.inclusion)


def cmd_pushback(args):
    f = _load(args.f)
    if isinstance(f, GaussMorphism):
        pb = G.g_pushback(f)
        return OK, _report("pushback", noise=pb.noise, add=pb.add, linear=pb.linear)
    pb = fp.randomness_pushback(f, args.bound)
    return OK, _report("pushback", A=pb.A, psi=pb.psi, g=pb.g)


def cmd_disintegrate(args):
    return OK, _report("disintegrate", result=fp.disintegrate(_kernel(args.p), _kernel(args.f)))


def cmd_bayes(args):
    return OK, _report("bayes-invert", result=fp.bayes_invert(_kernel(args.psi), _kernel(args.f)))


def cmd_cond_product(args):
    return OK, _report("cond-product", result=fp.conditional_product(_kernel(args.psi), _kernel(args.phi), args.nw))


def _ci(command, verdict: fp.CiVerdict):
    return _bool(command, verdict.verdict, witness=verdict.witness)


def cmd_check(args):
    kind = args.kind
    files = args.files
    need = {"det": 1, "aseq": 3, "asdet": 2, "ci-state": 1, "ci-proc": 1, "ci-gen": 1, "ci-markov": 1,
            "positivity": 2, "causality": 4}[kind]
    if len(files) != need:
        raise UsageError(f"check {kind} takes {need} file(s), got {len(files)}")
    ms = [_load(p) for p in files]
    name = f"check {kind}"
    if kind == "det":
        (f,) = ms
        return _bool(name, core.is_deterministic(f, core.backend_of(f, _tol(args))))
    if kind in ("positivity", "causality"):
        B = core.backend_of(ms[0], _tol(args))
        fn = core.check_positivity_instance if kind == "positivity" else core.check_causality_instance
        return _law(name, fn(*ms, backend=B))
    if not all(isinstance(m, Kernel) for m in ms):
        raise TypeMismatch(f"check {kind} needs kernel documents")
    if kind == "aseq":
        return _bool(name, fp.as_equal(*ms))
    if kind == "asdet":
        return _bool(name, fp.as_deterministic(*ms))
    (f,) = ms
    if kind == "ci-state":
        return _ci(name, fp.ci_state(f, args.nx, args.nw))
    if kind == "ci-gen":
        return _ci(name, fp.ci_gen(f, args.nx, args.nw))
    if kind == "ci-proc":
        return _ci(name, fp.ci_proc(f, args.nx))
    return _ci(name, fp.ci_markov(f, args.nx))


def cmd_suff(args):
    w = stats.is_sufficient(_kernel(args.p), _kernel(args.s))
    if w is None:
        return _bool("suff", False)
    return _bool("suff", True, alpha=w.alpha, h=list(w.h), g=w.g)


def cmd_complete(args):
    r = stats.is_complete(_kernel(args.f))
    if isinstance(r, stats.Complete):
        return _bool("complete", True, rank=r.rank, support_size=r.support_size)
    return _bool("complete", False, certificate={"beta": list(r.beta), "epsilon": r.epsilon, "g": r.g, "h": r.h})


def cmd_ancillary(args):
    return _bool("ancillary", stats.is_ancillary(_kernel(args.p), _kernel(args.a)))


def cmd_basu(args):
    return _law("basu", stats.check_basu(_kernel(args.p), _kernel(args.s), _kernel(args.a)))


def cmd_leq(args):
    w = stats.statistic_leq(_kernel(args.p), _kernel(args.s), _kernel(args.t))
    return _bool("leq", w is not None, c=w.c if w else None)


def cmd_minstat(args):
    s = stats.minimal_sufficient(_kernel(args.p))
    return OK, _report("minstat", result=s.s)


def cmd_bahadur(args):
    return _law("bahadur", stats.check_bahadur(_kernel(args.p), _kernel(args.s), args.bound))


def cmd_laws(args):
    if args.seed is None:
        raise UsageError("laws needs --seed")
    if args.backend == "gauss":
        B = core.GaussBackend(_tol(args))
        objects = list(args.sizes)
    else:
        B = core.MatrixBackend(args.backend)
        objects = [FinSet.range(k) for k in args.sizes]
    return _law("laws", core.check_comonoid_laws(B, objects, args.seed, args.samples))


# -- parser ---------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)

    parser = _Parser(prog="markovcat", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=None, help="seed for sampling commands")
    parser.add_argument("--tol", type=float, default=None, help="Gaussian equality tolerance")
    parser.add_argument("--out", default=None, help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, *files, **kw):
        p = sub.add_parser(name, parents=[common], **kw)
        for f in files:
            p.add_argument(f)
        p.set_defaults(func=func)
        return p

    add("compose", cmd_compose, "g", "f", help="g after f")
    add("tensor", cmd_tensor, "f", "g")
    add("marginal", cmd_marginal, "f").add_argument("--keep", type=int, nargs="+", required=True)
    add("condition", cmd_condition, "f").add_argument("--nx", type=int, default=1)
    add("support", cmd_support, "p")
    add("pushback", cmd_pushback, "f").add_argument("--bound", type=int, default=fp.DEFAULT_PUSHBACK_BOUND)
    add("disintegrate", cmd_disintegrate, "p", "f")
    add("bayes-invert", cmd_bayes, "psi", "f")
    add("cond-product", cmd_cond_product, "psi", "phi").add_argument("--nw", type=int, default=1)
    chk = add("check", cmd_check)
    chk.add_argument("kind", choices=["det", "aseq", "asdet", "ci-state", "ci-proc", "ci-gen", "ci-markov",
                                      "positivity", "causality"])
    chk.add_argument("files", nargs="+")
    chk.add_argument("--nx", type=int, default=1)
    chk.add_argument("--nw", type=int, default=1)
    add("suff", cmd_suff, "p", "s")
    add("complete", cmd_complete, "f")
    add("ancillary", cmd_ancillary, "p", "a")
    add("basu", cmd_basu, "p", "s", "a")
    add("leq", cmd_leq, "p", "s", "t", help="is t a function of s almost surely")
    add("minstat", cmd_minstat, "p")
    add("bahadur", cmd_bahadur, "p", "s").add_argument("--bound", type=int, default=stats.DEFAULT_ENUMERATION_BOUND)
    laws = add("laws", cmd_laws)
    laws.add_argument("--backend", required=True, choices=[*mc.SEMIRINGS, "gauss"])
    laws.add_argument("--sizes", type=int, nargs="+", default=[1, 2, 3])
    laws.add_argument("--samples", type=int, default=50)
    return parser


def run_command(argv) -> tuple[int, dict]:
    """Run one command; returns the exit code and the report document."""
    code, report, _ = _run(argv)
    return code, report


def _run(argv) -> tuple[int, dict, str | None]:
    parser = build_parser()
    out = None
    try:
        args = parser.parse_args(list(argv))
        out = args.out
        if args.command is None:
            raise UsageError("missing subcommand")
        code, report = args.func(args)
        report = io.encode(report)
    except UsageError as e:
        code, report = USAGE, {"error": "usage", "message": str(e)}
    except (FormatError, NormalizationError, EntryError) as e:
        code, report = USAGE, {"error": "input", "message": str(e)}
        if isinstance(e, NormalizationError):
            report.update(column=e.column, total=str(e.total))
    except MarginalMismatch as e:
        code, report = PRECONDITION, {"error": "marginal mismatch", "left": io.encode(e.left),
                                      "right": io.encode(e.right)}
    except (NotDeterministic, SizeBoundExceeded, TypeMismatch) as e:
        code, report = PRECONDITION, {"error": "precondition", "message": str(e)}
    report["exit_code"] = code
    return code, report, out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, report, out = _run(argv)
    text = io.dumps(report)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
