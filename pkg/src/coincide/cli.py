"""Command-line interface: ``coincide COMMAND [PATH] [options]``.

Exit codes: 0 success, 1 usage error, 2 parse error, 3 computational
diagnostic.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence, TextIO

from .coincidence import (
    CoincidenceProblem,
    CoincidenceReport,
    ProblemError,
    case2_abstract,
    coincidence_index,
    generalized_lefschetz,
    lefschetz_endomorphism,
    lefschetz_number,
    multivalued_fixed_point,
    transfer,
    verify_main_theorem,
)
from .duality import DualityError, NonOrientableError, dual_basis_system, manifold_duality
from .formats import (
    LoadedProblem,
    ParseError,
    build_problem,
    corpus_problems,
    format_matrix,
    load_problem,
    parse_complex,
    parse_problem_file,
    resolve_path,
)
from .homology import HomologyError, homology
from .linalg import LinAlgError, format_rational
from .simplicial import Chain, ComplexError

COMMANDS = ("homology", "fundamental", "dual-basis", "transfer", "lefschetz", "index", "verify", "corpus")
EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_COMPUTE = 0, 1, 2, 3
COMPUTATIONAL = (ProblemError, ComplexError, DualityError, NonOrientableError, HomologyError, LinAlgError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coincide", description="Exact Lefschetz coincidence invariants of simplicial maps.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("path", nargs="?", help="complex (.cx) or problem (.prob) file; corpus/NAME for bundled data")
    p.add_argument("--rel", metavar="NAME", help="named subcomplex for relative homology")
    p.add_argument("--degree", metavar="Q", type=int, help="restrict homology output to one degree")
    p.add_argument("--mu", metavar="COORDS", help="override mu: comma-separated rationals or lift|zero|fundamental")
    p.add_argument("--assume-disjoint", action="store_true", help="waive the disjointness certificate")
    p.add_argument("--format", choices=("text", "records"), default="text")
    return p


def _chain_text(c: Chain) -> str:
    if c.is_zero():
        return "0"
    return " + ".join(f"{format_rational(v)}*[{' '.join(map(str, s))}]" for s, v in sorted(c.terms.items()))


def _vec(v) -> list[str]:
    return [format_rational(x) for x in v]


class _Out:
    def __init__(self, fmt: str, stream: TextIO):
        self.fmt, self.stream = fmt, stream

    def emit(self, record: dict, text: str) -> None:
        if self.fmt == "records":
            self.stream.write(json.dumps(record, sort_keys=True) + "\n")
        else:
            self.stream.write(text.rstrip("\n") + "\n")


def _cmd_homology(args, out: _Out) -> int:
    cf = parse_complex(resolve_path(args.path, "complex"))
    pair = cf.pair(args.rel)
    h = homology(pair)
    label = cf.name + (f" rel {args.rel}" if args.rel else "")
    if args.degree is None:
        betti = list(h.betti_numbers())
        out.emit({"command": "homology", "complex": label, "betti": betti},
                 f"homology of {label}\n  betti: {' '.join(map(str, betti))}")
        return EXIT_OK
    q = args.degree
    rank = h.betti(q) if 0 <= q <= max(pair.dim, 0) else 0
    reps = [_chain_text(h.representative_chain(q, i)) for i in range(rank)]
    lines = [f"homology of {label}", f"  degree {q}: rank {rank}"] + [f"  rep {i}: {r}" for i, r in enumerate(reps)]
    out.emit({"command": "homology", "complex": label, "degree": q, "rank": rank, "representatives": reps},
             "\n".join(lines))
    return EXIT_OK


def _cmd_fundamental(args, out: _Out) -> int:
    cf = parse_complex(resolve_path(args.path, "complex"))
    md = manifold_duality(cf.complex, cf.orientation)
    fc = md.fundamental
    seed = " ".join(map(str, fc.orientation.seed))
    rec = {"command": "fundamental", "complex": cf.name, "dimension": fc.n, "orientation_seed": seed,
           "coords": _vec(fc.coords), "representative": _chain_text(fc.representative)}
    out.emit(rec, f"fundamental class of {cf.name} (dimension {fc.n})\n  orientation seed: [{seed}] positive\n"
                  f"  coords: {' '.join(rec['coords'])}\n  representative: {rec['representative']}")
    return EXIT_OK


def _cmd_dual_basis(args, out: _Out) -> int:
    cf = parse_complex(resolve_path(args.path, "complex"))
    sysm = dual_basis_system(manifold_duality(cf.complex, cf.orientation))
    entries = []
    lines = [f"dual basis system of {cf.name}"]
    for i, q in enumerate(sysm.degree):
        e = {"i": i, "degree": q, "a": _vec(sysm.a[i]), "x": _vec(sysm.x[i]),
             "x_prime": _vec(sysm.x_prime[i]), "a_prime": _vec(sysm.a_prime[i])}
        entries.append(e)
        lines.append(f"  {i}: deg a={q}  a=({' '.join(e['a'])})  x=({' '.join(e['x'])})  "
                     f"x'=({' '.join(e['x_prime'])})  a'=({' '.join(e['a_prime'])})")
    out.emit({"command": "dual-basis", "complex": cf.name, "basis": entries}, "\n".join(lines))
    return EXIT_OK


def _load(args) -> LoadedProblem:
    if not args.path:
        raise UsageError("this command needs a problem file")
    pf = parse_problem_file(resolve_path(args.path, "problem"))
    return build_problem(pf, args.mu, True if args.assume_disjoint else None)


def _require_geometric(lp: LoadedProblem, what: str) -> CoincidenceProblem:
    if not isinstance(lp.problem, CoincidenceProblem):
        raise ProblemError(f"{what} needs a case1 or general problem; {lp.name} is in {lp.mode} mode")
    return lp.problem


def _cmd_transfer(args, out: _Out) -> int:
    lp = _load(args)
    t = transfer(_require_geometric(lp, "transfer"))
    blocks = {str(k): format_matrix(m) for k, m in t.blocks.items()}
    lines = [f"transfer of {lp.name}"] + [f"  degree {k}: [{v}] ({t[int(k)].rows}x{t[int(k)].cols})"
                                          for k, v in blocks.items()]
    out.emit({"command": "transfer", "problem": lp.name, "blocks": blocks}, "\n".join(lines))
    return EXIT_OK


def report_for(lp: LoadedProblem) -> CoincidenceReport:
    if lp.mode == "abstract":
        return case2_abstract(lp.problem)
    if lp.mode == "multivalued":
        graph, p1, p2, waive = lp.graph
        return multivalued_fixed_point(graph, p1, p2, assume_disjoint=waive, name=lp.name)
    return verify_main_theorem(lp.problem)


def _cmd_lefschetz(args, out: _Out) -> int:
    lp = _load(args)
    if isinstance(lp.problem, CoincidenceProblem):
        phi = lefschetz_endomorphism(lp.problem)
        lam, big = lefschetz_number(phi), generalized_lefschetz(phi)
    else:
        rep = report_for(lp)
        lam, big = rep.lefschetz, rep.generalized_lefschetz
    fmt = lambda x: None if x is None else format_rational(x)
    out.emit({"command": "lefschetz", "problem": lp.name, "lefschetz": fmt(lam), "generalized_lefschetz": fmt(big)},
             f"{lp.name}\n  lefschetz: {fmt(lam)}\n  generalized_lefschetz: {fmt(big)}")
    return EXIT_OK


def _cmd_index(args, out: _Out) -> int:
    lp = _load(args)
    idx = format_rational(coincidence_index(_require_geometric(lp, "the coincidence index")))
    out.emit({"command": "index", "problem": lp.name, "index": idx}, f"{lp.name}\n  index: {idx}")
    return EXIT_OK


def _cmd_verify(args, out: _Out) -> int:
    rep = report_for(_load(args))
    out.emit({"command": "verify", **rep.to_record()}, rep.to_text())
    return EXIT_OK


def run_corpus() -> list[tuple[str, CoincidenceReport | None, str]]:
    """Evaluate every bundled problem in name order; returns (name, report, error)."""
    results = []
    for path in corpus_problems():
        try:
            rep = report_for(load_problem(path))
            results.append((rep.name, rep, ""))
        except (ParseError, *COMPUTATIONAL) as e:
            results.append((path.stem, None, str(e)))
    return sorted(results, key=lambda r: r[0])


def _cmd_corpus(args, out: _Out) -> int:
    results = run_corpus()
    failed = 0
    header = f"{'problem':30} {'mode':12} {'index':>6} {'lefschetz':>9} {'Lambda':>6} {'identity':>8}  verdict"
    lines = [header]
    fmt = lambda x: "-" if x is None else format_rational(x)
    for name, rep, err in results:
        if rep is None:
            failed += 1
            out_line = f"{name:30} ERROR {err}"
            rec = {"command": "corpus", "problem": name, "error": err}
        else:
            ok = rep.identity_holds is not False
            failed += not ok
            ident = {None: "n/a", True: "ok", False: "FAIL"}[rep.identity_holds]
            out_line = (f"{name:30} {rep.mode:12} {fmt(rep.index):>6} {fmt(rep.lefschetz):>9} "
                        f"{fmt(rep.generalized_lefschetz):>6} {ident:>8}  {rep.verdict}")
            rec = {"command": "corpus", **rep.to_record()}
        if out.fmt == "records":
            out.emit(rec, "")
        lines.append(out_line)
    summary = f"{len(results) - failed}/{len(results)} problems pass"
    if out.fmt == "text":
        out.emit({}, "\n".join(lines + [summary]))
    else:
        out.emit({"command": "corpus", "summary": summary, "failed": failed}, "")
    return EXIT_OK if not failed else EXIT_COMPUTE


HANDLERS = {
    "homology": _cmd_homology,
    "fundamental": _cmd_fundamental,
    "dual-basis": _cmd_dual_basis,
    "transfer": _cmd_transfer,
    "lefschetz": _cmd_lefschetz,
    "index": _cmd_index,
    "verify": _cmd_verify,
    "corpus": _cmd_corpus,
}


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
        if args.command not in ("corpus",) and not args.path:
            raise UsageError(f"{args.command} needs a path")
        return HANDLERS[args.command](args, _Out(args.format, stdout))
    except UsageError as e:
        stderr.write(parser.format_usage() + f"coincide: error: {e}\n")
        return EXIT_USAGE
    except ParseError as e:
        stderr.write(f"coincide: parse error: {e}\n")
        return EXIT_PARSE
    except COMPUTATIONAL as e:
        stderr.write(f"coincide: {e}\n")
        return EXIT_COMPUTE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
