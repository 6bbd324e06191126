"""Line-based text formats for complexes (.cx), maps (.map) and problems (.prob).

Each non-blank line is ``keyword arguments...``; ``#`` starts a comment.
Files reference one another by name, resolved relative to the referencing
file's directory.  See docs/FORMAT.md for the field reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterator, Mapping

from .coincidence import AbstractProblem, CoincidenceProblem, ProblemError
from .homology import GradedLinearMap
from .linalg import Matrix, format_rational
from .simplicial import ComplexError, SimplicialComplex, SimplicialMap, SimplicialPair, boundary_subcomplex

EXTENSIONS = {"complex": ".cx", "map": ".map", "problem": ".prob"}
PROBLEM_MODES = ("case1", "general", "abstract", "multivalued")
MU_RULES = ("auto", "fundamental", "lift", "zero")


class ParseError(ValueError):
    """Malformed input file; message carries path and line number."""

    def __init__(self, message: str, path: str | Path | None = None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


def corpus_dir() -> Path:
    return Path(str(resources.files("coincide") / "corpus"))


def resolve_path(ref: str | Path, kind: str | None = None, base: Path | None = None) -> Path:
    """Locate a file; ``corpus/NAME`` refers to the bundled corpus and extensions may be omitted."""
    ref = str(ref)
    candidates = []
    if ref.startswith("corpus/") and not Path(ref).exists():
        root, name = corpus_dir(), ref[len("corpus/"):]
    else:
        root, name = (base or Path.cwd()), ref
    exts = [EXTENSIONS[kind]] if kind else list(EXTENSIONS.values())
    candidates.append(root / name)
    candidates.extend(root / (name + e) for e in exts)
    for c in candidates:
        if c.is_file():
            return c
    raise ParseError(f"cannot resolve {kind or 'file'} reference {ref!r}", base)


def _lines(text: str) -> Iterator[tuple[int, str, list[str]]]:
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            key, _, rest = line.partition(" ")
            yield no, key, rest.split()


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(str(e), path) from e


# -- complexes --------------------------------------------------------------

@dataclass(frozen=True)
class ComplexFile:
    name: str
    complex: SimplicialComplex
    subcomplex_defs: Mapping[str, object] = field(default_factory=dict)  # "auto-boundary" | "empty" | simplex list
    orientation: tuple | None = None

    def subcomplex(self, name: str) -> SimplicialComplex:
        if name in ("empty", "none"):
            return self.complex.empty_subcomplex()
        if name == "auto-boundary":
            return boundary_subcomplex(self.complex)
        if name not in self.subcomplex_defs:
            raise ParseError(f"complex {self.name!r} has no subcomplex {name!r}")
        entry = self.subcomplex_defs[name]
        if entry in ("auto-boundary", "empty"):
            return self.subcomplex(entry)
        return self.complex.subcomplex(entry)

    def pair(self, sub: str | None) -> SimplicialPair:
        if sub is None:
            return SimplicialPair.absolute(self.complex)
        return SimplicialPair(self.complex, self.subcomplex(sub))


def _simplex_list(tokens: list[str]) -> list[tuple[str, ...]]:
    text = " ".join(tokens)
    return [tuple(part.split()) for part in text.split(",") if part.strip()]


def parse_complex_text(text: str, path: Path | None = None) -> ComplexFile:
    name, vertices, simplices, subs, orient = None, None, [], {}, None
    for no, key, args in _lines(text):
        if key == "complex":
            if len(args) != 1:
                raise ParseError("complex takes one name", path, no)
            name = args[0]
        elif key == "vertices":
            if vertices is not None:
                raise ParseError("duplicate vertices line", path, no)
            vertices = args
        elif key == "simplex":
            if not args:
                raise ParseError("empty simplex", path, no)
            if vertices is None:
                raise ParseError("simplex before vertices", path, no)
            unknown = [v for v in args if v not in vertices]
            if unknown:
                raise ParseError(f"unknown vertex {unknown[0]!r}", path, no)
            if len(set(args)) != len(args):
                raise ParseError("repeated vertex in simplex", path, no)
            simplices.append(tuple(args))
        elif key == "subcomplex":
            if not args:
                raise ParseError("subcomplex needs a name", path, no)
            sname, rest = args[0], args[1:]
            if sname in subs:
                raise ParseError(f"duplicate subcomplex {sname!r}", path, no)
            if rest in (["auto-boundary"], ["empty"]):
                subs[sname] = rest[0]
            else:
                lst = _simplex_list(rest)
                if not lst:
                    raise ParseError("subcomplex needs simplices, auto-boundary or empty", path, no)
                subs[sname] = lst
        elif key == "orient":
            if vertices is None or any(v not in vertices for v in args):
                raise ParseError("orient names an unknown vertex", path, no)
            orient = tuple(args)
        else:
            raise ParseError(f"unknown keyword {key!r}", path, no)
    if name is None or vertices is None:
        raise ParseError("complex and vertices lines are required", path)
    if len(set(vertices)) != len(vertices):
        raise ParseError("duplicate vertex name", path)
    try:
        k = SimplicialComplex(vertices, simplices)
        cf = ComplexFile(name, k, subs, orient)
        for s in subs:
            cf.subcomplex(s)
        if orient is not None and k.canonical(orient) not in k.simplices(k.dim):
            raise ParseError("orient must list a top simplex", path)
    except ComplexError as e:
        raise ParseError(str(e), path) from e
    return cf


def parse_complex(path: str | Path) -> ComplexFile:
    path = Path(path)
    return parse_complex_text(_read(path), path)


def emit_complex(cf: ComplexFile) -> str:
    k = cf.complex
    out = [f"complex {cf.name}", "vertices " + " ".join(map(str, k.vertices))]
    out += ["simplex " + " ".join(map(str, s)) for s in k.maximal_simplices()]
    for name, entry in cf.subcomplex_defs.items():
        if isinstance(entry, str):
            out.append(f"subcomplex {name} {entry}")
        else:
            out.append(f"subcomplex {name} " + ", ".join(" ".join(map(str, s)) for s in entry))
    if cf.orientation is not None:
        out.append("orient " + " ".join(map(str, cf.orientation)))
    return "\n".join(out) + "\n"


# -- maps -------------------------------------------------------------------

@dataclass(frozen=True)
class MapFile:
    name: str
    source: ComplexFile
    target: ComplexFile
    map: SimplicialMap
    source_ref: str = ""
    target_ref: str = ""


def parse_map(path: str | Path) -> MapFile:
    path = Path(path)
    name = src = tgt = None
    table: dict[str, str] = {}
    for no, key, args in _lines(_read(path)):
        if key in ("map", "source", "target") and len(args) != 1:
            raise ParseError(f"{key} takes one argument", path, no)
        if key == "map":
            name = args[0]
        elif key == "source":
            src = args[0]
        elif key == "target":
            tgt = args[0]
        elif key == "send":
            if len(args) != 2:
                raise ParseError("send takes a source and a target vertex", path, no)
            if args[0] in table:
                raise ParseError(f"vertex {args[0]!r} sent twice", path, no)
            table[args[0]] = args[1]
        else:
            raise ParseError(f"unknown keyword {key!r}", path, no)
    if name is None or src is None or tgt is None:
        raise ParseError("map, source and target lines are required", path)
    s = parse_complex(resolve_path(src, "complex", path.parent))
    t = parse_complex(resolve_path(tgt, "complex", path.parent))
    missing = [v for v in s.complex.vertices if v not in table]
    if missing:
        raise ParseError(f"map is not total: no image for {missing[0]!r}", path)
    extra = [v for v in table if v not in s.complex.vertices]
    if extra:
        raise ParseError(f"unknown source vertex {extra[0]!r}", path)
    try:
        m = SimplicialMap(s.complex, t.complex, table)
    except ComplexError as e:
        raise ParseError(str(e), path) from e
    return MapFile(name, s, t, m, src, tgt)


def emit_map(mf: MapFile) -> str:
    out = [f"map {mf.name}", f"source {mf.source_ref or mf.source.name}", f"target {mf.target_ref or mf.target.name}"]
    out += [f"send {v} {mf.map.vertex_map[v]}" for v in mf.map.source.vertices]
    return "\n".join(out) + "\n"


# -- problems ---------------------------------------------------------------

@dataclass
class ProblemFile:
    """Raw problem fields, kept for emission; ``build`` resolves them."""

    name: str
    mode: str
    fields: dict[str, list[str]]
    path: Path | None = None
    blocks: dict[str, dict[int, str]] = field(default_factory=dict)  # abstract matrices as text

    def get(self, key: str, default=None):
        v = self.fields.get(key)
        return default if v is None else v


_SINGLE = {"mode", "domain", "domain-sub", "target", "f", "g", "assume-disjoint", "n", "dims-rel"}
_LIST = {"mu", "dims-x", "dims-s", "fstar-rel"}
_BLOCKS = {"fstar", "gstar", "phi"}
_REQUIRED = {
    "case1": {"domain", "target", "f", "g"},
    "general": {"domain", "target", "f", "g"},
    "multivalued": {"domain", "target", "f", "g"},
    "abstract": {"n", "dims-x", "dims-s"},
}
_ALLOWED = {
    "case1": {"domain", "domain-sub", "target", "f", "g", "mu", "assume-disjoint"},
    "general": {"domain", "domain-sub", "target", "f", "g", "mu", "assume-disjoint"},
    "multivalued": {"domain", "target", "f", "g", "assume-disjoint"},
    "abstract": {"n", "dims-x", "dims-s", "dims-rel", "fstar-rel", "mu", "fstar", "gstar", "phi"},
}


def parse_problem_text(text: str, path: Path | None = None) -> ProblemFile:
    name = None
    fields: dict[str, list[str]] = {}
    blocks: dict[str, dict[int, str]] = {}
    for no, key, args in _lines(text):
        if key == "problem":
            if len(args) != 1:
                raise ParseError("problem takes one name", path, no)
            name = args[0]
        elif key in _SINGLE:
            if len(args) != 1:
                raise ParseError(f"{key} takes one argument", path, no)
            if key in fields:
                raise ParseError(f"duplicate {key}", path, no)
            fields[key] = args
        elif key in _LIST:
            if key in fields:
                raise ParseError(f"duplicate {key}", path, no)
            fields[key] = args
        elif key in _BLOCKS:
            if len(args) < 2 or args[1] != "=":
                raise ParseError(f"expected '{key} DEGREE = rows'", path, no)
            try:
                q = int(args[0])
            except ValueError:
                raise ParseError(f"bad degree {args[0]!r}", path, no) from None
            blocks.setdefault(key, {})
            if q in blocks[key]:
                raise ParseError(f"duplicate {key} block in degree {q}", path, no)
            blocks[key][q] = " ".join(args[2:])
        else:
            raise ParseError(f"unknown keyword {key!r}", path, no)
    if name is None:
        raise ParseError("problem line is required", path)
    mode = fields.get("mode", ["general"])[0]
    if mode not in PROBLEM_MODES:
        raise ParseError(f"unknown mode {mode!r}", path)
    present = set(fields) - {"mode"} | set(blocks)
    missing = _REQUIRED[mode] - present
    if missing:
        raise ParseError(f"mode {mode} requires {', '.join(sorted(missing))}", path)
    stray = present - _ALLOWED[mode]
    if stray:
        raise ParseError(f"field {sorted(stray)[0]} is not valid in mode {mode}", path)
    if "assume-disjoint" in fields and fields["assume-disjoint"][0] not in ("yes", "no"):
        raise ParseError("assume-disjoint must be yes or no", path)
    return ProblemFile(name, mode, fields, path, blocks)


def parse_problem_file(path: str | Path) -> ProblemFile:
    path = Path(path)
    return parse_problem_text(_read(path), path)


def emit_problem(pf: ProblemFile) -> str:
    out = [f"problem {pf.name}", f"mode {pf.mode}"]
    for key, val in pf.fields.items():
        if key != "mode":
            out.append(f"{key} {' '.join(val)}".rstrip())
    for key, blk in pf.blocks.items():
        for q, rows in sorted(blk.items()):
            out.append(f"{key} {q} = {rows}".rstrip())
    return "\n".join(out) + "\n"


def parse_rational(token: str) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {token!r}") from None


def parse_coords(text: str) -> tuple[Fraction, ...]:
    return tuple(parse_rational(t) for t in text.replace(",", " ").split())


def _matrix(text: str, rows: int, cols: int, what: str) -> Matrix:
    parts = [r.split() for r in text.split(";")] if text.strip() else []
    if rows * cols == 0:
        if any(parts):
            raise ParseError(f"{what}: expected an empty {rows}x{cols} matrix")
        return Matrix.zeros(rows, cols)
    if len(parts) != rows or any(len(r) != cols for r in parts):
        raise ParseError(f"{what}: expected {rows} rows of {cols} entries")
    return Matrix.from_rows([[parse_rational(x) for x in r] for r in parts], cols)


def _dims(tokens: list[str], what: str) -> dict[int, int]:
    try:
        vals = [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"{what}: dimensions must be integers") from None
    if any(v < 0 for v in vals):
        raise ParseError(f"{what}: negative dimension")
    return dict(enumerate(vals))


@dataclass(frozen=True)
class LoadedProblem:
    """A parsed problem resolved to computable objects."""

    source: ProblemFile
    problem: CoincidenceProblem | AbstractProblem | None = None
    graph: tuple | None = None  # (graph complex, p1, p2) in multivalued mode

    @property
    def name(self) -> str:
        return self.source.name

    @property
    def mode(self) -> str:
        return self.source.mode


def build_problem(pf: ProblemFile, mu_override: str | None = None, assume_disjoint: bool | None = None) -> LoadedProblem:
    base = pf.path.parent if pf.path else Path.cwd()
    waive = pf.get("assume-disjoint", ["no"])[0] == "yes" if assume_disjoint is None else assume_disjoint
    mu_tokens = mu_override.replace(",", " ").split() if mu_override is not None else pf.get("mu")
    try:
        if pf.mode == "abstract":
            return LoadedProblem(pf, _build_abstract(pf, mu_tokens))
        dom = parse_complex(resolve_path(pf.fields["domain"][0], "complex", base))
        tgt = parse_complex(resolve_path(pf.fields["target"][0], "complex", base))
        f = parse_map(resolve_path(pf.fields["f"][0], "map", base))
        g = parse_map(resolve_path(pf.fields["g"][0], "map", base))
        for label, m in (("f", f), ("g", g)):
            if m.map.source != dom.complex or m.map.target != tgt.complex:
                raise ParseError(f"map {label} does not go from {dom.name} to {tgt.name}", pf.path)
        if pf.mode == "multivalued":
            return LoadedProblem(pf, graph=(dom.complex, f.map, g.map, waive))
        sub = pf.get("domain-sub", [None])[0]
        X = dom.pair(sub)
        mu = _mu_rule(mu_tokens)
        prob = CoincidenceProblem.build(
            X, tgt.complex, f.map, g.map, mu=mu, mode=pf.mode, assume_disjoint=waive,
            name=pf.name, orientation_seed=tgt.orientation, domain_seed=dom.orientation,
        )
        return LoadedProblem(pf, prob)
    except ParseError:
        raise
    except ProblemError:
        raise
    except ComplexError as e:
        raise ParseError(str(e), pf.path) from e


def _mu_rule(tokens: list[str] | None):
    if not tokens:
        return "auto"
    if len(tokens) == 1 and tokens[0] in MU_RULES:
        return tokens[0]
    if tokens[0] == "coords":
        tokens = tokens[1:]
    return tuple(parse_rational(t) for t in tokens)


def _build_abstract(pf: ProblemFile, mu_tokens) -> AbstractProblem:
    try:
        n = int(pf.fields["n"][0])
    except ValueError:
        raise ParseError("n must be an integer", pf.path) from None
    dx = _dims(pf.fields["dims-x"], "dims-x")
    ds = _dims(pf.fields["dims-s"], "dims-s")
    rel = int(pf.get("dims-rel", ["0"])[0])
    degrees = sorted(set(dx) | set(ds))

    def graded(key: str, square: bool) -> GradedLinearMap | None:
        blk = pf.blocks.get(key)
        if blk is None:
            return None
        bad = [q for q in blk if q not in degrees]
        if bad:
            raise ParseError(f"{key}: degree {bad[0]} outside the given dimensions", pf.path)
        out = {}
        for q in degrees:
            rows, cols = ds.get(q, 0), (ds.get(q, 0) if square else dx.get(q, 0))
            out[q] = _matrix(blk.get(q, ""), rows, cols, f"{key} degree {q}") if q in blk else Matrix.zeros(rows, cols)
        return GradedLinearMap(out)

    fstar = graded("fstar", False) or GradedLinearMap({q: Matrix.zeros(ds.get(q, 0), dx.get(q, 0)) for q in degrees})
    gstar = graded("gstar", False) or GradedLinearMap({q: Matrix.zeros(ds.get(q, 0), dx.get(q, 0)) for q in degrees})
    frel = None
    if "fstar-rel" in pf.fields:
        frel = _matrix(" ".join(pf.fields["fstar-rel"]), 1, rel, "fstar-rel")
    mu = None
    entry = _mu_rule(mu_tokens)
    if isinstance(entry, tuple):
        mu = entry
    elif entry == "zero":
        mu = (Fraction(0),) * rel
    elif entry not in ("auto", "lift"):
        raise ParseError(f"mu rule {entry!r} is not available in abstract mode", pf.path)
    try:
        return AbstractProblem(n, dx, ds, fstar, gstar, rel, frel, mu, graded("phi", True), pf.name)
    except ProblemError as e:
        raise ParseError(str(e), pf.path) from e


def load_problem(ref: str | Path, mu_override: str | None = None, assume_disjoint: bool | None = None) -> LoadedProblem:
    return build_problem(parse_problem_file(resolve_path(ref, "problem")), mu_override, assume_disjoint)


def format_matrix(m: Matrix) -> str:
    return "; ".join(" ".join(format_rational(x) for x in row) for row in m.to_rows())


def corpus_problems() -> list[Path]:
    return sorted(corpus_dir().glob("*.prob"))


def corpus_complexes() -> list[Path]:
    return sorted(corpus_dir().glob("*.cx"))
