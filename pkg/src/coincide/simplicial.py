"""Finite simplicial complexes, pairs, chains and simplicial maps.

Simplices are tuples of vertex labels in canonical (ascending) order with
respect to the complex's vertex list.  Within one degree, simplices are
ordered lexicographically by vertex position, which fixes every matrix
index in the package.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .linalg import Matrix, as_rational

Simplex = tuple


class ComplexError(ValueError):
    """Malformed complex, pair or map."""


class StructuralError(ComplexError):
    """A complex lacks the pseudo-manifold structure an operation needs."""


def permutation_sign(seq: Sequence[int]) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class SimplicialComplex:
    """A finite abstract simplicial complex with a global vertex order."""

    def __init__(self, vertices: Sequence, simplices: Iterable[Iterable] = ()):
        vertices = tuple(vertices)
        if len(set(vertices)) != len(vertices):
            raise ComplexError("duplicate vertex label")
        self.vertices = vertices
        self._pos = {v: i for i, v in enumerate(vertices)}
        faces: set[tuple] = {(v,) for v in vertices}
        for s in simplices:
            s = tuple(s)
            if not s:
                continue
            for v in s:
                if v not in self._pos:
                    raise ComplexError(f"unknown vertex {v!r}")
            if len(set(s)) != len(s):
                raise ComplexError(f"repeated vertex in simplex {s!r}")
            s = self.canonical(s)
            if s in faces:
                continue
            for k in range(1, len(s) + 1):
                faces.update(combinations(s, k))
        by_dim: dict[int, list[tuple]] = {}
        for s in faces:
            by_dim.setdefault(len(s) - 1, []).append(s)
        key = lambda s: tuple(self._pos[v] for v in s)
        self._simplices = {q: tuple(sorted(ss, key=key)) for q, ss in by_dim.items()}
        self._index = {q: {s: i for i, s in enumerate(ss)} for q, ss in self._simplices.items()}
        self.dim = max(self._simplices, default=-1)
        self._key = (self.vertices, frozenset(faces))

    def canonical(self, s: Iterable) -> tuple:
        return tuple(sorted(s, key=self._pos.__getitem__))

    def oriented(self, s: Sequence) -> tuple[tuple, int]:
        """Canonical form of an ordered simplex and the sign of the sorting permutation."""
        pos = [self._pos[v] for v in s]
        return self.canonical(s), permutation_sign(pos)

    def position(self, v) -> int:
        return self._pos[v]

    def simplices(self, q: int) -> tuple[tuple, ...]:
        return self._simplices.get(q, ())

    def all_simplices(self) -> Iterable[tuple]:
        for q in range(self.dim + 1):
            yield from self._simplices[q]

    def count(self, q: int) -> int:
        return len(self._simplices.get(q, ()))

    def index(self, s: tuple) -> int:
        return self._index[len(s) - 1][s]

    def __contains__(self, s) -> bool:
        s = tuple(s)
        if not s or any(v not in self._pos for v in s):
            return False
        return self.canonical(s) in self._index.get(len(s) - 1, {})

    def maximal_simplices(self) -> list[tuple]:
        out = []
        for q in range(self.dim, -1, -1):
            for s in self._simplices[q]:
                if not any(set(s) < set(t) for t in out):
                    out.append(s)
        key = lambda s: (len(s), tuple(self._pos[v] for v in s))
        return sorted(out, key=key)

    def is_pure(self) -> bool:
        return all(len(s) - 1 == self.dim for s in self.maximal_simplices())

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * self.count(q) for q in range(self.dim + 1))

    def f_vector(self) -> tuple[int, ...]:
        return tuple(self.count(q) for q in range(self.dim + 1))

    def subcomplex(self, simplices: Iterable[Iterable]) -> "SimplicialComplex":
        """Face-closure of ``simplices`` using this complex's vertex order."""
        simplices = [tuple(s) for s in simplices]
        for s in simplices:
            if s not in self:
                raise ComplexError(f"{s!r} is not a simplex of the complex")
        used = {v for s in simplices for v in s}
        verts = [v for v in self.vertices if v in used]
        return SimplicialComplex(verts, simplices)

    def empty_subcomplex(self) -> "SimplicialComplex":
        return SimplicialComplex((), ())

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return all(s in other for s in self.all_simplices())

    def reordered(self, vertices: Sequence) -> "SimplicialComplex":
        """Same complex under a different global vertex order."""
        if set(vertices) != set(self.vertices) or len(vertices) != len(self.vertices):
            raise ComplexError("new order must be a permutation of the vertices")
        return SimplicialComplex(vertices, self.maximal_simplices())

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        adj = {v: set() for v in self.vertices}
        for a, b in self.simplices(1):
            adj[a].add(b)
            adj[b].add(a)
        seen = {self.vertices[0]}
        todo = [self.vertices[0]]
        while todo:
            for w in adj[todo.pop()]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == len(self.vertices)

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplicialComplex) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"SimplicialComplex(f_vector={self.f_vector()})"


def validate_complex(simplices: Iterable[Iterable], vertices: Sequence) -> SimplicialComplex:
    """Face-closure of the given simplices, rejecting unknown or repeated vertices."""
    return SimplicialComplex(vertices, simplices)


@dataclass(frozen=True)
class SimplicialPair:
    """A complex together with a subcomplex (which may be empty)."""

    total: SimplicialComplex
    sub: SimplicialComplex = field(default_factory=lambda: SimplicialComplex(()))

    def __post_init__(self):
        if not self.sub.is_subcomplex_of(self.total):
            raise ComplexError("sub is not a subcomplex of total")
        rel = {
            q: tuple(s for s in self.total.simplices(q) if s not in self.sub)
            for q in range(self.total.dim + 1)
        }
        object.__setattr__(self, "_rel", rel)
        object.__setattr__(self, "_rel_index", {q: {s: i for i, s in enumerate(ss)} for q, ss in rel.items()})

    @classmethod
    def absolute(cls, k: SimplicialComplex) -> "SimplicialPair":
        return cls(k, SimplicialComplex(()))

    @property
    def dim(self) -> int:
        return self.total.dim

    def is_absolute(self) -> bool:
        return self.sub.dim < 0

    def cells(self, q: int) -> tuple[tuple, ...]:
        """Simplices of total not in sub, in lexicographic order."""
        return self._rel.get(q, ())

    def rank(self, q: int) -> int:
        return len(self.cells(q))

    def cell_index(self, s: tuple) -> int | None:
        return self._rel_index.get(len(s) - 1, {}).get(s)

    def chain_to_vector(self, c: "Chain") -> list[Fraction]:
        """Coordinates of ``c`` in the relative chain group (sub simplices dropped)."""
        vec = [Fraction(0)] * self.rank(c.degree)
        for s, v in c.terms.items():
            if s not in self.total:
                raise ComplexError(f"{s!r} is not a simplex of the complex")
            i = self.cell_index(s)
            if i is not None:
                vec[i] += v
        return vec

    def vector_to_chain(self, vec: Sequence, q: int) -> "Chain":
        cells = self.cells(q)
        if len(vec) != len(cells):
            raise ComplexError("vector length does not match chain group rank")
        return Chain(q, {s: v for s, v in zip(cells, vec) if v})

    def __hash__(self) -> int:
        return hash((self.total, self.sub))

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplicialPair) and self.total == other.total and self.sub == other.sub


@dataclass(frozen=True)
class Chain:
    """A finite rational combination of canonical q-simplices."""

    degree: int
    terms: Mapping[tuple, Fraction]

    def __post_init__(self):
        clean = {}
        for s, v in self.terms.items():
            s = tuple(s)
            if len(s) != self.degree + 1:
                raise ComplexError(f"simplex {s!r} has wrong dimension for degree {self.degree}")
            v = as_rational(v)
            if v:
                clean[s] = clean.get(s, 0) + v
        object.__setattr__(self, "terms", {s: v for s, v in clean.items() if v})

    def __add__(self, other: "Chain") -> "Chain":
        if self.degree != other.degree:
            raise ComplexError("degree mismatch")
        acc = dict(self.terms)
        for s, v in other.terms.items():
            acc[s] = acc.get(s, 0) + v
        return Chain(self.degree, acc)

    def scale(self, c) -> "Chain":
        c = as_rational(c)
        return Chain(self.degree, {s: c * v for s, v in self.terms.items()})

    def __neg__(self) -> "Chain":
        return self.scale(-1)

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.terms

    def boundary(self) -> "Chain":
        if self.degree == 0:
            return Chain(-1, {})
        acc: dict[tuple, Fraction] = {}
        for s, v in self.terms.items():
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                acc[face] = acc.get(face, 0) + (v if i % 2 == 0 else -v)
        return Chain(self.degree - 1, acc)

    def __eq__(self, other) -> bool:
        return isinstance(other, Chain) and self.degree == other.degree and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.degree, frozenset(self.terms.items())))


def reduce_mod(c: Chain, sub: SimplicialComplex) -> Chain:
    """Drop the terms supported in ``sub``."""
    return Chain(c.degree, {s: v for s, v in c.terms.items() if s not in sub})


def boundary_matrix(pair: SimplicialPair, q: int) -> Matrix:
    """Matrix of the relative boundary C_q -> C_{q-1}; rows are (q-1)-cells."""
    cols = pair.cells(q)
    if q <= 0:
        return Matrix.zeros(0, len(cols))
    entries = {}
    for j, s in enumerate(cols):
        for i in range(len(s)):
            r = pair.cell_index(s[:i] + s[i + 1:])
            if r is not None:
                entries[(r, j)] = 1 if i % 2 == 0 else -1
    return Matrix(pair.rank(q - 1), len(cols), entries)


def _top_face_incidence(k: SimplicialComplex) -> dict[tuple, list[tuple[tuple, int]]]:
    """For each (n-1)-face, the top simplices containing it with the omitted index."""
    inc: dict[tuple, list] = {}
    for s in k.simplices(k.dim):
        for i in range(len(s)):
            inc.setdefault(s[:i] + s[i + 1:], []).append((s, i))
    return inc


def boundary_subcomplex(k: SimplicialComplex) -> SimplicialComplex:
    """Subcomplex generated by the (n-1)-faces lying in exactly one n-simplex."""
    if not k.is_pure():
        raise StructuralError("complex is not pure")
    if k.dim <= 0:
        return SimplicialComplex(())
    faces = []
    for face, cof in _top_face_incidence(k).items():
        if len(cof) > 2:
            raise StructuralError(f"not a manifold-like complex: face {face!r} lies in {len(cof)} top simplices")
        if len(cof) == 1:
            faces.append(face)
    return k.subcomplex(faces)


@dataclass(frozen=True)
class OrientationData:
    """Coherent sign per top simplex (relative to its canonical vertex order)."""

    signs: Mapping[tuple, int]
    seed: tuple
    seed_sign: int = 1

    def __getitem__(self, s: tuple) -> int:
        return self.signs[s]

    def reversed(self) -> "OrientationData":
        return OrientationData({s: -e for s, e in self.signs.items()}, self.seed, -self.seed_sign)


def coherent_orientation(k: SimplicialComplex, seed: Sequence | None = None) -> OrientationData | None:
    """Propagate an orientation across the top-dimensional adjacency graph.

    ``seed`` is an ordered top simplex declared positive; by default the
    lexicographically first top simplex in canonical order.  Returns None when
    the complex is not orientable.
    """
    if k.dim < 0:
        raise StructuralError("empty complex has no orientation")
    if not k.is_pure():
        raise StructuralError("complex is not pure")
    tops = k.simplices(k.dim)
    inc = _top_face_incidence(k) if k.dim > 0 else {}
    for face, cof in inc.items():
        if len(cof) > 2:
            raise StructuralError(f"face {face!r} lies in {len(cof)} top simplices")
    if seed is None:
        start, sign0 = tops[0], 1
        seed = tops[0]
    else:
        seed = tuple(seed)
        start, sign0 = k.oriented(seed)
        if len(seed) != k.dim + 1 or start not in k._index.get(k.dim, {}):
            raise StructuralError(f"orientation seed {seed!r} is not a top simplex")
    neighbours: dict[tuple, list] = {s: [] for s in tops}
    for cof in inc.values():
        if len(cof) == 2:
            (s, i), (t, j) = cof
            neighbours[s].append((t, i, j))
            neighbours[t].append((s, j, i))
    signs = {start: sign0}
    todo = deque([start])
    while todo:
        s = todo.popleft()
        for t, i, j in neighbours[s]:
            # induced orientations eps*(-1)^i on the shared face must cancel
            want = -signs[s] * (-1) ** (i + j)
            if t in signs:
                if signs[t] != want:
                    return None
            else:
                signs[t] = want
                todo.append(t)
    if len(signs) != len(tops):
        raise StructuralError("top-dimensional adjacency graph is not connected")
    return OrientationData(signs, tuple(seed))


class SimplicialMap:
    """Vertex map between complexes sending simplices onto simplices."""

    def __init__(self, source: SimplicialComplex, target: SimplicialComplex, vertex_map: Mapping):
        self.source = source
        self.target = target
        self.vertex_map = dict(vertex_map)
        missing = [v for v in source.vertices if v not in self.vertex_map]
        if missing:
            raise ComplexError(f"vertex map undefined on {missing!r}")
        for v, w in self.vertex_map.items():
            if v not in source._pos:
                raise ComplexError(f"{v!r} is not a source vertex")
            if w not in target._pos:
                raise ComplexError(f"{w!r} is not a target vertex")
        for s in source.maximal_simplices():
            if self.image_set(s) not in target:
                raise ComplexError(f"image of {s!r} is not a simplex of the target")

    def __call__(self, v):
        return self.vertex_map[v]

    def image_set(self, s: Iterable) -> tuple:
        return self.target.canonical(set(self.vertex_map[v] for v in s))

    def image(self, s: tuple) -> tuple[tuple | None, int]:
        """Oriented image of a canonical simplex: (canonical target simplex, sign), or (None, 0) if degenerate."""
        img = [self.vertex_map[v] for v in s]
        if len(set(img)) < len(img):
            return None, 0
        return self.target.oriented(img)

    def maps_into(self, src_sub: SimplicialComplex, tgt_sub: SimplicialComplex) -> bool:
        return all(self.image_set(s) in tgt_sub for s in src_sub.maximal_simplices())

    def compose(self, other: "SimplicialMap") -> "SimplicialMap":
        """``self`` after ``other``."""
        return SimplicialMap(other.source, self.target, {v: self.vertex_map[w] for v, w in other.vertex_map.items()})

    def push(self, c: Chain) -> Chain:
        acc: dict[tuple, Fraction] = {}
        for s, v in c.terms.items():
            t, sign = self.image(s)
            if t is not None:
                acc[t] = acc.get(t, 0) + sign * v
        return Chain(c.degree, acc)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SimplicialMap)
            and self.source == other.source
            and self.target == other.target
            and self.vertex_map == other.vertex_map
        )

    def __hash__(self) -> int:
        return hash((self.source, self.target, frozenset(self.vertex_map.items())))


def identity_map(k: SimplicialComplex) -> SimplicialMap:
    return SimplicialMap(k, k, {v: v for v in k.vertices})


def constant_map(source: SimplicialComplex, target: SimplicialComplex, w) -> SimplicialMap:
    return SimplicialMap(source, target, {v: w for v in source.vertices})


def induced_chain_map(f: SimplicialMap, q: int, source: SimplicialPair, target: SimplicialPair) -> Matrix:
    """Matrix of f_# on relative q-chains (rows: target cells, cols: source cells)."""
    if f.source != source.total or f.target != target.total:
        raise ComplexError("map does not match the given pairs")
    if not f.maps_into(source.sub, target.sub):
        raise ComplexError("map does not send the source subcomplex into the target subcomplex")
    entries = {}
    for j, s in enumerate(source.cells(q)):
        t, sign = f.image(s)
        if t is None:
            continue
        i = target.cell_index(t)
        if i is not None:
            entries[(i, j)] = sign
    return Matrix(target.rank(q), source.rank(q), entries)


@dataclass(frozen=True)
class TensorChain:
    """Element of C ⊗ C: coefficients on pairs (left simplex, right simplex)."""

    degree: int
    terms: Mapping[tuple[tuple, tuple], Fraction]

    def __post_init__(self):
        clean = {}
        for (a, b), v in self.terms.items():
            if len(a) + len(b) - 2 != self.degree:
                raise ComplexError("tensor term has inconsistent degree")
            v = as_rational(v)
            if v:
                clean[(a, b)] = clean.get((a, b), 0) + v
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if v})

    def pairs(self) -> list[tuple[Chain, Chain]]:
        return [(Chain(len(a) - 1, {a: v}), Chain(len(b) - 1, {b: 1})) for (a, b), v in self.terms.items()]

    def component(self, j: int) -> "TensorChain":
        """Part with left factor of degree j."""
        return TensorChain(self.degree, {k: v for k, v in self.terms.items() if len(k[0]) - 1 == j})

    def boundary(self) -> "TensorChain":
        """∂(a⊗b) = ∂a⊗b + (-1)^|a| a⊗∂b."""
        acc: dict = {}
        for (a, b), v in self.terms.items():
            p = len(a) - 1
            if p > 0:
                for i in range(len(a)):
                    key = (a[:i] + a[i + 1:], b)
                    acc[key] = acc.get(key, 0) + (v if i % 2 == 0 else -v)
            if len(b) > 1:
                sgn = -1 if p % 2 else 1
                for i in range(len(b)):
                    key = (a, b[:i] + b[i + 1:])
                    acc[key] = acc.get(key, 0) + sgn * (v if i % 2 == 0 else -v)
        return TensorChain(self.degree - 1, acc)

    def __add__(self, other: "TensorChain") -> "TensorChain":
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0) + v
        return TensorChain(self.degree, acc)

    def is_zero(self) -> bool:
        return not self.terms


def aw_diagonal(c: Chain) -> TensorChain:
    """Alexander–Whitney diagonal: [v0..vq] -> Σ_p [v0..vp] ⊗ [vp..vq]."""
    acc: dict = {}
    for s, v in c.terms.items():
        for p in range(len(s)):
            key = (s[: p + 1], s[p:])
            acc[key] = acc.get(key, 0) + v
    return TensorChain(c.degree, acc)


def _product_label(a, b) -> str:
    return f"{a}:{b}"


def simplicial_product(k: SimplicialComplex, l: SimplicialComplex) -> SimplicialComplex:
    """Staircase triangulation of |k| x |l| with the lexicographic vertex order."""
    verts = [_product_label(a, b) for a in k.vertices for b in l.vertices]
    tops = []
    for s in k.maximal_simplices():
        for t in l.maximal_simplices():
            p, q = len(s) - 1, len(t) - 1
            # monotone lattice paths from (0,0) to (p,q)
            for rights in combinations(range(p + q), p):
                i = j = 0
                path = [(s[0], t[0])]
                for step in range(p + q):
                    if step in rights:
                        i += 1
                    else:
                        j += 1
                    path.append((s[i], t[j]))
                tops.append([_product_label(a, b) for a, b in path])
    return SimplicialComplex(verts, tops)


def product_projections(k: SimplicialComplex, l: SimplicialComplex, prod: SimplicialComplex | None = None):
    """The two coordinate projections of ``simplicial_product(k, l)``."""
    prod = prod or simplicial_product(k, l)
    p1 = SimplicialMap(prod, k, {_product_label(a, b): a for a in k.vertices for b in l.vertices})
    p2 = SimplicialMap(prod, l, {_product_label(a, b): b for a in k.vertices for b in l.vertices})
    return p1, p2


def prism_product(k: SimplicialComplex) -> tuple[SimplicialComplex, SimplicialMap, SimplicialMap]:
    """|k| x [0,1] with its bottom and top inclusions."""
    interval = SimplicialComplex(("0", "1"), [("0", "1")])
    prism = simplicial_product(k, interval)
    bottom = SimplicialMap(k, prism, {v: _product_label(v, "0") for v in k.vertices})
    top = SimplicialMap(k, prism, {v: _product_label(v, "1") for v in k.vertices})
    return prism, bottom, top
