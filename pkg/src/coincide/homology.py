"""Rational homology and cohomology of simplicial pairs.

Every :class:`HomologyBasis` carries, per degree, cycle representatives and
a Kronecker-dual family of cocycles.  Homology classes are coordinate
vectors in the representative basis; cohomology classes are coordinate
vectors in the dual cocycle basis, so the Kronecker pairing of coordinate
vectors is their dot product.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .linalg import (
    LinAlgError,
    Matrix,
    SubspaceBasis,
    as_rational,
    dot,
    image_basis,
    kernel_basis,
    quotient_representatives,
    solve_many,
)
from .simplicial import (
    Chain,
    ComplexError,
    SimplicialMap,
    SimplicialPair,
    aw_diagonal,
    boundary_matrix,
    induced_chain_map,
)


class HomologyError(ValueError):
    """Input is not a (co)cycle, or degrees do not fit."""


@dataclass(frozen=True)
class DegreeData:
    representatives: tuple[tuple[Fraction, ...], ...]  # cycle vectors on relative q-cells
    cocycles: tuple[tuple[Fraction, ...], ...]  # dual cocycle vectors on relative q-cells
    boundary: Matrix  # ∂_q on relative cells

    @property
    def betti(self) -> int:
        return len(self.representatives)


class HomologyBasis:
    """Rational homology of a pair with explicit representatives."""

    def __init__(self, pair: SimplicialPair):
        self.pair = pair
        self.top = pair.dim
        self._deg: dict[int, DegreeData] = {}
        boundaries = {q: boundary_matrix(pair, q) for q in range(self.top + 2)}
        for q in range(self.top + 1):
            d_q, d_next = boundaries[q], boundaries[q + 1]
            cycles = kernel_basis(d_q)
            bounds = image_basis(d_next)
            reps = quotient_representatives(cycles, bounds)
            self._deg[q] = DegreeData(reps.vectors, _dual_cocycles(reps, bounds), d_q)

    def betti(self, q: int) -> int:
        d = self._deg.get(q)
        return d.betti if d else 0

    def betti_numbers(self) -> tuple[int, ...]:
        return tuple(self.betti(q) for q in range(self.top + 1))

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * b for q, b in enumerate(self.betti_numbers()))

    def representatives(self, q: int) -> tuple[tuple[Fraction, ...], ...]:
        d = self._deg.get(q)
        return d.representatives if d else ()

    def cocycles(self, q: int) -> tuple[tuple[Fraction, ...], ...]:
        d = self._deg.get(q)
        return d.cocycles if d else ()

    def representative_chain(self, q: int, i: int) -> Chain:
        return self.pair.vector_to_chain(self.representatives(q)[i], q)

    def class_chain(self, q: int, coords: Sequence) -> Chain:
        """A cycle representing the class with the given coordinates."""
        coords = _check_len(coords, self.betti(q))
        vec = [Fraction(0)] * self.pair.rank(q)
        for c, rep in zip(coords, self.representatives(q)):
            if c:
                vec = [a + c * b for a, b in zip(vec, rep)]
        return self.pair.vector_to_chain(vec, q)

    def cocycle_vector(self, q: int, coords: Sequence) -> list[Fraction]:
        """A relative cocycle representing the cohomology class with these coordinates."""
        coords = _check_len(coords, self.betti(q))
        vec = [Fraction(0)] * self.pair.rank(q)
        for c, co in zip(coords, self.cocycles(q)):
            if c:
                vec = [a + c * b for a, b in zip(vec, co)]
        return vec

    def is_cycle_vector(self, q: int, vec: Sequence) -> bool:
        if q > self.top or q < 0:
            return not any(vec)
        return all(x == 0 for x in self._deg[q].boundary @ list(vec))

    def express_vector(self, q: int, vec: Sequence) -> list[Fraction]:
        vec = [as_rational(x) for x in vec]
        if len(vec) != self.pair.rank(q):
            raise HomologyError("chain vector has wrong length")
        if not self.is_cycle_vector(q, vec):
            raise HomologyError(f"not a relative cycle in degree {q}")
        return [dot(co, vec) for co in self.cocycles(q)]

    def express(self, z: Chain) -> list[Fraction]:
        """Coordinates of the class of a relative cycle."""
        try:
            vec = self.pair.chain_to_vector(z)
        except ComplexError as e:
            raise HomologyError(str(e)) from e
        return self.express_vector(z.degree, vec)

    def cocycle_coordinates(self, q: int, cochain: Sequence) -> list[Fraction]:
        """Coordinates of a relative cocycle (given on relative q-cells)."""
        cochain = [as_rational(x) for x in cochain]
        if len(cochain) != self.pair.rank(q):
            raise HomologyError("cochain vector has wrong length")
        d_next = boundary_matrix(self.pair, q + 1)
        if any(x != 0 for x in d_next.T @ cochain):
            raise HomologyError(f"not a relative cocycle in degree {q}")
        return [dot(cochain, rep) for rep in self.representatives(q)]

    def degrees(self) -> range:
        return range(self.top + 1)


def _check_len(coords: Sequence, n: int) -> list[Fraction]:
    coords = [as_rational(c) for c in coords]
    if len(coords) != n:
        raise HomologyError(f"expected {n} coordinates, got {len(coords)}")
    return coords


def _dual_cocycles(reps: SubspaceBasis, bounds: SubspaceBasis) -> tuple[tuple[Fraction, ...], ...]:
    """Functionals vanishing on boundaries with alpha_i(rep_j) = delta_ij."""
    b = reps.dim
    if b == 0:
        return ()
    n = reps.ambient_dim
    constraints = Matrix.from_rows(list(bounds.vectors) + list(reps.vectors), cols=n)
    rhs = Matrix(bounds.dim + b, b, {(bounds.dim + i, i): 1 for i in range(b)})
    sol = solve_many(constraints, rhs)
    if sol is None:  # cannot happen: boundaries and representatives are independent
        raise LinAlgError("failed to build dual cocycles")
    return tuple(tuple(sol.column(i)) for i in range(b))


@lru_cache(maxsize=256)
def homology(pair: SimplicialPair) -> HomologyBasis:
    return HomologyBasis(pair)


@dataclass(frozen=True)
class CohomologyBasis:
    """Cocycle basis Kronecker-dual to a homology basis."""

    homology: HomologyBasis

    def cocycles(self, q: int):
        return self.homology.cocycles(q)

    def dim(self, q: int) -> int:
        return self.homology.betti(q)


def cohomology(pair: SimplicialPair) -> CohomologyBasis:
    return CohomologyBasis(homology(pair))


class GradedLinearMap:
    """One rational matrix per degree.

    ``blocks[q]`` maps the degree-q part of the source to the degree-q part
    of the target (or, for the duality maps, is keyed by the cohomological
    degree as documented there).
    """

    def __init__(self, blocks: Mapping[int, Matrix]):
        self.blocks = {q: m for q, m in sorted(blocks.items())}

    def __getitem__(self, q: int) -> Matrix:
        return self.blocks[q]

    def get(self, q: int, default=None):
        return self.blocks.get(q, default)

    def degrees(self):
        return list(self.blocks)

    def source_dims(self) -> dict[int, int]:
        return {q: m.cols for q, m in self.blocks.items()}

    def target_dims(self) -> dict[int, int]:
        return {q: m.rows for q, m in self.blocks.items()}

    def is_endomorphism(self) -> bool:
        return all(m.is_square() for m in self.blocks.values())

    def __matmul__(self, other: "GradedLinearMap") -> "GradedLinearMap":
        """Degreewise composition ``self ∘ other``; a missing degree is the zero space."""
        out = {}
        for q in sorted(set(self.blocks) | set(other.blocks)):
            a = self.blocks.get(q, Matrix.zeros(0, other.blocks[q].rows if q in other.blocks else 0))
            b = other.blocks.get(q, Matrix.zeros(a.cols, 0))
            out[q] = a @ b
        return GradedLinearMap(out)

    def transpose(self) -> "GradedLinearMap":
        return GradedLinearMap({q: m.T for q, m in self.blocks.items()})

    @classmethod
    def identity(cls, dims: Mapping[int, int]) -> "GradedLinearMap":
        return cls({q: Matrix.identity(d) for q, d in dims.items()})

    @classmethod
    def zero(cls, dims: Mapping[int, int]) -> "GradedLinearMap":
        return cls({q: Matrix.zeros(d, d) for q, d in dims.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedLinearMap):
            return NotImplemented
        empty = Matrix.zeros(0, 0)
        for q in set(self.blocks) | set(other.blocks):
            a, b = self.blocks.get(q, empty), other.blocks.get(q, empty)
            if a != b and not (a.rows * a.cols == 0 and b.rows * b.cols == 0):
                return False
        return True

    def __repr__(self) -> str:
        return f"GradedLinearMap({self.blocks!r})"


def _check_map(f: SimplicialMap, source: SimplicialPair, target: SimplicialPair) -> None:
    if f.source != source.total or f.target != target.total:
        raise HomologyError("map does not match the given pairs")
    if not f.maps_into(source.sub, target.sub):
        raise HomologyError("map does not respect the pairs")


def induced_homology_map(f: SimplicialMap, source: SimplicialPair, target: SimplicialPair) -> GradedLinearMap:
    """f_* in the representative bases, degrees 0..dim(source)."""
    _check_map(f, source, target)
    hs, ht = homology(source), homology(target)
    blocks = {}
    for q in range(source.dim + 1):
        cols = []
        if hs.betti(q):
            fq = induced_chain_map(f, q, source, target)
            for rep in hs.representatives(q):
                cols.append(ht.express_vector(q, fq @ list(rep)) if ht.betti(q) else [])
        blocks[q] = Matrix.from_columns(cols, ht.betti(q))
    return GradedLinearMap(blocks)


def induced_cohomology_map(f: SimplicialMap, source: SimplicialPair, target: SimplicialPair) -> GradedLinearMap:
    """f^*: H^q(target) -> H^q(source), built from pulled-back cocycles."""
    _check_map(f, source, target)
    hs, ht = homology(source), homology(target)
    blocks = {}
    for q in range(source.dim + 1):
        cols = []
        if ht.betti(q):
            fq = induced_chain_map(f, q, source, target)
            for co in ht.cocycles(q):
                pulled = fq.T @ list(co)
                cols.append([dot(pulled, rep) for rep in hs.representatives(q)])
        blocks[q] = Matrix.from_columns(cols, hs.betti(q))
    return GradedLinearMap(blocks)


def kronecker(pair: SimplicialPair, q: int, alpha: Sequence, z: Sequence) -> Fraction:
    """<alpha, z> for class coordinates, evaluated on representatives."""
    h = homology(pair)
    cocycle = h.cocycle_vector(q, alpha)
    chain = h.class_chain(q, z)
    return dot(cocycle, pair.chain_to_vector(chain))


def evaluate(pair: SimplicialPair, cochain: Mapping[tuple, Fraction], c: Chain) -> Fraction:
    """Value of a cochain (given on simplices) on a chain."""
    return sum((v * as_rational(cochain.get(s, 0)) for s, v in c.terms.items()), Fraction(0))


def cap_chain(cochain: Mapping[tuple, Fraction], p: int, c: Chain) -> Chain:
    """alpha ⌢ [v0..vn] = alpha([v0..vp]) · [vp..vn]."""
    if p > c.degree:
        raise HomologyError("cochain degree exceeds chain degree")
    acc: dict[tuple, Fraction] = {}
    for s, v in c.terms.items():
        a = cochain.get(s[: p + 1])
        if a:
            back = s[p:]
            acc[back] = acc.get(back, 0) + a * v
    return Chain(c.degree - p, acc)


CAP_MODES = ("rel-to-abs", "abs-to-rel")


def cap(pair: SimplicialPair, alpha: Sequence, p: int, z: Sequence, n: int, mode: str) -> list[Fraction]:
    """Cap product of cohomology and homology classes given in coordinates.

    ``rel-to-abs``: H^p(K,L) x H_n(K,L) -> H_{n-p}(K).
    ``abs-to-rel``: H^p(K) x H_n(K,L) -> H_{n-p}(K,L).
    """
    if mode not in CAP_MODES:
        raise HomologyError(f"unknown cap mode {mode!r}")
    if p < 0 or p > n:
        raise HomologyError("degree out of range")
    absolute = SimplicialPair.absolute(pair.total)
    h_rel = homology(pair)
    h_abs = homology(absolute)
    if mode == "rel-to-abs":
        coc_pair, out = pair, h_abs
    else:
        coc_pair, out = absolute, h_rel
    coc_vec = homology(coc_pair).cocycle_vector(p, alpha)
    cochain = dict(zip(coc_pair.cells(p), coc_vec))
    z_chain = h_rel.class_chain(n, z)
    result = cap_chain(cochain, p, z_chain)
    return out.express(result)


def cap_matrix(pair: SimplicialPair, p: int, z: Sequence, n: int, mode: str) -> Matrix:
    """Matrix of alpha -> alpha ⌢ z on the degree-p cohomology basis."""
    src = pair if mode == "rel-to-abs" else SimplicialPair.absolute(pair.total)
    dst = SimplicialPair.absolute(pair.total) if mode == "rel-to-abs" else pair
    b = homology(src).betti(p)
    cols = []
    for i in range(b):
        e = [0] * b
        e[i] = 1
        cols.append(cap(pair, e, p, z, n, mode))
    return Matrix.from_columns(cols, homology(dst).betti(n - p))


def diagonal_class(pair: SimplicialPair, z: Sequence, n: int) -> dict[int, Matrix]:
    """Künneth components of δ_*(z) for z in H_n(K,L).

    Returns, for each j, the coefficient matrix C_j with
    δ_*(z) = Σ_j Σ_{a,b} C_j[a,b] · u_a ⊗ v_b, where u runs over the basis of
    H_j(K,L) and v over the basis of H_{n-j}(K).  Coefficients are obtained by
    evaluating dual cocycles on the Alexander–Whitney image of a
    representative; the left factor is reduced modulo L.
    """
    rep = homology(pair).class_chain(n, z)
    return diagonal_of_chain(pair, rep)


def diagonal_of_chain(pair: SimplicialPair, rep: Chain) -> dict[int, Matrix]:
    """Same as :func:`diagonal_class`, starting from an explicit relative cycle."""
    n = rep.degree
    h_rel = homology(pair)
    absolute = SimplicialPair.absolute(pair.total)
    h_abs = homology(absolute)
    if not h_rel.is_cycle_vector(n, pair.chain_to_vector(rep)):
        raise HomologyError("not a relative cycle")
    tensor = aw_diagonal(rep)
    left_co = {j: [dict(zip(pair.cells(j), co)) for co in h_rel.cocycles(j)] for j in range(n + 1)}
    right_co = {k: [dict(zip(absolute.cells(k), co)) for co in h_abs.cocycles(k)] for k in range(n + 1)}
    acc: dict[int, dict[tuple[int, int], Fraction]] = {j: {} for j in range(n + 1)}
    for (front, back), v in tensor.terms.items():
        j = len(front) - 1
        k = n - j
        lefts = [(a, co[front]) for a, co in enumerate(left_co[j]) if co.get(front)]
        if not lefts:
            continue
        rights = [(b, co[back]) for b, co in enumerate(right_co[k]) if co.get(back)]
        for a, x in lefts:
            for b, y in rights:
                acc[j][(a, b)] = acc[j].get((a, b), 0) + v * x * y
    return {j: Matrix(h_rel.betti(j), h_abs.betti(n - j), acc[j]) for j in range(n + 1)}


def homology_dims(pair: SimplicialPair) -> dict[int, int]:
    h = homology(pair)
    return {q: h.betti(q) for q in h.degrees()}


__all__ = [
    "CohomologyBasis",
    "GradedLinearMap",
    "HomologyBasis",
    "HomologyError",
    "cap",
    "cap_chain",
    "cap_matrix",
    "cohomology",
    "diagonal_class",
    "diagonal_of_chain",
    "evaluate",
    "homology",
    "homology_dims",
    "induced_cohomology_map",
    "induced_homology_map",
    "kronecker",
]
