"""Fundamental classes, Poincaré–Lefschetz duality and the intersection pairing."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .homology import GradedLinearMap, HomologyBasis, cap_matrix, homology
from .linalg import Matrix, as_rational, inverse, is_invertible
from .simplicial import (
    Chain,
    OrientationData,
    SimplicialComplex,
    SimplicialPair,
    StructuralError,
    boundary_subcomplex,
    coherent_orientation,
)


class DualityError(ValueError):
    """Cap product with the fundamental class failed to be an isomorphism."""


class NonOrientableError(ValueError):
    """The manifold admits no coherent orientation."""


# Sign s(j) applied to <(D')^{-1}(u), v> for u in H_j(S,∂S).  Candidates are
# functions of (j, n); the frozen choice is the one the calibration suite
# selects (see ``coincide.coincidence.calibrate_pairing_sign``).
PAIRING_SIGNS: dict[str, Callable[[int, int], int]] = {
    "+1": lambda j, n: 1,
    "(-1)^j": lambda j, n: (-1) ** j,
    "(-1)^(j(n-j))": lambda j, n: (-1) ** (j * (n - j)),
    "(-1)^(n(n-j))": lambda j, n: (-1) ** (n * (n - j)),
}
PAIRING_SIGN = "(-1)^(n(n-j))"


@dataclass(frozen=True)
class FundamentalClass:
    pair: SimplicialPair
    orientation: OrientationData
    representative: Chain
    coords: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        return self.representative.degree

    def negated(self) -> "FundamentalClass":
        return FundamentalClass(
            self.pair, self.orientation.reversed(), -self.representative, tuple(-c for c in self.coords)
        )


def manifold_pair(k: SimplicialComplex) -> SimplicialPair:
    """(S, ∂S) with ∂S detected from face incidences."""
    return SimplicialPair(k, boundary_subcomplex(k))


def _same_subcomplex(a: SimplicialComplex, b: SimplicialComplex) -> bool:
    return set(a.all_simplices()) == set(b.all_simplices())


def fundamental_class(s: SimplicialPair, seed: Sequence | None = None) -> FundamentalClass:
    """Class of the coherently signed sum of top simplices in H_n(S,∂S)."""
    k = s.total
    if not k.is_pure():
        raise StructuralError("manifold complex must be pure")
    if not k.is_connected():
        raise StructuralError("manifold complex must be connected")
    if not _same_subcomplex(s.sub, boundary_subcomplex(k)):
        raise StructuralError("subcomplex is not the detected boundary of the manifold")
    orient = coherent_orientation(k, seed)
    if orient is None:
        raise NonOrientableError("non-orientable: requires Z2 coefficients, out of scope")
    n = k.dim
    rep = Chain(n, {t: orient[t] for t in k.simplices(n)})
    coords = homology(s).express(rep)
    if not any(coords):
        raise DualityError("fundamental class vanishes: input is not a Q-homology manifold pair")
    return FundamentalClass(s, orient, rep, tuple(coords))


def duality_D(s: SimplicialPair, fc: FundamentalClass) -> GradedLinearMap:
    """D[p]: H^p(S,∂S) -> H_{n-p}(S), alpha -> alpha ⌢ O_S."""
    n = fc.n
    blocks = {p: cap_matrix(s, p, fc.coords, n, "rel-to-abs") for p in range(n + 1)}
    _require_invertible(blocks, "D")
    return GradedLinearMap(blocks)


def duality_Dprime(s: SimplicialPair, fc: FundamentalClass) -> GradedLinearMap:
    """D'[p]: H^p(S) -> H_{n-p}(S,∂S), alpha -> alpha ⌢ O_S."""
    n = fc.n
    blocks = {p: cap_matrix(s, p, fc.coords, n, "abs-to-rel") for p in range(n + 1)}
    _require_invertible(blocks, "D'")
    return GradedLinearMap(blocks)


def _require_invertible(blocks: dict[int, Matrix], name: str) -> None:
    for p, m in blocks.items():
        if not is_invertible(m):
            raise DualityError(
                f"duality failure: {name} is not invertible in cohomological degree {p}; "
                "input not a Q-homology manifold pair"
            )


@dataclass(frozen=True)
class DualBasisSystem:
    """Bases x, a, x', a' with <x_i,a_j> = <x'_i,a'_j> = δ_ij and D(x'_i) = a_i.

    Index i runs over the homology basis of S; ``degree[i]`` is deg a_i.  All
    vectors are coordinates in the package's (co)homology bases.
    """

    n: int
    degree: tuple[int, ...]
    a: tuple[tuple[Fraction, ...], ...]
    x: tuple[tuple[Fraction, ...], ...]
    x_prime: tuple[tuple[Fraction, ...], ...]
    a_prime: tuple[tuple[Fraction, ...], ...]

    def __len__(self) -> int:
        return len(self.degree)


@dataclass(frozen=True)
class ManifoldDuality:
    """Duality data of an oriented (S, ∂S), computed once and reused."""

    pair: SimplicialPair
    fundamental: FundamentalClass
    D: GradedLinearMap
    D_prime: GradedLinearMap
    D_inv: dict = field(repr=False)
    D_prime_inv: dict = field(repr=False)

    @property
    def n(self) -> int:
        return self.fundamental.n

    def pairing_matrix(self, j: int, sign: str = PAIRING_SIGN) -> Matrix:
        """P_j with intersection_pairing(u, v) = u^T P_j v for u in H_j(S,∂S), v in H_{n-j}(S)."""
        s = PAIRING_SIGNS[sign](j, self.n)
        return self.D_prime_inv[self.n - j].T.scale(s)


def duality_data(s: SimplicialPair, fc: FundamentalClass | None = None) -> ManifoldDuality:
    fc = fc or fundamental_class(s)
    d = duality_D(s, fc)
    dp = duality_Dprime(s, fc)
    return ManifoldDuality(
        s,
        fc,
        d,
        dp,
        {p: inverse(m) for p, m in d.blocks.items()},
        {p: inverse(m) for p, m in dp.blocks.items()},
    )


@lru_cache(maxsize=64)
def manifold_duality(k: SimplicialComplex, seed: tuple | None = None) -> ManifoldDuality:
    s = manifold_pair(k)
    return duality_data(s, fundamental_class(s, seed))


def dual_basis_system(md: ManifoldDuality) -> DualBasisSystem:
    n = md.n
    h_abs: HomologyBasis = homology(SimplicialPair.absolute(md.pair.total))
    degree, a, x, xp, ap = [], [], [], [], []
    for q in range(n + 1):
        b = h_abs.betti(q)
        if not b:
            continue
        dinv = md.D_inv[n - q]  # H_q(S) -> H^{n-q}(S,∂S)
        xq = [dinv.column(i) for i in range(b)]
        # a' is Kronecker-dual to x': columns of (X'^T)^{-1}
        xmat = Matrix.from_columns(xq, dinv.rows)
        aq = inverse(xmat.T)
        for i in range(b):
            e = tuple(Fraction(int(i == k)) for k in range(b))
            degree.append(q)
            a.append(e)
            x.append(e)
            xp.append(tuple(xq[i]))
            ap.append(tuple(aq.column(i)))
    return DualBasisSystem(n, tuple(degree), tuple(a), tuple(x), tuple(xp), tuple(ap))


def intersection_pairing(md: ManifoldDuality, u: Sequence, j: int, v: Sequence, sign: str = PAIRING_SIGN) -> Fraction:
    """Evaluation of u ⊗ v in H_n of the deleted product, for u ∈ H_j(S,∂S), v ∈ H_{n-j}(S)."""
    n = md.n
    if not 0 <= j <= n:
        raise ValueError(f"degree {j} outside 0..{n}")
    p = md.pairing_matrix(j, sign)
    u = [as_rational(c) for c in u]
    v = [as_rational(c) for c in v]
    if len(u) != p.rows or len(v) != p.cols:
        raise ValueError("degree mismatch: class dimensions do not fit H_j(S,∂S) x H_{n-j}(S)")
    pv = p @ v
    return sum((a * b for a, b in zip(u, pv)), Fraction(0))
