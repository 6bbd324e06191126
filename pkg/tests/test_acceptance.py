"""Acceptance suite: one check per criterion, exact arithmetic, zero tolerance.

Each check returns (passed, detail) and is printed as a single line, both
under pytest and when this file is run directly.
"""

from __future__ import annotations

import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from builders import circle_problem, complex_named, corpus_problem  # noqa: E402
from oracles import betti_oracle, circle_coincidence_count, euler_from_betti  # noqa: E402

from coincide.cli import run_corpus  # noqa: E402
from coincide.coincidence import (  # noqa: E402
    CERTIFIED,
    INCONCLUSIVE,
    case2_abstract,
    condition_A,
    generalized_lefschetz,
    identity_problem,
    lefschetz_number,
    multivalued_fixed_point,
    theta_evaluation_check,
    transfer,
    verify_main_theorem,
)
from coincide.duality import NonOrientableError, dual_basis_system, manifold_duality  # noqa: E402
from coincide.formats import corpus_complexes, parse_complex  # noqa: E402
from coincide.homology import GradedLinearMap, diagonal_class, homology, induced_homology_map  # noqa: E402
from coincide.linalg import Matrix, is_invertible  # noqa: E402
from coincide.simplicial import (  # noqa: E402
    Chain,
    SimplicialComplex,
    SimplicialMap,
    SimplicialPair,
    aw_diagonal,
    boundary_matrix,
    induced_chain_map,
)

RANDOM_INSTANCES = 100


def check_1_main_identity():
    start = time.perf_counter()
    results = run_corpus()
    elapsed = time.perf_counter() - start
    errors = [n for n, rep, err in results if rep is None]
    with_index = [rep for _, rep, _ in results if rep is not None and rep.index is not None]
    bad = [r.name for r in with_index if r.index != r.lefschetz]
    ok = not errors and not bad and len(with_index) >= 10 and elapsed < 60
    return ok, f"{len(with_index)} corpus problems with index = lefschetz, {len(bad) + len(errors)} failures, {elapsed:.1f}s"


def check_2_calibration():
    expected = {"sphere-bipyramid": 2, "torus9": 0, "disk-cone": 1, "circle3": 0, "tetra-sphere": 2}
    for name, chi in expected.items():
        k = complex_named(name)
        oracle_chi = euler_from_betti(betti_oracle(k.vertices, k.maximal_simplices()))
        idx = verify_main_theorem(identity_problem(k)).index
        if oracle_chi != chi or idx != chi:
            return False, f"{name}: index {idx}, oracle chi {oracle_chi}, expected {chi}"
    return True, "identity index = chi for S2, T2, D2, S1, tetra-sphere"


def check_3_circle_degrees():
    for df in range(-2, 3):
        for dg in range(-2, 3):
            rep = verify_main_theorem(circle_problem(df, dg))
            want = circle_coincidence_count(df, dg)
            if not rep.index == rep.lefschetz == want:
                return False, f"degrees ({df},{dg}): index {rep.index}, lefschetz {rep.lefschetz}, want {want}"
    return True, "25 degree pairs give index = lefschetz = d_f - d_g"


def check_4_torus_projection():
    rep = verify_main_theorem(corpus_problem("torus-proj-const"))
    ok = rep.index == rep.lefschetz == 1 and rep.verdict == CERTIFIED
    return ok, f"index {rep.index}, lefschetz {rep.lefschetz}, {rep.verdict}"


def check_5_hopf():
    rep = case2_abstract(corpus_problem("hopf-abstract"))
    ok = rep.lefschetz == rep.generalized_lefschetz == 0 and rep.verdict == INCONCLUSIVE
    return ok, f"lefschetz {rep.lefschetz}, generalized {rep.generalized_lefschetz}, {rep.verdict}"


def check_6_mobius():
    p = corpus_problem("mobius-fold")
    b2 = homology(p.X).betti(2)
    ok = b2 == 0 and condition_A(p.f, p.X, p.S) is False
    return ok, f"H2(M,dM) rank {b2}, condition_A {condition_A(p.f, p.X, p.S)}"


def check_7_non_manifold_domains():
    details = []
    ok = True
    for name in ("figure-eight-proj", "spherical-surrogate"):
        p = corpus_problem(name)
        rep = verify_main_theorem(p)
        g_reduced_zero = all(
            m.is_zero() for q, m in induced_homology_map(p.g, p.X_abs, p.S_abs).blocks.items() if q > 0
        )
        ok &= rep.lefschetz == 1 and rep.verdict == CERTIFIED and rep.condition_A and g_reduced_zero
        details.append(f"{name} lefschetz {rep.lefschetz}")
    p = corpus_problem("spherical-surrogate")
    mv = multivalued_fixed_point(p.X.total, p.f, p.g)
    ok &= mv.lefschetz == 1 and mv.verdict == "fixed-point-certified"
    details.append(f"multivalued {mv.verdict}")
    return ok, ", ".join(details)


def check_8_diagonal_of_orientation_class():
    for name in ("circle3", "sphere-bipyramid", "torus9", "disk-cone"):
        md = manifold_duality(complex_named(name))
        ds = dual_basis_system(md)
        for j, c in diagonal_class(md.pair, md.fundamental.coords, md.n).items():
            acc = Matrix.zeros(c.rows, c.cols)
            for i, q in enumerate(ds.degree):
                if q == md.n - j:
                    acc = acc + Matrix.from_columns([ds.a_prime[i]], c.rows) @ Matrix.from_rows([ds.a[i]], c.cols)
            if c != acc:
                return False, f"{name} degree {j} component differs"
    return True, "AW diagonal of O_S equals the dual-basis sum on S1, S2, T2, D2"


def _random_endomorphism(rng: random.Random) -> GradedLinearMap:
    blocks = {}
    for q in range(rng.randint(1, 4)):
        d = rng.randint(0, 3)
        rows = [[rng.randint(-3, 3) for _ in range(d)] for _ in range(d)]
        if d and rng.random() < 0.5:
            rows[rng.randrange(d)] = [0] * d
        blocks[q] = Matrix.from_rows(rows, d)
    return GradedLinearMap(blocks)


def _random_complex(rng: random.Random) -> SimplicialComplex:
    verts = [f"w{i}" for i in range(rng.randint(2, 6))]
    tops = [rng.sample(verts, rng.randint(1, min(4, len(verts)))) for _ in range(rng.randint(1, 5))]
    return SimplicialComplex(verts, tops)


def check_9_properties():
    rng = random.Random(20240917)
    failures = []
    for _ in range(RANDOM_INSTANCES):
        h = _random_endomorphism(rng)
        if generalized_lefschetz(h) != lefschetz_number(h):
            failures.append("Lambda = L")
        e, lam = theta_evaluation_check(h)
        if e != lam:
            failures.append("theta")
    target = SimplicialComplex("xyzt", [("x", "y", "z", "t")])
    tgt = SimplicialPair.absolute(target)
    for _ in range(RANDOM_INSTANCES):
        k = _random_complex(rng)
        pair = SimplicialPair.absolute(k)
        for q in range(2, k.dim + 1):
            if not (boundary_matrix(pair, q - 1) @ boundary_matrix(pair, q)).is_zero():
                failures.append("dd = 0")
        f = SimplicialMap(k, target, {v: rng.choice("xyzt") for v in k.vertices})
        for q in range(1, k.dim + 1):
            if induced_chain_map(f, q - 1, pair, tgt) @ boundary_matrix(pair, q) != \
                    boundary_matrix(tgt, q) @ induced_chain_map(f, q, pair, tgt):
                failures.append("f# d = d f#")
        q = rng.randint(0, k.dim)
        c = Chain(q, {s: rng.randint(-3, 3) for s in k.simplices(q)})
        if aw_diagonal(c).boundary().terms != aw_diagonal(c.boundary()).terms:
            failures.append("AW chain map")
    inverse_checked = 0
    for _, rep, _ in run_corpus():
        if rep is None or rep.index is None or rep.mode == "multivalued":
            continue
        p = corpus_problem(rep.name)
        f_rel = induced_homology_map(p.f, p.X, p.S)
        if p.n > p.X.dim or f_rel[p.n] @ list(p.mu) != list(p.duality.fundamental.coords):
            continue
        f_abs = induced_homology_map(p.f, p.X_abs, p.S_abs)
        t = transfer(p)
        inverse_checked += 1
        if any(f_abs[k] @ t[k] != Matrix.identity(t[k].cols) for k in range(p.n + 1)):
            failures.append(f"f_* f_! = Id on {p.name}")
    ok = not failures and inverse_checked > 0
    return ok, (f"{RANDOM_INSTANCES} instances per property, f_* f_! = Id on {inverse_checked} corpus problems"
                + (f"; failed: {sorted(set(failures))}" if failures else ""))


ORIENTED = ["circle3", "circle6", "sphere-bipyramid", "tetra-sphere", "disk1", "disk-cone",
            "disk-two-ring", "torus9", "interval", "disk-cone-x-circle3"]


def check_10_duality():
    for name in ORIENTED:
        md = manifold_duality(complex_named(name))
        for p in range(md.n + 1):
            if not (is_invertible(md.D[p]) and is_invertible(md.D_prime[p])):
                return False, f"{name}: duality not invertible in degree {p}"
    try:
        manifold_duality(complex_named("mobius5"))
    except NonOrientableError as e:
        if "non-orientable" not in str(e):
            return False, f"wrong diagnostic: {e}"
    else:
        return False, "Mobius band accepted"
    return True, f"D, D' invertible on {len(ORIENTED)} oriented manifolds; Mobius rejected"


def check_11_betti_oracle():
    count = 0
    for path in corpus_complexes():
        cf = parse_complex(path)
        k = cf.complex
        rels = [None] + [s for s in cf.subcomplex_defs if s != "boundary" or _has_boundary(k)]
        for rel in rels:
            pair = cf.pair(rel)
            oracle = betti_oracle(k.vertices, k.maximal_simplices(), pair.sub.maximal_simplices())
            ours = list(homology(pair).betti_numbers())
            count += 1
            if ours[: len(oracle)] != oracle or any(ours[len(oracle):]):
                return False, f"{cf.name} rel {rel}: {ours} vs oracle {oracle}"
    return True, f"{count} absolute and relative homology computations match the oracle"


def _has_boundary(k: SimplicialComplex) -> bool:
    from coincide.simplicial import StructuralError, boundary_subcomplex

    try:
        boundary_subcomplex(k)
        return True
    except StructuralError:
        return False


CRITERIA = [
    (1, "main identity on the corpus", check_1_main_identity),
    (2, "identity calibration equals Euler characteristic", check_2_calibration),
    (3, "circle degree family", check_3_circle_degrees),
    (4, "torus to circle projection with constant g", check_4_torus_projection),
    (5, "Hopf abstract problem", check_5_hopf),
    (6, "Mobius condition (A) fails", check_6_mobius),
    (7, "non-manifold domains", check_7_non_manifold_domains),
    (8, "diagonal of the orientation class", check_8_diagonal_of_orientation_class),
    (9, "property suites", check_9_properties),
    (10, "duality isomorphisms", check_10_duality),
    (11, "Betti oracle equivalence", check_11_betti_oracle),
]


def _line(num: int, title: str, ok: bool, detail: str) -> str:
    return f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"


@pytest.mark.parametrize("num,title,check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(num, title, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print("\n" + _line(num, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for num, title, check in CRITERIA:
        ok, detail = check()
        failed += not ok
        print(_line(num, title, ok, detail))
    sys.exit(1 if failed else 0)
