import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from coincide.coincidence import (
    CERTIFIED,
    FIXED_POINT_CERTIFIED,
    INCONCLUSIVE,
    AbstractProblem,
    CoincidenceProblem,
    DisjointnessError,
    ProblemError,
    case2_abstract,
    coincidence_index,
    condition_A,
    disjointness_check,
    generalized_lefschetz,
    lefschetz_endomorphism,
    lefschetz_number,
    multivalued_fixed_point,
    theta_evaluation_check,
    transfer,
    verify_main_theorem,
)
from coincide.duality import fundamental_class, manifold_duality
from coincide.homology import GradedLinearMap, cap_matrix, homology, induced_homology_map
from coincide.linalg import Matrix, rank
from coincide.simplicial import SimplicialMap, SimplicialPair, constant_map
from builders import circle_problem, complex_named, corpus_problem
from oracles import circle_coincidence_count

F = Fraction
GEOMETRIC = ["sphere-identity", "tetra-identity", "torus-identity", "circle-identity", "disk-identity",
             "circle-deg-2-0", "circle-deg-1-m2", "circle-deg-0-2", "torus-proj-const", "mobius-fold",
             "figure-eight-proj", "spherical-surrogate", "disk-two-ring-collapse"]


def gm(blocks):
    return GradedLinearMap({q: Matrix.from_rows(rows, len(rows[0]) if rows else 0) for q, rows in blocks.items()})


@st.composite
def graded_endomorphisms(draw):
    dims = draw(st.lists(st.integers(0, 3), min_size=1, max_size=4))
    blocks = {}
    for q, d in enumerate(dims):
        rows = [[draw(st.integers(-3, 3)) for _ in range(d)] for _ in range(d)]
        if d and draw(st.booleans()):
            # force a nontrivial eventual kernel: nilpotent strictly-upper part on one row
            rows[-1] = [0] * d
        blocks[q] = Matrix.from_rows(rows, d)
    return GradedLinearMap(blocks)


# -- Lefschetz numbers ------------------------------------------------------

def test_lefschetz_identity_examples():
    assert lefschetz_number(GradedLinearMap.identity({0: 1, 1: 0, 2: 1})) == 2
    assert lefschetz_number(GradedLinearMap.identity({0: 1, 1: 2, 2: 1})) == 0
    assert lefschetz_number(GradedLinearMap.zero({0: 1, 1: 2})) == 0


def test_lefschetz_shape_error():
    with pytest.raises(ProblemError):
        lefschetz_number(GradedLinearMap({0: Matrix.zeros(1, 2)}))


def test_generalized_examples():
    assert generalized_lefschetz(gm({0: [[2, 0], [0, 0]]})) == 2
    assert generalized_lefschetz(gm({1: [[0, 1], [0, 0]]})) == 0
    assert generalized_lefschetz(gm({0: [[1, 1], [0, 1]], 1: [[3]]})) == -1


def test_theta_examples():
    assert theta_evaluation_check(GradedLinearMap.identity({0: 1})) == (1, 1)
    assert theta_evaluation_check(GradedLinearMap.identity({0: 1, 1: 2, 2: 1})) == (0, 0)


@settings(max_examples=100)
@given(graded_endomorphisms())
def test_generalized_equals_plain(h):
    assert generalized_lefschetz(h) == lefschetz_number(h)


@settings(max_examples=100)
@given(graded_endomorphisms())
def test_theta_evaluation(h):
    e, lam = theta_evaluation_check(h)
    assert e == lam


# -- transfer ---------------------------------------------------------------

def test_transfer_of_identity_is_identity():
    p = corpus_problem("torus-identity")
    assert transfer(p) == GradedLinearMap.identity({0: 1, 1: 2, 2: 1})


def test_transfer_of_double_wrap():
    t = transfer(circle_problem(2, 0))
    assert t[0] == Matrix.from_rows([[2]]) and t[1] == Matrix.from_rows([[1]])


@pytest.mark.parametrize("name", GEOMETRIC)
def test_transfer_is_right_inverse_when_mu_lifts_orientation(name):
    p = corpus_problem(name)
    md = p.duality
    f_rel = induced_homology_map(p.f, p.X, p.S)
    if p.n > p.X.dim or f_rel[p.n] @ list(p.mu) != list(md.fundamental.coords):
        pytest.skip("f_*(mu) differs from the orientation class")
    f_abs = induced_homology_map(p.f, p.X_abs, p.S_abs)
    t = transfer(p)
    for k in range(p.n + 1):
        assert f_abs[k] @ t[k] == Matrix.identity(t[k].cols)


# -- index, conditions, reports ---------------------------------------------

@pytest.mark.parametrize("df", range(-2, 3))
@pytest.mark.parametrize("dg", range(-2, 3))
def test_circle_degree_family(df, dg):
    rep = verify_main_theorem(circle_problem(df, dg))
    assert rep.index == rep.lefschetz == rep.generalized_lefschetz == circle_coincidence_count(df, dg)


def test_index_examples():
    assert coincidence_index(corpus_problem("sphere-identity")) == 2
    assert coincidence_index(corpus_problem("torus-proj-const")) == 1
    assert coincidence_index(circle_problem(2, 0)) == 2


def test_index_refuses_uncertified_disjointness():
    p = corpus_problem("disk-identity", assume_disjoint=False)
    assert disjointness_check(p.f, p.g, p.X) == "unknown"
    with pytest.raises(DisjointnessError, match="assume_disjoint"):
        coincidence_index(p)
    rep = verify_main_theorem(corpus_problem("disk-identity"))
    assert rep.disjointness_waived and not rep.disjointness_certified


def test_disjointness_cases():
    p = corpus_problem("sphere-identity")
    assert disjointness_check(p.f, p.g, p.X) == "certified"  # X' empty
    q = corpus_problem("disk-two-ring-collapse")
    assert disjointness_check(q.f, q.g, q.X) == "certified"


def test_condition_A_examples():
    for name, expected in (("mobius-fold", False), ("figure-eight-proj", True), ("spherical-surrogate", True)):
        p = corpus_problem(name)
        assert condition_A(p.f, p.X, p.S) is expected


def test_general_mode_requires_mu():
    p = corpus_problem("torus-proj-const")
    with pytest.raises(ProblemError, match="mu required"):
        CoincidenceProblem.build(p.X, p.S.total, p.f, p.g, mu="auto", mode="general")


def test_lift_fails_without_condition_A():
    p = corpus_problem("mobius-fold")
    with pytest.raises(ProblemError, match="condition \\(A\\)"):
        CoincidenceProblem.build(p.X, p.S.total, p.f, p.g, mu="lift")


def test_mu_length_checked():
    p = corpus_problem("torus-proj-const")
    with pytest.raises(ProblemError, match="coordinates"):
        CoincidenceProblem.build(p.X, p.S.total, p.f, p.g, mu=(1,))


def test_f_must_respect_pairs():
    p = corpus_problem("disk-two-ring-collapse")
    with pytest.raises(ProblemError, match="X'"):
        CoincidenceProblem.build(p.X, p.S.total, p.g, p.g, mu="zero")


@pytest.mark.parametrize("name", GEOMETRIC)
def test_main_identity_on_corpus(name):
    rep = verify_main_theorem(corpus_problem(name))
    assert rep.index == rep.lefschetz == rep.generalized_lefschetz
    assert rep.verdict == (CERTIFIED if rep.lefschetz else INCONCLUSIVE)
    assert rep.conventions["pairing_sign"] and rep.conventions["orientation_seed"]


@pytest.mark.parametrize("name", GEOMETRIC)
def test_constant_g_gives_one_under_condition_A(name):
    p = corpus_problem(name)
    if not condition_A(p.f, p.X, p.S):
        pytest.skip("condition (A) fails")
    for w in p.S.total.vertices:
        g = constant_map(p.X.total, p.S.total, w)
        q = CoincidenceProblem.build(p.X, p.S.total, p.f, g, mu="lift", orientation_seed=p.orientation_seed)
        assert lefschetz_number(lefschetz_endomorphism(q)) == 1


def _permuted(p: CoincidenceProblem) -> CoincidenceProblem:
    X_tot = p.X.total.reordered(list(reversed(p.X.total.vertices)))
    S_tot = p.S.total.reordered(list(reversed(p.S.total.vertices)))
    X = SimplicialPair(X_tot, X_tot.subcomplex(p.X.sub.all_simplices()))
    f = SimplicialMap(X_tot, S_tot, p.f.vertex_map)
    g = SimplicialMap(X_tot, S_tot, p.g.vertex_map)
    s_seed = p.duality.fundamental.orientation.seed
    x_seed = fundamental_class(p.X).orientation.seed if p.mu_rule == "fundamental" else None
    mu = p.mu_rule if p.mu_rule != "coords" else p.mu
    return CoincidenceProblem.build(X, S_tot, f, g, mu=mu, mode=p.mode, assume_disjoint=p.assume_disjoint,
                                    name=p.name, orientation_seed=s_seed, domain_seed=x_seed)


@pytest.mark.parametrize("name", GEOMETRIC)
def test_basis_independence(name):
    p = corpus_problem(name)
    a, b = verify_main_theorem(p).to_record(), verify_main_theorem(_permuted(p)).to_record()
    a.pop("conventions"), b.pop("conventions")
    assert a == b


def test_report_is_deterministic():
    recs = [json.dumps(verify_main_theorem(corpus_problem("spherical-surrogate")).to_record(), sort_keys=True)
            for _ in range(2)]
    assert recs[0] == recs[1]


@pytest.mark.parametrize("name", GEOMETRIC)
def test_transfer_tensor_identity_when_capped_classes_independent(name):
    """Σ a'_i ⊗ f_!(a_i) equals Σ f_*(b'_i) ⊗ (y'_i ⌢ mu), with b' and y' dual bases of H(X,X')."""
    p = corpus_problem(name)
    n = p.n
    caps = {q: cap_matrix(p.X, q, p.mu, n, "rel-to-abs") for q in range(min(n, p.X.dim) + 1)}
    if any(rank(c) < c.cols for c in caps.values()):
        pytest.skip("capped classes are dependent")
    from coincide.duality import dual_basis_system

    ds = dual_basis_system(manifold_duality(p.S.total, p.orientation_seed))
    t = transfer(p)
    f_rel = induced_homology_map(p.f, p.X, p.S)
    hs_rel, hx = homology(p.S), homology(p.X_abs)
    for j in range(n + 1):
        rows, cols = hs_rel.betti(j), hx.betti(n - j)
        lhs = Matrix.zeros(rows, cols)
        for i, q in enumerate(ds.degree):
            if q == n - j:
                lhs = lhs + Matrix.from_columns([ds.a_prime[i]], rows) @ Matrix.from_rows([t[q] @ list(ds.a[i])], cols)
        rhs = f_rel[j] @ caps[j].T if j in caps else Matrix.zeros(rows, cols)
        assert lhs == rhs


# -- abstract and multivalued -----------------------------------------------

def test_hopf_abstract():
    rep = case2_abstract(corpus_problem("hopf-abstract"))
    assert rep.lefschetz == rep.generalized_lefschetz == 0
    assert rep.verdict == INCONCLUSIVE and rep.index is None


def test_abstract_examples():
    assert case2_abstract(corpus_problem("abstract-identity")).lefschetz == 2
    assert case2_abstract(corpus_problem("abstract-zero-g")).lefschetz == 1
    rep = case2_abstract(corpus_problem("abstract-supplied-phi"))
    assert rep.route == "supplied-phi" and rep.lefschetz == -1


def _abstract(**kw):
    base = dict(n=1, dims_x={0: 1, 1: 2}, dims_s={0: 1, 1: 1},
                fstar=gm({0: [[1]], 1: [[1, 0]]}), gstar=gm({0: [[1]], 1: [[3, 0]]}),
                rel_dim=1, frel=Matrix.from_rows([[1]]))
    base.update(kw)
    return AbstractProblem(**base)


def test_abstract_singular_without_phi_refused():
    with pytest.raises(ProblemError, match="\\(a\\)/\\(b\\)"):
        case2_abstract(_abstract())


def test_abstract_bad_phi_refused():
    with pytest.raises(ProblemError, match="\\(b\\)"):
        case2_abstract(_abstract(phi=gm({0: [[1]], 1: [[2]]})))


def test_abstract_shape_checked():
    with pytest.raises(ProblemError, match="shape"):
        _abstract(fstar=gm({0: [[1, 1]]}))


def test_abstract_hypothesis_a_checked():
    with pytest.raises(ProblemError, match="\\(a\\)"):
        case2_abstract(_abstract(mu=(F(2),), phi=gm({0: [[1]], 1: [[3]]})))


def test_multivalued_diagonal():
    k = complex_named("sphere-bipyramid")
    ident = SimplicialMap(k, k, {v: v for v in k.vertices})
    rep = multivalued_fixed_point(k, ident, ident)
    assert rep.lefschetz == 2 and rep.verdict == FIXED_POINT_CERTIFIED and rep.route == "vietoris"


def test_multivalued_spherical():
    p = corpus_problem("spherical-surrogate")
    rep = multivalued_fixed_point(p.X.total, p.f, p.g)
    assert rep.lefschetz == 1 and rep.verdict == FIXED_POINT_CERTIFIED and rep.route == "condition-A"


def test_multivalued_inconclusive():
    p = corpus_problem("mobius-fold")
    rep = multivalued_fixed_point(p.X.total, p.f, p.g)
    assert rep.verdict == INCONCLUSIVE and rep.diagnostics
