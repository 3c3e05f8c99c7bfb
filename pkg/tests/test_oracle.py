import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amalgam.diagram import deficit, iter_two_row_diagrams, parse_diagram
from amalgam.graphalg import (
    CKAssignment,
    DirectedGraph,
    Edge,
    NotApplicable,
    VertexProjection,
    ck_assignment,
    graph_for_unital_pair,
)
from amalgam.oracle import (
    CLOSED_FORM_TOL,
    RANDOM_TOL,
    DimensionMismatch,
    NoFiniteRepresentation,
    RepPair,
    SuiteReport,
    UnresolvableWord,
    block_unitary,
    build_pi_example_mk,
    check_ck_relations,
    check_ck_suite,
    check_example_mk,
    check_m2_proof_identities,
    check_star_rep,
    ck_residual,
    haar_unitary,
    m2_pi1,
    m2_pi2,
    maxabs,
    pi1_m2,
    pi2_m2,
    random_factor_reps,
    random_rep_pair_example_mk,
    random_rep_pair_for_diagram,
    unit_matrix,
)


def units_of(n):
    return {(i, j): unit_matrix(i, j, n) for i in range(n) for j in range(n)}


# --- check_star_rep ----------------------------------------------------------------

def test_identity_inclusion_is_exact():
    r = check_star_rep(units_of(3), 3, unital=True)
    assert r.worst == 0.0


def test_zeroed_unit_is_flagged():
    images = units_of(3)
    images[(0, 1)] = np.zeros((3, 3), dtype=complex)
    r = check_star_rep(images, 3)
    assert r.by_class["multiplicativity"] == pytest.approx(1.0)
    assert not r.passed()


def test_diagonal_unitary_conjugate():
    rng = np.random.default_rng(3)
    w = np.diag(np.exp(2j * np.pi * rng.random(3)))
    images = {u: w @ m @ w.conj().T for u, m in units_of(3).items()}
    assert check_star_rep(images, 3, unital=True).worst < CLOSED_FORM_TOL


def test_dimension_mismatch():
    images = units_of(2)
    images[(1, 1)] = np.eye(3)
    with pytest.raises(DimensionMismatch):
        check_star_rep(images, 2)


def test_missing_units_rejected():
    images = units_of(2)
    del images[(0, 1)]
    with pytest.raises(KeyError):
        check_star_rep(images, 2)


def test_haar_unitary_is_unitary():
    u = haar_unitary(6, np.random.default_rng(0))
    assert maxabs(u.conj().T @ u - np.eye(6)) < 1e-13


# --- the M_{k+1} construction ------------------------------------------------------

def test_example_pair_agreement_exact():
    p = random_rep_pair_example_mk(2, 1, seed=11)
    assert p.size == 3
    assert p.residual().by_class["agreement"] < 1e-14


def test_example_pair_with_diagonal_twist():
    p = random_rep_pair_example_mk(2, 1, w2=np.diag([1, 1j, -1]))
    assert p.residual().passed()


def test_example_pair_rejects_mixing_twist():
    rng = np.random.default_rng(5)
    with pytest.raises(ValueError):
        random_rep_pair_example_mk(2, 1, w2=haar_unitary(3, rng))


@pytest.mark.parametrize("k", [2, 3, 5])
def test_pi_corner_case(k):
    p = random_rep_pair_example_mk(k, 2, seed=k)
    pi = build_pi_example_mk(p)
    assert maxabs(pi[(k, k)] - p.images[1][(k, k)]) == 0
    assert maxabs(pi[(k, k)] - p.images[0][(k, k)]) < 1e-14


@pytest.mark.parametrize("k", [2, 3, 4])
def test_trivial_pair_gives_identity(k):
    eye = np.eye(k + 1)
    pi = build_pi_example_mk(random_rep_pair_example_mk(k, 1, w1=eye, w2=eye))
    for (i, j), m in pi.items():
        assert np.array_equal(m, unit_matrix(i, j, k + 1))


def test_phase_covariance():
    rng = np.random.default_rng(2024)
    for theta in 2 * np.pi * rng.random(100):
        w2 = np.diag([1, 1, np.exp(1j * theta)])
        pi = build_pi_example_mk(random_rep_pair_example_mk(2, 1, w1=np.eye(3), w2=w2))
        assert maxabs(pi[(0, 2)] - np.exp(-1j * theta) * unit_matrix(0, 2, 3)) < 1e-12


def test_check_example_mk_runs():
    assert check_example_mk(2, 1, 50, seed=0).worst < RANDOM_TOL
    assert check_example_mk(5, 2, 20, seed=0).worst < RANDOM_TOL


def test_adjoint_symmetry():
    for k in (2, 4):
        pi = build_pi_example_mk(random_rep_pair_example_mk(k, 2, seed=9))
        worst = max(maxabs(pi[(i, j)].conj().T - pi[(j, i)]) for i, j in pi)
        assert worst < RANDOM_TOL


def test_corrupted_pair_is_flagged():
    r = check_example_mk(3, 2, 10, seed=4, corrupt=True)
    assert r.worst >= 0.1


def test_seed_determinism():
    a = random_rep_pair_example_mk(4, 2, seed=123)
    b = random_rep_pair_example_mk(4, 2, seed=123)
    for x, y in zip(a.images, b.images):
        for u in x:
            assert np.array_equal(x[u], y[u])
    assert check_example_mk(3, 2, 5, seed=8).worst == check_example_mk(3, 2, 5, seed=8).worst


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.integers(1, 3), st.integers(0, 2**31))
def test_conjugation_invariance(k, m, seed):
    p = random_rep_pair_example_mk(k, m, seed=seed)
    u = block_unitary([m] * (k + 1), np.random.default_rng(seed + 1))
    conj = tuple({x: u @ y @ u.conj().T for x, y in imgs.items()} for imgs in p.images)
    q = RepPair(p.size, conj, p.amalgam)
    assert q.residual().passed()
    assert check_star_rep(build_pi_example_mk(q), k + 1, unital=True).passed()


# --- the circle-twisted pair -------------------------------------------------------

def test_pi2_spot_value():
    assert maxabs(pi2_m2(1)[(0, 0)] - 0.5 * np.ones((2, 2))) <= 1e-15


def test_pi1_substitution():
    assert np.array_equal(pi1_m2(1j)[(0, 1)], np.array([[0, 1j], [0, 0]]))


def test_scalars_agree_for_all_points():
    rng = np.random.default_rng(1)
    for z, w in np.exp(2j * np.pi * rng.random((20, 2))):
        a = complex(*rng.standard_normal(2))
        x = a * np.eye(2)
        assert maxabs(m2_pi1(z, x) - x) < 1e-15
        assert maxabs(m2_pi2(w, x) - x) < 1e-15


def test_unit_circle_enforced():
    with pytest.raises(ValueError):
        pi1_m2(1.1)
    with pytest.raises(ValueError):
        pi2_m2(0.5j)


def test_identities_at_one():
    flip = np.diag([1.0, -1.0])
    assert np.array_equal(m2_pi2(1, flip), np.array([[0, 1], [1, 0]]))
    assert np.array_equal(m2_pi1(1, unit_matrix(0, 1)) @ m2_pi2(1, flip), unit_matrix(0, 0))


def test_proof_identities_random():
    assert check_m2_proof_identities(200, seed=0).worst < CLOSED_FORM_TOL


def literal_sign_pi2(z, x):
    # the alternative sign pattern on the b z and c z-bar terms; this map is not multiplicative
    zc = np.conj(z)
    a, b, c, d = x[0, 0], x[0, 1], x[1, 0], x[1, 1]
    return 0.5 * np.array(
        [[a + d - c * zc + b * z, a - d - c * zc + b * z], [a - d + c * zc - b * z, a + d + c * zc + b * z]]
    )


def test_literal_sign_pattern_is_not_multiplicative():
    r = check_m2_proof_identities(20, seed=0, pi2=literal_sign_pi2)
    assert r.by_class["multiplicativity"] >= 0.5


def test_flipped_entry_negative_control():
    def flipped(z, x):
        out = m2_pi2(z, x)
        out[1, 0] = -out[1, 0]
        return out

    assert check_m2_proof_identities(20, seed=0, pi2=flipped).by_class["multiplicativity"] >= 0.5


# --- Cuntz-Krieger checks ----------------------------------------------------------

def test_single_loop_unitary():
    g = DirectedGraph(("v",), (Edge("a", "v", "v"),))
    u = np.diag([1, -1, 1j])
    r = ck_residual(g, {"a": u}, {"v": np.eye(3)})
    assert r.worst == 0.0


def test_rep_pair_for_diagram_existence():
    p = random_rep_pair_for_diagram(parse_diagram("M2: 1 1 ; M4: 2 2"), seed=1)
    assert p.size == 4
    p = random_rep_pair_for_diagram(parse_diagram("M3: 1 1 0 ; M2: 1 1"), multiplicity=2, seed=1)
    assert p.size == 6
    with pytest.raises(NoFiniteRepresentation):
        random_rep_pair_for_diagram(parse_diagram("M3: 1 2 ; M2: 1 1"))


def test_ck_example_factorwise():
    a = ck_assignment(parse_diagram("M3: 1 2 ; M2: 1 1"))
    assert check_ck_suite(a, trials=20, seed=0).worst < RANDOM_TOL


def test_ck_against_genuine_rep_pair():
    d = parse_diagram("M2: 1 1 ; M2: 1 1")
    a = ck_assignment(d)
    for s in range(20):
        assert check_ck_relations(a, random_rep_pair_for_diagram(d, multiplicity=2, seed=s)).worst < RANDOM_TOL


def test_ck_mixed_genuine_rep_pair():
    d = parse_diagram("M3: 1 1 0 ; M2: 1 1")
    a = ck_assignment(d)
    for s in range(5):
        assert check_ck_relations(a, random_rep_pair_for_diagram(d, seed=s)).worst < RANDOM_TOL


def test_non_isometric_word_flagged():
    d = parse_diagram("M3: 1 2 ; M4: 3 1")
    a = ck_assignment(d)
    edges = dict(a.edges)
    (f, (w, u)), = edges["e1"]
    edges["e1"] = ((f, (w, w)),)
    broken = CKAssignment(d, a.graph, edges, a.vertices)
    assert check_ck_relations(broken, random_factor_reps(d, seed=0)).worst >= 0.1


def test_unresolvable_word():
    a = ck_assignment(parse_diagram("M3: 1 2 ; M4: 3 1"))
    small = random_rep_pair_for_diagram(parse_diagram("M2: 1 1 ; M2: 1 1"), seed=0)
    with pytest.raises(UnresolvableWord):
        check_ck_relations(a, small)


def test_block_shape_without_size_one_blocks_fails_ck():
    # [1][1]/[2][2] has genuine finite representations; forcing the two-vertex family on it breaks S*S = P
    d = parse_diagram("M2: 1 1 ; M4: 2 2")
    with pytest.raises(NotApplicable):
        ck_assignment(d)
    g = graph_for_unital_pair(2, 3)
    a = CKAssignment(
        d,
        g,
        {"e1": ((0, (1, 0)),), "f1": ((1, (0, 2)),), "f2": ((1, (1, 2)),)},
        {"v2": VertexProjection(0, ((0, (0, 0)),), 0), "v1": VertexProjection(0, ((0, (1, 1)),), 1)},
    )
    r = check_ck_relations(a, random_rep_pair_for_diagram(d, seed=0))
    assert r.by_class["ck-source"] >= 0.1


def test_extension_edge_count_matches_rank():
    # each g-edge has a rank-one source, so the range relation at v3 needs exactly deficit-many edges
    for d in iter_two_row_diagrams(5):
        try:
            a = ck_assignment(d)
        except NotApplicable:
            continue
        if "v3" not in a.graph.vertices:
            continue
        row = d.rows[a.vertices["v3"].factor]
        assert len(a.graph.in_edges("v3")) == deficit(row) == len(a.vertices["v3"].units)
    d = parse_diagram("M3: 1 2 ; M3: 1 1 0")
    row = d.rows[1]
    assert row.ambient_size - deficit(row) != deficit(row)


def test_suite_report_json():
    r = SuiteReport("m2", 5, 1, check_m2_proof_identities(5, 1), CLOSED_FORM_TOL)
    j = r.to_json()
    assert set(j) == {"suite", "trials", "seed", "worst_residual", "worst_label", "pass"}
    assert j["pass"] is True
