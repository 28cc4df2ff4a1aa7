import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delayhinf.exceptions import DomainError, InternalConsistencyError
from delayhinf.lmi import AffineMatrixInequality, LmiProblem, MatrixVariable, Term
from delayhinf.solver import (
    FEASIBLE, INFEASIBLE, MAX_ITERATIONS, SolverOptions, certify, cluster_size, rayleigh_exact,
    ritz_max, solve_feasibility,
)
from delayhinf.synthesis import verify_gains


def diag_problem(consts, slopes, epsilon=1e-9):
    """F(x) = diag(c_j + a_j x) with one scalar unknown x."""
    k = len(consts)
    terms = tuple(Term(j, j, np.array([[0.5 * a]]), "x", np.eye(1)) for j, a in enumerate(slopes))
    con = AffineMatrixInequality((1,) * k, np.diag(np.asarray(consts, dtype=float)), terms)
    return LmiProblem((MatrixVariable("x", 1, 1),), (con,), epsilon)


def test_tent_problem_is_feasible():
    cert = solve_feasibility(diag_problem([-1, -1], [1, -1]), SolverOptions(bound_radius=10))
    assert cert.status == FEASIBLE
    assert cert.t <= -0.9
    assert abs(cert.values["x"][0, 0]) < 1e-3
    assert cert.margin == pytest.approx(-1.0, abs=1e-6)


def test_antisymmetric_pair_is_infeasible():
    cert = solve_feasibility(diag_problem([0, 0], [1, -1]), SolverOptions(bound_radius=10))
    assert cert.status == INFEASIBLE
    assert cert.margin >= -cert.epsilon


def test_certify_constant_problems():
    for value, expected in ((-1.0, -1.0), (0.0, 0.0)):
        con = AffineMatrixInequality((3,), value * np.eye(3))
        assert certify(LmiProblem((), (con,), 0.0), {}) == expected


def test_constant_problem_needs_no_iterations():
    con = AffineMatrixInequality((2,), -np.eye(2))
    cert = solve_feasibility(LmiProblem((), (con,), 1e-9))
    assert cert.status == FEASIBLE and cert.margin == -1.0


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-3, 3).filter(lambda a: abs(a) > 1e-2)), min_size=2, max_size=5))
def test_scalar_minimax_matches_closed_form(lines):
    c = np.array([p[0] for p in lines])
    a = np.array([p[1] for p in lines])
    R = 10.0
    # the optimum of a max of lines on [-R, R] sits at an endpoint or a crossing
    cands = [-R, R]
    for i in range(len(c)):
        for j in range(i + 1, len(c)):
            if a[i] != a[j]:
                x = (c[j] - c[i]) / (a[i] - a[j])
                if abs(x) < R:
                    cands.append(x)
    best = min(np.max(c + a * x) for x in cands)
    cert = solve_feasibility(diag_problem(c, a), SolverOptions(bound_radius=R))
    x = cert.values["x"][0, 0]
    got = float(np.max(c + a * x))
    assert got == pytest.approx(cert.margin, abs=1e-12)
    # the box barrier keeps the iterate strictly inside, so allow a small gap near the edge
    if best < -1e-6 and abs(x) < 0.9 * R:
        assert cert.margin <= best + 1e-6
    assert (cert.status == FEASIBLE) == (cert.margin < -cert.epsilon)


def test_verification_at_design(sys5, design):
    problem, cert = verify_gains(sys5, design.gains, 0.5, 0.5)
    assert cert.status == FEASIBLE
    assert cert.margin < -1e-8
    check = certify(problem, cert.values)
    assert check < 0
    assert abs(check - cert.margin) <= 1e-10
    assert check <= cert.margin + 1e-10


def test_solver_is_deterministic(sys5, design):
    p1, c1 = verify_gains(sys5, design.gains, 0.5, 0.5)
    p2, c2 = verify_gains(sys5, design.gains, 0.5, 0.5)
    assert c1.margin == c2.margin and c1.iterations == c2.iterations and c1.t == c2.t
    for k in c1.values:
        np.testing.assert_array_equal(c1.values[k], c2.values[k])


def test_tighter_epsilon_keeps_feasible_points():
    loose = solve_feasibility(diag_problem([-1, -1], [1, -1], epsilon=1e-2))
    assert loose.feasible
    tight = diag_problem([-1, -1], [1, -1], epsilon=1e-6)
    assert certify(tight, loose.values) < -tight.epsilon


def test_scaling_a_constraint_scales_the_margin():
    base = solve_feasibility(diag_problem([-1, -2, -0.5], [1, -1, -0.5]))
    scaled = solve_feasibility(diag_problem([-10, -20, -5], [10, -10, -5]))
    assert base.status == scaled.status == FEASIBLE
    assert scaled.margin == pytest.approx(10 * base.margin, rel=1e-4)


def test_iteration_budget_is_reported(sys5, design):
    _, cert = verify_gains(sys5, design.gains, 0.5, 0.5, solver=SolverOptions(max_iterations=2))
    assert cert.iterations == 2
    assert any("iteration budget" in w for w in cert.warnings)
    assert cert.status in (FEASIBLE, MAX_ITERATIONS)
    if cert.status == MAX_ITERATIONS:
        assert cert.margin >= -cert.epsilon


def test_box_warning():
    # F(x) = -x improves without bound; the box caps it
    cert = solve_feasibility(diag_problem([0.0], [-1.0]), SolverOptions(bound_radius=10))
    assert cert.feasible
    assert any("variable box" in w for w in cert.warnings)


class _Lopsided:
    label = "lopsided"
    dimension = 2
    constant = np.zeros((2, 2))
    block_sizes = (2,)
    terms = ()

    def evaluate(self, values):
        x = values["x"][0, 0]
        return np.array([[-1.0, x], [0.0, -1.0]])


def test_asymmetric_coefficients_are_rejected():
    problem = LmiProblem.__new__(LmiProblem)
    object.__setattr__(problem, "variables", (MatrixVariable("x", 1, 1),))
    object.__setattr__(problem, "constraints", (_Lopsided(),))
    object.__setattr__(problem, "epsilon", 1e-9)
    with pytest.raises(InternalConsistencyError):
        solve_feasibility(problem)


@pytest.mark.parametrize("kw", [dict(max_iterations=0), dict(kkt_tolerance=0), dict(bound_radius=-1),
                                dict(mu=1.0), dict(initial_centering=0)])
def test_options_validation(kw):
    with pytest.raises(DomainError):
        SolverOptions(**kw)


def test_exact_rayleigh_quotient():
    F = np.diag([1.0, 2.0, 3.0])
    assert rayleigh_exact(F, np.array([0.0, 0.0, 2.0])) == 3.0
    assert rayleigh_exact(F, np.array([1.0, 1.0, 0.0])) == 1.5


def test_ritz_value_is_independent_of_cluster_basis(rng):
    # two nearly equal top eigenvalues buried under a large norm
    Q, _ = np.linalg.qr(rng.standard_normal((8, 8)))
    w = np.array([-1e7, -5e6, -1e3, -10.0, -1.0, -0.5, -2.0e-6, -2.0e-6 + 1e-9])
    F = Q @ np.diag(w) @ Q.T
    F = 0.5 * (F + F.T)
    _, V = np.linalg.eigh(F)
    k = cluster_size(np.linalg.eigvalsh(F), F)
    assert k >= 2
    R = np.linalg.qr(rng.standard_normal((k, k)))[0]
    a = ritz_max(F, V[:, -k:])
    b = ritz_max(F, V[:, -k:] @ R)
    assert abs(a - b) <= 1e-12
    assert abs(a - w[-1]) <= 1e-8
