import numpy as np
import pytest

from conftest import line, random_smooth_problem
from vpx.bases import custom, monomials
from vpx.core import DiscreteDomain, Problem, deviation_profile
from vpx.errors import ContractViolation, InsufficientPoints
from vpx.geometry import OptimalityCertificate, Refusal
from vpx.interpolation import SignedBasis, is_nonsingular
from vpx.oracle import lp_minimax
from vpx.solver import (ITERATION_LIMIT, OPTIMAL, SINGULAR, SolveOptions, certify_optimality,
                        initial_basis, solve_minimax)


def test_initial_basis_too_few_points():
    x = np.array([0.0, 1.0])
    with pytest.raises(InsufficientPoints):
        initial_basis(Problem(DiscreteDomain(line(x), x), monomials(1, 1)))


def test_initial_basis_quintic(exp_grid):
    prob = Problem(DiscreteDomain(line(exp_grid), np.exp(exp_grid)), monomials(1, 5))
    basis = initial_basis(prob)
    assert len(set(basis.indices)) == 7
    assert is_nonsingular(basis, prob)


def test_initial_basis_corners():
    X = np.array([(1, 1), (1, -1), (-1, 1), (-1, -1)], dtype=float)
    prob = Problem(DiscreteDomain(X, X[:, 0] * X[:, 1]), monomials(2, 1))
    basis = initial_basis(prob)
    assert {basis.pos, basis.neg} == {(0, 3), (1, 2)}


def test_solve_square(square_problem):
    res = solve_minimax(square_problem)
    assert res.status == OPTIMAL
    np.testing.assert_allclose(res.A, [0.5, 0.0], atol=1e-12)
    assert res.sigma == pytest.approx(0.5, abs=1e-12)


def test_solve_product(product_problem):
    res = solve_minimax(product_problem)
    assert res.status == OPTIMAL
    np.testing.assert_allclose(res.A, [0, 0, 0], atol=1e-12)
    assert res.sigma == pytest.approx(1.0, abs=1e-12)
    assert lp_minimax(product_problem)[1] == pytest.approx(1.0, abs=1e-12)


def test_solve_exp_quintic(exp_grid):
    prob = Problem(DiscreteDomain(line(exp_grid), np.exp(exp_grid)), monomials(1, 5))
    res = solve_minimax(prob)
    assert res.status == OPTIMAL
    _, sigma = lp_minimax(prob)
    assert abs(res.sigma - sigma) <= 1e-9
    assert res.certificate.residual <= 1e-8
    assert all(b > a for a, b in zip(res.sigmas, res.sigmas[1:]))


def test_solve_deterministic(product_problem):
    a = solve_minimax(product_problem, SolveOptions(seed=3))
    b = solve_minimax(product_problem, SolveOptions(seed=3))
    assert np.array_equal(a.A, b.A) and a.sigma == b.sigma and a.basis == b.basis


def test_iteration_limit(exp_grid):
    prob = Problem(DiscreteDomain(line(exp_grid), np.exp(exp_grid)), monomials(1, 5))
    res = solve_minimax(prob, SolveOptions(max_iterations=1))
    if len(solve_minimax(prob).iterations) > 1:
        assert res.status == ITERATION_LIMIT
        assert len(res.iterations) == 1


def test_options_contract():
    with pytest.raises(ContractViolation):
        SolveOptions(singular_policy="ignore")
    with pytest.raises(ContractViolation):
        SolveOptions(termination_tol=0)


def test_singular_prone_problem_fail_policy():
    # two copies of x make every lifted configuration degenerate
    x = np.linspace(-1, 1, 21)
    fam = custom(1, [{"name": "monomial", "exponents": [1]}, {"name": "monomial", "exponents": [1]}])
    prob = Problem(DiscreteDomain(line(x), x ** 2), fam)
    res = solve_minimax(prob, SolveOptions(singular_policy="fail"))
    assert res.status == SINGULAR and res.A is None
    res = solve_minimax(prob, SolveOptions(singular_policy="retry"))
    assert res.status == SINGULAR


def test_certify_parabola_three_points():
    x = np.array([-1.0, 0.0, 1.0])
    prob = Problem(DiscreteDomain(line(x), x ** 2), monomials(1, 1))
    cert = certify_optimality([0.5, 0.0], prob)
    assert isinstance(cert, OptimalityCertificate)
    assert cert.E_plus_indices == (0, 2) and cert.E_minus_indices == (1,)
    np.testing.assert_allclose(cert.common_point, [0.0], atol=1e-12)


def test_certify_refuses_one_sided(square_problem):
    out = certify_optimality([0.0, 0.0], square_problem)
    assert isinstance(out, Refusal) and "E-" in out.reason


def test_certify_refuses_suboptimal(square_problem):
    out = certify_optimality([0.5, 0.1], square_problem)
    assert isinstance(out, Refusal)


def test_certified_solutions_resist_perturbation():
    rng = np.random.default_rng(17)
    for _ in range(10):
        prob = random_smooth_problem(rng, int(rng.integers(1, 4)), 2, 300)
        res = solve_minimax(prob)
        assert res.status == OPTIMAL
        for _ in range(20):
            dA = rng.normal(size=res.A.shape)
            dA *= 1e-4 / np.max(np.abs(dA))
            assert deviation_profile(res.A + dA, prob).max_abs >= res.sigma - 1e-6


def test_result_basis_is_final(square_problem):
    res = solve_minimax(square_problem)
    assert isinstance(res.basis, SignedBasis)
    assert len(res.basis) == 3
    assert res.sigmas[-1] == res.sigma
