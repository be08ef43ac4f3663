import numpy as np
import pytest

from conftest import line, random_basis, random_smooth_problem
from vpx.bases import monomials
from vpx.core import DiscreteDomain, Problem
from vpx.errors import ContractViolation, SingularBasis
from vpx.interpolation import (Interpolant, SignedBasis, basis_points_sorted, build_system,
                               chebyshev_interpolant, equal_deviation_error, is_nonsingular,
                               normalize_sign)
from vpx.numerics import solve_dense


@pytest.fixture
def corners():
    X = np.array([(1, 1), (1, -1), (-1, 1), (-1, -1)], dtype=float)
    return Problem(DiscreteDomain(X, X[:, 0] * X[:, 1]), monomials(2, 1))


@pytest.fixture
def parabola3():
    x = np.array([-1.0, 0.0, 1.0])
    return Problem(DiscreteDomain(line(x), x ** 2), monomials(1, 1))


def test_build_system_corners(corners):
    M, b = build_system(SignedBasis([0, 3], [1, 2]), corners)
    np.testing.assert_array_equal(
        M, [[1, 1, 1, 1], [1, -1, -1, 1], [1, 1, -1, -1], [1, -1, 1, -1]])
    np.testing.assert_array_equal(b, [1, 1, -1, -1])


def test_build_system_parabola(parabola3):
    M, b = build_system(SignedBasis([0, 2], [1]), parabola3)
    np.testing.assert_array_equal(M, [[1, -1, 1], [1, 1, 1], [1, 0, -1]])
    np.testing.assert_array_equal(b, [1, 1, 0])


def test_build_system_wrong_size(parabola3):
    with pytest.raises(ContractViolation):
        build_system(SignedBasis([0], [1]), parabola3)


def test_interpolant_parabola(parabola3):
    it = chebyshev_interpolant(SignedBasis([0, 2], [1]), parabola3)
    np.testing.assert_allclose(it.A, [0.5, 0.0], atol=1e-15)
    assert it.sigma == pytest.approx(0.5)
    assert not it.degenerate


def test_interpolant_corners(corners):
    it = chebyshev_interpolant(SignedBasis([0, 3], [1, 2]), corners)
    np.testing.assert_allclose(it.A, [0, 0, 0], atol=1e-15)
    assert it.sigma == pytest.approx(1.0)


def test_interpolant_negative_sigma_swaps_sides(parabola3):
    it = chebyshev_interpolant(SignedBasis([1], [0, 2]), parabola3)
    assert it.sigma == pytest.approx(0.5)
    assert it.basis == SignedBasis([0, 2], [1])


def test_interpolant_in_span():
    x = np.linspace(-1, 1, 7)
    prob = Problem(DiscreteDomain(line(x), 1 + 2 * x), monomials(1, 2))
    it = chebyshev_interpolant(SignedBasis([0, 3], [1, 6]), prob)
    assert it.degenerate
    assert abs(it.sigma) <= 1e-12
    np.testing.assert_allclose(it.A, [1, 2, 0], atol=1e-12)


def test_singular_split_rejected(parabola3):
    # -1 and 0 on one side, 1 alone: hulls {-1,0} and {1} do not meet
    with pytest.raises(SingularBasis):
        chebyshev_interpolant(SignedBasis([0, 1], [2]), parabola3)
    assert not is_nonsingular(SignedBasis([0, 1], [2]), parabola3)


def test_duplicate_lifted_points_singular():
    x = np.array([-1.0, 0.0, 1.0, 2.0])
    # g(x) = x^2 maps -1 and 1 to the same lifted point
    fam = monomials(1, 2)
    fam2 = type(fam)(1, [lambda X: X[:, 0] ** 2], ["x^2"])
    prob = Problem(DiscreteDomain(line(x), x), fam2)
    with pytest.raises(SingularBasis):
        chebyshev_interpolant(SignedBasis([0, 2], [1]), prob)


def test_normalize_sign_examples():
    raw = Interpolant(np.zeros(2), -0.3, SignedBasis([0], [1, 2]))
    out = normalize_sign(raw)
    assert out.sigma == 0.3 and out.basis == SignedBasis([1, 2], [0])
    keep = Interpolant(np.zeros(2), 0.7, SignedBasis([0], [1, 2]))
    assert normalize_sign(keep) is keep
    zero = normalize_sign(Interpolant(np.zeros(2), 0.0, SignedBasis([0], [1, 2])))
    assert zero.degenerate and zero.sigma == 0.0 and zero.basis == SignedBasis([0], [1, 2])


def test_random_bases_equal_deviation_and_permutation():
    rng = np.random.default_rng(21)
    for _ in range(60):
        d, deg = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        prob = random_smooth_problem(rng, d, deg, 300)
        basis = random_basis(rng, prob)
        it = chebyshev_interpolant(basis, prob)
        assert it.sigma >= 0
        assert equal_deviation_error(it, prob) <= 1e-9
        M, b = build_system(it.basis, prob)
        perm = rng.permutation(len(b))
        sol = solve_dense(M[perm], b[perm])
        np.testing.assert_allclose(sol[:-1], it.A, atol=1e-10)
        assert sol[-1] == pytest.approx(it.sigma, abs=1e-10)


def test_univariate_alternance():
    rng = np.random.default_rng(4)
    x = np.linspace(-1, 1, 50)
    for deg in range(1, 6):
        prob = Problem(DiscreteDomain(line(x), np.cos(3 * x) + x ** 3), monomials(1, deg))
        basis = random_basis(rng, prob)
        it = chebyshev_interpolant(basis, prob)
        signs = [it.basis.sign_of(k) for k in basis_points_sorted(it.basis, prob)]
        assert all(a == -b for a, b in zip(signs, signs[1:]))


def test_signed_basis_contract():
    with pytest.raises(ContractViolation):
        SignedBasis([0, 1], [1])
    with pytest.raises(ContractViolation):
        SignedBasis([], [1])
    b = SignedBasis([3, 1], [2])
    assert b.indices == (1, 3, 2)
    assert b.as_dict() == {"pos": [1, 3], "neg": [2]}
