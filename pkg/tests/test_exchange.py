import numpy as np
import pytest

from conftest import line, random_smooth_problem
from vpx.bases import monomials
from vpx.core import DeviationProfile, DiscreteDomain, Problem, deviation_profile
from vpx.errors import ContractViolation, DegenerateExchange
from vpx.exchange import (closed_form_weights, exchange_step, select_entering,
                          select_leaving)
from vpx.geometry import JoinWeights, OptimalityCertificate, hulls_intersect, interior_join_weights
from vpx.interpolation import SignedBasis, basis_weights, chebyshev_interpolant, is_nonsingular
from vpx.solver import SolveOptions, solve_minimax


def profile(r):
    return DeviationProfile.from_residuals(np.asarray(r, float))


def test_entering_examples():
    assert select_entering(profile([0.9, -0.5, 0.5]), 0.5) == (0, 1)
    assert select_entering(profile([0.5, -0.5]), 0.5, 1e-9) is None
    assert select_entering(profile([0.9, -0.9]), 0.5) == (0, 1)
    assert select_entering(profile([0.2, -0.9]), 0.5) == (1, -1)


def test_leaving_minimum_ratio():
    jw = JoinWeights(0.5, np.array([0.1, 0.4]), np.array([1.0]), 0.1)
    rec = select_leaving([0.5, 0.5], [1.0], jw, (3, 7), (5,), 9, 1, 0.2)
    np.testing.assert_allclose(rec.ratios, [0.2, 0.8, 1.0])
    assert rec.gamma == pytest.approx(0.2)
    assert rec.leaving_index == 3 and rec.leaving_side == "pos"
    assert rec.gamma == min(rec.ratios)


def test_leaving_zero_ratio_other_side():
    jw = JoinWeights(0.5, np.array([0.2, 0.3]), np.array([0.0, 1.0]), 0.0)
    rec = select_leaving([0.5, 0.5], [0.4, 0.6], jw, (0, 1), (2, 4), 8, 1, 0.1)
    assert rec.gamma == 0.0
    assert rec.leaving_index == 2 and rec.leaving_side == "neg"


def test_leaving_tie_lowest_index():
    jw = JoinWeights(0.5, np.array([0.25]), np.array([0.25, 0.25]), 0.25)
    rec = select_leaving([0.5], [0.5, 0.5], jw, (6,), (4, 2), 9, -1, 0.1)
    assert rec.gamma == 0.5
    assert rec.leaving_index == 2 and rec.leaving_side == "pos"


def test_leaving_degenerate():
    jw = JoinWeights(0.0, np.array([0.5]), np.array([1.0]), 0.0)
    with pytest.raises(DegenerateExchange):
        select_leaving([1.0], [1.0], jw, (0,), (1,), 2, 1, 0.1)


@pytest.fixture
def five_point():
    x = np.array([-1, -0.5, 0, 0.5, 1])
    return Problem(DiscreteDomain(line(x), x ** 2), monomials(1, 1))


def test_five_point_exchange(five_point):
    basis = SignedBasis([0, 2], [1])
    it = chebyshev_interpolant(basis, five_point)
    assert it.sigma == pytest.approx(0.125)
    np.testing.assert_allclose(it.A, [-0.125, -1.0], atol=1e-15)
    prof = deviation_profile(it.A, five_point)
    np.testing.assert_allclose(prof.residuals, [0.125, -0.125, 0.125, 0.875, 2.125])
    assert select_entering(prof, it.sigma) == (4, 1)

    # brute force: the entering point joins Y, one old point leaves, labels stay
    valid = []
    for leave in basis.indices:
        pos = [k for k in (0, 2, 4) if k != leave]
        neg = [k for k in (1,) if k != leave]
        if not pos or not neg:
            continue
        cand = SignedBasis(pos, neg)
        if is_nonsingular(cand, five_point):
            valid.append((leave, cand, chebyshev_interpolant(cand, five_point).sigma))
    assert len(valid) == 1
    leave, expected, sigma = valid[0]

    new_basis, rec = exchange_step(basis, it, prof, five_point)
    assert new_basis == expected == SignedBasis([0, 4], [1])
    assert rec.leaving_index == leave == 2
    assert rec.gamma == pytest.approx(1 / 3)
    assert rec.new_sigma == pytest.approx(sigma) == pytest.approx(0.375)


def test_negative_entering_joins_z(five_point):
    basis = SignedBasis([0, 2], [1])
    it = chebyshev_interpolant(basis, five_point)
    prof = deviation_profile(it.A, five_point)
    # force a fictitious negative deviation at x = 0.5 by flipping the target
    flipped = Problem(DiscreteDomain(five_point.domain.points, -five_point.values),
                      five_point.family)
    it_f = chebyshev_interpolant(SignedBasis([1], [0, 2]), flipped)
    prof_f = deviation_profile(it_f.A, flipped)
    k, sign = select_entering(prof_f, it_f.sigma)
    assert sign == -1
    new_basis, rec = exchange_step(it_f.basis, it_f, prof_f, flipped)
    assert k in new_basis.neg and rec.entering_sign == -1
    assert rec.new_sigma > it_f.sigma
    assert prof.residuals[k] == -prof_f.residuals[k]


def test_entering_already_in_basis(five_point):
    basis = SignedBasis([0, 2], [1])
    it = chebyshev_interpolant(basis, five_point)
    with pytest.raises(ContractViolation):
        exchange_step(basis, it, deviation_profile(it.A, five_point), five_point,
                      entering=(0, 1))


def _step_checks(problem, basis, it, prof):
    old = basis_weights(it.basis, problem)
    new_basis, rec = exchange_step(it.basis, it, prof, problem)
    k, sign = rec.entering_index, rec.entering_sign
    b = it.basis
    join, other = (b.pos, b.neg) if sign > 0 else (b.neg, b.pos)
    wj, wo = (old.weights_pos, old.weights_neg) if sign > 0 else (old.weights_neg, old.weights_pos)
    jw = interior_join_weights(problem.g[[k, *join]], problem.g[list(other)], entering=0)
    ent, cj, co = closed_form_weights(wj, wo, jw, rec.gamma)
    closed = dict(zip((k, *join, *other), np.concatenate([[ent], cj, co])))
    new = basis_weights(new_basis, problem)
    got = dict(zip(new.positive_indices + new.negative_indices,
                   np.concatenate([new.weights_pos, new.weights_neg])))
    assert closed[rec.leaving_index] == pytest.approx(0, abs=1e-9)
    for idx, w in got.items():
        assert closed[idx] == pytest.approx(w, abs=1e-7)
    return new_basis, rec


def test_closed_form_matches_new_radon_weights():
    rng = np.random.default_rng(8)
    checked = 0
    for _ in range(30):
        d, deg = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        prob = random_smooth_problem(rng, d, deg, 200)
        res = solve_minimax(prob)
        if not res.iterations:
            continue
        rec0 = res.iterations[0]
        # replay the first step from the initial basis
        from vpx.solver import initial_basis
        basis = initial_basis(prob)
        it = chebyshev_interpolant(basis, prob)
        _, rec = _step_checks(prob, basis, it, deviation_profile(it.A, prob))
        assert rec.leaving_index == rec0.leaving_index
        checked += 1
    assert checked > 10


def test_monotone_and_hull_preserving_on_random_problems():
    rng = np.random.default_rng(200)
    steps = 0
    for _ in range(200):
        d, deg = int(rng.integers(1, 4)), int(rng.integers(1, 3))
        prob = random_smooth_problem(rng, d, deg, 120)
        res = solve_minimax(prob, SolveOptions())
        for rec in res.iterations:
            steps += 1
            assert rec.new_sigma > rec.old_sigma + 1e-12 * (1 + rec.old_sigma)
            assert rec.gamma < 1
            assert rec.gamma == min(rec.ratios)
            nb = rec.new_basis
            assert len(nb) == prob.n + 2
            cert = hulls_intersect(prob.g[list(nb.pos)], prob.g[list(nb.neg)])
            assert isinstance(cert, OptimalityCertificate) and cert.residual <= 1e-9
    assert steps > 200
