"""Tests for psd-rank bounds, the factorization solver, synthesis and
Gram extraction."""

import numpy as np
import pytest

from qcorr.classical import (
    DistMatrix,
    PsdFactorization,
    SolverConfig,
    _descend,
    _grams,
    _objective,
    _random_start,
    _trace_form,
    gram_extract,
    nonneg_rank_bounds,
    psd_fit,
    psd_rank_lower_bound,
    psd_rank_search,
    synth_from_psd,
    validate_dist,
)
from qcorr.errors import FactorizationMismatch, InvalidInput, NotNormalized
from qcorr.linalg import ceil_log2, partial_trace, schmidt_rank
from qcorr.rand import random_psd_factorization

UNIFORM = validate_dist([[0.25, 0.25], [0.25, 0.25]])
HALF_I2 = validate_dist([[0.5, 0.0], [0.0, 0.5]])
THIRD_I3 = validate_dist(np.eye(3) / 3)


def diagonal_half_i2_factorization() -> PsdFactorization:
    # C_x = e_x e_x^T, D_y = 1/2 e_y e_y^T.
    cs = tuple(np.diag([1.0 if x == i else 0.0 for i in range(2)]).astype(complex)
               for x in range(2))
    ds = tuple(0.5 * np.diag([1.0 if y == i else 0.0 for i in range(2)]).astype(complex)
               for y in range(2))
    return PsdFactorization(r=2, cs=cs, ds=ds, residual=0.0)


def test_validate_dist_accepts_uniform():
    assert UNIFORM.n == UNIFORM.m == 2
    np.testing.assert_allclose(UNIFORM.p, 0.25)


def test_validate_dist_rejects_negative():
    with pytest.raises(InvalidInput):
        validate_dist([[0.5, -0.1], [0.3, 0.3]])


def test_validate_dist_renormalize():
    d = validate_dist([[0.3, 0.3], [0.3, 0.3]], renormalize=True)
    np.testing.assert_allclose(d.p, 0.25)
    with pytest.raises(NotNormalized):
        validate_dist([[0.3, 0.3], [0.3, 0.3]])


def test_psd_rank_lower_bound_examples():
    product = validate_dist(np.outer([0.3, 0.7], [0.5, 0.5]))
    assert psd_rank_lower_bound(product) == 1
    assert psd_rank_lower_bound(HALF_I2) == 2  # ceil(sqrt(2))
    assert psd_rank_lower_bound(THIRD_I3) == 2  # ceil(sqrt(3))


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(53)
    P = rng.uniform(0.1, 1.0, size=(2, 3))
    P /= P.sum()
    e, f = _random_start(rng, 2, 3, 2)
    d = _grams(f)
    resid = _trace_form(_grams(e), d) - P
    grad = 4.0 * np.einsum("xy,xab,ybc->xac", resid, e, d)
    h = 1e-7
    for idx in [(0, 0, 0), (1, 1, 1), (0, 1, 0)]:
        for delta, part in ((h, "re"), (1j * h, "im")):
            bump = np.zeros_like(e)
            bump[idx] = delta
            num = (_objective(P, e + bump, f) - _objective(P, e - bump, f)) / (2 * h)
            # grad packs the real-coordinate gradient as a complex array:
            # d/d(re) = Re(grad), d/d(im) = Im(grad).
            ana = grad[idx].real if part == "re" else grad[idx].imag
            assert abs(num - ana) <= 1e-5 * max(1.0, abs(ana))


def test_descent_objective_non_increasing():
    rng = np.random.default_rng(59)
    P = np.eye(2) / 2
    e0, f0 = _random_start(rng, 2, 2, 2)
    _, _, history = _descend(P, e0, f0, SolverConfig(max_iters=300))
    diffs = np.diff(history)
    assert np.all(diffs <= 1e-18)


def test_psd_fit_uniform_product_rank1():
    fact = psd_fit(UNIFORM, 1)
    assert fact.residual <= 1e-8


def test_psd_fit_half_i2_rank2():
    fact = psd_fit(HALF_I2, 2)
    assert fact.residual <= 1e-8


def test_psd_fit_third_i3_rank2_infeasible():
    fact = psd_fit(THIRD_I3, 2, SolverConfig(starts=64))
    assert fact.residual >= 1e-3


def test_psd_fit_residual_consistent_with_factors():
    fact = psd_fit(HALF_I2, 2)
    recomputed = float(np.linalg.norm(fact.trace_products() - HALF_I2.p))
    assert abs(recomputed - fact.residual) <= 1e-12


def test_psd_fit_rejects_bad_rank():
    with pytest.raises(InvalidInput):
        psd_fit(UNIFORM, 0)


def test_psd_rank_search_uniform_product():
    report = psd_rank_search(UNIFORM)
    assert (report.lower, report.upper, report.status) == (1, 1, "certified")
    assert ceil_log2(report.upper) == 0


def test_psd_rank_search_half_i2():
    report = psd_rank_search(HALF_I2)
    assert (report.lower, report.upper, report.status) == (2, 2, "certified")
    assert ceil_log2(report.upper) == 1
    assert report.witness is not None and report.witness.residual < 1e-7


def test_psd_rank_search_third_i3():
    report = psd_rank_search(THIRD_I3)
    assert (report.lower, report.upper, report.status) == (2, 3, "heuristic")
    assert ceil_log2(report.upper) == 2


def test_synth_trivial_point_mass():
    dist = DistMatrix(1, 1, np.array([[1.0]]))
    fact = PsdFactorization(r=1, cs=(np.array([[1.0]]),), ds=(np.array([[1.0]]),),
                            residual=0.0)
    state = synth_from_psd(dist, fact)
    assert state.dims == (1, 1, 1, 1, 1, 1)
    np.testing.assert_allclose(state.amps, [1.0], atol=1e-12)


def test_synth_half_i2_diagonal_witness():
    state = synth_from_psd(HALF_I2, diagonal_half_i2_factorization())
    red = partial_trace(state, keep=[0, 3])
    np.testing.assert_allclose(red.mat, np.diag([0.5, 0, 0, 0.5]), atol=1e-10)
    assert schmidt_rank(state) == 2


def test_synth_random_factorizations_reproduce_trace_form():
    rng = np.random.default_rng(61)
    for _ in range(10):
        n, m = rng.integers(1, 5, size=2)
        r = int(rng.integers(1, 4))
        dist, fact = random_psd_factorization(rng, n, m, r)
        state = synth_from_psd(dist, fact)
        red = partial_trace(state, keep=[0, 3])
        diag = np.real(np.diag(red.mat)).reshape(n, m)
        np.testing.assert_allclose(diag, fact.trace_products(), atol=1e-8)
        assert schmidt_rank(state) <= r


def test_synth_rejects_large_residual():
    bad = PsdFactorization(
        r=2,
        cs=tuple(np.eye(2, dtype=complex) for _ in range(2)),
        ds=tuple(np.eye(2, dtype=complex) for _ in range(2)),
        residual=0.5,
    )
    with pytest.raises(FactorizationMismatch):
        synth_from_psd(HALF_I2, bad)


def test_gram_extract_product_state():
    from qcorr.linalg import RegisterState

    amps = np.zeros(4)
    amps[0] = 1.0  # |0>|0>
    fact = gram_extract(RegisterState(amps, (2, 2), ("A", "B")))
    assert fact.r == 1
    np.testing.assert_allclose(fact.cs[0], [[1.0]], atol=1e-10)
    np.testing.assert_allclose(fact.cs[1], [[0.0]], atol=1e-10)
    np.testing.assert_allclose(fact.ds[0], [[1.0]], atol=1e-10)
    np.testing.assert_allclose(fact.ds[1], [[0.0]], atol=1e-10)


def test_gram_extract_round_trip_half_i2():
    state = synth_from_psd(HALF_I2, diagonal_half_i2_factorization())
    fact = gram_extract(state)
    np.testing.assert_allclose(fact.trace_products(), HALF_I2.p, atol=1e-8)


def test_gram_extract_matches_measured_distribution():
    rng = np.random.default_rng(67)
    for _ in range(10):
        dist, fact = random_psd_factorization(rng, 2, 2, 2)
        state = synth_from_psd(dist, fact)
        extracted = gram_extract(state)
        np.testing.assert_allclose(extracted.trace_products(), dist.p, atol=1e-8)
        assert extracted.residual <= 1e-8


def test_gram_extract_rejects_unnormalized():
    from qcorr.linalg import RegisterState

    with pytest.raises(NotNormalized):
        gram_extract(RegisterState(np.ones(4), (2, 2), ("A", "B")))


def test_nonneg_rank_rank1():
    product = validate_dist(np.outer([0.3, 0.7], [0.5, 0.5]))
    report = nonneg_rank_bounds(product)
    assert (report.lower, report.upper, report.status) == (1, 1, "certified")
    assert ceil_log2(report.upper) == 0


def test_nonneg_rank_half_i2():
    report = nonneg_rank_bounds(HALF_I2)
    assert (report.lower, report.upper, report.status) == (2, 2, "certified")
    assert ceil_log2(report.upper) == 1


def test_nonneg_rank_random_rank3():
    rng = np.random.default_rng(71)
    w = rng.uniform(0.1, 1.0, size=(4, 3))
    h = rng.uniform(0.1, 1.0, size=(3, 4))
    p = w @ h
    dist = validate_dist(p / p.sum(), renormalize=True)
    report = nonneg_rank_bounds(dist)
    assert report.lower == 3
    assert 3 <= report.upper <= 4


def test_rank_chain_invariant():
    rng = np.random.default_rng(73)
    cases = [UNIFORM, HALF_I2, THIRD_I3]
    for _ in range(5):
        n, m = rng.integers(2, 5, size=2)
        raw = rng.uniform(0.0, 1.0, size=(n, m))
        cases.append(validate_dist(raw / raw.sum(), renormalize=True))
    # Reduced budget: the ordering is guaranteed by the shared warm starts,
    # not by how hard the random instances are polished.
    cfg = SolverConfig(starts=6, max_iters=1200)
    for dist in cases:
        lower = psd_rank_lower_bound(dist)
        psd = psd_rank_search(dist, cfg)
        nn = nonneg_rank_bounds(dist, cfg)
        assert lower <= psd.upper <= nn.upper <= min(dist.n, dist.m)
        assert ceil_log2(psd.upper) <= ceil_log2(nn.upper)
