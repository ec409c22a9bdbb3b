import math

import numpy as np
import pytest

import secrd


def test_scalar_helpers():
    assert secrd.binary_entropy(0.5) == 1.0
    assert secrd.binary_entropy(0.3) == pytest.approx(0.8812908992306926, abs=1e-13)
    assert secrd.binary_convolution(0.1, 0.2) == pytest.approx(0.26, abs=1e-15)
    assert secrd.f_interp(1.0) == pytest.approx(0.5, abs=1e-15)
    assert secrd.d_cap(10.0, 0.7) == pytest.approx(0.3, abs=1e-12)
    with pytest.raises(ValueError):
        secrd.binary_entropy(1.5)


def test_bsbcc_boundaries():
    params = secrd.bsbcc.Params(0.3, 0.1, 0.2)
    assert secrd.bsbcc.rate_max(params) == pytest.approx(
        0.6025302279579305, abs=1e-12
    )
    assert secrd.bsbcc.rate_kink(params) == pytest.approx(
        0.2870022843976650, abs=1e-12
    )
    assert secrd.bsbcc.distortion_causal(params, 0.45) == pytest.approx(
        0.2171437339165564, abs=1e-10
    )

    pts = secrd.bsbcc.curve(params, [0.1, 0.45, 0.65])
    assert [p.regime for p in pts[:2]] == ["plateau", "tradeoff"]
    assert pts[2].regime == "infeasible"
    assert math.isnan(pts[2].d_causal)
    assert pts[1].alpha_prime == pytest.approx(0.4542797425128752, abs=1e-9)

    with pytest.raises(ValueError):
        secrd.bsbcc.Params(0.3, 0.2, 0.1)
    with pytest.raises(ValueError):
        secrd.bsbcc.solve_gamma(params, 0.1)


def test_mmf_rates_and_regions():
    params = secrd.mmf.Params(4, 20.0, 10.0, 20.0)
    real = secrd.mmf.sample_realization(params, seed=42)

    psi = np.asarray(real.psi)
    assert np.max(np.abs(psi.conj().T @ psi - np.eye(4))) < 1e-10

    lam = [0.9, 0.2, 0.55, 0.0]
    diag = secrd.mmf.rate_pair_diag(params, real.mdl, secrd.mmf.CovSpectrum(lam))
    psi_e = np.asarray(real.psi_e)
    k = psi_e.conj().T @ np.diag(lam).astype(complex) @ psi_e
    gen = secrd.mmf.rate_pair_general(params, real, k)
    assert gen.rs_raw == pytest.approx(diag.rs_raw, abs=1e-9)
    assert gen.rp == pytest.approx(diag.rp, abs=1e-9)

    assert secrd.mmf.check_secrecy_condition(params, real.mdl)
    region = secrd.mmf.no_causal_region(
        params, real.mdl, secrd.binary_entropy(0.3), 0.3
    )
    assert region["rate_bound"] == pytest.approx(30.220266604654437, abs=1e-9)
    assert region["distortion"] == 0.3

    result = secrd.mmf.max_rs(params, real)
    assert result.general_value >= result.diag_value - 1e-9
    assert result.rs_star == pytest.approx(15.459176502746423, abs=1e-6)


def test_causal_curve_plateau():
    params = secrd.mmf.Params(4, 20.0, 10.0, 20.0)
    real = secrd.mmf.sample_realization(params, seed=42)
    pts = secrd.mmf.causal_curve(params, real, 0.3, [5.0, 26.0, 40.0])
    assert pts[0].regime == "plateau"
    assert pts[0].distortion == pytest.approx(0.3, abs=1e-12)
    assert pts[1].regime == "tradeoff"
    assert pts[1].distortion < 0.3
    assert pts[2].regime == "infeasible"
    assert math.isnan(pts[2].distortion)


def test_outage_reproducibility():
    params = secrd.mmf.Params(4, 20.0, 10.0, 20.0)
    entropy = secrd.binary_entropy(0.3)
    query = secrd.mmf.OutageQuery(
        rs_prime=0.4, rate=24.0, alpha=0.5, trials=200, seed=7
    )
    a = secrd.mmf.estimate_outage(params, query, entropy)
    b = secrd.mmf.estimate_outage(params, query, entropy, threads=2)
    assert a.p_out == b.p_out
    assert a.failures == b.failures
    assert 0.0 <= a.p_out <= 1.0
    assert a.trials_used == 200


def test_binning_simulation():
    assert secrd.binning.typical_set(8, 0.3, 0.15) == [2, 3]
    config = secrd.binning.Config(8, 0.3, 0.2, 0.15, seed=0)
    assert config.bin_size() == 3
    res = secrd.binning.run(config)
    assert res.bin_count == 27
    assert res.eve_distortion == pytest.approx(0.24554531999999968, abs=1e-12)
    assert res.bob_error == pytest.approx(0.46906687000000025, abs=1e-12)
    with pytest.raises(ValueError):
        secrd.binning.Config(0, 0.3, 0.2, 0.15)


def test_haar_and_lemma():
    u = secrd.sample_haar_unitary(4, seed=1)
    u = np.asarray(u)
    assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-10
    again = np.asarray(secrd.sample_haar_unitary(4, seed=1))
    assert np.array_equal(u, again)

    rows, cols = 4, 5
    rng = np.random.default_rng(0)
    base = rng.uniform(0.2, 1.2, size=cols)
    joint = np.empty((rows, cols))
    for r in range(rows):
        row = base * (1.0 + 0.6 * (rng.uniform(size=cols) - 0.5))
        joint[r] = row / (row.sum() * rows)
    res = secrd.lemma_tv_mi_check(joint)
    assert res["applicable"]
    assert res["holds"]
    assert res["mi"] == pytest.approx(
        secrd.mutual_information(joint), abs=1e-12
    )
