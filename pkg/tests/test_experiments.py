import math
from dataclasses import replace

import numpy as np
import pytest
from statsmodels.stats.proportion import proportion_confint

from probeqec import Backend, ProbeMode, p_err
from probeqec.codes import SyndromeMode
from probeqec.experiments import (ConfigError, ExperimentConfig, NoiseSpec, run_trials, sweep,
                                  trial_rng, wilson_interval)

from conftest import three_sigma

ALL_CODES = ["bitflip3", "phaseflip3", "shor9", "erasure"]


def cfg(**kw):
    return ExperimentConfig(**kw)


class TestValidation:

    def test_unknown_code(self):
        with pytest.raises(ConfigError) as e:
            cfg(code="steane").validate()
        assert e.value.field == "code"

    def test_loss_needs_erasure(self):
        with pytest.raises(ConfigError) as e:
            cfg(code="bitflip3", noise=NoiseSpec(p_loss=0.1)).validate()
        assert e.value.field == "p_loss"

    def test_mod4_needs_ideal(self):
        probe = ProbeMode(30.9, backend=Backend.HOMODYNE)
        with pytest.raises(ConfigError):
            cfg(code="shor9", probe=probe).validate()
        cfg(code="shor9", probe=probe, syndrome_mode=SyndromeMode.BINARY).validate()

    def test_bad_amplitudes(self):
        with pytest.raises(ConfigError):
            cfg(c0=0.6, c1=0.6).validate()

    @pytest.mark.parametrize("theta", [0.0, math.pi, -0.1])
    def test_theta_range(self, theta):
        with pytest.raises(ConfigError):
            cfg(theta=theta).validate()


class TestNoiseless:

    @pytest.mark.parametrize("code", ALL_CODES)
    @pytest.mark.parametrize("mode", list(SyndromeMode))
    def test_rate_zero(self, code, mode):
        st = run_trials(cfg(code=code, syndrome_mode=mode, trials=20, n=3, haar=True))
        assert st.failures == 0
        assert st.mean_fidelity == pytest.approx(1, abs=1e-10)

    def test_parity_ideal(self):
        st = run_trials(cfg(code="parity", trials=1000))
        assert st.failures == 0
        assert set(st.histogram) == {"odd"}


class TestAnalyticRates:

    def test_bitflip_majority_vote(self):
        # fails iff two or three of the qubits flip
        p, n = 0.1, 4000
        st = run_trials(cfg(code="bitflip3", noise=NoiseSpec(p_x=p), trials=n, seed=3))
        want = 3 * p ** 2 - 2 * p ** 3
        assert abs(st.logical_error_rate - want) < three_sigma(want, n)

    def test_bitflip_all_flipped(self):
        st = run_trials(cfg(code="bitflip3", noise=NoiseSpec(p_x=1.0), trials=10))
        assert st.failures == 10

    def test_phaseflip_majority_vote(self):
        p, n = 0.15, 3000
        st = run_trials(cfg(code="phaseflip3", noise=NoiseSpec(p_z=p), trials=n, seed=4,
                            syndrome_mode=SyndromeMode.BINARY))
        want = 3 * p ** 2 - 2 * p ** 3
        assert abs(st.logical_error_rate - want) < three_sigma(want, n)

    @pytest.mark.parametrize("n_pairs", [2, 3])
    def test_erasure_loss(self, n_pairs):
        # succeeds iff no pair loses both qubits and at least one pair is untouched
        p, n = 0.1, 3000
        st = run_trials(cfg(code="erasure", n=n_pairs, noise=NoiseSpec(p_loss=p), trials=n,
                            seed=5))
        single, clean = 2 * p * (1 - p), (1 - p) ** 2
        ok = sum(math.comb(n_pairs, k) * single ** k * clean ** (n_pairs - k)
                 for k in range(n_pairs))
        want = 1 - ok
        assert abs(st.logical_error_rate - want) < three_sigma(want, n)

    def test_homodyne_parity_rate(self):
        theta, alpha = 0.1, 1.5 / math.sin(0.1)
        n = 200_000
        st = run_trials(cfg(code="parity", theta=theta, trials=n,
                            probe=ProbeMode(alpha, backend=Backend.HOMODYNE)))
        p = p_err(alpha, theta)
        assert abs(st.logical_error_rate - p) < three_sigma(p, n)


class TestReproducibility:

    def test_same_seed(self):
        c = cfg(code="shor9", noise=NoiseSpec(p_x=0.05, p_z=0.05), trials=30, seed=11)
        assert run_trials(c) == run_trials(c)

    def test_trial_streams_differ(self):
        assert trial_rng(1, 0).random() != trial_rng(1, 1).random()
        assert trial_rng(1, 0).random() == trial_rng(1, 0).random()

    def test_jobs(self):
        c = cfg(code="bitflip3", noise=NoiseSpec(p_x=0.2), trials=40, seed=2)
        assert run_trials(c, jobs=2) == run_trials(c, jobs=1)


class TestWilson:

    @pytest.mark.parametrize("k,n", [(0, 10), (3, 10), (10, 10), (17, 1000), (500, 1000)])
    def test_against_statsmodels(self, k, n):
        lo, hi = proportion_confint(k, n, alpha=0.05, method="wilson")
        assert wilson_interval(k, n) == pytest.approx((lo, hi), abs=1e-12)

    def test_coverage(self):
        rng = np.random.default_rng(21)
        p, n, reps = 0.1, 200, 4000
        ks = rng.binomial(n, p, reps)
        covered = sum(lo <= p <= hi for lo, hi in (wilson_interval(int(k), n) for k in ks))
        assert 0.93 < covered / reps < 0.97

    def test_width_shrinks(self):
        base = cfg(code="bitflip3", noise=NoiseSpec(p_x=0.1))
        widths = []
        for trials in (100, 400, 1600):
            lo, hi = run_trials(replace(base, trials=trials)).wilson_95
            widths.append(hi - lo)
        assert widths[0] > widths[1] > widths[2]


class TestSweeps:

    def test_eta2_monotone(self):
        base = cfg(code="parity", parity_input="even", trials=2000)
        rows = sweep(base, "eta2", [0.0, 0.035 ** 2, 0.1 ** 2])
        f = [r.stats.mean_fidelity for r in rows]
        rate = [r.stats.logical_error_rate for r in rows]
        assert f[0] > f[1] > f[2]
        assert rate[0] == 0 and rate[0] < rate[1] < rate[2]
        assert [r.config.seed for r in rows] == [0, 1, 2]

    def test_eta2_mean_fidelity(self):
        # each trajectory ends in Phi+ or Phi-, so fidelity is 1 or 0 with mean (1 + e^-gamma) / 2
        eta2, alpha, theta, n = 0.01, 30.9, 0.1, 4000
        st = run_trials(cfg(code="parity", parity_input="even", trials=n,
                            probe=ProbeMode(alpha, eta2)))
        gamma = eta2 * alpha ** 2 * (1 - math.cos(theta))
        want = (1 + math.exp(-gamma)) / 2
        assert abs(st.mean_fidelity - want) < three_sigma(want, n)

    def test_alpha_sweep_follows_p_err(self):
        theta, n = 0.1, 100_000
        alphas = [x / math.sin(theta) for x in (1.0, 1.5, 2.0)]
        base = cfg(code="parity", theta=theta, trials=n,
                   probe=ProbeMode(10.0, backend=Backend.HOMODYNE))
        for row in sweep(base, "alpha", alphas):
            p = p_err(row.value, theta)
            assert abs(row.stats.logical_error_rate - p) < three_sigma(p, n)

    def test_unknown_axis(self):
        with pytest.raises(ConfigError):
            sweep(cfg(), "ancilla_eps", [0.1])
