"""Protocol simulator: trial arithmetic, reproducibility and agreement with
the exact closed forms."""

import math
from dataclasses import replace

import numpy as np
import pytest

from ehrelay.analytic import decode_outage, direct_success, direct_with_decode
from ehrelay.montecarlo import (
    CHUNK_SIZE,
    EVENTS,
    McEstimate,
    estimate,
    estimate_variant,
    run_trial,
    trial_from_gains,
)
from ehrelay.presets import default_scenario


def params(**changes):
    p = default_scenario(1.2).params
    return replace(p, **changes) if changes else p


class TestTrialArithmetic:
    def test_forced_direct_failure(self):
        # unit source-primary and direct gains with a linear ratio of 4:
        # the first-slot SNR is 4, below the 3-bit threshold of 7
        p = params(i_over_no=4.0)
        t = trial_from_gains(p, gain_sp=1.0, gain_rp=1.0, gain_sr=1.0,
                             gain_rd=1.0, gain_sd=1.0)
        assert t.p_source == 4.0
        assert t.snr_direct == 4.0 < p.gamma_th
        assert t.achieved_rate in (0.0, 0.5 * p.rs)

    def test_power_identities(self):
        p = params()
        rng = np.random.default_rng(5)
        for _ in range(200):
            g = rng.exponential(1.0, size=5)
            t = trial_from_gains(p, *g)
            assert t.p_source == p.i_over_no / t.gain_sp
            assert t.p_harvested == pytest.approx(p.beta * t.p_source * t.gain_sr, rel=1e-14)
            assert t.p_relay == min(t.p_harvested, p.i_over_no / t.gain_rp)
            assert t.snr_combined == pytest.approx(t.snr_direct + t.snr_relayed, rel=1e-14)

    def test_rate_scoring(self):
        p = params()
        gamma = p.gamma_th
        # direct success scores the full rate
        t = trial_from_gains(p, gain_sp=0.01, gain_rp=1.0, gain_sr=1.0,
                             gain_rd=1.0, gain_sd=1.0)
        assert t.snr_direct > gamma and t.achieved_rate == p.rs
        # direct failure, decode and combination success score half rate
        t = trial_from_gains(p, gain_sp=1.0, gain_rp=1e-9, gain_sr=100.0,
                             gain_rd=100.0, gain_sd=1e-6)
        assert t.snr_direct < gamma <= t.snr_relay
        assert t.snr_combined >= gamma
        assert t.achieved_rate == 0.5 * p.rs
        # everything fails
        t = trial_from_gains(p, gain_sp=100.0, gain_rp=1.0, gain_sr=1e-6,
                             gain_rd=1e-6, gain_sd=1e-6)
        assert t.achieved_rate == 0.0

    def test_interference_cap_structure(self):
        p = params()
        # weak relay-primary gain leaves the harvested power untouched
        free = trial_from_gains(p, 1.0, 1e-9, 10.0, 1.0, 1.0)
        assert free.p_relay == free.p_harvested
        # strong relay-primary gain caps the relay at I / gain_rp
        capped = trial_from_gains(p, 1.0, 1e9, 10.0, 1.0, 1.0)
        assert capped.p_relay == p.i_over_no / 1e9

    def test_zero_split_kills_relaying(self):
        p = params(rho=0.0)
        t = trial_from_gains(p, 1.0, 1.0, 10.0, 10.0, 1.0)
        assert t.p_harvested == 0.0
        assert t.p_relay == 0.0
        assert t.snr_relayed == 0.0

    def test_variant_scoring(self):
        p = params()
        gains = dict(gain_sp=1.0, gain_rp=1e-9, gain_sr=100.0, gain_rd=100.0,
                     gain_sd=1e-6)
        assert trial_from_gains(p, **gains, variant="direct_only").achieved_rate == 0.0
        assert trial_from_gains(p, **gains, variant="no_direct_two_hop").achieved_rate == 0.5 * p.rs
        uncapped = trial_from_gains(p, **gains, variant="no_rp_constraint")
        assert uncapped.p_relay == uncapped.p_harvested
        with pytest.raises(ValueError):
            trial_from_gains(p, **gains, variant="bogus")

    def test_run_trial_draws_exponentials(self):
        p = params()
        rng = np.random.default_rng(99)
        n = 20_000
        samples = {"gain_sp": [], "gain_rp": [], "gain_sr": [], "gain_rd": [], "gain_sd": []}
        for _ in range(n):
            t = run_trial(p, rng)
            for name in samples:
                samples[name].append(getattr(t, name))
        lam = p.links
        for name, rate in (("gain_sp", lam.lambda_sp), ("gain_rp", lam.lambda_rp),
                           ("gain_sr", lam.lambda_sr), ("gain_rd", lam.lambda_rd),
                           ("gain_sd", lam.lambda_sd)):
            mean = float(np.mean(samples[name]))
            se = (1.0 / rate) / math.sqrt(n)
            assert abs(mean - 1.0 / rate) <= 4.0 * se, name


class TestEstimate:
    def test_partition_is_exact(self):
        est = estimate(params(), 10**5, seed=1)
        partition = (
            est.counts["decode_outage"]
            + est.counts["direct_with_decode"]
            + est.counts["combined_outage"]
            + est.counts["relayed_success"]
        )
        assert partition == est.trials
        assert set(est.counts) == set(EVENTS)

    def test_deterministic_across_runs_and_workers(self):
        p = params()
        n = 2 * CHUNK_SIZE + 12_345  # straddles chunk boundaries
        a = estimate(p, n, seed=7)
        b = estimate(p, n, seed=7)
        c = estimate(p, n, seed=7, workers=4)
        assert a == b == c
        assert a != estimate(p, n, seed=8)

    def test_common_random_numbers_across_variants(self):
        # same seed means the same gain draws, so the capped and uncapped
        # runs differ only through the relay power
        p = params()
        inc = estimate(p, 10**5, seed=3)
        unc = estimate(p, 10**5, seed=3, variant="no_rp_constraint")
        assert inc.counts["direct_success"] == unc.counts["direct_success"]
        assert inc.counts["relay_decode"] == unc.counts["relay_decode"]
        assert unc.mean >= inc.mean  # more relay power never hurts

    def test_degenerate_direct_link(self):
        p = params(links=replace(params().links, lambda_sd=1e-9))
        est = estimate(p, 10**5, seed=2)
        assert abs(est.mean - p.rs) <= 3.0 * max(est.std_error, 1e-9)

    def test_zero_split_matches_direct_term(self):
        p = params(rho=0.0)
        est = estimate(p, 10**6, seed=4)
        expected = p.rs * direct_success(p)
        assert abs(est.mean - expected) <= 4.0 * est.std_error

    def test_exact_forms_within_four_sigma(self):
        p = params()
        n = 10**6
        est = estimate(p, n, seed=5)
        for name, closed in (
            ("decode_outage", decode_outage(p)),
            ("direct_with_decode", direct_with_decode(p)),
            ("direct_success", direct_success(p)),
        ):
            se = math.sqrt(closed * (1.0 - closed) / n)
            assert abs(est.freq(name) - closed) <= 4.0 * se, name

    def test_direct_only_variant(self):
        p = params()
        est = estimate_variant(p, 10**6, 6, "direct_only")
        expected = p.rs * direct_success(p)
        assert abs(est.mean - expected) <= 4.0 * est.std_error
        # two-valued rate: the sample variance has a closed form
        q = est.freq("direct_success")
        n = est.trials
        var = p.rs**2 * q * (1.0 - q) * n / (n - 1)
        assert est.std_error == pytest.approx(math.sqrt(var / n), rel=1e-12)

    def test_variant_ordering_at_optimum(self):
        from ehrelay.analytic import optimal_split

        p = params(rho=optimal_split(params()))
        n = 10**6
        inc = estimate(p, n, seed=11)
        direct = estimate(p, n, seed=11, variant="direct_only")
        two_hop = estimate(p, n, seed=11, variant="no_direct_two_hop")
        assert inc.mean > direct.mean > two_hop.mean

    def test_validation(self):
        with pytest.raises(ValueError):
            estimate(params(), 0)
        with pytest.raises(ValueError):
            estimate(params(), 10, variant="bogus")

    def test_std_error_of_constant_outcome(self):
        p = params(links=replace(params().links, lambda_sd=1e-12))
        est = estimate(p, 10**4, seed=1, variant="direct_only")
        assert est.mean == p.rs
        assert est.std_error == 0.0

    def test_mean_is_exact_integer_accounting(self):
        est = estimate(params(), 12_345, seed=9)
        n_full = est.counts["direct_success"]
        n_half = est.counts["relayed_success"]
        assert est.mean == est.rs * (n_full + 0.5 * n_half) / est.trials
