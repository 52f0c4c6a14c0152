"""Scenario model: geometry mapping, derived constants, closed-form
coefficients and the JSON schema."""

import json
import math
from dataclasses import replace

import numpy as np
import pytest

from ehrelay.model import (
    DegenerateSplitError,
    LinkStats,
    NetworkGeometry,
    Scenario,
    ScenarioError,
    SystemParams,
    apply_overrides,
    combined_outage_params,
    conditional_direct_mean,
    link_stats_from_geometry,
    load_scenario,
    scenario_from_dict,
)
from ehrelay.presets import default_scenario

import oracles


def default_params(**changes) -> SystemParams:
    p = default_scenario(1.2).params
    return replace(p, **changes) if changes else p


class TestGeometryMapping:
    def test_default_rates(self):
        geo = NetworkGeometry(d_sr=1.2, d_rd=1.8, d_sd=3.0, d_sp=3.0, d_rp=3.0)
        lam = link_stats_from_geometry(geo)
        assert lam.lambda_sr == pytest.approx(2.0736, rel=1e-12)
        assert lam.lambda_rd == pytest.approx(10.4976, rel=1e-12)
        assert lam.lambda_sd == 81.0
        assert lam.lambda_sp == 81.0
        assert lam.lambda_rp == 81.0

    def test_unit_distance(self):
        geo = NetworkGeometry(1.0, 1.0, 1.0, 1.0, 1.0, epsilon=3.7)
        lam = link_stats_from_geometry(geo)
        assert lam == LinkStats(1.0, 1.0, 1.0, 1.0, 1.0)

    def test_distance_scaling(self):
        # scaling all distances by k scales every rate by k^epsilon
        geo = NetworkGeometry(1.2, 1.8, 3.0, 3.0, 3.0, epsilon=4.0)
        k = 1.7
        scaled = NetworkGeometry(1.2 * k, 1.8 * k, 3.0 * k, 3.0 * k, 3.0 * k, epsilon=4.0)
        a, b = link_stats_from_geometry(geo), link_stats_from_geometry(scaled)
        for name in ("lambda_sr", "lambda_rd", "lambda_sd", "lambda_sp", "lambda_rp"):
            assert getattr(b, name) == pytest.approx(getattr(a, name) * k**4, rel=1e-12)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(d_sr=0.0, d_rd=1.8, d_sd=3.0, d_sp=3.0, d_rp=3.0),
            dict(d_sr=1.2, d_rd=-1.0, d_sd=3.0, d_sp=3.0, d_rp=3.0),
            dict(d_sr=1.2, d_rd=1.8, d_sd=3.0, d_sp=3.0, d_rp=3.0, epsilon=1.5),
        ],
    )
    def test_invalid_geometry(self, kwargs):
        with pytest.raises(ScenarioError):
            NetworkGeometry(**kwargs)


class TestSystemParams:
    def test_derived_constants(self):
        p = default_params()
        assert p.gamma_th == 7.0
        assert p.psi == pytest.approx(7.0 / 10**0.6, rel=1e-14)
        assert p.beta == pytest.approx(0.35, rel=1e-14)

    def test_psi_monotone_in_inr_and_rate(self):
        p = default_params()
        assert replace(p, i_over_no=2 * p.i_over_no).psi < p.psi
        assert replace(p, rs=p.rs + 0.5).psi > p.psi

    @pytest.mark.parametrize(
        "changes",
        [dict(eta=0.0), dict(eta=1.5), dict(rho=-0.1), dict(rho=1.1),
         dict(i_over_no=0.0), dict(rs=0.0)],
    )
    def test_invalid_params(self, changes):
        with pytest.raises(ScenarioError):
            default_params(**changes)


class TestConditionalDirectMean:
    def test_frozen_default(self):
        assert conditional_direct_mean(default_params()) == pytest.approx(
            2.35545039707686, rel=1e-12
        )

    def test_bounded_by_threshold(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            lam = LinkStats(*np.exp(rng.uniform(-2, 5, size=5)))
            p = SystemParams(
                links=lam,
                eta=float(rng.uniform(0.1, 1.0)),
                rho=0.5,
                i_over_no=float(np.exp(rng.uniform(-1, 4))),
                rs=float(rng.uniform(0.2, 8.0)),
            )
            mean = conditional_direct_mean(p)
            assert 0.0 <= mean <= p.gamma_th
            assert 0.0 <= combined_outage_params(p).t < 1.0

    def test_vanishes_with_threshold(self):
        p = default_params(rs=1e-9)
        assert conditional_direct_mean(p) < 1e-8

    def test_small_k_series_branch(self):
        # continuity across the series/log switch at k = 1e-4
        base = default_params()
        lam = base.links
        p_lo = replace(base, links=replace(lam, lambda_sd=lam.lambda_sp * 0.99e-4 * base.i_over_no / base.gamma_th))
        p_hi = replace(base, links=replace(lam, lambda_sd=lam.lambda_sp * 1.01e-4 * base.i_over_no / base.gamma_th))
        lo, hi = conditional_direct_mean(p_lo), conditional_direct_mean(p_hi)
        assert abs(lo - hi) / hi < 1e-4

    def test_against_conditional_sampling(self):
        p = default_params()
        mean, se, _ = oracles.conditional_direct_mean_mc(p, 2_000_000, seed=11)
        assert abs(mean - conditional_direct_mean(p)) <= 3.0 * se


class TestCombinedOutageParams:
    def test_frozen_default_coefficients(self):
        c = combined_outage_params(default_params())
        assert c.a == pytest.approx(231.428571428571, rel=1e-12)
        assert c.b == pytest.approx(52.7375580068299, rel=1e-12)
        assert c.c == pytest.approx(142.423960666593, rel=1e-12)
        assert c.d == pytest.approx(0.370285714285714, rel=1e-12)
        assert c.s == pytest.approx(0.284362264681069, rel=1e-12)
        assert c.t == pytest.approx(0.131340372672834, rel=1e-12)

    def test_t_vanishes_without_relay_cap(self):
        p = default_params()
        weak_cap = replace(p, links=replace(p.links, lambda_rp=1e9))
        assert combined_outage_params(weak_cap).t < 1e-7

    @pytest.mark.parametrize("rho", [0.0, 1.0])
    def test_degenerate_split_rejected(self, rho):
        with pytest.raises(DegenerateSplitError):
            combined_outage_params(default_params(rho=rho))


class TestScenarioSchema:
    def _base(self):
        return {
            "geometry": {"d_sr": 1.2, "d_rd": 1.8, "d_sd": 3.0, "d_sp": 3.0, "d_rp": 3.0},
            "epsilon": 4.0,
            "eta": 0.7,
            "rho": 0.5,
            "i_over_no_db": 6.0,
            "rs": 3.0,
        }

    def test_geometry_scenario(self):
        sc = scenario_from_dict(self._base())
        assert sc.geometry is not None
        assert sc.params.links.lambda_sd == 81.0
        assert sc.params.i_over_no == pytest.approx(10**0.6, rel=1e-15)

    def test_lambdas_scenario(self):
        raw = {
            "lambdas": {"sr": 2.0736, "rd": 10.4976, "sd": 81, "sp": 81, "rp": 81},
            "eta": 0.7,
            "rho": 0.5,
            "i_over_no_linear": 6.0,
            "rs": 3.0,
        }
        sc = scenario_from_dict(raw)
        assert sc.geometry is None
        assert sc.params.i_over_no == 6.0

    def test_geometry_and_lambdas_exclusive(self):
        raw = self._base()
        raw["lambdas"] = {"sr": 1, "rd": 1, "sd": 1, "sp": 1, "rp": 1}
        with pytest.raises(ScenarioError):
            scenario_from_dict(raw)
        raw2 = self._base()
        del raw2["geometry"]
        with pytest.raises(ScenarioError):
            scenario_from_dict(raw2)

    def test_inr_readings_exclusive(self):
        raw = self._base()
        raw["i_over_no_linear"] = 6.0
        with pytest.raises(ScenarioError):
            scenario_from_dict(raw)
        raw2 = self._base()
        del raw2["i_over_no_db"]
        with pytest.raises(ScenarioError):
            scenario_from_dict(raw2)

    def test_missing_fields(self):
        raw = self._base()
        del raw["eta"]
        with pytest.raises(ScenarioError):
            scenario_from_dict(raw)
        raw2 = self._base()
        del raw2["geometry"]["d_rp"]
        with pytest.raises(ScenarioError):
            scenario_from_dict(raw2)

    def test_db_and_linear_equivalence_is_bitwise(self):
        a = scenario_from_dict(self._base())
        raw = self._base()
        del raw["i_over_no_db"]
        raw["i_over_no_linear"] = 10**0.6
        b = scenario_from_dict(raw)
        assert a.params == b.params

    def test_overrides(self):
        raw = self._base()
        out = apply_overrides(raw, ["rho=0.9", "i_over_no_linear=6", "d_sr=1.5"])
        sc = scenario_from_dict(out)
        assert sc.params.rho == 0.9
        assert sc.params.i_over_no == 6.0
        assert sc.geometry.d_sr == 1.5
        assert "i_over_no_db" not in out

    def test_override_errors(self):
        raw = self._base()
        with pytest.raises(ValueError):
            apply_overrides(raw, ["rho0.9"])
        with pytest.raises(ScenarioError):
            apply_overrides(raw, ["bogus=1"])
        with pytest.raises(ScenarioError):
            apply_overrides(raw, ["rho=abc"])
        with pytest.raises(ScenarioError):
            apply_overrides(raw, ["lambda_sr=2.0"])  # geometry scenario

    def test_load_scenario_roundtrip(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(self._base()))
        sc = load_scenario(path, overrides=["rho=0.25"])
        assert sc.params.rho == 0.25

    def test_hash_tracks_resolved_params(self):
        a = scenario_from_dict(self._base())
        b = scenario_from_dict(self._base())
        assert a.hash == b.hash
        c = a.with_params(rho=0.51)
        assert c.hash != a.hash
        # the hash covers resolved rates, so db and equivalent linear match
        raw = self._base()
        del raw["i_over_no_db"]
        raw["i_over_no_linear"] = 10**0.6
        assert scenario_from_dict(raw).hash == a.hash
