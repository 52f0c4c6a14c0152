"""Scenario model: node geometry, Rayleigh-fading statistics and the derived
protocol constants shared by the closed forms and the simulator.

Noise is normalized to 1 throughout, so the interference-temperature limit
enters every expression only through the interference-to-noise ratio.
Squared channel magnitudes are exponential with rate lambda_xy, and the mean
link gain follows the d^-epsilon path-loss law, hence lambda_xy = d_xy^epsilon.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path


class ScenarioError(ValueError):
    """A scenario violates the model invariants or the config schema."""


class DegenerateSplitError(ScenarioError):
    """Power split of exactly 0 or 1, where the harvested-path closed form
    degenerates; callers must use the explicit limit branches instead."""


@dataclass(frozen=True)
class NetworkGeometry:
    """Normalized node distances and the path-loss exponent.

    The stock scenarios keep source, relay and destination collinear
    (d_sr + d_rd = d_sd) so that moving the relay toward the source
    stretches the relay-destination hop.
    """

    d_sr: float
    d_rd: float
    d_sd: float
    d_sp: float
    d_rp: float
    epsilon: float = 4.0

    def __post_init__(self):
        for name in ("d_sr", "d_rd", "d_sd", "d_sp", "d_rp"):
            if not getattr(self, name) > 0.0:
                raise ScenarioError(f"distance {name} must be positive")
        if self.epsilon < 2.0:
            raise ScenarioError("path-loss exponent must be at least 2")


@dataclass(frozen=True)
class LinkStats:
    """Exponential rate parameters of the five squared channel gains.

    The mean squared gain of link xy is 1/lambda_xy.
    """

    lambda_sr: float
    lambda_rd: float
    lambda_sd: float
    lambda_sp: float
    lambda_rp: float

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0.0:
                raise ScenarioError(f"{name} must be positive")


def link_stats_from_geometry(geo: NetworkGeometry) -> LinkStats:
    """Map distances to fading rates via lambda_xy = d_xy^epsilon."""
    e = geo.epsilon
    return LinkStats(
        lambda_sr=geo.d_sr**e,
        lambda_rd=geo.d_rd**e,
        lambda_sd=geo.d_sd**e,
        lambda_sp=geo.d_sp**e,
        lambda_rp=geo.d_rp**e,
    )


@dataclass(frozen=True)
class SystemParams:
    """Full scenario: fading rates, harvester efficiency eta, power-splitting
    fraction rho, linear interference-to-noise ratio and the fixed rate rs in
    bits per channel use."""

    links: LinkStats
    eta: float
    rho: float
    i_over_no: float
    rs: float

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ScenarioError("eta must lie in (0, 1]")
        if not 0.0 <= self.rho <= 1.0:
            raise ScenarioError("rho must lie in [0, 1]")
        if not self.i_over_no > 0.0:
            raise ScenarioError("i_over_no must be positive")
        if not self.rs > 0.0:
            raise ScenarioError("rs must be positive")

    @property
    def gamma_th(self) -> float:
        """Outage SNR threshold for fixed-rate signalling, 2^rs - 1."""
        return 2.0**self.rs - 1.0

    @property
    def psi(self) -> float:
        """Threshold normalized by the interference-to-noise ratio."""
        return self.gamma_th / self.i_over_no

    @property
    def beta(self) -> float:
        """Fraction of received power converted to relay transmit power."""
        return self.eta * self.rho


def conditional_direct_mean(params: SystemParams) -> float:
    """Mean of the direct-link received power given it fell below gamma_th.

    With Z = I*u/g for independent exponential u, g the truncated-ratio
    distribution gives  E[Z | Z <= w] = (A/B) * ((1+K) ln(1+K)/K - 1)  with
    A = I*lambda_sp, B = lambda_sd, K = B*w/A and w = gamma_th.  Always lies
    in [0, gamma_th].
    """
    scale = params.i_over_no * params.links.lambda_sp / params.links.lambda_sd
    k = params.gamma_th / scale
    if k < 1e-4:
        bracket = k / 2.0 - k * k / 6.0 + k**3 / 12.0
    else:
        bracket = (1.0 + k) * math.log1p(k) / k - 1.0
    return scale * bracket


@dataclass(frozen=True)
class CombinedOutageParams:
    """Coefficients of the harvested-path outage closed form.

    a = lambda_rp / beta, b = psi lambda_rd / beta, c = psi lambda_sd,
    d = lambda_rd / (beta lambda_sd), s = (1 - rho) / psi, and t is the
    mean-replacement weight of the relay power cap, in [0, 1).
    """

    a: float
    b: float
    c: float
    d: float
    s: float
    t: float

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "s"):
            if not getattr(self, name) > 0.0:
                raise ScenarioError(f"coefficient {name} must be positive")
        if not 0.0 <= self.t < 1.0:
            raise ScenarioError("t must lie in [0, 1)")


def combined_outage_params(params: SystemParams) -> CombinedOutageParams:
    """Assemble the closed-form coefficients for a strictly interior rho."""
    if params.rho in (0.0, 1.0):
        raise DegenerateSplitError(
            "combined-outage coefficients need rho strictly inside (0, 1)"
        )
    lam = params.links
    beta = params.beta
    headroom = params.gamma_th - conditional_direct_mean(params)
    t = 1.0 - 1.0 / (1.0 + lam.lambda_rd * headroom / (params.i_over_no * lam.lambda_rp))
    # strictly below 1 mathematically; float rounding can land on 1.0 exactly
    t = min(t, 1.0 - 2.0**-53)
    return CombinedOutageParams(
        a=lam.lambda_rp / beta,
        b=params.psi * lam.lambda_rd / beta,
        c=params.psi * lam.lambda_sd,
        d=lam.lambda_rd / (beta * lam.lambda_sd),
        s=(1.0 - params.rho) / params.psi,
        t=t,
    )


# ---------------------------------------------------------------------------
# Scenario files
# ---------------------------------------------------------------------------

_GEOMETRY_KEYS = ("d_sr", "d_rd", "d_sd", "d_sp", "d_rp")
_LAMBDA_KEYS = ("sr", "rd", "sd", "sp", "rp")
_SCALAR_KEYS = ("eta", "rho", "rs")


@dataclass(frozen=True)
class Scenario:
    """A loaded scenario: resolved parameters plus optional geometry."""

    params: SystemParams
    geometry: NetworkGeometry | None = None
    description: str = ""

    def with_params(self, **changes) -> "Scenario":
        return replace(self, params=replace(self.params, **changes))

    @property
    def hash(self) -> str:
        lam = self.params.links
        resolved = {
            "lambda_sr": lam.lambda_sr,
            "lambda_rd": lam.lambda_rd,
            "lambda_sd": lam.lambda_sd,
            "lambda_sp": lam.lambda_sp,
            "lambda_rp": lam.lambda_rp,
            "eta": self.params.eta,
            "rho": self.params.rho,
            "i_over_no": self.params.i_over_no,
            "rs": self.params.rs,
        }
        blob = json.dumps(resolved, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def scenario_from_dict(raw: dict) -> Scenario:
    """Build a scenario from the JSON schema.

    Exactly one of "geometry" (with sibling "epsilon") or "lambdas" must be
    present, and exactly one of "i_over_no_db" / "i_over_no_linear".
    """
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object")
    has_geo = "geometry" in raw
    has_lam = "lambdas" in raw
    if has_geo == has_lam:
        raise ScenarioError('exactly one of "geometry" or "lambdas" is required')

    geometry = None
    if has_geo:
        geo_raw = raw["geometry"]
        missing = [k for k in _GEOMETRY_KEYS if k not in geo_raw]
        if missing:
            raise ScenarioError(f"geometry is missing {missing}")
        geometry = NetworkGeometry(
            **{k: float(geo_raw[k]) for k in _GEOMETRY_KEYS},
            epsilon=float(raw.get("epsilon", 4.0)),
        )
        links = link_stats_from_geometry(geometry)
    else:
        lam_raw = raw["lambdas"]
        missing = [k for k in _LAMBDA_KEYS if k not in lam_raw]
        if missing:
            raise ScenarioError(f"lambdas is missing {missing}")
        links = LinkStats(**{f"lambda_{k}": float(lam_raw[k]) for k in _LAMBDA_KEYS})

    has_db = "i_over_no_db" in raw
    has_lin = "i_over_no_linear" in raw
    if has_db == has_lin:
        raise ScenarioError(
            'exactly one of "i_over_no_db" or "i_over_no_linear" is required'
        )
    i_over_no = (
        10.0 ** (float(raw["i_over_no_db"]) / 10.0)
        if has_db
        else float(raw["i_over_no_linear"])
    )

    missing = [k for k in _SCALAR_KEYS if k not in raw]
    if missing:
        raise ScenarioError(f"scenario is missing {missing}")
    params = SystemParams(
        links=links,
        eta=float(raw["eta"]),
        rho=float(raw["rho"]),
        i_over_no=i_over_no,
        rs=float(raw["rs"]),
    )
    return Scenario(params=params, geometry=geometry, description=raw.get("description", ""))


def load_scenario(path: str | Path, overrides: list[str] | None = None) -> Scenario:
    """Load a scenario file, then apply "key=value" overrides."""
    text = Path(path).read_text(encoding="utf-8")
    raw = json.loads(text)
    if overrides:
        raw = apply_overrides(raw, overrides)
    return scenario_from_dict(raw)


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply flat "key=value" overrides onto a scenario dict.

    Scalar keys replace top-level fields (an i_over_no override removes the
    competing reading), d_* / epsilon keys require a geometry scenario and
    lambda_* keys a lambdas scenario.
    """
    out = json.loads(json.dumps(raw))
    for item in overrides:
        if "=" not in item:
            raise ValueError(f"override {item!r} is not of the form key=value")
        key, _, text = item.partition("=")
        key = key.strip()
        try:
            value = float(text)
        except ValueError as exc:
            raise ScenarioError(f"override {item!r} has a non-numeric value") from exc
        if key in _SCALAR_KEYS:
            out[key] = value
        elif key in ("i_over_no_db", "i_over_no_linear"):
            out.pop("i_over_no_db", None)
            out.pop("i_over_no_linear", None)
            out[key] = value
        elif key in _GEOMETRY_KEYS:
            if "geometry" not in out:
                raise ScenarioError(f"override {key} needs a geometry scenario")
            out["geometry"][key] = value
        elif key == "epsilon":
            if "geometry" not in out:
                raise ScenarioError("override epsilon needs a geometry scenario")
            out[key] = value
        elif key.startswith("lambda_") and key[len("lambda_"):] in _LAMBDA_KEYS:
            if "lambdas" not in out:
                raise ScenarioError(f"override {key} needs a lambdas scenario")
            out["lambdas"][key[len("lambda_"):]] = value
        else:
            raise ScenarioError(f"unknown override key {key!r}")
    return out
