"""Closed-form outage and throughput expressions for the two-slot incremental
protocol with a power-splitting harvesting relay under an interference cap.

Event probabilities, with gamma the SNR threshold:

  decode_outage        relay fails to decode the first slot
  direct_with_decode   direct link succeeds and the relay decoded
  combined_outage      relay decoded but the combined (MRC) SNR still fails
  relayed_success      direct failed, relay decoded, combination succeeded
  direct_success       direct link alone succeeds

The first three partition the complement of relayed_success, so throughput
is 0.5 * rs * relayed_success + rs * direct_success: a full-rate block when
the destination decodes slot one on its own, half rate when completion needs
both slots.

decode_outage, direct_with_decode and direct_success are exact.  The
combined-outage expression replaces the random relay-cap correction by its
conditional mean (weight t); it is accurate when the relay-to-primary link
is statistically much weaker than the cap allows, and clamping beyond a
small slack signals that regime was left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    CombinedOutageParams,
    DegenerateSplitError,
    SystemParams,
    combined_outage_params,
)
from .specfun import exp_e1_scaled, exp_ei_scaled

CLAMP_SLACK = 0.02

P3_VARIANTS = ("full", "no_rp", "high_snr")


class RegimeError(ValueError):
    """Closed form left [0, 1] by more than the allowed slack, meaning the
    scenario is outside the approximation's validity regime."""


class SplitOutOfRangeError(ValueError):
    """The optimal-split formula has no root in (0, 1) for this scenario."""


@dataclass(frozen=True)
class OutageBreakdown:
    """Event probabilities of one scenario plus the resulting throughput."""

    decode_outage: float
    direct_with_decode: float
    combined_outage: float
    relayed_success: float
    direct_success: float
    tau: float

    def __post_init__(self):
        eps = 1e-9
        for name in (
            "decode_outage",
            "direct_with_decode",
            "combined_outage",
            "relayed_success",
            "direct_success",
        ):
            v = getattr(self, name)
            if not -eps <= v <= 1.0 + eps:
                raise ValueError(f"{name}={v!r} is not a probability")

    def as_dict(self) -> dict[str, float]:
        return {
            "decode_outage": self.decode_outage,
            "direct_with_decode": self.direct_with_decode,
            "combined_outage": self.combined_outage,
            "relayed_success": self.relayed_success,
            "direct_success": self.direct_success,
            "tau": self.tau,
        }


def decode_outage(params: SystemParams) -> float:
    """Probability the relay cannot decode: 1 - 1/(1 + lam_sr psi / (lam_sp (1-rho)))."""
    if params.rho == 1.0:
        return 1.0
    lam = params.links
    ratio = lam.lambda_sr * params.psi / (lam.lambda_sp * (1.0 - params.rho))
    return ratio / (1.0 + ratio)


def direct_success(params: SystemParams) -> float:
    """Probability the direct link meets the threshold on its own,
    1/(1 + lam_sd psi / lam_sp); independent of rho and eta."""
    lam = params.links
    return 1.0 / (1.0 + lam.lambda_sd * params.psi / lam.lambda_sp)


def direct_with_decode(params: SystemParams) -> float:
    """Joint probability that both the direct link and the relay decode,
    1/(1 + (psi/lam_sp)(lam_sd + lam_sr/(1-rho)))."""
    if params.rho == 1.0:
        return 0.0
    lam = params.links
    return 1.0 / (
        1.0
        + (params.psi / lam.lambda_sp)
        * (lam.lambda_sd + lam.lambda_sr / (1.0 - params.rho))
    )


def harvested_link_cdf(x: float, hp: float, params: SystemParams) -> float:
    """CDF of the relayed received power min(hp, I/|g_rp|^2) * |h_rd|^2,
    conditioned on the harvested power hp."""
    if x < 0.0:
        raise ValueError("the relayed power is nonnegative")
    if not hp > 0.0:
        raise ValueError("conditioning power hp must be positive")
    if x == 0.0:
        return 0.0
    lam = params.links
    cap_ratio = lam.lambda_rd * x / (params.i_over_no * lam.lambda_rp)
    inner = 1.0 - math.exp(-lam.lambda_rp * params.i_over_no / hp) * (
        cap_ratio / (1.0 + cap_ratio)
    )
    return 1.0 - math.exp(-lam.lambda_rd * x / hp) * inner


def combined_outage_terms(
    params: SystemParams, coeff: CombinedOutageParams | None = None
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """The twelve summands of the combined-outage closed form.

    Returns (weighted, constant): the first six terms are multiplied by the
    cap weight t, the last six enter unweighted.  Each term is evaluated
    through the scaled exponential-integral kernels so nothing overflows as
    rho approaches 0 or 1.  Kept term-by-term so each summand can be checked
    against an independent high-precision evaluation.
    """
    p = coeff if coeff is not None else combined_outage_params(params)
    a, b, c, d, s = p.a, p.b, p.c, p.d, p.s
    sp = params.links.lambda_sp
    sr = params.links.lambda_sr

    x1 = a * sr / (c + sp)
    t1 = (
        (a / (c + sp)) ** 2
        * sp
        * sr
        / (a + b + d * sp)
        * (exp_e1_scaled(x1) - math.exp(-a * s) * exp_e1_scaled(x1 + a * s))
    )
    u = d * (sr + sp * s)
    t2 = (
        d
        * d
        * sp
        * sr
        / (a + b + d * sp)
        * (
            math.exp(-(a + b) * s) * exp_ei_scaled(u)
            - math.exp(-a * s) * exp_ei_scaled(u + b * s)
        )
    )
    x3 = (a + b) * sr / sp
    t3 = (
        -sr
        * (a + b) ** 2
        / (sp * (a + b + d * sp))
        * (exp_e1_scaled(x3) - math.exp(-(a + b) * s) * exp_e1_scaled(x3 + (a + b) * s))
    )
    t4 = -sr * math.exp(-(a + b) * s) / (sp * s + sr)
    t5 = sp * sr * math.exp(-a * s) / ((c + sp) * (c * s + sp * s + sr))
    t6 = c / (c + sp)

    x7 = b * sr / sp
    t7 = (
        b
        * b
        * sr
        / (sp * (b + d * sp))
        * (exp_e1_scaled(x7) - math.exp(-b * s) * exp_e1_scaled(x7 + b * s))
    )
    t8 = (
        -d
        * d
        * sp
        * sr
        / (b + d * sp)
        * (math.exp(-b * s) * exp_ei_scaled(u) - exp_ei_scaled(u + b * s))
    )
    t9 = sr * math.exp(-b * s) / (sp * s + sr)
    t10 = c * sp * s * s / ((sp * s + sr) * (c * s + sp * s + sr))
    t11 = -sp * sr / ((c + sp) * (c * s + sp * s + sr))
    t12 = -c / (c + sp)

    return (t1, t2, t3, t4, t5, t6), (t7, t8, t9, t10, t11, t12)


def _clamp_probability(raw: float, slack: float | None = CLAMP_SLACK) -> float:
    clamped = min(max(raw, 0.0), 1.0)
    if slack is not None and abs(raw - clamped) > slack:
        raise RegimeError(
            f"combined-outage value {raw:.6f} exits [0, 1] by more than "
            f"{slack}; the scenario is outside the approximation regime"
        )
    return clamped


def combined_outage(params: SystemParams) -> float:
    """Probability that the relay decoded yet the combined SNR fails.

    Mean-replacement closed form, clamped to [0, 1]; raises RegimeError if
    the clamp exceeds CLAMP_SLACK and DegenerateSplitError for rho in {0, 1}.
    """
    coeff = combined_outage_params(params)
    weighted, constant = combined_outage_terms(params, coeff)
    raw = coeff.t * math.fsum(weighted) + math.fsum(constant)
    return _clamp_probability(raw)


def combined_outage_uncapped(params: SystemParams) -> float:
    """Combined outage with the relay-to-primary cap statistically removed
    (its fading rate taken to infinity, so the cap weight t vanishes)."""
    if params.rho in (0.0, 1.0):
        raise DegenerateSplitError("uncapped combined outage needs rho in (0, 1)")
    lam = params.links
    beta = params.beta
    coeff = CombinedOutageParams(
        a=lam.lambda_rp / beta,
        b=params.psi * lam.lambda_rd / beta,
        c=params.psi * lam.lambda_sd,
        d=lam.lambda_rd / (beta * lam.lambda_sd),
        s=(1.0 - params.rho) / params.psi,
        t=0.0,
    )
    _, constant = combined_outage_terms(params, coeff)
    return _clamp_probability(math.fsum(constant))


def combined_outage_high_snr(params: SystemParams) -> float:
    """Two-term high-SNR reduction of the uncapped combined outage.

    Keeps only the leading e^x E1(x) term and the exponential decode factor;
    intended for I lam_sp well above gamma_th.  Clamped without a regime
    check, the caller judges applicability.
    """
    if params.rho in (0.0, 1.0):
        raise DegenerateSplitError("high-SNR combined outage needs rho in (0, 1)")
    lam = params.links
    beta = params.beta
    b = params.psi * lam.lambda_rd / beta
    d = lam.lambda_rd / (beta * lam.lambda_sd)
    s = (1.0 - params.rho) / params.psi
    sp, sr = lam.lambda_sp, lam.lambda_sr
    lead = b * b * sr / (sp * (b + d * sp)) * exp_e1_scaled(b * sr / sp)
    decay = sr * (math.exp(-b * s) - 1.0) / (sp * s + sr)
    return _clamp_probability(lead + decay, slack=None)


_P3_FUNCS = {
    "full": combined_outage,
    "no_rp": combined_outage_uncapped,
    "high_snr": combined_outage_high_snr,
}


def throughput(params: SystemParams, p3_variant: str = "full") -> OutageBreakdown:
    """Assemble the outage breakdown and throughput for one scenario.

    At rho = 0 (nothing harvested) and rho = 1 (nothing decodable) the
    relayed path never completes, so the limit branch returns rs * q2 with
    relayed_success pinned to zero.
    """
    if p3_variant not in _P3_FUNCS:
        raise ValueError(f"unknown p3 variant {p3_variant!r}")
    q2 = direct_success(params)
    p1 = decode_outage(params)
    p2 = direct_with_decode(params)
    if params.rho in (0.0, 1.0):
        p3 = 1.0 - p1 - p2 if params.rho == 0.0 else 0.0
        return OutageBreakdown(p1, p2, p3, 0.0, q2, params.rs * q2)
    p3 = _P3_FUNCS[p3_variant](params)
    q1 = max(0.0, 1.0 - p1 - p2 - p3)
    tau = 0.5 * params.rs * q1 + params.rs * q2
    return OutageBreakdown(p1, p2, p3, q1, q2, tau)


def throughput_simplified(params: SystemParams) -> float:
    """Three-fraction high-SNR throughput used to derive the optimal split.

    0.5 rs (1 - (F1 + F2 + F3)) + rs q2, where F1 is the harvested-path
    E1 bound, F2 the decode-outage times cap-decay bound and F3 the exact
    direct-success term.
    """
    if params.rho in (0.0, 1.0):
        raise DegenerateSplitError("the simplified throughput needs rho in (0, 1)")
    lam = params.links
    psi = params.psi
    f1 = 1.0 / (
        (1.0 + lam.lambda_sp / (lam.lambda_sd * psi))
        * (1.0 + params.eta * params.rho * lam.lambda_sp / (psi * lam.lambda_rd * lam.lambda_sr))
    )
    f2 = (
        params.eta
        * params.rho
        * lam.lambda_sr
        * psi
        / (lam.lambda_rd * lam.lambda_sp * (1.0 - params.rho))
    )
    f3 = 1.0 / (1.0 + psi * lam.lambda_sd / lam.lambda_sp)
    return 0.5 * params.rs * (1.0 - (f1 + f2 + f3)) + params.rs * direct_success(params)


def throughput_simplified_no_direct(params: SystemParams) -> float:
    """Simplified throughput in the no-direct-link limit (lambda_sd to
    infinity): the direct terms vanish and only the two-hop fractions stay."""
    if params.rho in (0.0, 1.0):
        return 0.0
    lam = params.links
    psi = params.psi
    f1 = 1.0 / (
        1.0 + params.eta * params.rho * lam.lambda_sp / (psi * lam.lambda_rd * lam.lambda_sr)
    )
    f2 = (
        params.eta
        * params.rho
        * lam.lambda_sr
        * psi
        / (lam.lambda_rd * lam.lambda_sp * (1.0 - params.rho))
    )
    return 0.5 * params.rs * (1.0 - (f1 + f2))


def throughput_no_direct(params: SystemParams) -> float:
    """Throughput of pure two-hop signalling, the lambda_sd -> infinity limit
    of the incremental scheme: the direct term drops out and the combined
    outage keeps only its surviving summands."""
    if params.rho in (0.0, 1.0):
        return 0.0
    lam = params.links
    beta = params.beta
    psi = params.psi
    a = lam.lambda_rp / beta
    b = psi * lam.lambda_rd / beta
    s = (1.0 - params.rho) / psi
    sp, sr = lam.lambda_sp, lam.lambda_sr
    t = 1.0 - 1.0 / (1.0 + psi * lam.lambda_rd / lam.lambda_rp)

    x3 = (a + b) * sr / sp
    t3 = (
        -sr
        * (a + b)
        / sp
        * (exp_e1_scaled(x3) - math.exp(-(a + b) * s) * exp_e1_scaled(x3 + (a + b) * s))
    )
    t4 = -sr * math.exp(-(a + b) * s) / (sp * s + sr)
    x7 = b * sr / sp
    t7 = b * sr / sp * (exp_e1_scaled(x7) - math.exp(-b * s) * exp_e1_scaled(x7 + b * s))
    t9 = sr * math.exp(-b * s) / (sp * s + sr)
    t10 = sp * s / (sp * s + sr)
    p3 = t * (t3 + t4 + 1.0) + t7 + t9 + t10 - 1.0
    q1 = max(0.0, 1.0 - decode_outage(params) - _clamp_probability(p3, slack=None))
    return 0.5 * params.rs * q1


def optimal_split(params: SystemParams) -> float:
    """Closed-form power split maximizing the simplified throughput.

    rho* = (1 - C psi lam_sr / lam_sp) / (1 + C eta / lam_rd) with
    C = sqrt(1 + lam_sp / (lam_sd psi)).  Raises SplitOutOfRangeError when
    the root leaves (0, 1), which happens once the source-relay link is no
    longer much stronger than the direct link.
    """
    lam = params.links
    c = math.sqrt(1.0 + lam.lambda_sp / (lam.lambda_sd * params.psi))
    numerator = 1.0 - c * params.psi * lam.lambda_sr / lam.lambda_sp
    if numerator <= 0.0:
        raise SplitOutOfRangeError(
            "no interior optimal split: the source-relay link is too weak "
            "relative to the interference headroom"
        )
    root = numerator / (1.0 + c * params.eta / lam.lambda_rd)
    if not 0.0 < root < 1.0:
        raise SplitOutOfRangeError(f"optimal split {root:.4f} lies outside (0, 1)")
    return root


def optimal_split_no_direct(params: SystemParams) -> float:
    """Optimal power split when the direct link is ignored entirely,
    (1 - psi lam_sr / lam_sp) / (1 + eta / lam_rd); always exceeds the
    incremental optimum for the same scenario."""
    lam = params.links
    numerator = 1.0 - params.psi * lam.lambda_sr / lam.lambda_sp
    if numerator <= 0.0:
        raise SplitOutOfRangeError(
            "no interior optimal split without a direct link: relay decode "
            "outage dominates"
        )
    root = numerator / (1.0 + params.eta / lam.lambda_rd)
    if not 0.0 < root < 1.0:
        raise SplitOutOfRangeError(f"optimal split {root:.4f} lies outside (0, 1)")
    return root
