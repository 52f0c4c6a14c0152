"""Event-level simulator of the two-slot incremental protocol.

Each trial draws the five squared channel gains, applies the interference
power control at source and relay, scores the achieved rate and tallies the
outage events.  This is the ground truth every closed form is validated
against, so it shares no code with the analytic side.

Reproducibility: trials are processed in fixed-size chunks and chunk i draws
its variates from a counter-based generator keyed by (seed, i), so the
result is bit-identical for a given (seed, trials, scenario) no matter how
many workers execute the chunks.  All reductions are integer event counts,
making them exact and order-insensitive.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .model import SystemParams

CHUNK_SIZE = 1 << 20

VARIANTS = ("incremental", "direct_only", "no_direct_two_hop", "no_rp_constraint")

EVENTS = (
    "direct_success",
    "relay_decode",
    "mrc_success",
    "decode_outage",
    "direct_with_decode",
    "combined_outage",
    "relayed_success",
)


@dataclass(frozen=True)
class TrialOutcome:
    """One protocol realization: gains, powers, SNRs and the scored rate."""

    gain_sp: float
    gain_rp: float
    gain_sr: float
    gain_rd: float
    gain_sd: float
    p_source: float
    p_harvested: float
    p_relay: float
    snr_relay: float
    snr_direct: float
    snr_relayed: float
    snr_combined: float
    achieved_rate: float


@dataclass(frozen=True)
class McEstimate:
    """Reduced simulation output: throughput estimate plus event counts."""

    mean: float
    std_error: float
    trials: int
    rs: float
    counts: Mapping[str, int]

    def freq(self, event: str) -> float:
        return self.counts[event] / self.trials

    @property
    def freqs(self) -> dict[str, float]:
        return {name: count / self.trials for name, count in self.counts.items()}

    def binomial_stderr(self, event: str) -> float:
        p = self.freq(event)
        return math.sqrt(p * (1.0 - p) / self.trials)


def trial_from_gains(
    params: SystemParams,
    gain_sp: float,
    gain_rp: float,
    gain_sr: float,
    gain_rd: float,
    gain_sd: float,
    variant: str = "incremental",
) -> TrialOutcome:
    """Score one trial from given squared channel gains (noise power 1)."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    i = params.i_over_no
    gamma = params.gamma_th
    p_source = i / gain_sp
    snr_direct = p_source * gain_sd
    snr_relay = (1.0 - params.rho) * p_source * gain_sr
    p_harvested = params.beta * p_source * gain_sr
    if variant == "no_rp_constraint":
        p_relay = p_harvested
    else:
        p_relay = min(p_harvested, i / gain_rp)
    snr_relayed = p_relay * gain_rd
    snr_combined = snr_direct + snr_relayed

    direct_ok = snr_direct >= gamma
    decode_ok = snr_relay >= gamma
    if variant == "direct_only":
        rate = params.rs if direct_ok else 0.0
    elif variant == "no_direct_two_hop":
        rate = 0.5 * params.rs if decode_ok and snr_relayed >= gamma else 0.0
    else:
        if direct_ok:
            rate = params.rs
        elif decode_ok and snr_combined >= gamma:
            rate = 0.5 * params.rs
        else:
            rate = 0.0
    return TrialOutcome(
        gain_sp=gain_sp,
        gain_rp=gain_rp,
        gain_sr=gain_sr,
        gain_rd=gain_rd,
        gain_sd=gain_sd,
        p_source=p_source,
        p_harvested=p_harvested,
        p_relay=p_relay,
        snr_relay=snr_relay,
        snr_direct=snr_direct,
        snr_relayed=snr_relayed,
        snr_combined=snr_combined,
        achieved_rate=rate,
    )


def run_trial(
    params: SystemParams, rng: np.random.Generator, variant: str = "incremental"
) -> TrialOutcome:
    """Draw the five gains from rng (fixed order sp, rp, sr, rd, sd) and score."""
    lam = params.links
    return trial_from_gains(
        params,
        gain_sp=rng.exponential(1.0 / lam.lambda_sp),
        gain_rp=rng.exponential(1.0 / lam.lambda_rp),
        gain_sr=rng.exponential(1.0 / lam.lambda_sr),
        gain_rd=rng.exponential(1.0 / lam.lambda_rd),
        gain_sd=rng.exponential(1.0 / lam.lambda_sd),
        variant=variant,
    )


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(chunk_index,))
    return np.random.Generator(np.random.Philox(seq))


def _simulate_chunk(params: SystemParams, variant: str, seed: int, chunk_index: int, n: int):
    rng = _chunk_rng(seed, chunk_index)
    lam = params.links
    gain_sp = rng.exponential(1.0 / lam.lambda_sp, n)
    gain_rp = rng.exponential(1.0 / lam.lambda_rp, n)
    gain_sr = rng.exponential(1.0 / lam.lambda_sr, n)
    gain_rd = rng.exponential(1.0 / lam.lambda_rd, n)
    gain_sd = rng.exponential(1.0 / lam.lambda_sd, n)

    with np.errstate(divide="ignore"):
        p_source = params.i_over_no / gain_sp
    snr_direct = p_source * gain_sd
    snr_relay = (1.0 - params.rho) * p_source * gain_sr
    p_harvested = params.beta * p_source * gain_sr
    if variant == "no_rp_constraint":
        p_relay = p_harvested
    else:
        with np.errstate(divide="ignore"):
            p_relay = np.minimum(p_harvested, params.i_over_no / gain_rp)
    snr_relayed = p_relay * gain_rd

    gamma = params.gamma_th
    direct_ok = snr_direct >= gamma
    decode_ok = snr_relay >= gamma
    mrc_ok = (snr_direct + snr_relayed) >= gamma
    relayed_ok = decode_ok & ~direct_ok & mrc_ok

    n_direct = int(np.count_nonzero(direct_ok))
    n_decode = int(np.count_nonzero(decode_ok))
    counts = {
        "direct_success": n_direct,
        "relay_decode": n_decode,
        "mrc_success": int(np.count_nonzero(mrc_ok)),
        "decode_outage": n - n_decode,
        "direct_with_decode": int(np.count_nonzero(decode_ok & direct_ok)),
        "combined_outage": int(np.count_nonzero(decode_ok & ~mrc_ok)),
        "relayed_success": int(np.count_nonzero(relayed_ok)),
    }
    if variant == "direct_only":
        n_full, n_half = n_direct, 0
    elif variant == "no_direct_two_hop":
        n_full, n_half = 0, int(np.count_nonzero(decode_ok & (snr_relayed >= gamma)))
    else:
        n_full, n_half = n_direct, counts["relayed_success"]
    return counts, n_full, n_half


def estimate(
    params: SystemParams,
    trials: int,
    seed: int = 0,
    variant: str = "incremental",
    workers: int = 1,
) -> McEstimate:
    """Simulate the protocol and reduce to an McEstimate.

    Deterministic for fixed (seed, trials, scenario, variant) regardless of
    the worker count.  Variants share the same gain draws for a given seed,
    so pairs of runs differing only in the variant use common random numbers.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    chunks = [
        (i, min(CHUNK_SIZE, trials - i * CHUNK_SIZE))
        for i in range((trials + CHUNK_SIZE - 1) // CHUNK_SIZE)
    ]
    job = lambda spec: _simulate_chunk(params, variant, seed, spec[0], spec[1])
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, chunks))
    else:
        results = [job(spec) for spec in chunks]

    totals = dict.fromkeys(EVENTS, 0)
    n_full = n_half = 0
    for counts, full, half in results:
        for name in EVENTS:
            totals[name] += counts[name]
        n_full += full
        n_half += half

    rs = params.rs
    mean = rs * (n_full + 0.5 * n_half) / trials
    second_moment = rs * rs * (n_full + 0.25 * n_half) / trials
    variance = max(0.0, second_moment - mean * mean)
    if trials > 1:
        variance *= trials / (trials - 1)
    return McEstimate(
        mean=mean,
        std_error=math.sqrt(variance / trials),
        trials=trials,
        rs=rs,
        counts=MappingProxyType(totals),
    )


def estimate_variant(
    params: SystemParams,
    trials: int,
    seed: int,
    variant: str,
    workers: int = 1,
) -> McEstimate:
    """Alias of estimate with the variant required explicitly."""
    return estimate(params, trials, seed=seed, variant=variant, workers=workers)
