"""End-to-end acceptance checks.

Each test prints a single PASS/FAIL line so the suite doubles as a
human-readable report (`pytest -v -s tests/test_acceptance.py`).
"""

import math

import numpy as np
import pytest

from fadecap.bounds import (
    ChannelPoint,
    coherent_capacity,
    layered_bound,
    medard_bound,
    optimize_layers,
    rate_splitting_supremum,
    upper_bound_iupper,
)
from fadecap.estimator import ExpectationSpec, mc_full_layers
from fadecap.fading import (
    ConstantError,
    FadingModel,
    GaussianEstimateLaw,
    InterpolationError,
    PredictionError,
)
from fadecap.layering import Layering, refine, uniform
from fadecap.special import exp_int_e1

FIG_MODEL = FadingModel(GaussianEstimateLaw(0.0, 0.5), ConstantError(0.5))
PERFECT = FadingModel(GaussianEstimateLaw(0.0, 1.0), ConstantError(0.0))
INTERP = FadingModel(error=InterpolationError(0.25, 2), normalized=True)
PRED = FadingModel(error=PredictionError(0.25), normalized=True)
QUAD = ExpectationSpec()
CH10 = ChannelPoint(10.0, 1.0)


def report(name, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    print(f"[{tag}] {name}" + (f"  ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


def test_medard_closed_form():
    a = 10.0 / (0.5 * 10.0 + 1.0)
    x = 1.0 / (a * 0.5)
    ref = math.exp(x) * exp_int_e1(x)
    got = medard_bound(FIG_MODEL, CH10, QUAD).rate_nats
    report(
        "medard closed form (rel 1e-6)",
        abs(got - ref) <= 1e-6 * abs(ref),
        f"quad={got:.10f} closed={ref:.10f}",
    )


def test_two_layer_grid():
    from fadecap.bounds import two_layer_bound

    rm = medard_bound(FIG_MODEL, CH10, QUAD)
    fracs = np.array([i / 100.0 for i in range(1, 100)])
    totals = []
    ok_dominance = True
    for f in fracs:
        total = two_layer_bound(FIG_MODEL, CH10, f * 10.0, QUAD)[2]
        tol = total.estimate.error_estimate + rm.estimate.error_estimate
        ok_dominance &= total.rate_nats > rm.rate_nats + tol
        totals.append(total.rate_nats)
    argmax = fracs[int(np.argmax(totals))]
    report(
        "two-layer grid dominates single layer, argmax in [0.70, 0.85]",
        ok_dominance and 0.70 <= argmax <= 0.85,
        f"argmax P1/P = {argmax:.2f}",
    )


def test_high_snr_gain():
    ch = ChannelPoint(1000.0, 1.0)
    gain = (
        rate_splitting_supremum(FIG_MODEL, ch, QUAD).rate_nats
        - medard_bound(FIG_MODEL, ch, QUAD).rate_nats
    )
    report(
        "30 dB layering gain in 0.194 +/- 0.035 nats",
        0.194 - 0.035 <= gain <= 0.194 + 0.035,
        f"gain = {gain:.4f} nats = {gain / math.log(2.0):.4f} bits",
    )


def test_layer_monotonicity():
    rates = []
    for L in range(1, 7):
        _, bv = optimize_layers(FIG_MODEL, CH10, L, QUAD)
        rates.append(bv.rate_nats)
    diffs = np.diff(rates)
    report(
        "optimized rate nondecreasing in L=1..6 (tol 1e-4)",
        bool(np.all(diffs >= -1e-4)),
        "rates " + " ".join(f"{r:.5f}" for r in rates),
    )


def test_uniform_convergence():
    rs = rate_splitting_supremum(FIG_MODEL, CH10, QUAD).rate_nats
    gaps = [
        abs(layered_bound(FIG_MODEL, CH10, uniform(10.0, K), QUAD).rate_nats - rs)
        for K in (64, 256, 1024)
    ]
    report(
        "uniform layering converges to supremum (<= 1e-3 at K=1024)",
        gaps[0] > gaps[1] > gaps[2] and gaps[2] <= 1e-3,
        "gaps " + " ".join(f"{g:.2e}" for g in gaps),
    )


def test_refinement_strictness():
    rng = np.random.default_rng(2026)
    ok_strict = True
    for _ in range(20):
        L = int(rng.integers(1, 6))
        q = np.sort(rng.uniform(0.5, 10.0, size=L))
        q[-1] = 10.0
        q = np.unique(q)
        Q = Layering(tuple(q))
        # random insertion point away from existing levels
        while True:
            new = float(rng.uniform(0.05, 9.95))
            if np.min(np.abs(np.asarray(Q.q) - new)) > 1e-6:
                break
        base = layered_bound(FIG_MODEL, CH10, Q, QUAD)
        fine = layered_bound(FIG_MODEL, CH10, refine(Q, new), QUAD)
        err = 3.0 * (base.estimate.error_estimate + fine.estimate.error_estimate)
        ok_strict &= fine.rate_nats > base.rate_nats + err
    # perfect CSI: refinement is an equality
    Q = Layering((3.0, 10.0))
    base = layered_bound(PERFECT, CH10, Q, QUAD)
    fine = layered_bound(PERFECT, CH10, refine(Q, 6.5), QUAD)
    eq_tol = base.estimate.error_estimate + fine.estimate.error_estimate
    ok_equal = abs(fine.rate_nats - base.rate_nats) <= eq_tol
    report(
        "refinement strictly increases (20 random layerings); equality under perfect CSI",
        ok_strict and ok_equal,
    )


def test_ordering_chain():
    ok = True
    worst = ""
    for model, name in ((FIG_MODEL, "constant"), (PRED, "prediction"), (INTERP, "interpolation")):
        for db in np.linspace(-10, 30, 9):
            ch = ChannelPoint(10.0 ** (db / 10.0), 1.0)
            rm = medard_bound(model, ch, QUAD)
            _, r2 = optimize_layers(model, ch, 2, QUAD)
            rs = rate_splitting_supremum(model, ch, QUAD)
            iu = upper_bound_iupper(model, ch, QUAD)
            cc = coherent_capacity(model, ch, QUAD)
            tol = 5.0 * sum(b.estimate.error_estimate for b in (rm, r2, rs, iu, cc)) + 1e-9
            here = (
                rm.rate_nats <= r2.rate_nats + tol
                and r2.rate_nats <= rs.rate_nats + tol
                and rs.rate_nats <= min(iu.rate_nats, cc.rate_nats) + tol
            )
            if not here:
                worst = f"{name} @ {db:.0f} dB"
            ok &= here
    report("ordering chain R_M <= R*2 <= R* <= min(I_upper, C_coh) on 3 models x 9 SNRs", ok, worst)


def test_asymptotic_tightness():
    gaps = []
    for db in (0, 10, 20, 30, 40):
        ch = ChannelPoint(10.0 ** (db / 10.0), 1.0)
        gaps.append(
            upper_bound_iupper(INTERP, ch, QUAD).rate_nats
            - rate_splitting_supremum(INTERP, ch, QUAD).rate_nats
        )
    decreasing = all(a > b for a, b in zip(gaps[:-1], gaps[1:]))
    ch40 = ChannelPoint(1e4, 1.0)
    const_gap = (
        upper_bound_iupper(FIG_MODEL, ch40, QUAD).rate_nats
        - rate_splitting_supremum(FIG_MODEL, ch40, QUAD).rate_nats
    )
    report(
        "vanishing-error gap decreasing and < 0.05 nats at 40 dB; constant-error gap persists",
        decreasing and gaps[-1] < 0.05 and const_gap > 0.1,
        f"interp gap(40dB)={gaps[-1]:.2e}, const gap(40dB)={const_gap:.3f}",
    )


def test_prelog():
    from fadecap.bounds import prelog_diag

    rhos = [10.0 ** (db / 10.0) for db in (30, 35, 40, 45, 50)]
    rates = [
        rate_splitting_supremum(INTERP, ChannelPoint(r, 1.0), QUAD).rate_nats for r in rhos
    ]
    slope = prelog_diag(rhos, rates)
    report("high-SNR pre-log of supremum is 1 +/- 0.05", abs(slope - 1.0) <= 0.05, f"slope={slope:.4f}")


def test_marginal_equivalence():
    Q = uniform(10.0, 4)
    quad = layered_bound(FIG_MODEL, CH10, Q, QUAD).rate_nats
    est = mc_full_layers(FIG_MODEL, 10.0, Q, 10**6, seed=0)
    report(
        "joint-layer Monte Carlo matches marginal quadrature within 4 stderr",
        abs(est.value - quad) <= 4.0 * est.error_estimate,
        f"quad={quad:.5f} mc={est.value:.5f} stderr={est.error_estimate:.1e}",
    )


def test_low_snr_ratio():
    ch = ChannelPoint(0.1, 1.0)
    ratio = (
        rate_splitting_supremum(INTERP, ch, QUAD).rate_nats
        / medard_bound(INTERP, ch, QUAD).rate_nats
    )
    report("low-SNR supremum/single-layer ratio <= 1.05 at -10 dB", ratio <= 1.05, f"ratio={ratio:.4f}")
