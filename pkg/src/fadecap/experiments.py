"""Sweep orchestration, figure presets, CSV emission, and the self-test runner."""

from __future__ import annotations

import concurrent.futures
import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .bounds import (
    ChannelPoint,
    coherent_capacity,
    medard_bound,
    optimize_layers,
    rate_splitting_supremum,
    two_layer_bound,
    upper_bound_iupper,
)
from .estimator import RNG_KIND, ExpectationSpec, expect_g, expect_gw
from .fading import (
    ConstantError,
    FadingModel,
    GaussianEstimateLaw,
    InterpolationError,
    PredictionError,
    error_variance,
    rectangular_psd,
    psd_interpolation_variance,
    psd_prediction_variance,
)
from .layering import Layering, powers, refine, uniform
from .special import exp_int_e1, expected_log_affine, theta

LN2 = math.log(2.0)

BOUND_KINDS = ("r_m", "r_star2", "r_star_inf", "i_upper", "c_coh")

CSV_HEADER = "snr_db,rate_units,r_m,r_star2,r_star_inf,i_upper,c_coh,eb_n0_db_rstar,seed"

FIG1_HEADER = "p1_frac,rate_units,r_two_layer,r_m,seed"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARTIAL = 3


@dataclass(frozen=True)
class SweepConfig:
    model: FadingModel
    snr_db: Sequence[float]
    kinds: Sequence[str] = BOUND_KINDS
    spec: ExpectationSpec = field(default_factory=ExpectationSpec)
    units: str = "nats"
    n0: float = 1.0
    out: Optional[str] = None
    pilot_loss: bool = False
    jobs: int = 1
    ratios: bool = False  # emit bounds normalized by r_m (fig6-style)

    def __post_init__(self):
        if len(self.snr_db) == 0:
            raise ValueError("empty SNR grid")
        bad = set(self.kinds) - set(BOUND_KINDS)
        if bad:
            raise ValueError(f"unrecognized bound kinds: {sorted(bad)}")
        if len(self.kinds) == 0:
            raise ValueError("no bound kinds requested")
        if self.units not in ("nats", "bits"):
            raise ValueError("units must be 'nats' or 'bits'")


def _pilot_factor(model: FadingModel, enabled: bool) -> float:
    if enabled and isinstance(model.error, InterpolationError):
        T = model.error.T
        return (T - 1) / T
    return 1.0


def run_point(config: SweepConfig) -> dict:
    """Evaluate all requested bounds at a single SNR grid point."""
    if len(config.snr_db) != 1:
        raise ValueError("run_point requires a single-SNR config")
    snr_db = float(config.snr_db[0])
    rho = 10.0 ** (snr_db / 10.0)
    ch = ChannelPoint(P=rho * config.n0, N0=config.n0)
    spec = config.spec
    model = config.model
    loss = _pilot_factor(model, config.pilot_loss)

    nats: dict[str, float] = {}
    if "r_m" in config.kinds:
        nats["r_m"] = medard_bound(model, ch, spec).rate_nats
    if "r_star2" in config.kinds:
        _, bv = optimize_layers(model, ch, 2, spec)
        nats["r_star2"] = bv.rate_nats
    if "r_star_inf" in config.kinds:
        nats["r_star_inf"] = rate_splitting_supremum(model, ch, spec).rate_nats
    if "i_upper" in config.kinds:
        nats["i_upper"] = upper_bound_iupper(model, ch, spec).rate_nats
    if "c_coh" in config.kinds:
        nats["c_coh"] = coherent_capacity(model, ch, spec).rate_nats

    nats = {k: loss * v for k, v in nats.items()}

    eb = ""
    if "r_star_inf" in nats and np.isfinite(nats["r_star_inf"]) and nats["r_star_inf"] > 0:
        eb = 10.0 * math.log10(rho / (nats["r_star_inf"] / LN2))

    if config.ratios:
        rm = nats.get("r_m")
        if rm is None:
            rm = medard_bound(model, ch, spec).rate_nats * loss
        values = {k: v / rm for k, v in nats.items()}
        units = "ratio"
    else:
        scale = 1.0 / LN2 if config.units == "bits" else 1.0
        values = {k: v * scale for k, v in nats.items()}
        units = config.units

    record = {"snr_db": snr_db, "rate_units": units, "seed": spec.seed, "eb_n0_db_rstar": eb}
    for k in BOUND_KINDS:
        record[k] = values.get(k, "")
    record["_meta"] = {
        "version": __version__,
        "method": spec.method,
        "nodes_g": spec.nodes_g,
        "nodes_w": spec.nodes_w,
        "samples": spec.samples,
        "seed": spec.seed,
        "rng": RNG_KIND,
    }
    return record


def _format_field(v) -> str:
    if v == "":
        return ""
    if isinstance(v, str):
        return v
    return f"{v:.9g}"


def _metadata_lines(config: SweepConfig) -> list[str]:
    spec = config.spec
    return [
        f"# fadecap {__version__}",
        f"# method={spec.method} nodes_g={spec.nodes_g} nodes_w={spec.nodes_w} "
        f"samples={spec.samples} seed={spec.seed} rng={RNG_KIND}",
        f"# model={config.model.error.__class__.__name__} units={config.units} "
        f"n0={config.n0} pilot_loss={config.pilot_loss} ratios={config.ratios}",
    ]


def run_sweep(config: SweepConfig):
    """Evaluate the grid and emit CSV; returns (csv_text, n_failures).

    A failed grid point becomes a NaN row rather than being dropped, and is
    reported through a nonzero failure count (CLI exit code 3).
    """
    grid = sorted(float(s) for s in config.snr_db)

    def one(snr):
        try:
            return run_point(replace(config, snr_db=(snr,))), None
        except Exception as e:  # noqa: BLE001 - sentinel row per failed point
            return None, e

    if config.jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=config.jobs) as ex:
            results = list(ex.map(one, grid))
    else:
        results = [one(s) for s in grid]

    lines = [CSV_HEADER]
    failures = 0
    for snr, (rec, err) in zip(grid, results):
        if err is not None:
            failures += 1
            row = [f"{snr:.9g}", config.units] + ["nan"] * 5 + ["nan", str(config.spec.seed)]
        else:
            row = [
                _format_field(rec["snr_db"]),
                rec["rate_units"],
                *[_format_field(rec[k]) for k in BOUND_KINDS],
                _format_field(rec["eb_n0_db_rstar"]),
                str(rec["seed"]),
            ]
        lines.append(",".join(row))
    lines.extend(_metadata_lines(config))
    text = "\n".join(lines) + "\n"
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(text)
    return text, failures


# --- figure presets -------------------------------------------------------

_FIG_CONST = FadingModel(GaussianEstimateLaw(0.0, 0.5), ConstantError(0.5))
_FIG_PRED = FadingModel(error=PredictionError(B=0.25), normalized=True)
_FIG_INTERP = FadingModel(error=InterpolationError(B=0.25, T=2), normalized=True)

FIGURE_PRESETS = {
    "fig2": dict(model=_FIG_CONST, snr_db=tuple(range(-10, 31)), ratios=False),
    "fig3a": dict(model=_FIG_PRED, snr_db=tuple(range(-10, 41, 2)), ratios=False),
    "fig3b": dict(model=_FIG_PRED, snr_db=tuple(range(-10, 41, 2)), ratios=False),
    "fig4a": dict(model=_FIG_INTERP, snr_db=tuple(range(-10, 41, 2)), ratios=False),
    "fig4b": dict(model=_FIG_INTERP, snr_db=tuple(range(-10, 41, 2)), ratios=False),
    "fig6": dict(model=_FIG_INTERP, snr_db=tuple(range(-10, 41, 2)), ratios=True),
}


def run_fig1(spec: ExpectationSpec = None, units: str = "nats", out: Optional[str] = None,
             n_points: int = 99):
    """Two-layer bound vs power fraction for the constant-error model
    (P = 10, N0 = 1), alongside the single-layer baseline."""
    spec = spec or ExpectationSpec()
    model = _FIG_CONST
    ch = ChannelPoint(P=10.0, N0=1.0)
    rm = medard_bound(model, ch, spec).rate_nats
    scale = 1.0 / LN2 if units == "bits" else 1.0
    lines = [FIG1_HEADER]
    for i in range(1, n_points + 1):
        frac = i / (n_points + 1)
        _, _, total = two_layer_bound(model, ch, frac * ch.P, spec)
        lines.append(
            f"{frac:.9g},{units},{total.rate_nats * scale:.9g},{rm * scale:.9g},{spec.seed}"
        )
    lines.append(f"# fadecap {__version__}")
    lines.append(f"# preset=fig1 P=10 N0=1 method={spec.method} seed={spec.seed}")
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    return text


def run_figure(preset: str, spec: ExpectationSpec = None, units: str = "nats",
               out: Optional[str] = None, jobs: int = 1):
    spec = spec or ExpectationSpec()
    if preset == "fig1":
        return run_fig1(spec=spec, units=units, out=out), 0
    if preset not in FIGURE_PRESETS:
        raise ValueError(f"unknown figure preset {preset!r}")
    p = FIGURE_PRESETS[preset]
    cfg = SweepConfig(
        model=p["model"], snr_db=p["snr_db"], spec=spec, units=units, out=out,
        jobs=jobs, ratios=p["ratios"],
    )
    return run_sweep(cfg)


# --- self test ------------------------------------------------------------

def selftest(samples: int = 10**5, seed: int = 0) -> list[tuple[str, bool, str]]:
    """Run the cross-module invariant suite; returns (name, ok, detail) rows."""
    checks: list[tuple[str, bool, str]] = []

    def check(name, ok, detail=""):
        checks.append((name, bool(ok), detail))

    # theta continuity and identity
    c = abs(theta(1e-9) - 1.0) < 1e-8 and abs(theta(-1e-9) - 1.0) < 1e-8
    check("theta-continuity-at-0", c)
    xs = np.array([-0.9, -0.3, 1e-3, 0.5, 3.0, 50.0])
    check("theta-identity", np.allclose(theta(xs) * xs, np.log1p(xs), rtol=1e-14, atol=1e-16))

    # E1 derivative relation vs central differences
    ok = True
    for x in (0.5, 1.0, 5.0):
        h = 1e-5 * x
        num = (exp_int_e1(x + h) - exp_int_e1(x - h)) / (2 * h)
        ok &= abs(num + math.exp(-x) / x) <= 1e-6 * abs(math.exp(-x) / x)
    check("e1-derivative", ok)

    # closed-form log expectation vs quadrature
    from .estimator import expect_w

    spec_q = ExpectationSpec()
    ok = True
    for a in (0.1, 1.0, 10.0):
        for cc in (0.1, 1.0, 10.0):
            q = expect_w(lambda w: np.log(a * w + cc), spec_q).value
            ok &= abs(q - expected_log_affine(a, cc)) < 1e-8
    check("expected-log-affine-vs-quadrature", ok)

    # variance profiles decrease and vanish
    for prof, name in ((PredictionError(0.25), "prediction"), (InterpolationError(0.25, 2), "interpolation")):
        grid = np.logspace(-1, 6, 30)
        vals = [prof.variance(r) for r in grid]
        check(f"{name}-variance-decreasing", all(a > b for a, b in zip(vals[:-1], vals[1:])))
        check(f"{name}-variance-vanishes", prof.variance(1e8) < 1e-3)

    # general-PSD consistency with the closed forms
    psd = rectangular_psd(0.25)
    v1 = psd_prediction_variance(psd, 10.0, breakpoints=(-0.25, 0.25))
    check("psd-prediction-consistency", abs(v1 - PredictionError(0.25).variance(10.0)) < 1e-7)
    v2 = psd_interpolation_variance(psd, 10.0, 2, breakpoints=(-0.25, 0.25))
    check("psd-interpolation-consistency", abs(v2 - InterpolationError(0.25, 2).variance(10.0)) < 1e-7)

    # layering: refine splits exactly one power
    Q = uniform(10.0, 4)
    Q2 = refine(Q, 1.3)
    check("layering-refine", len(Q2) == 5 and abs(powers(Q2).sum() - 10.0) < 1e-12)

    # quadrature vs Monte Carlo for the Medard bound (auto-scaled 4 sigma)
    model = _FIG_CONST
    ch = ChannelPoint(10.0, 1.0)
    q = medard_bound(model, ch, ExpectationSpec()).rate_nats
    mc_spec = ExpectationSpec(method="monte-carlo", samples=samples, seed=seed)
    mc = medard_bound(model, ch, mc_spec)
    check(
        "medard-quad-vs-mc",
        abs(q - mc.rate_nats) <= 4.0 * mc.estimate.error_estimate,
        f"quad={q:.6f} mc={mc.rate_nats:.6f} stderr={mc.estimate.error_estimate:.2e}",
    )

    # determinism of the Monte-Carlo path
    a = medard_bound(model, ch, mc_spec).rate_nats
    b = medard_bound(model, ch, mc_spec).rate_nats
    check("mc-determinism", a == b)

    # tensor expectation reduces to the marginal when f ignores w
    ea = expect_gw(lambda g, w: np.log1p(g) + 0.0 * w, model, 10.0, spec_q).value
    eb = expect_g(lambda g: np.log1p(g), model, 10.0, spec_q).value
    check("gw-marginal-reduction", abs(ea - eb) < 1e-12)

    return checks
