"""Capacity and Gaussian-input mutual-information bounds.

Lower bounds: Medard's bound, the two-layer and L-layer successive-decoding
bounds, their power-allocation optima, and the infinite-layering supremum in
closed form. Upper bounds: coherent capacity and the entropy-power bound.
All rates are in nats.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .estimator import (
    EstimateResult,
    ExpectationSpec,
    UnsupportedConfigError,
    expect_g,
    expect_gw,
    expect_w,
)
from .fading import FadingModel, entropy_power
from .layering import Layering, powers, uniform
from .special import expected_log_affine, theta


@dataclass(frozen=True)
class ChannelPoint:
    P: float
    N0: float

    def __post_init__(self):
        if self.P <= 0.0 or self.N0 <= 0.0:
            raise ValueError("P and N0 must be positive")

    @property
    def rho(self) -> float:
        return self.P / self.N0


@dataclass(frozen=True)
class BoundValue:
    rate_nats: float
    kind: str
    estimate: EstimateResult
    unbounded: bool = False


def medard_bound(model: FadingModel, ch: ChannelPoint, spec: ExpectationSpec) -> BoundValue:
    """E[log(1 + G P / (Vtilde P + N0))]."""
    vt = model.vtilde(ch.rho)
    a = ch.P / (vt * ch.P + ch.N0)
    est = expect_g(lambda g: np.log1p(a * g), model, ch.rho, spec)
    return BoundValue(est.value, "R_M", est)


def coherent_capacity(model: FadingModel, ch: ChannelPoint, spec: ExpectationSpec) -> BoundValue:
    """Perfect-CSI capacity E[log(1 + |H|^2 P / N0)], |H|^2 ~ Exp(vhat + vtilde)."""
    if model.mu != 0:
        raise UnsupportedConfigError("coherent_capacity supports mu = 0 only")
    v = model.vhat(ch.rho) + model.vtilde(ch.rho)
    snr = ch.P / ch.N0
    est = expect_w(lambda w: np.log1p(snr * v * w), spec)
    return BoundValue(est.value, "C_coh", est)


def two_layer_bound(model: FadingModel, ch: ChannelPoint, P1: float, spec: ExpectationSpec):
    """Two-layer successive-decoding bound; returns (R1, R2, total)."""
    if not 0.0 < P1 < ch.P:
        raise ValueError("P1 must lie strictly inside (0, P)")
    P2 = ch.P - P1
    vt = model.vtilde(ch.rho)
    n0 = ch.N0

    est1 = expect_g(
        lambda g: np.log1p(g * P1 / ((g + vt) * P2 + vt * P1 + n0)), model, ch.rho, spec
    )
    # |X1|^2 = P1 W with W ~ Exp(1), independent of Hhat
    est2 = expect_gw(
        lambda g, w: np.log1p(g * P2 / (vt * (P1 * w + P2) + n0)), model, ch.rho, spec
    )
    total = BoundValue(
        est1.value + est2.value,
        "R_two_layer",
        EstimateResult(
            est1.value + est2.value,
            est1.error_estimate + est2.error_estimate,
            est1.method,
            {"r1": est1.value, "r2": est2.value},
        ),
    )
    return est1.value, est2.value, total


# layer-axis chunk cap for the tensor quadrature (elements per slab)
_CHUNK_ELEMS = 4_000_000


def _layer_sum(Q: Layering, vt: float, n0: float):
    """Integrand sum_l log(1 + Gamma_l(g, w)) for the W-marginal layered bound."""
    P = Q.P
    qc = np.asarray(Q.q)
    qprev = np.concatenate(([0.0], qc[:-1]))
    pl = qc - qprev
    residual = P - qc

    def f(g, w):
        g = np.asarray(g, dtype=float)
        w = np.asarray(w, dtype=float)
        gx = g[..., None]
        wx = w[..., None]
        out = None
        base = int(np.prod(np.broadcast_shapes(g.shape, w.shape))) or 1
        step = max(1, _CHUNK_ELEMS // base)
        for i in range(0, len(pl), step):
            sl = slice(i, i + step)
            denom = vt * qprev[sl] * wx + vt * pl[sl] + (gx + vt) * residual[sl] + n0
            term = np.log1p(gx * pl[sl] / denom).sum(axis=-1)
            out = term if out is None else out + term
        return out

    return f


def layered_bound(model: FadingModel, ch: ChannelPoint, Q: Layering, spec: ExpectationSpec) -> BoundValue:
    """R[Q] = sum_l E[log(1 + Gamma_l)] in the W-marginal form."""
    if abs(Q.P - ch.P) > 1e-9 * max(ch.P, 1.0):
        raise ValueError(f"layering total power {Q.P} does not match channel power {ch.P}")
    vt = model.vtilde(ch.rho)
    est = expect_gw(_layer_sum(Q, vt, ch.N0), model, ch.rho, spec)
    return BoundValue(est.value, "R_layered", est)


@dataclass(frozen=True)
class OptimizerConfig:
    max_iter: int = 400
    xatol: float = 1e-4
    fatol: float = 1e-7
    search_nodes: int = 32
    warm_start: Layering | None = None


def _logits_to_layering(z: np.ndarray, P: float) -> Layering:
    full = np.concatenate([z, [0.0]])
    p = np.exp(full - full.max())
    p /= p.sum()
    q = P * np.cumsum(p)
    q[-1] = P
    return Layering(tuple(q))


def _layering_to_logits(Q: Layering) -> np.ndarray:
    p = powers(Q) / Q.P
    logp = np.log(np.maximum(p, 1e-300))
    return (logp - logp[-1])[:-1]


def optimize_layers(
    model: FadingModel,
    ch: ChannelPoint,
    L: int,
    spec: ExpectationSpec,
    opt_cfg: OptimizerConfig | None = None,
):
    """Best L-layering found by derivative-free search; returns (Layering, BoundValue).

    Layerings are parametrized by softmax logits of the per-layer power
    fractions, which keeps every candidate feasible by construction.
    """
    if L < 1:
        raise ValueError("L must be a positive integer")
    cfg = opt_cfg or OptimizerConfig()

    if L == 1:
        Q = Layering((ch.P,))
        bv = layered_bound(model, ch, Q, spec)
        return Q, BoundValue(bv.rate_nats, "R_star_L", bv.estimate)

    search_spec = replace(
        spec, nodes_g=min(spec.nodes_g, cfg.search_nodes), nodes_w=min(spec.nodes_w, cfg.search_nodes)
    )
    vt = model.vtilde(ch.rho)

    def value(Q: Layering) -> float:
        return layered_bound(model, ch, Q, search_spec).rate_nats

    if L == 2:
        # one free parameter: bounded scalar search on the power fraction
        res = minimize_scalar(
            lambda frac: -value(Layering((frac * ch.P, ch.P))),
            bounds=(1e-6, 1.0 - 1e-6),
            method="bounded",
            options={"xatol": 1e-8},
        )
        best_q = Layering((float(res.x) * ch.P, ch.P))
        converged = bool(res.success)
    else:
        def objective(z):
            return -value(_logits_to_layering(z, ch.P))

        starts = [np.zeros(L - 1)]
        geo = 0.3 ** np.arange(L)  # front-loaded powers, like the two-layer optimum
        starts.append(_layering_to_logits(Layering(tuple(ch.P * np.cumsum(geo / geo.sum())[:-1]) + (ch.P,))))
        if cfg.warm_start is not None:
            ws = cfg.warm_start
            if len(ws) == L - 1:
                gaps = np.diff(np.concatenate(([0.0], np.asarray(ws.q))))
                k = int(np.argmax(gaps))
                lo = 0.0 if k == 0 else ws.q[k - 1]
                ws = Layering(tuple(sorted(ws.q + ((lo + ws.q[k]) / 2.0,))))
            if len(ws) == L:
                starts.append(_layering_to_logits(ws))

        best = None
        converged = False
        for z0 in starts:
            res = minimize(
                objective,
                z0,
                method="Nelder-Mead",
                options={"xatol": cfg.xatol, "fatol": cfg.fatol, "maxiter": cfg.max_iter * (L - 1)},
            )
            converged = converged or bool(res.success)
            if best is None or res.fun < best.fun - cfg.fatol:
                best = res
            elif abs(res.fun - best.fun) <= cfg.fatol:
                # tie-break: keep the candidate closest to the uniform layering
                qu = np.asarray(uniform(ch.P, L).q)
                da = np.linalg.norm(np.asarray(_logits_to_layering(res.x, ch.P).q) - qu)
                db = np.linalg.norm(np.asarray(_logits_to_layering(best.x, ch.P).q) - qu)
                if da < db:
                    best = res
        best_q = _logits_to_layering(best.x, ch.P)

    if not converged:
        warnings.warn("layer optimizer did not converge; returning best-so-far")

    # guard against the search landing below the uniform baseline
    if value(best_q) < value(uniform(ch.P, L)):
        best_q = uniform(ch.P, L)

    bv = layered_bound(model, ch, best_q, spec)
    est = replace(bv.estimate, diagnostics={**bv.estimate.diagnostics, "converged": converged})
    return best_q, BoundValue(bv.rate_nats, "R_star_L", est)


def rate_splitting_supremum(model: FadingModel, ch: ChannelPoint, spec: ExpectationSpec) -> BoundValue:
    """Closed-form infinite-layering supremum:
    E[(G/b) Theta((Vtilde (W-1) - G) / b)], b = G + Vtilde + N0/P."""
    vt = model.vtilde(ch.rho)
    n0p = ch.N0 / ch.P

    def f(g, w):
        b = g + vt + n0p
        x = (vt * (w - 1.0) - g) / b
        if not np.all(x > -1.0):
            raise RuntimeError("Theta argument fell below -1; this is a bug")
        return g / b * theta(x)

    est = expect_gw(f, model, ch.rho, spec)
    return BoundValue(est.value, "R_star_inf", est)


def upper_bound_iupper(model: FadingModel, ch: ChannelPoint, spec: ExpectationSpec) -> BoundValue:
    """Entropy-power upper bound:
    R_M + E[log((Vtilde P + N0) / (Phitilde P W + N0))]."""
    rm = medard_bound(model, ch, spec)
    vt = model.vtilde(ch.rho)
    phi = entropy_power(model, 0j, ch.rho)
    if phi == 0.0 and vt > 0.0:
        est = EstimateResult(np.inf, 0.0, rm.estimate.method, {"unbounded": True})
        return BoundValue(np.inf, "I_upper", est, unbounded=True)
    correction = float(np.log(vt * ch.P + ch.N0)) - expected_log_affine(phi * ch.P, ch.N0)
    est = EstimateResult(
        rm.rate_nats + correction,
        rm.estimate.error_estimate,
        rm.estimate.method,
        {"r_m": rm.rate_nats, "correction": correction},
    )
    return BoundValue(est.value, "I_upper", est)


def asymptotic_gap_diag(model: FadingModel, rho_grid, spec: ExpectationSpec):
    """Rows (rho, I_upper - R_star, I_upper - R_M) over an SNR grid."""
    rows = []
    for rho in rho_grid:
        ch = ChannelPoint(P=float(rho), N0=1.0)
        iu = upper_bound_iupper(model, ch, spec).rate_nats
        rs = rate_splitting_supremum(model, ch, spec).rate_nats
        rm = medard_bound(model, ch, spec).rate_nats
        rows.append((float(rho), iu - rs, iu - rm))
    return rows


def prelog_diag(rhos, rates) -> float:
    """Finite-difference slope d(rate)/d(ln rho) at the top of a geometric grid."""
    rhos = np.asarray(rhos, dtype=float)
    rates = np.asarray(rates, dtype=float)
    if len(rhos) < 3:
        raise ValueError("prelog_diag needs at least 3 grid points")
    return float((rates[-1] - rates[-2]) / (np.log(rhos[-1]) - np.log(rhos[-2])))
