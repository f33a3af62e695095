"""Channel-estimate and estimation-error models.

A fading coefficient H = Hhat + Htilde is described by the law of the
estimate Hhat (complex Gaussian) together with an error-variance profile
giving the conditional variance of Htilde at each SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad


@dataclass(frozen=True)
class GaussianEstimateLaw:
    """Law of the channel estimate: Hhat ~ CN(mu, vhat)."""

    mu: complex = 0.0
    vhat: float = 1.0

    def __post_init__(self):
        if self.vhat < 0.0:
            raise ValueError("vhat must be nonnegative")


@dataclass(frozen=True)
class ConstantError:
    """SNR-independent error variance."""

    vtilde: float

    def __post_init__(self):
        if self.vtilde < 0.0:
            raise ValueError("vtilde must be nonnegative")

    def variance(self, rho: float) -> float:
        return self.vtilde


@dataclass(frozen=True)
class PredictionError:
    """Error variance of the one-step MMSE predictor for rectangular-PSD
    fading of bandwidth B: (1/(2B) + 1/rho)^{2B} rho^{2B-1} - 1/rho."""

    B: float

    def __post_init__(self):
        if not 0.0 < self.B < 0.5:
            raise ValueError("PredictionError requires 0 < B < 1/2")

    def variance(self, rho: float) -> float:
        b2 = 2.0 * self.B
        v = (1.0 / b2 + 1.0 / rho) ** b2 * rho ** (b2 - 1.0) - 1.0 / rho
        if v < 0.0:
            raise ValueError(f"prediction variance came out negative ({v})")
        return v


@dataclass(frozen=True)
class InterpolationError:
    """Error variance of MMSE pilot interpolation with pilot spacing T for
    rectangular-PSD fading of bandwidth B: 2BT / (rho + 2BT)."""

    B: float
    T: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.B < 0.5:
            raise ValueError("InterpolationError requires 0 < B < 1/2")
        if self.T is None:
            object.__setattr__(self, "T", math.floor(1.0 / (2.0 * self.B)))
        if self.T < 1 or self.T > 1.0 / (2.0 * self.B):
            raise ValueError("InterpolationError requires 1 <= T <= 1/(2B)")

    def variance(self, rho: float) -> float:
        bt2 = 2.0 * self.B * self.T
        return bt2 / (rho + bt2)


@dataclass(frozen=True)
class GeneralPSDError:
    """Error profile defined by an arbitrary fading power spectral density
    on [-1/2, 1/2]. `mode` selects the estimator: 'prediction' or
    'interpolation' (the latter requires a pilot spacing T)."""

    psd: Callable[[float], float]
    mode: str = "prediction"
    T: Optional[int] = None
    breakpoints: tuple = ()

    def __post_init__(self):
        if self.mode not in ("prediction", "interpolation"):
            raise ValueError("mode must be 'prediction' or 'interpolation'")
        if self.mode == "interpolation" and self.T is None:
            raise ValueError("interpolation mode requires T")

    def variance(self, rho: float) -> float:
        if self.mode == "prediction":
            return psd_prediction_variance(self.psd, rho, breakpoints=self.breakpoints)
        return psd_interpolation_variance(self.psd, rho, self.T, breakpoints=self.breakpoints)


ErrorProfile = ConstantError | PredictionError | InterpolationError | GeneralPSDError


def _quad_sym(f, breakpoints):
    pts = sorted(set((-0.5, 0.5) + tuple(breakpoints)))
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, err = quad(f, a, b, epsabs=1e-12, epsrel=1e-12, limit=200)
        if not np.isfinite(val) or err > 1e-9:
            raise RuntimeError(f"PSD quadrature did not converge on [{a},{b}]")
        total += val
    return total


def psd_prediction_variance(psd, rho: float, breakpoints=()) -> float:
    """MMSE one-step prediction error variance for a general PSD:
    exp{ int_{-1/2}^{1/2} log(psd + 1/rho) } - 1/rho."""
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    integral = _quad_sym(lambda lam: math.log(psd(lam) + 1.0 / rho), breakpoints)
    return math.exp(integral) - 1.0 / rho


def psd_interpolation_variance(psd, rho: float, T: int, breakpoints=()) -> float:
    """MMSE pilot-interpolation error variance for a general PSD:
    1 - int rho psd^2 / (rho psd + T)."""
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    if T < 1:
        raise ValueError("T must be a positive integer")

    def f(lam):
        p = psd(lam)
        if p == 0.0:
            return 0.0
        return rho * p * p / (rho * p + T)

    return 1.0 - _quad_sym(f, breakpoints)


def rectangular_psd(B: float) -> Callable[[float], float]:
    """Flat unit-power PSD of bandwidth B: 1/(2B) on |lam| < B, else 0."""

    def f(lam):
        return 1.0 / (2.0 * B) if abs(lam) < B else 0.0

    return f


@dataclass(frozen=True)
class FadingModel:
    """Joint description of (Hhat, Vtilde(Hhat), Phitilde(Hhat)).

    When `normalized` is set, the estimate variance tracks the error
    profile so that E|Hhat|^2 + E[Vtilde] = 1 at every SNR (the estimate
    law's vhat field is then ignored). `error_gaussian` declares the
    conditional law of Htilde Gaussian, in which case the entropy power
    equals the error variance.
    """

    estimate: GaussianEstimateLaw = field(default_factory=GaussianEstimateLaw)
    error: ErrorProfile = field(default_factory=lambda: ConstantError(0.0))
    error_gaussian: bool = True
    normalized: bool = False
    # for non-Gaussian errors: hhat, rho -> conditional differential entropy
    error_entropy: Optional[Callable[[complex, float], float]] = None
    error_absolutely_continuous: bool = True

    @property
    def mu(self) -> complex:
        return self.estimate.mu

    def vhat(self, rho: float) -> float:
        if self.normalized:
            v = 1.0 - self.error.variance(rho)
            if v < 0.0:
                raise ValueError("normalized model has error variance > 1")
            return v
        return self.estimate.vhat

    def vtilde(self, rho: float) -> float:
        return self.error.variance(rho)


def error_variance(model: FadingModel, rho: float) -> float:
    """Conditional error variance Vtilde at SNR rho."""
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    return model.vtilde(rho)


def entropy_power(model: FadingModel, hhat: complex, rho: float) -> float:
    """Conditional entropy power of the estimation error at Hhat = hhat.

    Gaussian error: equals the conditional variance. Otherwise the model
    must carry a conditional-entropy function; a non-absolutely-continuous
    conditional law has entropy power 0.
    """
    if model.error_gaussian:
        return model.vtilde(rho)
    if not model.error_absolutely_continuous:
        return 0.0
    if model.error_entropy is None:
        raise ValueError(
            "non-Gaussian error without a conditional-entropy function; "
            "refusing to assume Gaussianity"
        )
    h = model.error_entropy(hhat, rho)
    return math.exp(h) / (math.pi * math.e)


def sample_estimate(model: FadingModel, rho: float, rng: np.random.Generator, size=None):
    """Draw Hhat ~ CN(mu, vhat). Deterministic given the generator state."""
    vhat = model.vhat(rho)
    s = math.sqrt(vhat / 2.0)
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return model.mu + s * (re + 1j * im)
