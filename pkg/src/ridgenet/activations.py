"""Activation pair (eta, psi), Dawson integral, and the admissibility constant.

The pair used throughout is the Gaussian activation eta(x) = exp(-x^2/2)
together with the wavelet

    psi(x) = (1/pi^2) * (2x(x^2 - 3) F(x/sqrt(2)) - sqrt(2)(x^2 - 2)),

where F is the Dawson integral.  The pair is admissible with constant
K = 1, which the numeric check in ``admissibility_constant`` confirms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import dawsn

SQRT2 = np.sqrt(2.0)


class AdmissibilityError(ValueError):
    """Raised when the admissibility integral is divergent, zero, or ill-behaved."""


def _check_finite(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {x!r}")
    return arr


def dawson(x):
    """Dawson integral F(x) = exp(-x^2) * integral_0^x exp(t^2) dt.

    Odd symmetry holds exactly: the value is computed as sign(x) * F(|x|).
    Accepts scalars or arrays; rejects non-finite input.
    """
    arr = _check_finite(x)
    out = np.sign(arr) * dawsn(np.abs(arr))
    return out if arr.ndim else float(out)


def eta(x):
    """Gaussian activation exp(-x^2/2)."""
    arr = _check_finite(x)
    out = np.exp(-0.5 * arr * arr)
    return out if arr.ndim else float(out)


def psi(x):
    """Admissible wavelet paired with the Gaussian activation.

    Even in x, psi(0) = 2*sqrt(2)/pi^2, and decays like x^-4 so that the
    admissibility integral converges and the mean of psi vanishes.
    """
    arr = _check_finite(x)
    out = (2.0 * arr * (arr * arr - 3.0) * dawson(arr / SQRT2)
           - SQRT2 * (arr * arr - 2.0)) / np.pi**2
    return out if arr.ndim else float(out)


@dataclass(frozen=True)
class ActivationPair:
    """An (eta, psi) pair with its admissibility constant K."""

    eta: Callable = field(default=eta)
    psi: Callable = field(default=psi)
    K: float = 1.0


def default_pair() -> ActivationPair:
    """The Gaussian/Dawson pair with K = 1."""
    return ActivationPair()


@dataclass(frozen=True)
class FourierQuadrature:
    """Settings for the numeric admissibility integral.

    The functions are sampled on [-x_max, x_max) with spacing dx and
    transformed with an FFT; the xi-integral excludes |xi| < xi_min
    (psi has vanishing mean, so the integrand is regular there) and is
    truncated at |xi| > xi_max where the Gaussian factor has died off.
    """

    x_max: float = 400.0
    dx: float = 0.01
    xi_min: float = 1e-3
    xi_max: float = 40.0

    def validate(self):
        if not (self.x_max > 0 and self.dx > 0 and 0 < self.xi_min < self.xi_max):
            raise ValueError(f"invalid quadrature settings: {self}")


def _fourier_pairing(pair: ActivationPair, m: int, quad: FourierQuadrature,
                     xi_min: float) -> complex:
    n = int(round(2 * quad.x_max / quad.dx))
    x = -quad.x_max + quad.dx * np.arange(n)
    psi_vals = np.asarray(pair.psi(x), dtype=float)
    eta_vals = np.asarray(pair.eta(x), dtype=float)
    xi = 2.0 * np.pi * np.fft.fftfreq(n, d=quad.dx)
    # FFT of samples starting at -x_max needs the phase factor exp(i xi x_max)
    phase = quad.dx * np.exp(1j * xi * quad.x_max)
    psi_hat = np.fft.fft(psi_vals) * phase
    eta_hat = np.fft.fft(eta_vals) * phase
    mask = (np.abs(xi) > xi_min) & (np.abs(xi) <= quad.xi_max)
    integrand = np.conj(psi_hat[mask]) * eta_hat[mask] / np.abs(xi[mask]) ** m
    dxi = 2.0 * np.pi / (n * quad.dx)
    return complex(integrand.sum() * dxi)


def admissibility_constant(pair: ActivationPair, m: int = 1,
                           quad: FourierQuadrature | None = None) -> float:
    """Numerically evaluate K = (2*pi)^(m-1) * integral conj(psi_hat) eta_hat / |xi|^m dxi.

    Raises AdmissibilityError if the estimate is non-finite, carries too much
    imaginary residue, vanishes, or diverges as the inner cutoff shrinks
    (e.g. psi with nonzero mean makes 1/|xi|^m non-integrable at 0).
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    quad = quad or FourierQuadrature()
    quad.validate()

    raw = _fourier_pairing(pair, m, quad, quad.xi_min)
    if not np.isfinite(raw.real) or not np.isfinite(raw.imag):
        raise AdmissibilityError("admissibility integral is non-finite")
    magnitude = abs(raw)
    if magnitude > 0 and abs(raw.imag) > 1e-6 * magnitude:
        raise AdmissibilityError(
            f"imaginary residue {raw.imag:.3e} exceeds 1e-6 of magnitude {magnitude:.3e}")

    # Divergence guard: widening the small-|xi| exclusion window must not
    # change the estimate materially.
    coarse = _fourier_pairing(pair, m, quad, 8.0 * quad.xi_min)
    scale = max(abs(raw), abs(coarse), 1e-300)
    if abs(raw - coarse) > 0.05 * scale:
        raise AdmissibilityError(
            "integral estimate unstable near xi=0 (pair is inadmissible): "
            f"{raw.real:.6e} vs {coarse.real:.6e} with widened cutoff")

    value = (2.0 * np.pi) ** (m - 1) * raw.real
    if abs(value) < 1e-8:
        raise AdmissibilityError(f"admissibility constant is zero ({value:.3e})")
    return float(value)
