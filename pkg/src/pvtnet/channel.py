"""Wireless-channel primitives: composite gain, rate/SIR mapping, and the
distributions of the shadowing-fading ratio factors that drive interference
and transmit power.

Composite link gain at distance r:  K r^(-beta) e^(c sigma xi) zeta^2, with
xi standard normal (log-normal shadowing, c = ln10/10) and zeta^2 unit-mean
exponential (Rayleigh fading).  All dB conversions happen in the config
layer; everything here is linear-domain.

Two dimensionless ratio factors recur:

  Q = e^(c sigma (xi1 - xi2)) * zeta1^2 / zeta2^2   (interfering link over
      its own link), with closed-form fractional moment
      E[Q^(2/beta)] = 2 pi / (beta sin(2 pi / beta)) * exp(4 c^2 sigma^2 / beta^2);

  V = e^(-c sigma xi) / zeta^2                      (inverse of the served
      link's fading), with E[V^(2/beta)] = exp(2 c^2 sigma^2 / beta^2) *
      Gamma(1 - 2/beta).

Their densities are single Gaussian-kernel integrals evaluated with
Gauss-Hermite nodes over the whole real line.  (Restricting the kernel
integral of the Q density to t >= 0 would halve the normalization and
contradict both the sampling definition and the closed-form moment, so the
full-line integral is the only consistent reading.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma

from .errors import InvalidInputError
from .numerics import gauss_hermite_standard_normal

SHADOW_COEF = np.log(10.0) / 10.0  # c = ln10/10


@dataclass(frozen=True)
class ChannelParams:
    path_loss_exp: float        # beta, > 2
    shadowing_db: float         # sigma (dB-domain std dev), >= 0
    gain_const: float           # K, linear
    sir_gap: float              # Delta, linear, >= 1
    bandwidth: float = 1.0      # B_W in Hz; 1.0 in normalized mode

    def __post_init__(self):
        if self.path_loss_exp <= 2.0:
            raise InvalidInputError("path-loss exponent must exceed 2")
        if self.shadowing_db < 0:
            raise InvalidInputError("shadowing deviation must be nonnegative")
        if self.gain_const <= 0:
            raise InvalidInputError("antenna gain constant must be positive")
        if self.sir_gap < 1.0:
            raise InvalidInputError("SIR gap must be >= 1 (0 dB)")
        if self.bandwidth <= 0:
            raise InvalidInputError("bandwidth must be positive")


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def channel_gain(r, xi, zeta_sq, p: ChannelParams):
    """Composite link gain K r^-beta e^(c sigma xi) zeta^2; r > 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise InvalidInputError("distance must be positive (gain is singular at 0)")
    return (p.gain_const * r ** (-p.path_loss_exp)
            * np.exp(SHADOW_COEF * p.shadowing_db * np.asarray(xi))
            * np.asarray(zeta_sq))


def rate_to_sir(rho, p: ChannelParams):
    """Invert B_W log2(1 + gamma/Delta) = rho:  gamma = Delta (2^(rho/B_W) - 1)."""
    rho = np.asarray(rho, dtype=float)
    out = p.sir_gap * (np.exp2(np.minimum(rho / p.bandwidth, 1000.0)) - 1.0)
    return out if out.ndim else float(out)


def min_sir(theta: float, rho_min: float, p: ChannelParams) -> float:
    """Target SIR floor corresponding to the minimum rate."""
    return float(rate_to_sir(rho_min, p))


def sir_pdf(z, theta: float, rho_min: float, p: ChannelParams):
    """Density of the target SIR induced by Pareto rates through the rate map.

    Zero at or below the floor z0 = Delta (2^(rho_min/B_W) - 1).
    """
    z = np.asarray(z, dtype=float)
    z0 = rate_to_sir(rho_min, p)
    d, bw = p.sir_gap, p.bandwidth
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.log2(1.0 + np.maximum(z, z0) / d)
        out = (theta * rho_min ** theta * bw ** (-theta)
               / (np.log(2.0) * (d + z)) * lg ** (-theta - 1.0))
    out = np.where(z > z0, out, 0.0)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Ratio factor Q (interference) and inverse factor V (transmit power)
# ---------------------------------------------------------------------------

def q_ratio_pdf(x, sigma_db: float, n_nodes: int = 96):
    """Density of Q at x >= 0.

    f_Q(x) = (1 / (2 sqrt(pi) c sigma)) * integral over the real line of
    exp(-t^2/(4 c^2 sigma^2) + t) / (e^t + x)^2 dt; the sigma -> 0 limit is
    the two-exponential ratio density 1/(1+x)^2.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise InvalidInputError("Q is nonnegative")
    if sigma_db == 0:
        out = 1.0 / (1.0 + x) ** 2
        return out if out.ndim else float(out)
    cs = SHADOW_COEF * sigma_db
    # t = sqrt(2) cs u maps the kernel onto the standard normal GH rule.
    u, w = gauss_hermite_standard_normal(n_nodes)
    t = np.sqrt(2.0) * cs * u
    et = np.exp(t)
    vals = (et[None, :] / (et[None, :] + np.atleast_1d(x)[:, None]) ** 2 * w[None, :]).sum(axis=1)
    return vals if x.ndim else float(vals[0])


def q_moment(beta: float, sigma_db: float) -> float:
    """Closed-form E[Q^(2/beta)]; requires beta > 2."""
    if beta <= 2.0:
        raise InvalidInputError("E[Q^(2/beta)] diverges for beta <= 2")
    cs = SHADOW_COEF * sigma_db
    return (2.0 * np.pi / (beta * np.sin(2.0 * np.pi / beta))
            * np.exp(4.0 * cs * cs / (beta * beta)))


def v_factor_pdf(x, sigma_db: float, n_nodes: int = 96):
    """Density of V = e^(-c sigma xi) / zeta^2 at x > 0.

    f_V(x) = (1/(sqrt(2 pi) c sigma x^2)) * integral exp(-t^2/(2 c^2 sigma^2)
    + t - e^t/x) dt; the sigma -> 0 limit is x^-2 e^(-1/x).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise InvalidInputError("V is positive")
    if sigma_db == 0:
        out = np.exp(-1.0 / x) / (x * x)
        return out if out.ndim else float(out)
    cs = SHADOW_COEF * sigma_db
    u, w = gauss_hermite_standard_normal(n_nodes)
    t = cs * u                      # t ~ N(0, (c sigma)^2)
    et = np.exp(t)
    xx = np.atleast_1d(x)
    vals = (np.exp(t[None, :] - et[None, :] / xx[:, None]) * w[None, :]).sum(axis=1) / (xx * xx)
    return vals if x.ndim else float(vals[0])


def v_moment(beta: float, sigma_db: float) -> float:
    """Closed-form E[V^(2/beta)] = exp(2 c^2 sigma^2 / beta^2) Gamma(1 - 2/beta)."""
    if beta <= 2.0:
        raise InvalidInputError("E[V^(2/beta)] diverges for beta <= 2")
    cs = SHADOW_COEF * sigma_db
    return float(np.exp(2.0 * cs * cs / (beta * beta)) * _gamma(1.0 - 2.0 / beta))


def sample_q(sigma_db: float, rng: np.random.Generator, size=None):
    """Draws of Q from its sampling definition (two shadowing draws, two fades)."""
    cs = SHADOW_COEF * sigma_db
    g = rng.standard_normal(size) - rng.standard_normal(size)
    return np.exp(cs * g) * rng.exponential(1.0, size) / rng.exponential(1.0, size)


def sample_v(sigma_db: float, rng: np.random.Generator, size=None):
    cs = SHADOW_COEF * sigma_db
    return np.exp(-cs * rng.standard_normal(size)) / rng.exponential(1.0, size)
