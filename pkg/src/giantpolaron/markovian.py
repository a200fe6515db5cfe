"""Effective Markovian observables at the renormalized frequency.

The relaxation rate is the spectral density evaluated at Delta_r; the Lamb
shift is a principal-value integral over the full band, computed with exact
pole subtraction on composite Gauss-Legendre panels.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .waveguide import SystemConfig, modulation, spectral_density
from .polaron import PolaronSolution

__all__ = ["MarkovObservables", "decay_rate", "lamb_shift", "markov_point"]


@dataclass(frozen=True)
class MarkovObservables:
    gamma_r: float
    lamb_shift: float
    delta_r_used: float


def decay_rate(solution: PolaronSolution, config: SystemConfig):
    """Relaxation rate gamma_r = J(Delta_r) = pi*alpha*Delta_r*G(Delta_r)."""
    if solution.delta_r == 0.0:
        return 0.0
    return float(spectral_density(solution.delta_r, config))


def _panel_breakpoints(config: SystemConfig, delta_r, omega_max):
    """Breakpoints resolving the G oscillations and refined around the pole."""
    span = config.contact_positions[-1] - config.contact_positions[0]
    h = omega_max / 64.0
    if span > 0:
        h = min(h, config.v_g / (10.0 * config.n_contacts * span))
    pts = list(np.arange(0.0, omega_max, h)) + [omega_max]
    # geometric refinement towards the subtracted pole at Delta_r
    for m in range(1, 9):
        for s in (-1.0, 1.0):
            p = delta_r + s * h / 2.0**m
            if 0.0 < p < omega_max:
                pts.append(p)
    pts.append(delta_r)
    pts = np.unique(np.asarray(pts))
    return pts[(pts >= 0.0) & (pts <= omega_max)]


def lamb_shift(solution: PolaronSolution, config: SystemConfig, *,
               gl_order=16, refine=1):
    """Lamb shift delta = (2 Delta_r^2/pi) PV int_0^{2 omega_c} J(w)/[(Delta_r-w)(w+Delta_r)^2] dw.

    Writes the integrand as h(w)/(Delta_r - w) with h = J/(w+Delta_r)^2,
    integrates [h(w) - h(Delta_r)]/(Delta_r - w) by panelwise quadrature and
    adds the analytic remainder h(Delta_r)*ln|Delta_r/(omega_max - Delta_r)|.
    Returns 0 for a localized solution.  `refine` multiplies the panel count
    (used by convergence checks).
    """
    dr = solution.delta_r
    if dr == 0.0:
        return 0.0
    omega_max = 2.0 * config.omega_c
    if dr >= omega_max:
        raise ValueError("Delta_r lies outside the integration band")

    def h(w):
        return spectral_density(w, config) / (w + dr) ** 2

    h_pole = h(dr)

    def integrand(w):
        out = np.empty_like(w)
        near = np.abs(dr - w) < 1e-9 * dr
        out[near] = -_h_prime(h, dr)
        far = ~near
        out[far] = (h(w[far]) - h_pole) / (dr - w[far])
        return out

    base = _panel_breakpoints(config, dr, omega_max)
    if refine > 1:
        pieces = [np.linspace(a, b, refine + 1) for a, b in zip(base, base[1:])]
        base = np.unique(np.concatenate(pieces))
    nodes, weights = np.polynomial.legendre.leggauss(gl_order)
    a = base[:-1]
    b = base[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    w_eval = mid[:, None] + half[:, None] * nodes[None, :]
    vals = integrand(w_eval.ravel()).reshape(w_eval.shape)
    integral = float(np.sum(half[:, None] * weights[None, :] * vals))

    integral += h_pole * np.log(dr / (omega_max - dr))
    return 2.0 * dr**2 / np.pi * integral


def _h_prime(h, x, rel=1e-6):
    e = rel * x
    return (h(np.array([x + e]))[0] - h(np.array([x - e]))[0]) / (2.0 * e)


def markov_point(solution: PolaronSolution, config: SystemConfig) -> MarkovObservables:
    """Bundle gamma_r and the Lamb shift for a converged solution."""
    return MarkovObservables(gamma_r=decay_rate(solution, config),
                             lamb_shift=lamb_shift(solution, config),
                             delta_r_used=solution.delta_r)
