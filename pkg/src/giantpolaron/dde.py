"""Reduced multi-delay model for the excited-state amplitude.

Dropping the V_local photon-photon term, the mode sum can be integrated out
and the polaron-frame amplitude obeys

    dc/dt = -(gamma/2 N_c^2) sum_{j=0}^{N_c-1} (N_c - j) e^{i Delta_r j zeta}
            c(t - j zeta) Theta(t - j zeta),

with the bare rate gamma = J_Ohm(Delta_r) = pi*alpha*Delta_r and the
single-hop delay zeta = x/v_g.  (The paper-level short-time decay quote
J_Ohm(Delta_r) and the j = 0 term of this equation differ by a factor
1/N_c; this module keeps the equation's convention, so for t < zeta the
amplitude decays at gamma/(2 N_c).)  The Laplace resolvent of the rotated
amplitude d(t) = e^{-i Delta_r t/2} c(t) exposes the purely imaginary poles
that signal bound states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from .waveguide import SystemConfig, build_modes, equidistant_contacts
from .polaron import PolaronSolution, solve_self_consistent

__all__ = [
    "DdeParams",
    "PoleReport",
    "integrate_dde",
    "resolvent_bracket",
    "laplace_resolvent",
    "bound_state_residual",
    "bound_state_scan",
]

#: two roots in alpha closer than this count as a coexisting (oscillating) pair
COEXIST_ALPHA_TOL = 1e-3


@dataclass(frozen=True)
class DdeParams:
    """Parameters of the reduced delay equation."""

    gamma: float
    delta_r: float
    zeta: float
    n_contacts: int

    def __post_init__(self):
        if self.gamma < 0 or self.zeta < 0 or self.n_contacts < 1:
            raise ValueError("gamma, zeta must be nonnegative and n_contacts >= 1")

    @classmethod
    def from_solution(cls, solution: PolaronSolution, config: SystemConfig):
        spacing = config.contact_spacing
        if spacing is None:
            raise ValueError("reduced model requires equidistant contacts")
        return cls(gamma=np.pi * config.alpha * solution.delta_r,
                   delta_r=solution.delta_r,
                   zeta=spacing * config.dx / config.v_g,
                   n_contacts=config.n_contacts)


@dataclass(frozen=True)
class PoleReport:
    """One purely-imaginary-pole solution of the bound-state condition."""

    n: int
    alpha: float
    delta_r_zeta_solution: float
    residual: float
    coexisting: tuple = ()
    spacing: float = None


def _delay_weights(params: DdeParams):
    j = np.arange(params.n_contacts)
    return (params.gamma / (2.0 * params.n_contacts**2) * (params.n_contacts - j)
            * np.exp(1j * params.delta_r * j * params.zeta))


def integrate_dde(params: DdeParams, c0, t_max, dt=None):
    """Method-of-steps integration of the delay equation; returns (t, c).

    The grid step divides zeta exactly, so full Runge-Kutta steps hit stored
    history nodes and the half-step stage values are interpolated with cubic
    Hermite polynomials from the stored amplitude and derivative.  History is
    identically zero for t < 0 and c(0) = c0.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    Nc = params.n_contacts
    weights = _delay_weights(params)

    if params.zeta == 0.0 or Nc == 1:
        # no genuine delays: plain linear ODE dc/dt = -(sum of weights) c
        rate = np.sum(weights)
        t = np.linspace(0.0, t_max, 2001)
        return t, c0 * np.exp(-rate * t)

    if dt is None:
        dt = min(params.zeta / 16.0,
                 0.05 / max(params.gamma, params.delta_r, 1.0 / params.zeta))
    m = max(1, int(np.ceil(params.zeta / dt)))
    dt = params.zeta / m
    n_steps = int(np.ceil(t_max / dt))

    # The history jumps from 0 to c0 at t = 0, so dc/dt is one-sided at every
    # echo node j*zeta.  Right limits (d_right) feed k1 and the left end of a
    # Hermite interval; left limits (d_left) close the k4 stage and the right
    # end of an interval.  Away from echo nodes the two coincide.
    c = np.zeros(n_steps + 1, dtype=complex)
    d_right = np.zeros(n_steps + 1, dtype=complex)
    d_left = np.zeros(n_steps + 1, dtype=complex)
    c[0] = c0

    def delayed(i_float, left):
        """History value at fractional grid index i_float (Hermite)."""
        if i_float < 0.0 or (left and i_float == 0.0):
            return 0.0
        i0 = int(np.floor(i_float))
        s = i_float - i0
        if s == 0.0:
            return c[i0]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s**2 * (3 - 2 * s)
        h11 = s**2 * (s - 1)
        return (h00 * c[i0] + h10 * dt * d_right[i0]
                + h01 * c[i0 + 1] + h11 * dt * d_left[i0 + 1])

    def rhs(i_float, value, left=False):
        """dc/dt at grid index i_float given the local value."""
        total = weights[0] * value
        for j in range(1, Nc):
            total += weights[j] * delayed(i_float - j * m, left)
        return -total

    d_right[0] = rhs(0.0, c[0])
    for i in range(n_steps):
        k1 = d_right[i]
        k2 = rhs(i + 0.5, c[i] + 0.5 * dt * k1)
        k3 = rhs(i + 0.5, c[i] + 0.5 * dt * k2)
        k4 = rhs(i + 1.0, c[i] + dt * k3, left=True)
        c[i + 1] = c[i] + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        d_left[i + 1] = rhs(i + 1.0, c[i + 1], left=True)
        d_right[i + 1] = rhs(i + 1.0, c[i + 1])

    t = np.arange(n_steps + 1) * dt
    return t, c


def resolvent_bracket(s, params: DdeParams):
    """Bracket B(s) with c_hat(s) = 1/B(s) for the rotated amplitude.

    B(s) = s + i Delta_r/2 + (gamma/2 N_c^2) sum_j (N_c - j)
           exp[(-s + i Delta_r/2) j |zeta|].
    """
    s = np.asarray(s, dtype=complex)
    Nc = params.n_contacts
    j = np.arange(Nc)
    coeff = params.gamma / (2.0 * Nc**2) * (Nc - j)
    expo = np.exp(np.multiply.outer(-s + 0.5j * params.delta_r,
                                    j * abs(params.zeta)))
    B = s + 0.5j * params.delta_r + expo @ coeff
    return B if B.ndim else complex(B)


def laplace_resolvent(s, params: DdeParams, *, pole_tol=1e-14):
    """c_hat(s) = 1/B(s); raises ZeroDivisionError at a pole (|B| < pole_tol)."""
    B = resolvent_bracket(s, params)
    if np.any(np.abs(B) < pole_tol):
        raise ZeroDivisionError("resolvent evaluated at a pole of c_hat")
    return 1.0 / B


def bound_state_residual(n, params: DdeParams):
    """Residual of the purely-imaginary-pole condition for index n.

    R = Delta_r*zeta - 2 n pi/N_c + (J_Ohm(Delta_r)*zeta/2 N_c) cot(n pi/N_c);
    a root R = 0 marks the pole s_n = -i 2 n pi/(N_c zeta).
    """
    Nc = params.n_contacts
    if n % Nc == 0:
        raise ValueError("n must not be a multiple of n_contacts (cot singularity)")
    cot = 1.0 / np.tan(np.pi * n / Nc)
    return (params.delta_r * params.zeta - 2.0 * np.pi * n / Nc
            + params.gamma * params.zeta / (2.0 * Nc) * cot)


def _scan_fixed_spacing(template: SystemConfig, alpha_grid, n_values,
                        spacing, solver_kw):
    """Alpha-roots of the bound-state condition at one contact spacing."""
    cache = {}

    def params_at(alpha):
        if alpha not in cache:
            cfg = SystemConfig(
                alpha=float(alpha), omega_c=template.omega_c,
                n_modes=template.n_modes,
                contacts=equidistant_contacts(template.n_contacts, spacing),
                delta=template.delta, v_g=template.v_g)
            sol = solve_self_consistent(build_modes(cfg), cfg, **solver_kw)
            cache[alpha] = DdeParams.from_solution(sol, cfg)
        return cache[alpha]

    reports = []
    for n in n_values:
        if n % template.n_contacts == 0:
            raise ValueError(f"n={n} is a multiple of n_contacts")
        res = np.array([bound_state_residual(n, params_at(a)) for a in alpha_grid])
        for i in np.flatnonzero(np.sign(res[:-1]) * np.sign(res[1:]) < 0):
            lo, hi = alpha_grid[i], alpha_grid[i + 1]
            flo = res[i]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                fmid = bound_state_residual(n, params_at(mid))
                if flo * fmid <= 0:
                    hi = mid
                else:
                    lo, flo = mid, fmid
                if hi - lo < 1e-12:
                    break
            alpha_root = 0.5 * (lo + hi)
            p = params_at(alpha_root)
            reports.append(PoleReport(
                n=int(n), alpha=float(alpha_root),
                delta_r_zeta_solution=p.delta_r * p.zeta,
                residual=float(bound_state_residual(n, p)),
                spacing=float(spacing)))
    return reports


def bound_state_scan(template: SystemConfig, alpha_grid, n_values, *,
                     spacing=None, spacing_grid=None, solver_kw=None,
                     coexist_tol=COEXIST_ALPHA_TOL):
    """Roots of the bound-state condition over an alpha sweep.

    For every pole index n the residual is evaluated on `alpha_grid` (each
    point requires a polaron solve supplying Delta_r) and sign changes are
    bisected to a root.  With a single `spacing`, roots of different n lying
    within `coexist_tol` in alpha are cross-referenced as oscillating-bound-
    state candidates.  With a `spacing_grid`, the alpha-root curves
    alpha_n(x) are traced over the spacings and a crossing of two curves is
    reported as the coexistence locus: both members carry the interpolated
    (alpha, spacing) of the crossing in their report.
    """
    solver_kw = solver_kw or {}
    if spacing_grid is None:
        if spacing is None:
            spacing = template.contact_spacing
        if not spacing:
            raise ValueError("bound-state scan requires a positive contact spacing")
        reports = _scan_fixed_spacing(template, alpha_grid, n_values,
                                      int(spacing), solver_kw)
        flagged = []
        for r in reports:
            mates = tuple(sorted(o.n for o in reports
                                 if o.n != r.n and abs(o.alpha - r.alpha) < coexist_tol))
            flagged.append(PoleReport(n=r.n, alpha=r.alpha,
                                      delta_r_zeta_solution=r.delta_r_zeta_solution,
                                      residual=r.residual, coexisting=mates,
                                      spacing=r.spacing))
        return flagged

    alpha_grid = np.asarray(alpha_grid, dtype=float)
    spacing_grid = [int(x) for x in spacing_grid]
    per_spacing = {x: _scan_fixed_spacing(template, alpha_grid, n_values,
                                          x, solver_kw)
                   for x in spacing_grid}
    reports = []
    for x in spacing_grid:
        for r in per_spacing[x]:
            mates = tuple(sorted(o.n for o in per_spacing[x]
                                 if o.n != r.n and abs(o.alpha - r.alpha) < coexist_tol))
            reports.append(PoleReport(n=r.n, alpha=r.alpha,
                                      delta_r_zeta_solution=r.delta_r_zeta_solution,
                                      residual=r.residual, coexisting=mates,
                                      spacing=r.spacing))

    # trace alpha_n(x) and report crossings of two curves as coexistence loci
    curves = {}
    for x in spacing_grid:
        for r in per_spacing[x]:
            curves.setdefault(r.n, {})[x] = r.alpha
    ns = sorted(curves)
    for i, n1 in enumerate(ns):
        for n2 in ns[i + 1:]:
            shared = sorted(set(curves[n1]) & set(curves[n2]))
            gaps = [curves[n1][x] - curves[n2][x] for x in shared]
            for j in range(len(shared) - 1):
                if gaps[j] == 0.0 or gaps[j] * gaps[j + 1] < 0:
                    x0, x1 = shared[j], shared[j + 1]
                    w = abs(gaps[j]) / (abs(gaps[j]) + abs(gaps[j + 1]))
                    x_star = x0 + w * (x1 - x0)
                    a_star = ((1 - w) * curves[n1][x0] + w * curves[n1][x1])
                    cfg = SystemConfig(
                        alpha=float(a_star), omega_c=template.omega_c,
                        n_modes=template.n_modes,
                        contacts=equidistant_contacts(template.n_contacts,
                                                      int(round(x_star))),
                        delta=template.delta, v_g=template.v_g)
                    sol = solve_self_consistent(build_modes(cfg), cfg,
                                                **solver_kw)
                    p_star = DdeParams(
                        gamma=np.pi * cfg.alpha * sol.delta_r,
                        delta_r=sol.delta_r,
                        zeta=x_star * template.dx / template.v_g,
                        n_contacts=template.n_contacts)
                    for n, mate in ((n1, n2), (n2, n1)):
                        reports.append(PoleReport(
                            n=int(n), alpha=float(a_star),
                            delta_r_zeta_solution=float(
                                p_star.delta_r * p_star.zeta),
                            residual=float(bound_state_residual(n, p_star)),
                            coexisting=(int(mate),), spacing=float(x_star)))
    return reports
