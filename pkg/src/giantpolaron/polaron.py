"""Self-consistent polaron solver and lab-frame observable maps.

The displacements f_k = g_tilde_k/(omega_k + Delta_r) and the renormalized
splitting Delta_r = Delta*exp(-2 sum_k |f_k|^2) are solved jointly by a
damped fixed-point iteration.  Below the localization transition the
iteration collapses to the Delta_r = 0 fixed point, which is detected and
returned exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .waveguide import ModeGrid, SystemConfig

__all__ = [
    "PolaronSolution",
    "ExcitationState",
    "ConvergenceError",
    "solve_self_consistent",
    "zero_point_energy",
    "effective_vertex",
    "lab_excitation",
    "lab_mode_occupation",
    "ground_state_excitation",
]

#: declare the localized phase once Delta_r drops below this fraction of Delta
EPS_LOCALIZED = 1e-8


class ConvergenceError(RuntimeError):
    """Fixed-point iteration failed; carries the last iterate."""

    def __init__(self, message, last_delta_r, residual, iterations):
        super().__init__(message)
        self.last_delta_r = last_delta_r
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class PolaronSolution:
    """Converged polaron parameters for one (alpha, geometry) point."""

    delta_r: float
    f: np.ndarray
    localized: bool
    residual: float
    iterations: int
    delta: float

    def __post_init__(self):
        self.f.setflags(write=False)


@dataclass
class ExcitationState:
    """Single-excitation amplitudes (c, phi_k) in the polaron frame."""

    c: complex
    phi: np.ndarray
    time: float = 0.0

    def norm_sq(self):
        return abs(self.c) ** 2 + float(np.sum(np.abs(self.phi) ** 2))


def _displacements(grid: ModeGrid, delta_r):
    f = np.zeros_like(grid.g_tilde)
    a = grid.active
    f[a] = grid.g_tilde[a] / (grid.omega[a] + delta_r)
    return f


def solve_self_consistent(grid: ModeGrid, config: SystemConfig, *,
                          damping=0.5, tol=1e-10, max_iter=100_000,
                          eps_localized=EPS_LOCALIZED) -> PolaronSolution:
    """Solve Delta_r = Delta*exp(-2 sum|f_k|^2) with f_k = g_tilde/(omega+Delta_r).

    Damped iteration d^{m+1} = (1-eta) d^m + eta*F(d^m) started at the bare
    splitting.  Returns the localized fixed point (Delta_r = 0 exactly,
    f_k = g_tilde_k/omega_k) once the iterate drops below eps_localized*Delta.
    Raises ConvergenceError after max_iter non-converged steps.
    """
    delta = config.delta
    a = grid.active
    gt2 = np.abs(grid.g_tilde[a]) ** 2
    w = grid.omega[a]

    dr = delta
    residual = np.inf
    for it in range(1, max_iter + 1):
        mapped = delta * np.exp(-2.0 * np.sum(gt2 / (w + dr) ** 2))
        residual = abs(dr - mapped)
        if residual < tol * delta and mapped >= eps_localized * delta:
            dr = mapped
            break
        dr = (1.0 - damping) * dr + damping * mapped
        if dr < eps_localized * delta:
            f = np.zeros_like(grid.g_tilde)
            f[a] = grid.g_tilde[a] / grid.omega[a]
            return PolaronSolution(delta_r=0.0, f=f, localized=True,
                                   residual=0.0, iterations=it, delta=delta)
    else:
        raise ConvergenceError(
            f"no fixed point after {max_iter} iterations (residual {residual:.3e})",
            last_delta_r=dr, residual=residual, iterations=max_iter)

    return PolaronSolution(delta_r=dr, f=_displacements(grid, dr),
                           localized=False, residual=residual, iterations=it,
                           delta=delta)


def ground_state_energy_functional(f, grid: ModeGrid, config: SystemConfig):
    """Variational energy E(f) whose minimizer is the polaron solution.

    E(f) = -(Delta/2) exp(-2 sum|f|^2) + sum_k [omega|f_k|^2 - 2 Re(f_k* g_k)].
    Used by stationarity checks; `f` must vanish on inert modes.
    """
    a = grid.active
    fa = f[a]
    bath = np.sum(grid.omega[a] * np.abs(fa) ** 2
                  - 2.0 * np.real(np.conj(fa) * grid.g_tilde[a]))
    return -0.5 * config.delta * np.exp(-2.0 * np.sum(np.abs(fa) ** 2)) + bath


def zero_point_energy(solution: PolaronSolution, grid: ModeGrid):
    """Ground-state energy shift E_ZP = -Delta_r/2 + sum_k f_k(omega f_k - 2 Re g_k).

    For complex contact sums the displacement terms combine into the real
    expression omega|f_k|^2 - 2 Re(f_k* g_tilde_k).
    """
    a = grid.active
    fa = solution.f[a]
    bath = np.sum(grid.omega[a] * np.abs(fa) ** 2
                  - 2.0 * np.real(np.conj(fa) * grid.g_tilde[a]))
    return -0.5 * solution.delta_r + bath


def effective_vertex(solution: PolaronSolution):
    """Couplings 2*Delta_r*f_k of the number-preserving Hamiltonian.

    Real for geometries with a symmetric contact sum; complex in general.
    All vertices vanish in the localized phase and at alpha = 0.
    """
    return 2.0 * solution.delta_r * solution.f


def ground_state_excitation(solution: PolaronSolution):
    """Ground-state excitation probability (1 - Delta_r/Delta)/2."""
    return 0.5 * (1.0 - solution.delta_r / solution.delta)


def lab_excitation(state: ExcitationState, solution: PolaronSolution, *,
                   tol=1e-6):
    """Lab-frame atomic excitation probability of a single-excitation state.

    P_e = (Delta_r/Delta)[|c|^2 + 2 Re(c A) + 2|A|^2] + P_e^GS with
    A = sum_k f_k phi_k*.  Raises if the result leaves [-tol, 1+tol];
    the value is clamped to [0, 1] on return.
    """
    A = np.sum(solution.f * np.conj(state.phi))
    ratio = solution.delta_r / solution.delta
    pe = ratio * (abs(state.c) ** 2 + 2.0 * np.real(state.c * A)
                  + 2.0 * abs(A) ** 2) + ground_state_excitation(solution)
    if pe < -tol or pe > 1.0 + tol:
        raise ValueError(f"excitation probability {pe} outside [0, 1]")
    return min(max(pe, 0.0), 1.0)


def lab_mode_occupation(state: ExcitationState, solution: PolaronSolution,
                        k_index=None):
    """Lab-frame occupation n_k = |f_k|^2 + |phi_k|^2 - 2 Re[c phi_k^* f_k].

    Returns the full array when `k_index` is None.
    """
    n = (np.abs(solution.f) ** 2 + np.abs(state.phi) ** 2
         - 2.0 * np.real(state.c * np.conj(state.phi) * solution.f))
    return n if k_index is None else float(n[k_index])
