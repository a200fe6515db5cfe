"""Ground-state observables: photon clouds, tail exponents, phase diagrams."""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .waveguide import SystemConfig, ModeGrid, build_modes, equidistant_contacts
from .polaron import PolaronSolution, solve_self_consistent

__all__ = [
    "PhotonProfile",
    "PhaseDiagram",
    "PhaseDiagramError",
    "photon_profile",
    "fit_tail_exponent",
    "default_fit_window",
    "phase_diagram",
    "mode_amplitudes_to_sites",
]

#: relative imaginary residue allowed in the real-space amplitudes
IMAG_TOL = 1e-10


@dataclass(frozen=True)
class PhotonProfile:
    """Real-space ground-state photon cloud on the lattice."""

    x: np.ndarray          # site positions in units of dx
    amplitude: np.ndarray  # real amplitudes f_x
    occupation: np.ndarray  # |f_x|^2

    def total_photons(self):
        return float(np.sum(self.occupation))


@dataclass(frozen=True)
class PhaseDiagram:
    """Delta_r/Delta over an (alpha, contact spacing) grid."""

    alpha_grid: np.ndarray
    x_grid: np.ndarray
    delta_r: np.ndarray        # shape (len(alpha_grid), len(x_grid)), units of Delta
    localized_mask: np.ndarray


class PhaseDiagramError(RuntimeError):
    """Solve failure inside a sweep, annotated with the grid coordinates."""

    def __init__(self, alpha, x, cause):
        super().__init__(f"solve failed at alpha={alpha}, x={x}: {cause}")
        self.alpha = alpha
        self.x = x
        self.cause = cause


def mode_amplitudes_to_sites(values, config: SystemConfig):
    """Unitary transform of per-mode amplitudes onto the N lattice sites.

    Convention: a(x) = (1/sqrt(N)) sum_k a_k exp(-i k x).  For even N the two
    band-edge momenta describe the same lattice mode; their amplitudes are
    (by conjugate symmetry, equal) combined as (a_+ + a_-)/sqrt(2), which
    keeps the transform norm-preserving.
    """
    N = config.n_modes
    half = N // 2
    n = np.arange(-half, half + 1)
    spectral = np.zeros(N, dtype=complex)
    if N % 2 == 0:
        # fold the duplicated -N/2 endpoint onto +N/2
        spectral[(n[1:] % N)] = values[1:]
        spectral[half] = (values[0] + values[-1]) / np.sqrt(2.0)
    else:
        spectral[(n % N)] = values
    # fft implements sum_n a_n exp(-2 pi i n m / N) = sum_k a_k exp(-i k x_m)
    return np.fft.fft(spectral) / np.sqrt(N)


def photon_profile(solution: PolaronSolution, grid: ModeGrid,
                   config: SystemConfig) -> PhotonProfile:
    """Transform the displacements f_k to the lattice; amplitudes are real.

    Parseval holds exactly: sum_x |f_x|^2 = sum_k |f_k|^2.
    """
    fx = mode_amplitudes_to_sites(solution.f, config)
    scale = np.max(np.abs(fx))
    if scale > 0 and np.max(np.abs(fx.imag)) > IMAG_TOL * scale:
        raise ValueError("real-space amplitudes have non-negligible imaginary part")
    amp = fx.real.copy()
    return PhotonProfile(x=np.arange(config.n_modes, dtype=float),
                         amplitude=amp, occupation=amp**2)


def default_fit_window(config: SystemConfig):
    """Window (in sites) from 1.5x the outermost contact to 0.4x the lattice edge.

    Stays clear of the contact region on one side and of periodic images on
    the other.
    """
    lo = 1.5 * config.contacts[-1]
    hi = 0.4 * (config.n_modes - 1)
    return (lo, hi)


def fit_tail_exponent(profile: PhotonProfile, config: SystemConfig,
                      window=None):
    """Least-squares power-law exponent of the occupation tail.

    Fits log|f_x|^2 against log(x - x_outermost) inside `window` (site
    units); returns the positive exponent a of |f_x|^2 ~ (x - x_j)^(-a).
    """
    if window is None:
        window = default_fit_window(config)
    lo, hi = window
    x_out = config.contacts[-1]
    if lo <= x_out:
        raise ValueError("fit window must lie strictly outside the outermost contact")
    sel = (profile.x >= lo) & (profile.x <= hi)
    if np.count_nonzero(sel) < 10:
        raise ValueError("fit window too short (need at least 10 points)")
    occ = profile.occupation[sel]
    if np.any(occ <= 0.0):
        raise ValueError("fit window contains zero occupations")
    logd = np.log(profile.x[sel] - x_out)
    slope = np.polyfit(logd, np.log(occ), 1)[0]
    return -slope


def phase_diagram(template: SystemConfig, alpha_grid, x_grid,
                  jobs=None, **solver_kw) -> PhaseDiagram:
    """Independent polaron solves over alpha (rows) and contact spacing (cols).

    `x_grid` holds equidistant contact spacings in lattice sites; the number
    of contacts is taken from the template.  Cells are independent and fan
    out to a process pool when jobs > 1.
    """
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    x_grid = np.asarray(x_grid, dtype=int)
    tasks = [(a, x, template) for a in alpha_grid for x in x_grid]
    if jobs is not None and jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_solve_cell, tasks, chunksize=4))
    else:
        results = [_solve_cell(t, **solver_kw) for t in tasks]
    dr = np.array([r[0] for r in results]).reshape(alpha_grid.size, x_grid.size)
    loc = np.array([r[1] for r in results]).reshape(alpha_grid.size, x_grid.size)
    return PhaseDiagram(alpha_grid=alpha_grid, x_grid=x_grid,
                        delta_r=dr / template.delta, localized_mask=loc)


def _solve_cell(task, **solver_kw):
    alpha, x, template = task
    # zero spacing is the dipole limit: identical to one contact at the origin
    contacts = ((0,) if x == 0
                else equidistant_contacts(template.n_contacts, int(x)))
    cfg = SystemConfig(
        alpha=float(alpha), omega_c=template.omega_c, n_modes=template.n_modes,
        contacts=contacts, delta=template.delta, v_g=template.v_g)
    try:
        sol = solve_self_consistent(build_modes(cfg), cfg, **solver_kw)
    except Exception as exc:
        raise PhaseDiagramError(alpha, x, exc) from exc
    return sol.delta_r, sol.localized
