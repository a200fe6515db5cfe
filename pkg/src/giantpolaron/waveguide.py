"""Discrete mode model of the transmission line and giant-atom couplings.

The waveguide is an LC-chain of N sites with lattice spacing dx = v_g/omega_c
and periodic momenta k_n = 2*pi*n/L.  The atom touches the line at a set of
lattice sites (the contact points), which imprints an interference pattern on
the couplings and on the spectral density.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

__all__ = [
    "SystemConfig",
    "ModeGrid",
    "build_modes",
    "modulation",
    "spectral_density",
    "equidistant_contacts",
]


def equidistant_contacts(n_contacts, spacing, first=0):
    """Contact sites (0, spacing, 2*spacing, ...) shifted to start at `first`."""
    return tuple(first + j * spacing for j in range(n_contacts))


@dataclass(frozen=True)
class SystemConfig:
    """Physical and numerical parameters of the atom-waveguide system.

    Energies are measured in units of the bare splitting (delta = 1 by
    default), positions in units of the lattice spacing dx = v_g/omega_c.
    `contacts` are lattice site indices, strictly increasing, within [0, N).
    """

    alpha: float
    omega_c: float
    n_modes: int
    contacts: tuple = (0,)
    delta: float = 1.0
    v_g: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "contacts", tuple(self.contacts))
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.omega_c <= 0:
            raise ValueError("omega_c must be positive")
        if self.v_g <= 0:
            raise ValueError("v_g must be positive")
        if self.n_modes < 2:
            raise ValueError("n_modes must be at least 2")
        if len(self.contacts) == 0:
            raise ValueError("at least one contact point is required")
        sites = self.contacts
        if any(int(s) != s for s in sites):
            raise ValueError("contacts must be integer lattice sites")
        if any(b <= a for a, b in zip(sites, sites[1:])):
            raise ValueError("contacts must be strictly increasing")
        if sites[0] < 0 or sites[-1] >= self.n_modes:
            raise ValueError(f"contacts must lie within [0, {self.n_modes})")

    @property
    def dx(self):
        return self.v_g / self.omega_c

    @property
    def length(self):
        return self.n_modes * self.dx

    @property
    def n_contacts(self):
        return len(self.contacts)

    @property
    def contact_positions(self):
        """Physical contact positions x_j."""
        return np.asarray(self.contacts, dtype=float) * self.dx

    @property
    def contact_spacing(self):
        """Common spacing (in sites) of equidistant contacts; None otherwise."""
        if self.n_contacts == 1:
            return 0
        gaps = np.diff(self.contacts)
        return int(gaps[0]) if np.all(gaps == gaps[0]) else None


@dataclass(frozen=True)
class ModeGrid:
    """Momenta, frequencies and coupling amplitudes of the discrete line.

    The grid covers n in {-N//2, ..., N//2}; for even N both band-edge
    momenta +-pi/dx are present and describe the same lattice mode (the
    documented grid convention).  The k = 0 mode has omega = 0 and zero
    coupling; it is flagged inert and excluded from all sums.
    """

    k: np.ndarray
    omega: np.ndarray
    g_tilde: np.ndarray
    g_single: np.ndarray
    active: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("k", "omega", "g_tilde", "g_single", "active"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    @property
    def n_points(self):
        return self.k.size


def build_modes(config: SystemConfig) -> ModeGrid:
    """Build the mode grid and the giant-atom couplings for `config`.

    omega_k = omega_c*sqrt(2 - 2 cos(k dx)), g_k = g*sqrt(omega_k/2L) with
    g = sqrt(pi*v_g*alpha), and g_tilde_k = (g_k/N_c)*sum_j exp(i k x_j).
    """
    N = config.n_modes
    dx = config.dx
    L = config.length
    n = np.arange(-(N // 2), N // 2 + 1)
    k = 2.0 * np.pi * n / L
    omega = config.omega_c * np.sqrt(np.maximum(2.0 - 2.0 * np.cos(k * dx), 0.0))
    g = np.sqrt(np.pi * config.v_g * config.alpha)
    g_single = g * np.sqrt(omega / (2.0 * L))
    phases = np.exp(1j * np.outer(k, config.contact_positions)).sum(axis=1)
    g_tilde = g_single * phases / config.n_contacts
    active = omega > 0.0
    g_tilde = np.where(active, g_tilde, 0.0)
    return ModeGrid(k=k, omega=omega, g_tilde=g_tilde, g_single=g_single,
                    active=active)


def modulation(omega, config: SystemConfig):
    """Interference modulation G(omega) = |sum_j exp(i omega x_j/v_g)|^2 / N_c^2.

    Evaluated through the contact sum, which is finite everywhere (the
    equidistant closed form has removable singularities).  Accepts scalars or
    arrays; G(0) = 1 and 0 <= G <= 1.
    """
    w = np.asarray(omega, dtype=float)
    phase = np.exp(1j * np.multiply.outer(w, config.contact_positions / config.v_g))
    G = np.abs(phase.sum(axis=-1)) ** 2 / config.n_contacts**2
    return G if w.ndim else float(G)


def spectral_density(omega, config: SystemConfig):
    """Continuum spectral density J(omega) = pi*alpha*omega*G(omega)."""
    w = np.asarray(omega, dtype=float)
    J = np.pi * config.alpha * w * modulation(w, config)
    return J if w.ndim else float(J)
