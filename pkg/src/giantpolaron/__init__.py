"""Polaron-based simulations of a giant atom ultrastrongly coupled to an
Ohmic waveguide: equilibrium renormalization and photon clouds, effective
Markovian rates, exact single-excitation dynamics, and the reduced
multi-delay model."""

__version__ = "0.1.0"

from .waveguide import (SystemConfig, ModeGrid, build_modes, modulation,
                        spectral_density, equidistant_contacts)
from .polaron import (PolaronSolution, ExcitationState, ConvergenceError,
                      solve_self_consistent, zero_point_energy,
                      effective_vertex, lab_excitation, lab_mode_occupation,
                      ground_state_excitation)
from .equilibrium import (PhotonProfile, PhaseDiagram, photon_profile,
                          fit_tail_exponent, phase_diagram)
from .markovian import MarkovObservables, decay_rate, lamb_shift
from .dynamics import (Trajectory, integrate, spontaneous_emission,
                       field_snapshot, stability_dt)
from .dde import (DdeParams, PoleReport, integrate_dde, laplace_resolvent,
                  resolvent_bracket, bound_state_residual, bound_state_scan)

__all__ = [
    "SystemConfig", "ModeGrid", "build_modes", "modulation",
    "spectral_density", "equidistant_contacts",
    "PolaronSolution", "ExcitationState", "ConvergenceError",
    "solve_self_consistent", "zero_point_energy", "effective_vertex",
    "lab_excitation", "lab_mode_occupation", "ground_state_excitation",
    "PhotonProfile", "PhaseDiagram", "photon_profile", "fit_tail_exponent",
    "phase_diagram",
    "MarkovObservables", "decay_rate", "lamb_shift",
    "Trajectory", "integrate", "spontaneous_emission", "field_snapshot",
    "stability_dt",
    "DdeParams", "PoleReport", "integrate_dde", "laplace_resolvent",
    "resolvent_bracket", "bound_state_residual", "bound_state_scan",
]
