"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

from giantpolaron import SystemConfig, build_modes, solve_self_consistent
from giantpolaron.waveguide import equidistant_contacts


def make_config(alpha=0.2, omega_c=3.0, n_modes=501, n_contacts=1,
                spacing=0, first=0, **kw):
    """Small-system config factory for unit tests."""
    if n_contacts == 1 or spacing == 0:
        contacts = (first,)
    else:
        contacts = equidistant_contacts(n_contacts, spacing, first)
    return SystemConfig(alpha=alpha, omega_c=omega_c, n_modes=n_modes,
                        contacts=contacts, **kw)


def solved(config, **kw):
    """Build the mode grid and solve the self-consistent equations."""
    grid = build_modes(config)
    return grid, solve_self_consistent(grid, config, **kw)


@pytest.fixture(scope="session")
def medium_case():
    """A delocalized multi-contact solution reused by several tests."""
    config = make_config(alpha=0.5, omega_c=3.0, n_modes=2001,
                         n_contacts=3, spacing=20)
    grid, solution = solved(config)
    return config, grid, solution
