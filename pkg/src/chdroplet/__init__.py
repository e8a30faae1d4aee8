"""Droplet formation in the mass-constrained Cahn-Hilliard free energy
on a periodic torus: closed-form constants, a constrained minimizer,
droplet diagnostics, and the sharp-interface asymptotic construction."""

from .analytic import (CriticalConstants, GeometrySummary,
                       PhenomenologicalResult, ProblemSpec, Regime, C_of_n,
                       C_star, D_of_K, K_star, critical_constants, eta_star,
                       geometry, minimize_phi, phi, uniform_energy)
from .energy import EnergyBreakdown, first_variation, free_energy, g_functional
from .field import (Field, Grid, ResolutionError, equimolar_droplet,
                    fractional_droplet, load_field, save_field, sharp_droplet,
                    translate, uniform_field)
from .minimizer import FlowConfig, MinimizeError, MinimizeReport, minimize
from .potential import COMPRESSIBILITY, SURFACE_TENSION

__all__ = [
    "COMPRESSIBILITY", "SURFACE_TENSION",
    "CriticalConstants", "GeometrySummary", "PhenomenologicalResult",
    "ProblemSpec", "Regime", "C_of_n", "C_star", "D_of_K", "K_star",
    "critical_constants", "eta_star", "geometry", "minimize_phi", "phi",
    "uniform_energy",
    "EnergyBreakdown", "first_variation", "free_energy", "g_functional",
    "Field", "Grid", "ResolutionError", "equimolar_droplet",
    "fractional_droplet", "load_field", "save_field", "sharp_droplet",
    "translate", "uniform_field",
    "FlowConfig", "MinimizeError", "MinimizeReport", "minimize",
]

__version__ = "1.0.0"
