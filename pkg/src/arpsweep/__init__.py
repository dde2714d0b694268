"""Chirped-drive two-level sweeps with drive-induced dissipation.

A density-matrix propagator for a driven two-level system whose drive
frequency is ramped linearly through resonance.  The drive itself feeds a
dissipation channel with rate omega1^2 * tau_c, so pushing the amplitude
harder eventually destroys the very transfer it enables; grid scans expose
the resulting optimal ridge rate = k * omega1^2.
"""
from .core import (GAUSS, RECT, BlochVector, DensityState, PulseProfile,
                   RelaxationParams, SweepParams, bloch_from_state,
                   make_sweep_params)
from .liouvillian import EnergyPair, adiabats, build_generator
from .lz import (arp_probability, lz_probability, phenom_max, phenom_tmax,
                 phenom_transfer)
from .propagator import (IntegrationError, IntegratorSettings, Trajectory,
                         evolve, max_transfer, unitary_oracle)
from .pulses import (amplitude, detuning, equal_area_peak, gaussian_shape,
                     gaussian_width)
from .sweeps import (ContourDataset, GridSpec, RidgeError, RidgeFit,
                     RidgePoint, TaucFamily, extract_ridge, fit_parabola,
                     grid_sweep, tauc_family)

__version__ = "0.1.0"

__all__ = [
    "GAUSS", "RECT", "BlochVector", "DensityState", "PulseProfile",
    "RelaxationParams", "SweepParams", "bloch_from_state",
    "make_sweep_params",
    "EnergyPair", "adiabats", "build_generator",
    "arp_probability", "lz_probability", "phenom_max", "phenom_tmax",
    "phenom_transfer",
    "IntegrationError", "IntegratorSettings", "Trajectory", "evolve",
    "max_transfer", "unitary_oracle",
    "amplitude", "detuning", "equal_area_peak", "gaussian_shape",
    "gaussian_width",
    "ContourDataset", "GridSpec", "RidgeError", "RidgeFit", "RidgePoint",
    "TaucFamily", "extract_ridge", "fit_parabola", "grid_sweep",
    "tauc_family",
    "__version__",
]
