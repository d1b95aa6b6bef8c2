"""Semiclassical spectra and eigenfunctions of 1D Schrodinger operators
-hbar^2 d^2/dx^2 + v(x) in a single potential well.

Bohr-Sommerfeld and generalized quantization conditions, Weyl counts,
uniform Airy-type eigenfunction approximations, classical observable
averages, and an independent brute-force reference solver.
"""

from .action import (
    ActionProfile,
    classical_average,
    classical_period,
    kinetic_cl,
    partial_action,
    phi,
    phi_prime,
    phi_value,
    power_law_closed_forms,
)
from .airy import AiryValues, airy_eval, airy_many, airy_scaled
from .langer import (
    Eigenfunction,
    LangerChart,
    build_chart,
    eigenfunction,
    error_control,
    normalization,
    uniform_u,
    uniform_u_prime,
)
from .oracle import OracleSpectrum, eigenvector, observable, solve_spectrum
from .potential import (
    Potential,
    TurningPoints,
    WellCertificate,
    certify_well,
    halfline_power_law,
    load_potential,
    make_polynomial,
    make_power_law,
    potential_from_spec,
    turning_points,
)
from .quantize import (
    CountResult,
    SemiclassicalLevel,
    bs_levels,
    disc_levels,
    disc_normalization,
    halfline_levels,
    weyl_count,
)

__version__ = "0.1.0"
