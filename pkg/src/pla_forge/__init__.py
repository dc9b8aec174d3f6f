"""Composite π pulses robust to power-law amplitude drifts.

Design sequences that satisfy the PLA(n) criteria, and measure how well they
reject amplitude noise through filter functions, low-order Magnus theory and
Monte Carlo simulation of a driven qubit.
"""

from .envelope import Envelope, raised_cosine, square, truncated_gaussian
from .sequences import (
    PulseSequence,
    catalog,
    fidelity,
    gate_angle,
    get,
    lab_phases,
    toggling_phases,
)
from .design import (
    ConstraintReport,
    SolutionNotFound,
    SolverConfig,
    check_pla,
    closed_form_pla1,
    continuous_moment,
    objective,
    solve_pla,
    toggled_moment,
)
from .response import (
    TheoryPrediction,
    dc_limit_quadrature,
    dc_second_order,
    filter_function,
    filter_order,
    first_order_infidelity,
    regime_boundaries,
    regime_map,
    theory_curve,
)
from .mc import NoiseModel, ScanResult, mc_scan, propagate, sample_noise

__version__ = "0.1.0"
