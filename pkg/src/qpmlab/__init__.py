"""Quasi-phase-matching design tools for periodically poled KTP."""

__version__ = "0.1.0"

from .dispersion import CrystalSpec, SellmeierModel, load_crystal, refractive_index, wave_vector
from .errors import (
    ConvergenceError,
    DomainError,
    EmptySupportError,
    InfeasibleProcess,
    OpenSupportError,
    OutOfTuningRange,
    QpmError,
    SolverError,
)
from .qpm import (
    Nonlinearity,
    ProcessType,
    QpmProcess,
    effective_nonlinearity,
    find_crossings,
    fourier_coefficient,
    period_curve,
    phase_mismatch,
    solve_degenerate_pump,
    solve_poling_period,
)
from .spectra import (
    JsiGrid,
    SpectrumCurve,
    TuningCurve,
    degenerate_temperature,
    jsi,
    pump_envelope,
    spectrum,
    tuning_curve,
    tuning_points,
)
