"""Periodic 1-bump stationary solutions of the Amari neural field equation
with a Heaviside firing rate: existence, verification and linear stability."""

__version__ = "0.1.0"

from .errors import (
    AdmissibilityError,
    ContractViolation,
    InvalidBracketError,
    InvalidInputError,
    NumericalError,
    ZeroEigenvalueError,
)
from .kernel import (
    Exponential,
    Kernel,
    OscillatoryDecay,
    PeriodizedKernel,
    Tabulated,
    WizardHat,
    eval_kernel,
    kernel_from_config,
    kernel_integral,
    periodized,
    periodized_antiderivative,
)
from .existence import (
    BumpSolution,
    VerificationReport,
    derivative_at_a,
    eval_solution,
    find_candidates,
    solutions,
    solve,
    verify,
)
from .spectrum import (
    CirculantApprox,
    SpectrumReport,
    SymbolMatrix,
    branches,
    circulant,
    classify,
    eigenfunction,
    spectrum_intervals,
    symbol,
)
from .bifurcation import CriticalPeriods, SweepRecord, critical_periods, locate_critical, sweep
