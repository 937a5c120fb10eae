"""Quasi-phase-matching: phase mismatch, period and pump solvers, poling nonlinearity."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dispersion import CrystalSpec, wave_vector
from .errors import DomainError, InfeasibleProcess, SolverError
from .numerics import bisect, scan_brackets

# Second-order coefficients of KTP in pm/V (Vanherzeele 1992).
D_COEFFICIENTS = {"d24": 3.64, "d32": 4.35, "d33": 16.9}

# Λ(λp) can be steep (dΛ/dλp ~ 200 for type-II m=3), so pump solves go
# well past 1e-6 µm to keep round-trip periods within 1e-4 µm.
PUMP_X_TOL = 1e-9  # µm
DEFAULT_HALF_WINDOW = 0.010  # µm, around a caller hint


class ProcessType(enum.Enum):
    """Polarization configuration, as (pump, signal, idler) crystal axes."""

    TYPE0 = ("0", ("z", "z", "z"), "d33")
    TYPE1 = ("I", ("z", "y", "y"), "d32")
    TYPE2 = ("II", ("y", "y", "z"), "d24")

    def __init__(self, label, axes, d_key):
        self.label = label
        self.axes = axes
        self.d_key = d_key

    @property
    def lab_polarizations(self):
        lab = {"y": "H", "z": "V"}
        p, s, i = self.axes
        return f"{lab[p]}->{lab[s]}{lab[i]}"

    @property
    def same_axis(self):
        return self.axes[1] == self.axes[2]

    @classmethod
    def parse(cls, text):
        key = str(text).strip().upper().replace("TYPE", "").replace("-", "").replace("_", "")
        aliases = {"0": cls.TYPE0, "I": cls.TYPE1, "1": cls.TYPE1, "II": cls.TYPE2, "2": cls.TYPE2}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown process type {text!r}; use 0, I or II") from None

    def __str__(self):
        return f"type-{self.label}"


@dataclass(frozen=True)
class QpmProcess:
    kind: ProcessType
    order: int

    def __post_init__(self):
        if isinstance(self.order, bool) or int(self.order) != self.order:
            raise ValueError(f"poling order must be an integer, got {self.order!r}")
        if self.order < 1 or self.order % 2 == 0:
            raise ValueError(
                f"poling order must be odd and positive (even orders have G_m = 0), got {self.order}"
            )

    @property
    def axes(self):
        return self.kind.axes

    def __str__(self):
        return f"{self.kind} m={self.order}"


@dataclass(frozen=True)
class Nonlinearity:
    d_eff: float  # pm/V
    g_m: float
    d_z_magnitude: float  # pm/V
    d_key: str
    k_m: float | None = None  # rad/µm, grating vector when a period is known


def idler_wavelength(pump, signal):
    """Energy conservation 1/λi = 1/λp - 1/λs."""
    return 1.0 / (1.0 / np.asarray(pump, dtype=float) - 1.0 / np.asarray(signal, dtype=float))


def pump_wavelength(signal, idler):
    return 1.0 / (1.0 / np.asarray(signal, dtype=float) + 1.0 / np.asarray(idler, dtype=float))


def _material_mismatch(crystal, axes, pump, signal, idler, temperature):
    ap, as_, ai = axes
    return (
        wave_vector(crystal.model(ap), pump, temperature)
        - wave_vector(crystal.model(as_), signal, temperature)
        - wave_vector(crystal.model(ai), idler, temperature)
    )


def grating_vector(crystal: CrystalSpec, order):
    return 2.0 * math.pi * order / crystal.poling_period


def phase_mismatch(crystal: CrystalSpec, proc: QpmProcess, pump, signal, temperature):
    """Δk_m = k_p - k_s - k_i - 2πm/Λ in rad/µm, with the idler fixed by energy conservation."""
    pump = np.asarray(pump, dtype=float)
    signal = np.asarray(signal, dtype=float)
    if np.any(signal <= pump):
        raise DomainError("signal wavelength must be longer than the pump wavelength")
    idler = idler_wavelength(pump, signal)
    dk = _material_mismatch(crystal, proc.axes, pump, signal, idler, temperature)
    dk = dk - grating_vector(crystal, proc.order)
    return dk if np.ndim(dk) else float(dk)


def phase_mismatch_joint(crystal: CrystalSpec, proc: QpmProcess, signal, idler, temperature):
    """Δk_m at independent signal and idler wavelengths.

    The pump wave vector is taken at the sum frequency of the pair, so no
    energy-conservation constraint is imposed here.
    """
    pump = pump_wavelength(signal, idler)
    dk = _material_mismatch(crystal, proc.axes, pump, signal, idler, temperature)
    dk = dk - grating_vector(crystal, proc.order)
    return dk if np.ndim(dk) else float(dk)


def degenerate_material_mismatch(crystal, proc, pump, temperature):
    """k_p - k_s - k_i at λs = λi = 2λp (no grating term)."""
    return _material_mismatch(crystal, proc.axes, pump, 2 * pump, 2 * pump, temperature)


def _unique_root(f, lo, hi, samples, x_tol, what):
    brackets = scan_brackets(f, lo, hi, samples)
    if len(brackets) != 1:
        found = ", ".join(f"[{b.lo:.6g}, {b.hi:.6g}]" for b in brackets) or "none"
        raise SolverError(
            f"{what}: expected exactly one root in [{lo:.6g}, {hi:.6g}], "
            f"found {len(brackets)} (brackets: {found})",
            brackets,
        )
    return bisect(f, brackets[0], x_tol)


def solve_degenerate_pump(
    crystal: CrystalSpec,
    proc: QpmProcess,
    temperature,
    search=None,
    hint=None,
    samples=121,
    x_tol=PUMP_X_TOL,
):
    """Pump wavelength (µm) whose degenerate pair λs = λi = 2λp is phase matched.

    Either ``search=(lo, hi)`` or ``hint`` (searched ±10 nm) must be given.
    """
    if search is None:
        if hint is None:
            raise ValueError("give a search interval or a hint wavelength")
        search = (hint - DEFAULT_HALF_WINDOW, hint + DEFAULT_HALF_WINDOW)
    lo, hi = search

    def f(lp):
        return phase_mismatch(crystal, proc, lp, 2 * lp, temperature)

    return _unique_root(f, lo, hi, samples, x_tol, f"degenerate pump for {proc}")


def solve_poling_period(crystal: CrystalSpec, proc: QpmProcess, pump, temperature):
    """Period Λ = 2πm / (k_p - k_s - k_i) in µm for the degenerate pair at ``pump``."""
    dk0 = degenerate_material_mismatch(crystal, proc, pump, temperature)
    if not dk0 > 0:
        raise InfeasibleProcess(
            f"{proc} at {pump * 1e3:.3f} nm: material mismatch k_p - k_s - k_i = {dk0:.6g} "
            "rad/um is not positive, so no positive period satisfies k_p - k_s - k_i - 2*pi*m/L = 0"
        )
    return 2.0 * math.pi * proc.order / dk0


@dataclass(frozen=True)
class PeriodPoint:
    pump: float  # µm
    period: float  # µm, NaN when infeasible
    feasible: bool
    reason: str = ""


def period_curve(crystal: CrystalSpec, proc: QpmProcess, pump_range, temperature, n_samples):
    """Poling period on an even grid of degenerate pump wavelengths.

    Points where the period is undefined (non-positive mismatch or dispersion
    out of range) are kept with ``feasible=False``.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    lo, hi = pump_range
    out = []
    for lp in np.linspace(lo, hi, int(n_samples)):
        lp = float(lp)
        try:
            out.append(PeriodPoint(lp, solve_poling_period(crystal, proc, lp, temperature), True))
        except InfeasibleProcess:
            out.append(PeriodPoint(lp, math.nan, False, "non-positive mismatch"))
        except DomainError:
            out.append(PeriodPoint(lp, math.nan, False, "outside dispersion range"))
    return out


def fourier_coefficient(m):
    """Fourier coefficient (2/(mπ)) sin(mπ/2) of a 50% duty-cycle poling pattern."""
    if int(m) != m:
        raise ValueError(f"order must be an integer, got {m!r}")
    m = int(m)
    if m == 0:
        raise DomainError("G_0 is the DC term; it is 0 for a 50% duty cycle and not covered here")
    # sin(mπ/2) evaluated exactly for integer m
    sine = (0, 1, 0, -1)[m % 4]
    if sine == 0:
        return 0.0
    return 2.0 * sine / (m * math.pi)


def effective_nonlinearity(proc: QpmProcess, crystal: CrystalSpec | None = None):
    """d_eff of the polarization triple and the poled magnitude |d_eff G_m| (pm/V)."""
    d_eff = D_COEFFICIENTS[proc.kind.d_key]
    g = fourier_coefficient(proc.order)
    k_m = grating_vector(crystal, proc.order) if crystal is not None else None
    return Nonlinearity(d_eff, g, abs(d_eff * g), proc.kind.d_key, k_m)


def all_processes(orders=(1, 3, 5)):
    return [QpmProcess(kind, m) for m in orders for kind in ProcessType]


@dataclass(frozen=True)
class Crossing:
    process: QpmProcess
    pump: float  # µm, NaN when infeasible
    feasible: bool
    note: str = ""

    @property
    def signal(self):
        return 2.0 * self.pump

    @property
    def idler(self):
        return 2.0 * self.pump


def find_crossings(
    crystal: CrystalSpec, proc: QpmProcess, temperature, pump_range=(0.30, 2.2), coarse=400
):
    """Degenerate pumps whose period equals ``crystal.poling_period``.

    A coarse ``period_curve`` scan brackets each crossing and the pump solver
    refines it inside that bracket. Returns one infeasible ``Crossing`` when
    the period is never reached.
    """
    pts = period_curve(crystal, proc, pump_range, temperature, coarse)
    target = crystal.poling_period
    out = []
    for a, b in zip(pts, pts[1:]):
        if not (a.feasible and b.feasible):
            continue
        if (a.period - target) * (b.period - target) <= 0 and a.period != b.period:
            lp = solve_degenerate_pump(crystal, proc, temperature, search=(a.pump, b.pump))
            if not out or abs(out[-1].pump - lp) > 1e-9:
                out.append(Crossing(proc, lp, True))
    if not out:
        out.append(
            Crossing(
                proc, math.nan, False,
                f"period {target:g} um not reached for pumps in "
                f"[{pump_range[0]:g}, {pump_range[1]:g}] um",
            )
        )
    return out
