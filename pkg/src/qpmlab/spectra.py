"""Temperature-dependent SPDC observables: tuning, spectra, joint spectral intensity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .dispersion import CrystalSpec
from .errors import (
    DomainError,
    EmptySupportError,
    InfeasibleProcess,
    OpenSupportError,
    OutOfTuningRange,
    SolverError,
)
from .numerics import Bracket, bisect, fwhm, scan_brackets
from .qpm import (
    QpmProcess,
    _material_mismatch,
    grating_vector,
    idler_wavelength,
    phase_mismatch,
    phase_mismatch_joint,
)

C_UM_PER_S = 299792458.0e6
FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))
TEMPERATURE_LIMITS = (20.0, 200.0)
TEMPERATURE_X_TOL = 1e-6  # °C; same-axis pairs split by nm per 0.01 °C near degeneracy
ROOT_X_TOL = 1e-9  # µm
DEGENERATE_SPLIT = 1e-4  # µm; signal/idler closer than this count as degenerate
TUNING_SAMPLES = 801


def angular_frequency(wavelength):
    """ω = 2πc/λ in rad/s for a vacuum wavelength in µm."""
    return 2.0 * math.pi * C_UM_PER_S / np.asarray(wavelength, dtype=float)


def linewidth_to_nm(linewidth_hz, wavelength):
    """Convert a frequency linewidth to a wavelength FWHM in nm at ``wavelength`` (µm)."""
    return wavelength**2 * linewidth_hz / C_UM_PER_S * 1e3


def _check_temperature(temperature):
    lo, hi = TEMPERATURE_LIMITS
    if not lo <= temperature <= hi:
        raise DomainError(f"temperature {temperature} C outside supported [{lo:g}, {hi:g}] C")


@dataclass(frozen=True)
class TuningPoint:
    temperature: float
    signal: float  # µm, shorter arm
    idler: float  # µm
    signal_axis: str
    idler_axis: str
    degenerate: bool = False
    alternates: tuple[float, ...] = ()  # other phase-matched shorter-arm wavelengths, µm


@dataclass
class TuningCurve:
    process: QpmProcess
    pump: float
    points: list[TuningPoint]
    out_of_range: list[float] = field(default_factory=list)
    degenerate_temperature: float | None = None


def tuning_points(
    crystal: CrystalSpec, proc: QpmProcess, pump, temperature, samples=TUNING_SAMPLES
):
    """Phase-matched signal/idler pair at fixed pump and temperature.

    The shorter-wavelength photon is searched on (λp, 2λp]; for type-II both
    axis assignments are tried since either arm may be the shorter one.
    When several branches phase match, the one closest to degeneracy is
    returned and the rest are listed in ``alternates``. Raises
    ``OutOfTuningRange`` when nothing phase matches.
    """
    _check_temperature(temperature)
    p_axis, s_axis, i_axis = proc.axes
    assignments = [(s_axis, i_axis)]
    if s_axis != i_axis:
        assignments.append((i_axis, s_axis))
    k_grating = grating_vector(crystal, proc.order)
    degenerate = 2.0 * pump

    roots = []
    near_zero = False
    for a_short, b_long in assignments:
        axes = (p_axis, a_short, b_long)
        long_max = crystal.model(b_long).valid_range[1]
        lo = max(
            1.0 / (1.0 / pump - 1.0 / long_max),
            crystal.model(a_short).valid_range[0],
            pump * (1 + 1e-6),
        )

        def f(x, axes=axes):
            return (
                _material_mismatch(crystal, axes, pump, x, idler_wavelength(pump, x), temperature)
                - k_grating
            )

        if abs(f(degenerate)) * crystal.length_um / 2 <= 1e-3:
            near_zero = True
        for b in scan_brackets(f, lo, degenerate, samples, vectorized=True):
            roots.append((bisect(f, b, ROOT_X_TOL), a_short, b_long))

    roots.sort(key=lambda r: degenerate - r[0])
    others = tuple(r[0] for r in roots[1:])
    if (roots and degenerate - roots[0][0] <= DEGENERATE_SPLIT) or (near_zero and not roots):
        return TuningPoint(temperature, degenerate, degenerate, s_axis, i_axis, True, others)
    if not roots:
        raise OutOfTuningRange(
            f"{proc}: no phase-matched pair for pump {pump * 1e3:.3f} nm at {temperature:g} C"
        )
    x, a, b = roots[0]
    return TuningPoint(temperature, x, float(idler_wavelength(pump, x)), a, b, False, others)


def degenerate_temperature(
    crystal: CrystalSpec, proc: QpmProcess, pump, t_range=TEMPERATURE_LIMITS
):
    """Temperature (°C) where λs = λi = 2λp is phase matched."""
    lo, hi = t_range
    tmin, tmax = TEMPERATURE_LIMITS
    if not tmin <= lo < hi <= tmax:
        raise DomainError(f"temperature range {t_range} must lie inside [{tmin:g}, {tmax:g}] C")
    roots = degenerate_temperature_candidates(crystal, proc, pump, t_range)
    if not roots:
        raise InfeasibleProcess(
            f"{proc}: pump {pump * 1e3:.3f} nm has no degenerate temperature in "
            f"[{lo:g}, {hi:g}] C"
        )
    if len(roots) > 1:
        raise SolverError(
            f"{proc}: several degenerate temperatures in [{lo:g}, {hi:g}] C: "
            + ", ".join(f"{t:.3f}" for t in roots)
        )
    return roots[0]


def degenerate_temperature_candidates(crystal, proc, pump, t_range):
    """All degenerate temperatures in ``t_range`` on a 1 °C scan, without range policing."""
    lo, hi = t_range

    def f(t):
        return phase_mismatch(crystal, proc, pump, 2.0 * pump, t)

    samples = max(2, int(math.ceil(hi - lo)) + 1)
    return [
        bisect(f, b, TEMPERATURE_X_TOL)
        for b in scan_brackets(f, lo, hi, samples, vectorized=True)
    ]


def tuning_curve(crystal, proc, pump, t_range, step=1.0):
    lo, hi = t_range
    temps = np.arange(lo, hi + step / 2.0, step)
    points, missing = [], []
    for t in temps:
        try:
            points.append(tuning_points(crystal, proc, pump, float(t)))
        except OutOfTuningRange:
            missing.append(float(t))
    try:
        t_deg = degenerate_temperature(crystal, proc, pump, (lo, hi))
    except (InfeasibleProcess, SolverError, DomainError):
        t_deg = None
    return TuningCurve(proc, pump, points, missing, t_deg)


@dataclass(frozen=True)
class SpectrumArm:
    name: str  # "signal", "idler" or "degenerate"
    axis: str
    peak: float  # µm
    fwhm: float  # µm


@dataclass
class SpectrumCurve:
    process: QpmProcess
    pump: float
    temperature: float
    wavelengths: np.ndarray  # signal-axis photon, µm
    intensity: np.ndarray
    arms: list[SpectrumArm]

    @property
    def fwhm(self):
        return self.arms[0].fwhm

    @property
    def peak(self):
        return self.arms[0].peak

    @property
    def samples(self):
        return list(zip(self.wavelengths.tolist(), self.intensity.tolist()))


def sinc2(dk, length_um):
    # np.sinc is sin(πx)/(πx)
    return np.sinc(np.asarray(dk) * length_um / (2.0 * math.pi)) ** 2


def _peak_locations(f, x, dk):
    sign = np.signbit(dk)
    idx = np.flatnonzero(sign[:-1] != sign[1:])
    peaks = [bisect(f, Bracket(x[i], x[i + 1], dk[i], dk[i + 1]), ROOT_X_TOL) for i in idx]
    if not peaks:
        i = int(np.argmin(np.abs(dk)))
        a, b = x[max(i - 1, 0)], x[min(i + 1, x.size - 1)]
        res = minimize_scalar(lambda v: f(v) ** 2, bounds=(a, b), method="bounded",
                              options={"xatol": ROOT_X_TOL})
        peaks = [float(res.x)]
    return peaks


def _arm_fwhm(x, y, what):
    try:
        return fwhm(x, y)
    except OpenSupportError as exc:
        raise OpenSupportError(
            f"{what}: spectrum window [{x[0] * 1e3:.3f}, {x[-1] * 1e3:.3f}] nm is too narrow "
            f"({exc})",
            exc.side,
        ) from exc


def spectrum(
    crystal: CrystalSpec, proc: QpmProcess, pump, temperature, window, n_samples=2001
):
    """Normalized sinc²(Δk L/2) spectrum over the signal-axis photon wavelength.

    ``window`` is (lo, hi) in µm. Exact phase-matching points are inserted into
    the sample grid, so the peak value is sampled. Same-axis processes show both
    arms in one window; they are split at 2λp when the lobes are separate.
    """
    if n_samples < 64:
        raise ValueError("n_samples must be >= 64")
    lo, hi = window
    if not pump < lo < hi:
        raise DomainError(f"spectrum window {window} must lie above the pump wavelength")
    _, s_axis, i_axis = proc.axes
    L = crystal.length_um

    def f(v):
        return phase_mismatch(crystal, proc, pump, v, temperature)

    x = np.linspace(lo, hi, int(n_samples))
    peaks = _peak_locations(f, x, f(x))
    x = np.unique(np.concatenate([x, peaks]))
    y = sinc2(f(x), L)
    y = y / y.max()

    degenerate = 2.0 * pump
    arms = []
    if proc.kind.same_axis:
        central = lo < degenerate < hi and sinc2(f(degenerate), L) / sinc2(f(peaks[0]), L) >= 0.5
        if central:
            p = float(min(peaks, key=lambda v: abs(v - degenerate)))
            arms.append(SpectrumArm("degenerate", s_axis, p, _arm_fwhm(x, y, str(proc))))
        else:
            for name, mask in (("signal", x < degenerate), ("idler", x > degenerate)):
                if mask.sum() < 3:
                    continue
                xs, ys = x[mask], y[mask]
                p = xs[np.argmax(ys)]
                near = [v for v in peaks if xs[0] <= v <= xs[-1]]
                if near:
                    p = min(near, key=lambda v: abs(v - p))
                arms.append(SpectrumArm(name, s_axis, float(p), _arm_fwhm(xs, ys, f"{proc} {name}")))
            if not arms:
                raise OpenSupportError(f"{proc}: no spectral lobe inside window", "both")
    else:
        p = min(peaks, key=lambda v: abs(v - x[np.argmax(y)]))
        arms.append(SpectrumArm("signal", s_axis, float(p), _arm_fwhm(x, y, f"{proc} signal")))
        xi = idler_wavelength(pump, x)[::-1]
        arms.append(
            SpectrumArm(
                "idler", i_axis, float(idler_wavelength(pump, p)),
                _arm_fwhm(xi, y[::-1], f"{proc} idler"),
            )
        )
    return SpectrumCurve(proc, pump, temperature, x, y, arms)


def pump_envelope(pump_center, bandwidth_nm, omega_total):
    """Gaussian pump amplitude over the total frequency ωs + ωi (rad/s).

    ``bandwidth_nm`` is the FWHM of this amplitude expressed in pump
    wavelength; ``math.inf`` gives a flat envelope.
    """
    if not bandwidth_nm > 0:
        raise ValueError("pump bandwidth must be positive")
    omega_total = np.asarray(omega_total, dtype=float)
    if math.isinf(bandwidth_nm):
        return np.ones_like(omega_total)
    return _envelope_from_detuning(
        omega_total - angular_frequency(pump_center), pump_center, bandwidth_nm
    )


def pump_fwhm_omega(pump_center, bandwidth_nm):
    half = bandwidth_nm * 1e-3 / 2.0
    return float(angular_frequency(pump_center - half) - angular_frequency(pump_center + half))


def _envelope_from_detuning(detuning, pump_center, bandwidth_nm):
    if math.isinf(bandwidth_nm):
        return np.ones_like(detuning)
    sigma = pump_fwhm_omega(pump_center, bandwidth_nm) / FWHM_PER_SIGMA
    return np.exp(-(detuning**2) / (2.0 * sigma**2))


@dataclass
class JsiGrid:
    process: QpmProcess
    pump: float  # µm, envelope center
    bandwidth_nm: float
    temperature: float
    signal_wavelengths: np.ndarray  # µm, ascending; row axis
    idler_wavelengths: np.ndarray  # µm, ascending; column axis
    values: np.ndarray
    omega_step: float  # rad/s between neighbouring grid frequencies

    def frequency_offsets(self):
        """Signal and idler frequency offsets from ωp/2 (rad/s), aligned with the axes."""
        n_s, n_i = self.values.shape
        u_s = ((n_s - 1) / 2.0 - np.arange(n_s)) * self.omega_step
        u_i = ((n_i - 1) / 2.0 - np.arange(n_i)) * self.omega_step
        return u_s, u_i

    def principal_axis_slope(self):
        """Slope dωi/dωs of the intensity-weighted major axis of the grid."""
        u_s, u_i = self.frequency_offsets()
        w = self.values / self.values.sum()
        ws, wi = w.sum(axis=1), w.sum(axis=0)
        ms, mi = ws @ u_s, wi @ u_i
        ds, di = u_s - ms, u_i - mi
        cov = np.array(
            [
                [ws @ ds**2, ds @ w @ di],
                [ds @ w @ di, wi @ di**2],
            ]
        )
        vals, vecs = np.linalg.eigh(cov)
        v = vecs[:, np.argmax(vals)]
        return float(v[1] / v[0]) if v[0] != 0 else math.inf


def auto_half_window(crystal, proc, pump, temperature):
    """Half-width (µm) around 2λp covering the phase-matched lobes by 5 FWHM, at least 5 nm."""
    degenerate = 2.0 * pump
    try:
        tp = tuning_points(crystal, proc, pump, temperature)
        offset = max(abs(tp.signal - degenerate), abs(tp.idler - degenerate))
    except OutOfTuningRange:
        offset = 0.0
    width = offset + 0.02
    arm = None
    for _ in range(8):
        lo = max(degenerate - width, pump * 1.05)
        try:
            arm = spectrum(crystal, proc, pump, temperature, (lo, degenerate + width), 1025)
            break
        except (OpenSupportError, DomainError):
            width *= 2.0
    single = max(a.fwhm for a in arm.arms) if arm is not None else 0.0
    return offset + max(5.0 * single, 0.005)


def jsi(
    crystal: CrystalSpec,
    proc: QpmProcess,
    pump_center,
    bandwidth_nm,
    temperature,
    n=256,
    half_window=None,
):
    """Joint spectral intensity |α(ωs+ωi) sinc(Δk L/2)|², normalized to max 1.

    The grid is uniform in frequency and symmetric about ωp/2 for both photons,
    so the zero-detuning anti-diagonal lands exactly on grid points even for
    very narrow pumps. Axes are returned as ascending wavelengths.
    """
    if n < 3:
        raise ValueError("grid needs at least 3 points per axis")
    if half_window is None:
        half_window = auto_half_window(crystal, proc, pump_center, temperature)
    degenerate = 2.0 * pump_center
    omega_c = float(angular_frequency(degenerate))
    big = float(angular_frequency(degenerate - half_window)) - omega_c
    step = 2.0 * big / (n - 1)
    j = np.arange(n)
    # ascending wavelength ↔ descending frequency
    omega = omega_c + ((n - 1) / 2.0 - j) * step
    wl = 2.0 * math.pi * C_UM_PER_S / omega

    detuning = ((n - 1) - j[:, None] - j[None, :]) * step
    alpha = _envelope_from_detuning(detuning, pump_center, bandwidth_nm)
    dk = phase_mismatch_joint(crystal, proc, wl[:, None], wl[None, :], temperature)
    values = (alpha * np.sinc(dk * crystal.length_um / (2.0 * math.pi))) ** 2
    peak = values.max()
    if not peak > 0:
        raise EmptySupportError(
            f"{proc}: joint spectrum is zero everywhere on the grid "
            f"[{wl[0] * 1e3:.3f}, {wl[-1] * 1e3:.3f}] nm"
        )
    return JsiGrid(proc, pump_center, bandwidth_nm, temperature, wl, wl.copy(), values / peak, step)
