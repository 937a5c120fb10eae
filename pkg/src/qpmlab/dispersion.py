"""Temperature-dependent refractive indices for biaxial crystals.

Room-temperature indices use one of two rational Sellmeier forms (λ in µm)::

    single-pole:  n² = A + B / (1 - C/λ²) - D λ²
    double-pole:  n² = A + B / (1 - C/λ²) + D / (1 - E/λ²) - F λ²

A model may carry extra segments that take over above a switch wavelength,
which is how long-wavelength refits of the same axis are attached. The thermal
correction is added to n (not n²)::

    Δn(λ, T) = n1(λ) (T - T_ref) + n2(λ) (T - T_ref)²,   n_j(λ) = Σ_m a_jm / λ^m

All wavelengths are vacuum wavelengths in µm.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DomainError

FORMS = {"single-pole": 4, "double-pole": 6}


def _room_index_sq(form, coefficients, lam):
    lam2 = lam * lam
    if form == "single-pole":
        a, b, c, d = coefficients
        return a + b / (1.0 - c / lam2) - d * lam2
    a, b, c, d, e, f = coefficients
    return a + b / (1.0 - c / lam2) + d / (1.0 - e / lam2) - f * lam2


def _poly_inv(coefficients, lam):
    inv = 1.0 / lam
    out = np.zeros_like(lam)
    for c in reversed(coefficients):
        out = out * inv + c
    return out


@dataclass(frozen=True)
class Segment:
    """A Sellmeier form that replaces the base form for λ >= above_um."""

    above_um: float
    form: str
    coefficients: tuple[float, ...]

    def __post_init__(self):
        _check_form(self.form, self.coefficients)


def _check_form(form, coefficients):
    if form not in FORMS:
        raise ValueError(f"unknown Sellmeier form {form!r}; expected one of {sorted(FORMS)}")
    if len(coefficients) != FORMS[form]:
        raise ValueError(
            f"{form} form takes {FORMS[form]} coefficients, got {len(coefficients)}"
        )


@dataclass(frozen=True)
class SellmeierModel:
    form: str
    coefficients: tuple[float, ...]
    thermal_n1: tuple[float, ...] = (0.0, 0.0, 0.0, 0.0)
    thermal_n2: tuple[float, ...] = (0.0, 0.0, 0.0, 0.0)
    t_ref: float = 25.0
    valid_range: tuple[float, float] = (0.35, 4.5)
    segments: tuple[Segment, ...] = ()
    uv_edge: float | None = None
    source: str = ""

    def __post_init__(self):
        _check_form(self.form, self.coefficients)
        if len(self.thermal_n1) != 4 or len(self.thermal_n2) != 4:
            raise ValueError("thermal polynomials need 4 coefficients each (constant first)")
        lo, hi = self.valid_range
        if not 0 < lo < hi:
            raise ValueError(f"bad valid_range {self.valid_range}")
        edges = [s.above_um for s in self.segments]
        if edges != sorted(edges):
            raise ValueError("segments must be ordered by above_um")

    @classmethod
    def constant(cls, n, valid_range=(0.1, 10.0)):
        """Dispersionless stub with index ``n`` at every wavelength and temperature."""
        return cls("single-pole", (n * n, 0.0, 0.0, 0.0), valid_range=valid_range)

    def check_range(self, wavelength):
        lam = np.asarray(wavelength, dtype=float)
        lo, hi = self.valid_range
        bad = ~((lam >= lo) & (lam <= hi))
        if np.any(bad):
            offending = lam[bad].flat[0] if lam.ndim else float(lam)
            raise DomainError(
                f"wavelength {offending:.6g} um is outside the model's valid range "
                f"[{lo:g}, {hi:g}] um"
            )
        return lam

    def room_index(self, wavelength):
        lam = self.check_range(wavelength)
        n_sq = np.empty_like(lam)
        bounds = [self.valid_range[0]] + [s.above_um for s in self.segments]
        pieces = [(self.form, self.coefficients)] + [(s.form, s.coefficients) for s in self.segments]
        for i, (form, coeffs) in enumerate(pieces):
            mask = lam >= bounds[i]
            if i + 1 < len(bounds):
                mask &= lam < bounds[i + 1]
            if np.any(mask):
                n_sq[mask] = _room_index_sq(form, coeffs, lam[mask])
        return np.sqrt(n_sq) if lam.ndim else float(np.sqrt(n_sq))

    def thermal_shift(self, wavelength, temperature):
        lam = np.asarray(wavelength, dtype=float)
        dt = np.asarray(temperature, dtype=float) - self.t_ref
        n1 = _poly_inv(self.thermal_n1, lam)
        n2 = _poly_inv(self.thermal_n2, lam)
        out = n1 * dt + n2 * dt * dt
        return out if np.ndim(out) else float(out)

    def beyond_uv_edge(self, wavelength):
        if self.uv_edge is None:
            return False
        return bool(np.any(np.asarray(wavelength) < self.uv_edge))


def refractive_index(model: SellmeierModel, wavelength, temperature):
    """Index of refraction at vacuum ``wavelength`` (µm) and ``temperature`` (°C).

    Accepts scalars or arrays (broadcast together). Raises ``DomainError`` when a
    wavelength falls outside ``model.valid_range``.
    """
    n = model.room_index(wavelength)
    return n + model.thermal_shift(wavelength, temperature)


def wave_vector(model: SellmeierModel, wavelength, temperature):
    """Wave number 2πn/λ in rad/µm."""
    lam = np.asarray(wavelength, dtype=float)
    k = 2.0 * np.pi * refractive_index(model, lam, temperature) / lam
    return k if np.ndim(k) else float(k)


@dataclass(frozen=True)
class CrystalSpec:
    """A poled crystal: geometry plus one dispersion model per polarization axis."""

    length: float  # mm
    poling_period: float  # µm
    model_y: SellmeierModel
    model_z: SellmeierModel
    name: str = "crystal"
    checksum: str = ""
    path: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"crystal length must be positive, got {self.length}")
        if not self.poling_period > 0:
            raise ValueError(f"poling period must be positive, got {self.poling_period}")

    @property
    def length_um(self):
        return self.length * 1e3

    def model(self, axis):
        axis = axis.lower()
        if axis == "y":
            return self.model_y
        if axis == "z":
            return self.model_z
        raise ValueError(f"unknown axis {axis!r}")

    def with_period(self, period):
        from dataclasses import replace

        return replace(self, poling_period=period)

    def with_length(self, length):
        from dataclasses import replace

        return replace(self, length=length)


def _model_from_dict(d):
    segments = tuple(
        Segment(float(s["above_um"]), s["form"], tuple(float(c) for c in s["coefficients"]))
        for s in d.get("segments", [])
    )
    return SellmeierModel(
        form=d["form"],
        coefficients=tuple(float(c) for c in d["coefficients"]),
        thermal_n1=tuple(float(c) for c in d["thermal"]["n1"]),
        thermal_n2=tuple(float(c) for c in d["thermal"]["n2"]),
        t_ref=float(d["t_ref_c"]),
        valid_range=tuple(float(v) for v in d["valid_range_um"]),
        segments=segments,
        uv_edge=d.get("uv_edge_um"),
        source=d.get("source", ""),
    )


def find_crystal_file(name="ktp.json"):
    """Locate a crystal data file.

    Absolute or existing relative paths win; then each directory listed in
    ``QPMLAB_CRYSTAL_DIR`` (os.pathsep separated); then the files shipped
    with the package.
    """
    p = Path(name)
    if p.exists():
        return p
    for d in filter(None, os.environ.get("QPMLAB_CRYSTAL_DIR", "").split(os.pathsep)):
        cand = Path(d) / name
        if cand.exists():
            return cand
    shipped = resources.files("qpmlab") / "data" / name
    if shipped.is_file():
        return Path(str(shipped))
    raise FileNotFoundError(f"crystal file {name!r} not found")


def load_crystal(name="ktp.json", length=None, poling_period=None):
    """Load a crystal JSON file into a ``CrystalSpec``.

    ``length`` (mm) and ``poling_period`` (µm) override the file's defaults.
    """
    path = find_crystal_file(name)
    raw = path.read_bytes()
    d = json.loads(raw.decode("utf-8"))
    geom = d.get("crystal", {})
    return CrystalSpec(
        length=float(length if length is not None else geom.get("length_mm", 10.0)),
        poling_period=float(
            poling_period if poling_period is not None else geom.get("poling_period_um", 10.0)
        ),
        model_y=_model_from_dict(d["axes"]["y"]),
        model_z=_model_from_dict(d["axes"]["z"]),
        name=d.get("name", path.stem),
        checksum=hashlib.sha256(raw).hexdigest(),
        path=str(path),
    )
