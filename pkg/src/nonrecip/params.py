"""Typed parameter sets for the two-cavity optomechanical isolator model.

The model couples two driven optical cavities (decay rates kappa1, kappa2)
through photon tunneling J1, a mechanical mode (damping gamma) driven by
radiation pressure in both cavities (effective couplings G1, G2 with relative
phase theta), and a bosonized atomic ensemble (decay f) that couples to
cavity 1 (coupling J2 with phase phi) and to the mechanical mode through a
complex, possibly dissipative coupling J3.

All rates are stored as dimensionless multiples of a declared reference rate
(``gamma`` or ``kappa2``, or an absolute rad/s scale); figures and design
routines quote both normalizations, so parameter sets round-trip between
them losslessly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

TWO_PI = 2.0 * math.pi

_REFERENCES = ("gamma", "kappa2", "absolute")


class InvalidParams(ValueError):
    """Raised when an operation receives a parameter set that fails validation."""


def wrap_phase(x: float) -> float:
    """Map a phase to [0, 2*pi). Idempotent; -0.0 normalizes to 0.0."""
    w = math.fmod(float(x), TWO_PI)
    if w < 0.0:
        w += TWO_PI
    if w >= TWO_PI:  # fmod can land exactly on 2*pi after the shift
        w -= TWO_PI
    return w + 0.0


@dataclass(frozen=True)
class RateUnit:
    """Reference rate that all rate-valued fields of a parameter set share.

    ``reference`` names the normalization ("gamma", "kappa2", or "absolute");
    ``value`` is the size of one unit in rad/s when it is known, else 1.0.
    """

    reference: str = "gamma"
    value: float = 1.0

    def __post_init__(self) -> None:
        if self.reference not in _REFERENCES:
            raise ValueError(f"unknown rate reference {self.reference!r}")
        if not (self.value > 0.0) or not math.isfinite(self.value):
            raise ValueError("rate unit value must be a positive finite number")


@dataclass(frozen=True)
class ModelParams:
    """Linearized-model parameters: the symbols of the 4x4 response matrix.

    Parameters
    ----------
    kappa1, kappa2 : float
        Cavity amplitude decay rates, >= 0.
    gamma : float
        Mechanical damping rate, >= 0.
    f : float
        Atomic-ensemble decay rate, >= 0.
    G1, G2 : float
        Effective optomechanical coupling magnitudes, >= 0. G1 is real by
        convention; the relative drive phase is carried by ``theta``.
    theta : float
        Phase of G2 relative to G1, stored wrapped to [0, 2*pi).
    J1 : float
        Photon tunneling rate between the cavities, >= 0.
    J2 : complex
        Value bound to the ensemble/cavity-1 coupling slot. Real and
        nonnegative in ordinary configurations; designed dissipative
        configurations legitimately carry a purely imaginary value here
        (for the same reason J3 is stored as a full complex number).
    phi : float
        Phase attached to the J2 slot via e^{+-i phi}, wrapped to [0, 2*pi).
    J3 : complex
        Ensemble/mechanics coupling; an imaginary part models dissipative
        (reservoir-mediated) coupling.
    unit : RateUnit
        Normalization shared by every rate-valued field above.
    """

    kappa1: float
    kappa2: float
    gamma: float
    f: float
    G1: float
    G2: float
    theta: float
    J1: float
    J2: complex
    phi: float
    J3: complex
    unit: RateUnit = field(default_factory=RateUnit)

    def __post_init__(self) -> None:
        # phases are canonicalized at construction; everything else is
        # checked by validate_params so invalid sets can still be reported
        object.__setattr__(self, "theta", wrap_phase(self.theta))
        object.__setattr__(self, "phi", wrap_phase(self.phi))
        object.__setattr__(self, "J2", complex(self.J2))
        object.__setattr__(self, "J3", complex(self.J3))


def validate_params(p: ModelParams) -> list[str]:
    """Return the list of violated invariants of ``p`` (empty means valid)."""
    violations: list[str] = []
    for name in ("kappa1", "kappa2", "gamma", "f", "G1", "G2", "J1"):
        v = getattr(p, name)
        if not math.isfinite(v):
            violations.append(f"{name} finite")
        elif v < 0.0:
            violations.append(f"{name} nonnegative")
    for name in ("theta", "phi"):
        if not math.isfinite(getattr(p, name)):
            violations.append(f"{name} finite")
    for name in ("J2", "J3"):
        z = getattr(p, name)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            violations.append(f"{name} finite")
    # the J2 slot may be complex (designed configurations), but a plain
    # negative real value is a sign error the phase phi should absorb
    if p.J2.imag == 0.0 and p.J2.real < 0.0:
        violations.append("J2 nonnegative when real")
    return violations


def ensure_valid(p: ModelParams) -> ModelParams:
    """Raise InvalidParams if ``p`` fails validation; return it unchanged."""
    violations = validate_params(p)
    if violations:
        raise InvalidParams("invalid parameters: " + "; ".join(violations))
    return p


_RATE_FIELDS = ("kappa1", "kappa2", "gamma", "f", "G1", "G2", "J1")
_COMPLEX_RATE_FIELDS = ("J2", "J3")


def convert_unit(p: ModelParams, reference: str) -> ModelParams:
    """Re-express every rate-valued field of ``p`` against a new reference.

    Converting to "kappa2" divides all rates by the current kappa2 value (so
    the stored kappa2 becomes 1); converting to "gamma" divides by gamma;
    converting to "absolute" multiplies by the current unit's rad/s value.
    Phases are untouched. Round-tripping reproduces the original fields to
    floating-point accuracy.
    """
    if reference not in _REFERENCES:
        raise ValueError(f"unknown rate reference {reference!r}")
    if reference == p.unit.reference:
        return p
    if reference == "gamma":
        scale = p.gamma
    elif reference == "kappa2":
        scale = p.kappa2
    else:
        scale = 1.0 / p.unit.value
    if not (scale > 0.0) or not math.isfinite(scale):
        raise InvalidParams(f"cannot rescale to {reference}: reference rate is {scale}")
    new_value = p.unit.value * scale
    updates: dict[str, object] = {
        name: getattr(p, name) / scale for name in _RATE_FIELDS
    }
    updates.update({name: getattr(p, name) / scale for name in _COMPLEX_RATE_FIELDS})
    updates["unit"] = RateUnit(reference, new_value)
    return replace(p, **updates)


@dataclass(frozen=True)
class BareParams:
    """Pre-linearization quantities entering the steady-state equations."""

    Delta1: float
    Delta2: float
    Delta_en: float
    omega_m: float
    g1: float
    g2: float
    J1: float
    J2: complex
    J3: complex
    kappa1: float
    kappa2: float
    gamma: float
    f: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "J2", complex(self.J2))
        object.__setattr__(self, "J3", complex(self.J3))
        if not self.omega_m > 0.0:
            raise ValueError("omega_m must be positive")
        for name in ("kappa1", "kappa2", "gamma", "f"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class Drives:
    """Drive and probe amplitudes. ``delta`` is the probe-drive detuning."""

    E1: complex = 0.0
    E2: complex = 0.0
    Ep1: float = 0.0
    Ep2: float = 0.0
    delta: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "E1", complex(self.E1))
        object.__setattr__(self, "E2", complex(self.E2))
        if self.Ep1 < 0.0 or self.Ep2 < 0.0:
            raise ValueError("probe amplitudes must be nonnegative")


@dataclass(frozen=True)
class SteadyState:
    """Converged mean amplitudes and the drive-shifted effective detunings."""

    alpha1: complex
    alpha2: complex
    rho: complex
    beta: complex
    Delta1_eff: float
    Delta2_eff: float
    residual_norm: float
    iterations: int = 0


@dataclass(frozen=True)
class TransmissionPoint:
    """Transmission amplitudes in both directions at one probe detuning."""

    y: float
    T12: float
    T21: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.T12) and math.isfinite(self.T21)):
            raise ValueError("transmission amplitudes must be finite")
        if self.T12 < 0.0 or self.T21 < 0.0:
            raise ValueError("transmission amplitudes must be nonnegative")


# ---------------------------------------------------------------------------
# JSON-compatible serialization. Complex values round-trip as {re, im} pairs.
# ---------------------------------------------------------------------------

def _encode_value(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, RateUnit):
        return {"reference": v.reference, "value": v.value}
    return v


def _decode_complex(v) -> complex:
    if isinstance(v, dict):
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    return complex(v)


def model_params_to_dict(p: ModelParams) -> dict:
    return {name: _encode_value(getattr(p, name)) for name in (
        "kappa1", "kappa2", "gamma", "f", "G1", "G2", "theta",
        "J1", "J2", "phi", "J3", "unit",
    )}


def model_params_from_dict(d: dict) -> ModelParams:
    unit = d.get("unit", {"reference": "gamma", "value": 1.0})
    if isinstance(unit, dict):
        unit = RateUnit(unit.get("reference", "gamma"), unit.get("value", 1.0))
    return ModelParams(
        kappa1=float(d["kappa1"]),
        kappa2=float(d["kappa2"]),
        gamma=float(d["gamma"]),
        f=float(d["f"]),
        G1=float(d["G1"]),
        G2=float(d["G2"]),
        theta=float(d["theta"]),
        J1=float(d["J1"]),
        J2=_decode_complex(d["J2"]),
        phi=float(d["phi"]),
        J3=_decode_complex(d["J3"]),
        unit=unit,
    )


def bare_params_to_dict(p: BareParams) -> dict:
    return {name: _encode_value(getattr(p, name)) for name in (
        "Delta1", "Delta2", "Delta_en", "omega_m", "g1", "g2",
        "J1", "J2", "J3", "kappa1", "kappa2", "gamma", "f",
    )}


def bare_params_from_dict(d: dict) -> BareParams:
    return BareParams(
        Delta1=float(d["Delta1"]),
        Delta2=float(d["Delta2"]),
        Delta_en=float(d["Delta_en"]),
        omega_m=float(d["omega_m"]),
        g1=float(d["g1"]),
        g2=float(d["g2"]),
        J1=float(d["J1"]),
        J2=_decode_complex(d["J2"]),
        J3=_decode_complex(d["J3"]),
        kappa1=float(d["kappa1"]),
        kappa2=float(d["kappa2"]),
        gamma=float(d["gamma"]),
        f=float(d["f"]),
    )


def drives_to_dict(d: Drives) -> dict:
    return {
        "E1": _encode_value(d.E1), "E2": _encode_value(d.E2),
        "Ep1": d.Ep1, "Ep2": d.Ep2, "delta": d.delta,
    }


def drives_from_dict(d: dict) -> Drives:
    return Drives(
        E1=_decode_complex(d.get("E1", 0.0)),
        E2=_decode_complex(d.get("E2", 0.0)),
        Ep1=float(d.get("Ep1", 0.0)),
        Ep2=float(d.get("Ep2", 0.0)),
        delta=float(d.get("delta", 0.0)),
    )


def steady_state_to_dict(s: SteadyState) -> dict:
    return {
        "alpha1": _encode_value(s.alpha1), "alpha2": _encode_value(s.alpha2),
        "rho": _encode_value(s.rho), "beta": _encode_value(s.beta),
        "Delta1_eff": s.Delta1_eff, "Delta2_eff": s.Delta2_eff,
        "residual_norm": s.residual_norm, "iterations": s.iterations,
    }


def save_params(path: str, p: ModelParams) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_params_to_dict(p), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_params(path: str) -> ModelParams:
    with open(path, encoding="utf-8") as fh:
        return model_params_from_dict(json.load(fh))


__all__ = [
    "BareParams", "Drives", "InvalidParams", "ModelParams", "RateUnit",
    "SteadyState", "TransmissionPoint", "bare_params_from_dict",
    "bare_params_to_dict", "convert_unit", "drives_from_dict",
    "drives_to_dict", "ensure_valid", "load_params",
    "model_params_from_dict", "model_params_to_dict", "save_params",
    "steady_state_to_dict", "validate_params", "wrap_phase",
]
