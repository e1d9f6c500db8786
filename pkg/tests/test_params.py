"""Parameter containers: validation, phase canonicalization, serialization."""

import math

import pytest

from nonrecip.params import (
    BareParams,
    Drives,
    InvalidParams,
    ModelParams,
    RateUnit,
    TransmissionPoint,
    bare_params_from_dict,
    bare_params_to_dict,
    convert_unit,
    drives_from_dict,
    drives_to_dict,
    ensure_valid,
    load_params,
    model_params_from_dict,
    model_params_to_dict,
    save_params,
    validate_params,
    wrap_phase,
)

TWO_PI = 2.0 * math.pi


def test_wrap_phase_basics():
    assert wrap_phase(0.0) == 0.0
    assert wrap_phase(TWO_PI) == 0.0
    assert wrap_phase(TWO_PI + 0.1) == pytest.approx(0.1, abs=1e-15)
    assert wrap_phase(-0.5) == pytest.approx(TWO_PI - 0.5)
    # -0.0 must normalize to +0.0 so serialized output is stable
    assert math.copysign(1.0, wrap_phase(-0.0)) == 1.0


def test_wrap_phase_idempotent():
    for x in (-1e6, -7.3, -0.1, 0.0, 1.0, 6.2, 12.7, 1e6):
        once = wrap_phase(x)
        assert 0.0 <= once < TWO_PI
        assert wrap_phase(once) == once


def test_phases_wrapped_at_construction(base_params):
    p = base_params(TWO_PI + 0.1, phi=-0.3)
    assert p.theta == pytest.approx(0.1, abs=1e-15)
    assert p.phi == pytest.approx(TWO_PI - 0.3)
    assert validate_params(p) == []


def test_base_configuration_is_valid(base_params):
    assert validate_params(base_params(math.pi / 2)) == []


def test_negative_rate_reported(base_params):
    p = base_params(math.pi / 2, kappa1=-1.0)
    assert "kappa1 nonnegative" in validate_params(p)
    with pytest.raises(InvalidParams):
        ensure_valid(p)


def test_nonfinite_fields_reported(base_params):
    p = base_params(0.0, G2=math.inf, J3=complex(math.nan, 0.0))
    violations = validate_params(p)
    assert "G2 finite" in violations
    assert "J3 finite" in violations


def test_negative_real_j2_rejected(base_params):
    p = base_params(math.pi / 2, J2=-0.01)
    assert "J2 nonnegative when real" in validate_params(p)
    # complex values in the J2 slot are legitimate (designed configurations)
    assert validate_params(base_params(math.pi / 2, J2=1.5j)) == []


def test_rate_unit_validation():
    with pytest.raises(ValueError):
        RateUnit("lightyears", 1.0)
    with pytest.raises(ValueError):
        RateUnit("gamma", 0.0)
    with pytest.raises(ValueError):
        RateUnit("gamma", -2.0)
    assert RateUnit("kappa2", 3.0).reference == "kappa2"


def test_unit_round_trip(base_params):
    p = base_params(1.0, 2.5, kappa1=3.0, kappa2=2.0, J3=1.0 + 2.0j)
    q = convert_unit(convert_unit(p, "kappa2"), "gamma")
    for name in ("kappa1", "kappa2", "gamma", "f", "G1", "G2", "J1"):
        assert getattr(q, name) == pytest.approx(getattr(p, name), rel=1e-14)
    assert q.J2 == pytest.approx(p.J2, rel=1e-14)
    assert q.J3 == pytest.approx(p.J3, rel=1e-14)
    assert q.theta == p.theta and q.phi == p.phi
    assert q.unit.reference == "gamma"
    assert q.unit.value == pytest.approx(p.unit.value, rel=1e-14)


def test_convert_unit_normalizes_reference_rate(base_params):
    p = base_params(0.0, kappa1=4.0, kappa2=2.0)
    q = convert_unit(p, "kappa2")
    assert q.kappa2 == 1.0
    assert q.kappa1 == pytest.approx(2.0)
    assert q.unit == RateUnit("kappa2", 2.0)
    assert convert_unit(p, "gamma") is p  # already gamma-referenced


def test_convert_unit_rejects_unknown_reference(base_params):
    with pytest.raises(ValueError):
        convert_unit(base_params(0.0), "hertz")


def test_model_params_json_round_trip(tmp_path, base_params):
    p = base_params(0.3, 5.1, J2=0.25j, J3=-1.5 + 0.25j,
                    unit=RateUnit("kappa2", 2.0))
    assert model_params_from_dict(model_params_to_dict(p)) == p
    path = tmp_path / "params.json"
    save_params(str(path), p)
    assert load_params(str(path)) == p


def test_bare_params_round_trip():
    b = BareParams(Delta1=10.0, Delta2=10.0, Delta_en=10.0, omega_m=10.0,
                   g1=4e-3, g2=4e-3, J1=0.5, J2=0.01, J3=4.476j,
                   kappa1=1.0, kappa2=1.0, gamma=1.0, f=10.0)
    assert bare_params_from_dict(bare_params_to_dict(b)) == b


def test_bare_params_constraints():
    with pytest.raises(ValueError):
        BareParams(Delta1=0.0, Delta2=0.0, Delta_en=0.0, omega_m=0.0,
                   g1=0.0, g2=0.0, J1=0.0, J2=0.0, J3=0.0,
                   kappa1=1.0, kappa2=1.0, gamma=1.0, f=1.0)
    with pytest.raises(ValueError):
        BareParams(Delta1=0.0, Delta2=0.0, Delta_en=0.0, omega_m=1.0,
                   g1=0.0, g2=0.0, J1=0.0, J2=0.0, J3=0.0,
                   kappa1=-1.0, kappa2=1.0, gamma=1.0, f=1.0)


def test_drives_round_trip_and_constraints():
    d = Drives(E1=1.0 + 2.0j, E2=-0.5j, Ep1=1.0, Ep2=0.25, delta=10.3)
    assert drives_from_dict(drives_to_dict(d)) == d
    assert drives_from_dict({}) == Drives()
    with pytest.raises(ValueError):
        Drives(Ep1=-0.1)


def test_transmission_point_constraints():
    tp = TransmissionPoint(y=0.0, T12=0.2, T21=0.9)
    assert tp.T12 == 0.2
    with pytest.raises(ValueError):
        TransmissionPoint(y=0.0, T12=-0.1, T21=0.0)
    with pytest.raises(ValueError):
        TransmissionPoint(y=0.0, T12=math.nan, T21=0.0)


def test_model_params_coerces_complex_slots(base_params):
    p = base_params(0.0, J2=0.01, J3=2)
    assert isinstance(p.J2, complex) and isinstance(p.J3, complex)
    assert p.J3 == 2.0 + 0.0j
