import math

import pytest

from bpb.certificate import (
    CorrectionCertificate,
    expected_bounds,
    norm_point_bound,
    normal_op_bound,
    nu_iteration_bound,
    transfer_bound,
)


def cert(**kw):
    base = dict(theorem_tag="norm:general", op_distance=0.1, theoretical_bound=0.2,
                point_distance=0.5, point_bound=1.0, attainment_residual=0.0, residual_tol=1e-8)
    base.update(kw)
    return CorrectionCertificate(**base)


def test_bound_values():
    assert norm_point_bound(0.25) == pytest.approx(2.0)
    assert nu_iteration_bound(0.2) == pytest.approx(sum(0.05 ** n for n in range(1, 200)))
    assert transfer_bound(0.1, 0.1) == pytest.approx(0.5)
    e = 0.02
    s = math.sqrt(2 * e)
    assert normal_op_bound(e) == pytest.approx((s + 2 * (2 * e) ** 0.25) / (1 - s) + 2 * s)


def test_failures_and_roundtrip():
    c = cert(extras={"a": (1.0, 2.0), "b": (3.0, 2.0)}, info={"k": 1}, notes=("x",))
    assert c.failures() == ["b"]
    assert not c.ok
    d = CorrectionCertificate.from_dict(c.to_dict())
    assert d == c
    assert cert().ok and cert().bound_ratio == pytest.approx(0.5)
    assert cert(op_distance=0.2 + 5e-10).ok
    assert "op_distance" in cert(op_distance=0.21).failures()
    assert "attainment_residual" in cert(attainment_residual=1e-7).failures()


def test_nan_fails():
    assert "op_distance" in cert(op_distance=float("nan")).failures()


@pytest.mark.parametrize("tag, op, point", [
    ("norm:general", 0.1, 4 * math.sqrt(0.1)),
    ("norm:positive+exact", 0.3, 0.0),
    ("nu:general", 0.1, 0.1),
    ("nu:selfadjoint", 0.9, 0.1),
    ("nu:unitary", 0.1, 0.0),
    ("nu:general+exact", 0.5, 0.0),
    ("nu:selfadjoint+exact", 1.3, 0.0),
])
def test_expected_bounds(tag, op, point):
    b = expected_bounds(tag, 0.1)
    assert b["op"] == pytest.approx(op) and b["point"] == pytest.approx(point)


def test_expected_bounds_unknown():
    with pytest.raises(ValueError):
        expected_bounds("spam:general", 0.1)
