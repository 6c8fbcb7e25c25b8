import json
import math

import pytest

import hsf


def test_kernel_values():
    pb = hsf.kernel("bulk", tau=1.0, z=0.3, zp=0.3)
    assert pb == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-14)
    assert hsf.kernel("dirichlet", tau=0.5, z=0.0, zp=1.0) == 0.0
    assert hsf.kernel("robin", c=0.0, tau=0.7, z=0.2, zp=1.1) == hsf.kernel("neumann", tau=0.7, z=0.2, zp=1.1)
    full = hsf.kernel("robin", c=2.0, tau=0.7, z=0.2, zp=1.1)
    assert full == pytest.approx(pb * 0 + hsf.kernel("bulk", tau=0.7, z=0.2, zp=1.1)
                                 + hsf.surface_kernel("robin", c=2.0, tau=0.7, z=0.2, zp=1.1), rel=1e-13)


def test_propagators():
    closed = hsf.closed_form_propagator("dirichlet", p=0.0, z=1.0, zp=1.0)
    assert closed == pytest.approx(0.5 * (1.0 - math.exp(-2.0)), rel=1e-14)
    flowing = hsf.flowing_propagator("neumann", p=1.0, z=0.1, zp=1.0, lambda_=1e-3, lambda0=1e3)
    exact = hsf.proper_time_propagator("neumann", p=1.0, z=0.1, zp=1.0)
    assert flowing == pytest.approx(exact, abs=1e-10)
    assert hsf.cdot_momentum_integral(1.0) == pytest.approx(-math.exp(-1.0) / (4 * math.pi ** 1.5), rel=1e-10)


def test_forests_round_trip():
    forests = hsf.enumerate_forests(2, 1, 6)
    assert len(forests) > 0
    for text in forests:
        ok, reason = hsf.validate_forest(text)
        assert ok, reason
        assert json.loads(text)["l"] == 1
    assert hsf.v2_bound(1, 1) == 1
    assert hsf.v2_bound(2, 2) == 5


def test_lemma_sweep_is_seeded():
    a = hsf.run_lemma("chain", samples=10, seed=3)
    b = hsf.run_lemma("chain", samples=10, seed=3)
    assert a["rows"] == b["rows"]
    assert a["violations"] == 0
    with pytest.raises(ValueError):
        hsf.run_lemma("nonsense", samples=1)


def test_tadpoles():
    bulk = hsf.bulk_tadpole(lambda0=10.0)
    assert bulk["a1_lambda0"] == pytest.approx(-0.425244043486708, rel=1e-9)
    assert abs(bulk["a1_zero"]) < 1e-12
    surf = hsf.surface_tadpole(bc="neumann", lambda0=10.0)
    assert surf["e1_lambda0"] == pytest.approx(surf["h1_lambda0"], abs=1e-10)
    assert surf["series"][-1][0] == 0.0
    with pytest.raises(ValueError):
        hsf.surface_tadpole(bc="dirichlet")


def test_amputation_degenerates_without_e():
    strict = hsf.amputation(s_ct=-0.05, e_ct=-0.006)
    assert strict["strict127"] and strict["strict128"]
    flat = hsf.amputation(s_ct=-0.05, e_ct=0.0)
    assert flat["degenerate"]
    assert not flat["strict127"] and not flat["strict128"]
