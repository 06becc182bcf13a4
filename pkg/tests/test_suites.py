import numpy as np
import pytest

from ricciforge import suites


@pytest.mark.parametrize("runner", [suites.green_ode, suites.green_limit, suites.oracle_hopf,
                                    suites.oracle_conformal, suites.oracle_round])
def test_fixed_runners_pass(runner):
    r = runner()
    assert r.passed, r


def test_ricci_band_and_explicit_lambda():
    assert suites.ricci_band(3, "auto", 2000).passed
    # far too small a Lambda breaks the upper bound
    assert not suites.ricci_band(1, 2.0, 2000).passed


def test_layers_report_records_power_resolution():
    r = suites.layer_consistency(2, 20)
    assert r.passed and "power 1" in r.notes and r.extra["power1_deviation"] > 1e-5


def test_curve_speed_fails_beyond_its_range():
    assert suites.curve_speed(0.1).passed
    assert not suites.curve_speed(0.2).passed


def test_group_runners():
    assert suites.group_index(4).value == 4
    assert suites.group_relations(4).passed


def test_framebundle_runner():
    assert suites.framebundle(1.0, 2.0, 3.0).passed
    assert not suites.framebundle(0.0, 1.0, 1.0).passed
    assert not suites.framebundle(-1.0, 1.0, 1.0).passed


def test_timing_flag():
    assert suites.green_ode().runtime_ms == 0
    assert suites.green_ode(timing=True).runtime_ms >= 0


def test_averaging_identity_deviation_small():
    x = np.random.default_rng(0).normal(size=(20, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    assert suites.averaging_deviation(4, x).max() < 1e-10
