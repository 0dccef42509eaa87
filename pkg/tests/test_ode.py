import math

import numpy as np
import pytest

from shrinkers.ode import EventSpec, IntegratorConfig, SystemState, integrate, reverse, step


def exp_rhs(y, u):
    return u


def osc_rhs(y, u):
    return np.array([u[1], -u[0]])


def fixed_step(rhs, u0, y_end, n):
    s = SystemState(0.0, np.asarray(u0, dtype=float))
    h = y_end / n
    for _ in range(n):
        s, _ = step(rhs, s, h)
    return s.u


def test_step_constant_exact():
    s, err = step(lambda y, u: np.zeros_like(u), SystemState(0.0, np.array([1.0])), 0.5)
    assert s.u[0] == 1.0
    assert np.all(err == 0)


def test_step_exponential():
    s, err = step(exp_rhs, SystemState(0.0, np.array([1.0])), 0.1)
    assert abs(s.u[0] - math.exp(0.1)) < 1e-6
    # error estimate is the embedded difference, small but nonzero
    assert 0 < abs(err[0]) < 1e-6


def test_step_overflow_flags_divergence():
    s, _ = step(lambda y, u: -u**3, SystemState(0.0, np.array([1e200])), 0.1)
    assert s.diverged


def test_step_rejects_nonpositive_h():
    with pytest.raises(ValueError):
        step(exp_rhs, SystemState(0.0, np.array([1.0])), 0.0)


def test_oscillator_period():
    cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
    tr = integrate(osc_rhs, SystemState(0.0, np.array([0.0, 1.0])), 2 * math.pi, cfg)
    assert tr.reason == "reached_end"
    assert np.max(np.abs(tr.final.u - [0.0, 1.0])) < 1e-8


def test_event_at_log2():
    ev = EventSpec(lambda s: s.u[0] - 1.0, 0, True, "one")
    tr = integrate(exp_rhs, SystemState(0.0, np.array([0.5])), 2.0, IntegratorConfig(), [ev])
    assert tr.reason == "event"
    assert abs(tr.hits("one")[0].y - math.log(2)) < 1e-8
    assert tr.ys[-1] == pytest.approx(math.log(2), abs=1e-8)


def test_empty_span_rejected():
    with pytest.raises(ValueError):
        integrate(exp_rhs, SystemState(1.0, np.array([1.0])), 1.0)


def test_local_error_control_exponential():
    errs = []
    for tol in (1e-6, 1e-8, 1e-10):
        cfg = IntegratorConfig(rel_tol=tol, abs_tol=tol * 1e-2)
        tr = integrate(exp_rhs, SystemState(0.0, np.array([1.0])), 1.0, cfg)
        errs.append(abs(tr.final.u[0] - math.e))
    assert errs[0] > errs[1] > errs[2]


@pytest.mark.parametrize("problem", ["exp", "osc"])
def test_fixed_step_order(problem):
    if problem == "exp":
        rhs, u0, exact = exp_rhs, [1.0], lambda: np.array([math.e])
    else:
        rhs, u0, exact = osc_rhs, [0.0, 1.0], lambda: np.array([math.sin(1.0), math.cos(1.0)])
    ns = np.array([4, 8, 16, 32])
    e = np.array([np.max(np.abs(fixed_step(rhs, u0, 1.0, n) - exact())) for n in ns])
    order = np.polyfit(np.log(1.0 / ns), np.log(e), 1)[0]
    assert abs(order - 5) < 0.3


def test_step_limit_partial():
    cfg = IntegratorConfig(max_steps=5, initial_step=1e-3, max_step=1e-3)
    tr = integrate(exp_rhs, SystemState(0.0, np.array([1.0])), 1.0, cfg)
    assert tr.reason == "step_limit"
    assert tr.ys[-1] < 1.0


def test_divergence_threshold():
    tr = integrate(lambda y, u: u * u, SystemState(0.0, np.array([1.0])), 2.0)
    assert tr.reason == "diverged"
    assert tr.ys[-1] < 1.0


def test_event_independent_of_max_step():
    ev = EventSpec(lambda s: s.u[0] - 1.0, 0, True)
    locs = []
    for ms in (0.5, 0.05, 0.005):
        cfg = IntegratorConfig(max_step=ms)
        tr = integrate(exp_rhs, SystemState(0.0, np.array([0.5])), 2.0, cfg, [ev])
        locs.append(tr.events[0].y)
    tol = IntegratorConfig().rel_tol * math.log(2)
    assert max(locs) - min(locs) < 10 * tol


def test_samples_increase_and_deterministic():
    run = lambda: integrate(osc_rhs, SystemState(0.0, np.array([0.0, 1.0])), 10.0)
    a, b = run(), run()
    assert np.all(np.diff(a.ys) > 0)
    assert np.array_equal(a.ys, b.ys) and np.array_equal(a.us, b.us)


def test_event_bracketed_by_samples():
    ev = EventSpec(lambda s: s.u[0], 0, False, "zero")
    tr = integrate(osc_rhs, SystemState(0.0, np.array([0.0, 1.0])), 10.0, IntegratorConfig(), [ev])
    hits = tr.hits("zero")
    assert [round(h.y / math.pi) for h in hits] == [1, 2, 3]
    for h in hits:
        assert abs(h.y - round(h.y / math.pi) * math.pi) < 1e-8
        i = np.searchsorted(tr.ys, h.y)
        assert 0 < i < len(tr.ys)
        assert tr.ys[i - 1] <= h.y <= tr.ys[i]


def test_dense_output():
    tr = integrate(osc_rhs, SystemState(0.0, np.array([0.0, 1.0])), 5.0, IntegratorConfig(max_step=0.05))
    ys = np.linspace(0, 5, 77)
    assert np.max(np.abs(tr(ys)[:, 0] - np.sin(ys))) < 1e-7


def test_reverse_integration():
    back = reverse(exp_rhs)
    tr = integrate(back, SystemState(-1.0, np.array([math.e])), 0.0)
    assert abs(tr.final.u[0] - 1.0) < 1e-9


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=0)
    with pytest.raises(ValueError):
        IntegratorConfig(initial_step=1.0, max_step=0.1)
    with pytest.raises(ValueError):
        IntegratorConfig(max_steps=0)
