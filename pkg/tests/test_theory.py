import math

import numpy as np
import pytest

from isinglearn import exact
from isinglearn.theory import (ThresholdError, bound_lemma1, bound_thm1, bound_thm3, bound_thm4, bound_thm5,
                               boundary_field, boundary_field_iteration, converged_incoherence,
                               hbar_and_theta_tilde, hbar_iteration, tree_incoherence, tree_params,
                               tree_threshold)


# fixed points

def test_boundary_field_subcritical_zero():
    assert boundary_field(4, 0.0) == 0.0
    assert boundary_field(4, 0.1) == 0.0
    assert boundary_field(3, math.atanh(0.5)) == 0.0


@pytest.mark.parametrize("delta,theta", [(4, 0.5), (3, 0.7), (5, 0.3), (10, 0.2), (4, 2.0)])
def test_boundary_field_residual_and_second_solver(delta, theta):
    h = boundary_field(delta, theta)
    assert h > 0
    assert abs(h - (delta - 1) * math.atanh(math.tanh(theta) * math.tanh(h))) < 1e-12
    assert abs(h - boundary_field_iteration(delta, theta)) < 1e-10


def test_boundary_field_example_value():
    assert boundary_field(4, 0.5) == pytest.approx(1.236, abs=1e-3)


def test_boundary_field_domain():
    with pytest.raises(ValueError):
        boundary_field(1, 0.5)
    with pytest.raises(ValueError):
        boundary_field(4, -0.1)


def test_hbar():
    hbar, tt = hbar_and_theta_tilde()
    t = math.tanh(hbar)
    assert abs(hbar * t - (1 - t * t) ** 2) < 1e-12
    assert hbar == pytest.approx(0.690, abs=1e-3) and tt == pytest.approx(0.867, abs=1e-3)
    assert tt == pytest.approx(math.tanh(hbar) / hbar, abs=1e-15)
    assert abs(hbar - hbar_iteration()) < 1e-12
    res = lambda h: h * math.tanh(h) - (1 - math.tanh(h) ** 2) ** 2
    assert res(0.5) < 0 < res(0.8)


# tree incoherence

def test_tree_theta_zero():
    rep = tree_incoherence(4, 0.0, 5)
    assert rep.entry == 0.0 and np.allclose(rep.Q_SS, np.eye(4))


def test_tree_examples():
    assert tree_incoherence(4, 0.6, 6).entry > 1
    assert tree_incoherence(4, 0.2, 6).entry < 1


def test_tree_domain():
    with pytest.raises(ValueError):
        tree_incoherence(4, 0.3, 1)
    with pytest.raises(ValueError):
        tree_incoherence(2, 0.3, 3)


@pytest.mark.parametrize("delta", [3, 4])
@pytest.mark.parametrize("theta", [0.2, 0.5, 0.8])
def test_tree_matches_enumeration(delta, theta):
    P = tree_params(delta, 2, theta)
    rep = exact.incoherence_check(P, 0)
    tree = tree_incoherence(delta, theta, 2)
    assert np.max(np.abs(rep.Q_SS - tree.Q_SS)) < 1e-9
    assert abs(rep.sigma_min - tree.sigma_min) < 1e-9
    # every depth-2 vertex gives the same entry; compare against one on the first branch
    first_child = min(rep.S)
    i = min(v for v in rep.Sc if P.graph.has_edge(first_child, v))
    k = rep.Sc.index(i)
    assert abs(rep.incoherence_vector[k] - tree.entry) < 1e-9
    assert np.max(np.abs(rep.Q_ScS[k] - tree.Q_iS)) < 1e-9


def test_tree_entries_independent_of_outer_depth():
    a = tree_incoherence(4, 0.5, 4).entries_by_depth
    b = tree_incoherence(4, 0.5, 30).entries_by_depth[:3]
    assert np.allclose(a, b, atol=1e-12)


@pytest.mark.parametrize("delta", [4, 5, 8])
def test_tree_entry_continuous_in_theta(delta):
    # h* switches on like sqrt(theta - theta_u) at theta_u = atanh(1/(delta-1)); the entry is
    # continuous there but steep, so that window is checked on a finer grid
    theta_u = math.atanh(1 / (delta - 1))
    grid = np.arange(0.0, 1.2, 0.01)
    vals = np.array([converged_incoherence(delta, th).max_entry for th in grid])
    jumps = np.abs(np.diff(vals))
    outside = (grid[1:] < theta_u - 0.01) | (grid[:-1] > theta_u + 0.05)
    assert np.max(jumps[outside]) <= 0.05
    fine = np.arange(theta_u - 0.01, theta_u + 0.05, 1e-4)
    fvals = np.array([converged_incoherence(delta, th).max_entry for th in fine])
    assert np.max(np.abs(np.diff(fvals))) <= 0.05


def test_converged_incoherence_flags():
    c = converged_incoherence(4, 0.3)
    assert c.converged and c.depth <= 30
    c = converged_incoherence(4, 0.3, t_max=3, tol=1e-15)
    assert not c.converged and c.depth == 3


# threshold

def test_threshold_anchor():
    assert tree_threshold(4) == pytest.approx(0.4203, abs=5e-3)


def test_threshold_is_crossing():
    th = tree_threshold(4, tol=1e-10)
    assert converged_incoherence(4, th - 1e-6).max_entry < 1 <= converged_incoherence(4, th + 1e-6).max_entry


@pytest.mark.parametrize("delta", [4, 6])
def test_threshold_monotone_in_eps(delta):
    ths = [tree_threshold(delta, e) for e in (0.0, 0.01, 0.03, 0.05)]
    assert all(b >= a for a, b in zip(ths, ths[1:]))


def test_threshold_unreachable_level():
    # the tree entry peaks near 1.075 for delta=4, so 1.1 is never reached
    with pytest.raises(ThresholdError):
        tree_threshold(4, 0.1)


def test_threshold_scaled_decreasing_in_delta():
    scaled = [d * tree_threshold(d) for d in (10, 20, 40)]
    assert scaled[0] > scaled[1] > scaled[2] > 1.19


def test_threshold_domain():
    with pytest.raises(ValueError):
        tree_threshold(3)
    with pytest.raises(ValueError):
        tree_threshold(4, -0.1)


# bounds

def test_thm1_formula_and_flags():
    r = bound_thm1(10, 2, 0.1, 0.05)
    assert r.value == pytest.approx(8 / (math.tanh(0.1) - 0.25) ** 2 * math.log(400), rel=1e-14)
    assert r.hypothesis_ok
    assert not bound_thm1(10, 2, math.atanh(0.25), 0.05).hypothesis_ok
    gap = math.tanh(0.1) - 0.25
    assert bound_thm1(20, 2, 0.1, 0.05).value - r.value == pytest.approx(8 / gap**2 * math.log(2), rel=1e-12)


def test_thm3_defaults_echoed():
    r = bound_thm3(10, 3, 0.2, 0.05)
    assert r.extra["eps"] == pytest.approx(math.sinh(0.4) / 4)
    assert r.extra["gamma"] == pytest.approx(math.exp(-2.4) * 2.0**-6)
    r1 = bound_thm3(10, 1, 0.2, 0.05)
    assert r1.extra["gamma"] == pytest.approx(math.exp(-0.8) / 4)
    assert r.inputs["K"] == 1.0


def test_thm4_kappa_and_flag():
    r = bound_thm4(50, 4, 0.1, 0.05)
    assert r.extra["kappa"] == pytest.approx(math.tanh(0.1))
    assert r.hypothesis_ok
    assert not bound_thm4(50, 4, 0.3, 0.05, K=1.0).hypothesis_ok
    with pytest.raises(ValueError):
        bound_thm4(50, 4, 0.1, 0.05, alpha=0.0)


def test_thm5_scaling_and_lambda():
    a, b = bound_thm5(100, 4, 0.1, 0.05), bound_thm5(100, 4, 0.2, 0.05)
    assert a.value / b.value == pytest.approx(4.0, rel=1e-14)
    assert a.extra["lambda"] == pytest.approx(0.1 / 2)
    with pytest.raises(ValueError):
        bound_thm5(100, 2, 0.1, 0.05)


def test_lemma1_limits_and_flag():
    vals = [bound_lemma1(n, 4, 0.01, 0.1, 0.5).extra["raw"] for n in (1e6, 1e8, 1e10, 1e12)]
    assert all(b < a for a, b in zip(vals, vals[1:])) and vals[-1] < 1e-6
    r = bound_lemma1(1000, 4, 1e-3, 0.1, 0.5)
    assert 0.0 <= r.value <= 1.0
    assert not r.hypothesis_ok
    assert bound_lemma1(1000, 4, 1e-4, 0.1, 0.5).hypothesis_ok
