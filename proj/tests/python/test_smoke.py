"""Python smoke tests for the compiled module: closed-form anchors only."""

import math

import pytest

import fluctlab as fl


def test_srw_basics():
    d = fl.srw()
    assert d.pmf(1) == 0.5
    assert d.pmf(2) == 0.0
    assert d.tail_plus(0) == 0.5
    assert d.H(1) == 0.0
    assert abs(d.mass_check() - 1.0) < 1e-14


def test_gamblers_ruin():
    p = fl.exit_upward(fl.srw(), 8)
    for x in range(9):
        assert abs(p[x] - (x + 1) / 10.0) < 1e-12


def test_ladder_closed_forms():
    ld = fl.compute_ladder(fl.srw(), n=64)
    assert ld.method == "wh-poly"
    assert abs(ld.v0 - 2.0) < 1e-12
    assert abs(ld.z_pmf[1] - 1.0) < 1e-12
    assert abs(ld.green_halfline(3, 3) - 8.0) < 1e-10
    assert abs(fl.hit_before(ld, 3, 7) - 4.0 / 8.0) < 1e-10
    assert abs(fl.conditioned_hit(ld, 0, 20) - 1.0) < 1e-9


def test_h_lambda_identities():
    for xi in (1.0, 2.0, 10.0):
        assert abs(fl.h_lambda(xi, 0.5, 1.5) - 1.0) < 1e-10
    assert abs(fl.h_lambda(1.0, 0.75, 1.5) - 1.5) < 1e-10


def test_zipf_tails_and_diagnostic_tags():
    d = fl.zipf_pair(0.3, 0.7)
    assert abs(d.pmf(10) - 0.3 * (1 / 9 - 1 / 10)) < 1e-15
    assert d.tags.rs_class == -1
    assert d.tags.recurrence_class == -1
    assert abs(d.truncated_mean_A(10) + 0.4 * (1 + sum(1 / k for k in range(1, 10)))) < 1e-13


def test_mc_determinism_and_value():
    a = fl.mc_exit(fl.srw(), 8, 0, 100000, seed=42, what="p_up")
    b = fl.mc_exit(fl.srw(), 8, 0, 100000, seed=42, what="p_up")
    assert a.estimate == b.estimate
    assert abs(a.estimate - 0.1) < 4 * a.std_error
    assert a.cap_hits == 0


def test_formula_applicability_error():
    d = fl.srw()
    ld = fl.compute_ladder(d, n=256)
    with pytest.raises(fl.ApplicabilityError):
        fl.evaluate_formula("T2-1", d, ld, [16, 64])


def test_potential_kernel_srw():
    ker = fl.LatticeKernels(fl.srw())
    for x in (1, 5, 40):
        assert abs(ker.potential(x) - x) < 1e-8
        assert abs(ker.potential(-x) - x) < 1e-8
    v, bound = fl.potential_series(fl.srw(), 10)
    assert abs(v - 10.0) < 1e-6
    assert bound < 1e-4
