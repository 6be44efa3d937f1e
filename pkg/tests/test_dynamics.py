"""Numeric layer: integration accuracy, degree tests, variational checks."""

import math
import random

import numpy as np
import pytest

from quartic_nve.dynamics import (NumericPotential, integrate_hamilton,
                                  nve_coefficient_samples,
                                  polynomial_degree_test,
                                  variational_consistency)
from quartic_nve.jets import pullback_condition
from quartic_nve.mpoly import MPoly
from quartic_nve.potential import parse_potential


def numeric(text):
    return NumericPotential.from_potential(parse_potential(text))


class TestIntegration:
    def test_free_particle(self):
        traj = integrate_hamilton(numeric("1"), (0.0, 2.0, 0.0, 0.0), 1e-3, 1.0)
        assert abs(traj.states[-1, 0] - 2.0) < 1e-12
        assert traj.energy_drift() < 1e-14

    def test_harmonic_closed_form(self):
        traj = integrate_hamilton(numeric("x1^2/2"), (1.0, 0.0, 0.0, 0.0), 1e-3, 1.0)
        assert abs(traj.states[-1, 0] - math.cos(1.0)) < 1e-8

    def test_plane_invariance(self):
        traj = integrate_hamilton(numeric("x1^2/2 + (x1^4+1)*x2^2"),
                                  (0.3, 1.1, 0.0, 0.0), 1e-3, 10.0)
        assert traj.max_plane_deviation() < 1e-12

    def test_energy_conservation(self):
        for text in ("x1^2/2", "x1^4/4 + x1^2/2"):
            traj = integrate_hamilton(numeric(text), (1.0, 0.5, 0.0, 0.0), 1e-3, 10.0)
            assert traj.energy_drift() < 1e-8, text

    def test_divergence_flagged(self):
        traj = integrate_hamilton(numeric("-x1^4"), (1.0, 1.0, 0.0, 0.0), 1e-3, 10.0)
        assert traj.diverged

    def test_bad_steps_rejected(self):
        with pytest.raises(ValueError):
            integrate_hamilton(numeric("1"), (0, 0, 0, 0), -1e-3, 1.0)


class TestNveSamples:
    def test_zero_alpha(self):
        traj = integrate_hamilton(numeric("x1^2/2"), (1.0, 0.0, 0.0, 0.0), 1e-3, 1.0)
        samples = nve_coefficient_samples(traj, numeric("x1^2/2"))
        assert np.allclose(samples, 0.0)

    def test_flat_phi_linear_motion(self):
        # phi constant, alpha = x1^4, x1(0)=0, y1(0)=1: a(t) = t^4
        pot = numeric("1 - x1^4*x2^2/2 + x2^3")  # alpha = x1^4 exactly
        traj = integrate_hamilton(pot, (0.0, 1.0, 0.0, 0.0), 1e-3, 2.0)
        samples = nve_coefficient_samples(traj, pot)
        assert np.max(np.abs(samples - traj.times ** 4)) < 1e-10

    def test_harmonic_cosine_power(self):
        pot = numeric("x1^2/2 - x1^4*x2^2/2")
        traj = integrate_hamilton(pot, (1.0, 0.0, 0.0, 0.0), 1e-3, 2.0)
        samples = nve_coefficient_samples(traj, pot)
        assert np.max(np.abs(samples - np.cos(traj.times) ** 4)) < 1e-7

    def test_off_plane_rejected(self):
        pot = numeric("x1^2/2 + x2^2")
        traj = integrate_hamilton(pot, (1.0, 0.0, 0.5, 0.0), 1e-3, 1.0)
        with pytest.raises(ValueError):
            nve_coefficient_samples(traj, pot)


class TestDegreeTest:
    def test_exact_quartic_passes(self):
        t = np.arange(0, 10.0, 1e-3)
        ok, residual = polynomial_degree_test((2 * t + 1) ** 4, 4)
        assert ok and residual < 1e-9

    def test_cosine_power_fails(self):
        t = np.arange(0, 5.0, 1e-3)
        ok, _ = polynomial_degree_test(np.cos(t) ** 4, 4)
        assert not ok

    def test_constant_passes(self):
        ok, residual = polynomial_degree_test(np.full(2000, 3.7), 4)
        assert ok and residual < 1e-12

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            polynomial_degree_test(np.arange(300.0), 4, stride=100)


class TestForwardDirection:
    def test_members_pass_quartic_fail_cubic(self):
        rng = random.Random(12)
        for _ in range(3):
            coeffs = [rng.randint(-3, 3) for _ in range(4)] + [rng.choice([1, 2, -2])]
            terms = " + ".join(f"({c})*x1^{i}" for i, c in enumerate(coeffs) if c)
            pot = numeric(f"1 + ({terms})*x2^2")
            init = (rng.uniform(0.3, 1.2), rng.uniform(0.4, 1.4), 0.0, 0.0)
            traj = integrate_hamilton(pot, init, 1e-3, 10.0)
            assert traj.energy_drift() < 1e-8
            samples = nve_coefficient_samples(traj, pot)
            ok4, res4 = polynomial_degree_test(samples, 4)
            ok3, _ = polynomial_degree_test(samples, 3)
            assert ok4 and res4 < 1e-6
            assert not ok3

    def test_symbolic_and_numeric_agree_on_nonmember(self):
        # V = x1^2/2 + x1^4 x2^2: the jet condition survives and the numeric
        # degree test fails on a generic trajectory
        pot_exact = parse_potential("x1^2/2 + x1^4*x2^2")
        pb = pullback_condition(MPoly.var("a5"), pot_exact.alpha, pot_exact.phi)
        assert not pb.is_zero
        pot = NumericPotential.from_potential(pot_exact)
        traj = integrate_hamilton(pot, (0.9, 0.7, 0.0, 0.0), 1e-3, 10.0)
        samples = nve_coefficient_samples(traj, pot)
        ok, _ = polynomial_degree_test(samples, 4)
        assert not ok


class TestVariationalConsistency:
    def test_zero_delta(self):
        assert variational_consistency(numeric("1 + x1*x2^2"), (1.0, 0.0, 0.0, 0.0),
                                       delta=0.0) == 0.0

    def test_linear_alpha_small_error(self):
        # beta = 0, alpha linear: deviation per delta stays below 1e-3
        err = variational_consistency(numeric("1 + x1*x2^2"), (0.5, 1.0, 0.0, 0.0),
                                      delta=1e-6, dt=1e-3, horizon=1.0)
        assert err < 1e-3

    def test_member_family_small_error(self):
        err = variational_consistency(numeric("1 + (x1^4+1)*x2^2"),
                                      (0.5, 1.0, 0.0, 0.0),
                                      delta=1e-6, dt=1e-3, horizon=1.0)
        assert err < 1e-3

    def test_first_order_contract_with_cubic_term(self):
        # with a genuine x2^3 term the deviation is first order in delta:
        # halving delta halves the error
        pot = numeric("1 + (x1^4+1)*x2^2 + x2^3")
        e1 = variational_consistency(pot, (0.5, 1.0, 0.0, 0.0), delta=1e-5)
        e2 = variational_consistency(pot, (0.5, 1.0, 0.0, 0.0), delta=5e-6)
        assert 1.5 <= e1 / e2 <= 2.5

    def test_quadratic_scaling_without_cubic_term(self):
        # with beta = 0 the transverse dynamics is exactly linear and the
        # deviation is second order: halving delta quarters the error
        pot = numeric("1 + (x1^4+1)*x2^2")
        e1 = variational_consistency(pot, (0.5, 1.0, 0.0, 0.0), delta=1e-5)
        e2 = variational_consistency(pot, (0.5, 1.0, 0.0, 0.0), delta=5e-6)
        assert 3.4 <= e1 / e2 <= 4.6

    def test_off_plane_rejected(self):
        with pytest.raises(ValueError):
            variational_consistency(numeric("1 + x1*x2^2"), (1.0, 0.0, 0.1, 0.0))

    def test_non_invariant_rejected(self):
        # a potential violating invariance cannot even be parsed, so the
        # pre-check happens upstream of the integrator
        from quartic_nve.potential import InvariantPlaneError
        with pytest.raises(InvariantPlaneError):
            parse_potential("x1^2/2 + x2")
