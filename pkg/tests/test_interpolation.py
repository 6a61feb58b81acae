import cmath
import math

import numpy as np
import pytest

from stratdeform.config import make_rng
from stratdeform.errors import ContractionError, ValidationError, XiViolationError
from stratdeform.interpolation import (
    dpsi_deta,
    gamma,
    lipschitz_probe,
    psi,
    psi_inverse,
    psi_stratified,
    sample_compatible_pair,
)
from stratdeform.symmetric import multiplicity_type


def closed_form_single(z, a, b, eta):
    den = abs(z) ** 2 + abs(z - a) ** 2
    return z + (abs(z) ** 2 * (b - a) + eta * z * abs(z - a) ** 2) / den


class TestGamma:
    def test_single_pair(self):
        assert abs(gamma([0, 1], [0, 1.1]) - 0.1) < 1e-12

    def test_zero_when_b_equals_a(self):
        assert gamma([1 + 1j, 2, -3], [1 + 1j, 2, -3]) == 0.0

    def test_single_root_convention(self):
        assert gamma([5], [7]) == 0.0

    def test_xi_violation_raises(self):
        with pytest.raises(XiViolationError):
            gamma([1, 1], [1, 2])
        with pytest.raises(XiViolationError):
            gamma([0, 1], [0.5, 1])


class TestPsi:
    def test_value_at_each_root(self):
        a = (1 + 1j, 2.0, 2.0)
        b = (1.5 + 1j, 2.5, 2.5)
        for eta in (0.0, 0.3 - 0.2j):
            for ai, bi in zip(a, b):
                assert psi(ai, a, b, eta) == bi

    def test_identity_when_unmoved(self):
        z = 0.37 - 0.91j
        assert psi(z, [1, 2, 3], [1, 2, 3], 0.0) == z

    def test_zero_is_fixed(self):
        assert psi(0.0, [1, 2], [1.1, 2.2], 0.5) == 0

    def test_single_root_closed_form(self):
        cases = [
            (2.0, 1.0, 2.0, 0.0, 2.8),
            (0.3 - 0.7j, 1 + 0.2j, 1.3 + 0.1j, 0.05 + 0.02j, None),
            (-2.0j, 0.5j, 0.7j, 0.1, None),
        ]
        for z, a, b, eta, pinned in cases:
            got = psi(z, [a], [b], eta)
            want = closed_form_single(z, a, b, eta)
            assert abs(got - want) <= 1e-12 * max(1.0, abs(want))
            if pinned is not None:
                assert abs(got - pinned) < 1e-12

    def test_homogeneity(self):
        rng = make_rng(17, 0)
        for k in range(60):
            n = int(rng.integers(1, 5))
            a, b, eta = sample_compatible_pair(n, rng)
            z = complex(*rng.normal(size=2))
            lam = 10.0 ** rng.uniform(-3, 3) * cmath.exp(1j * rng.uniform(0, 7))
            scale = max(abs(z), max(abs(v) for v in a + b))
            lhs = psi(lam * z, [lam * v for v in a], [lam * v for v in b], eta)
            rhs = lam * psi(z, a, b, eta)
            assert abs(lhs - rhs) <= 1e-9 * abs(lam) * max(scale, 1e-12)

    def test_continuity_at_merge(self):
        # two root slots collide; values follow the merged configuration
        z, eta = 0.4 + 0.3j, 0.07
        limit = psi(z, (1.0, 1.0, -2.0), (1.25, 1.25, -2.1), eta)
        eps = 1e-8
        moved = psi(z, (1.0, 1.0 + eps, -2.0), (1.25, 1.25 + eps, -2.1), eta)
        assert abs(moved - limit) <= 1e-6

    def test_interpolation_near_root(self):
        a = (1.0, 2.0 + 1j)
        b = (1.2, 2.1 + 1j)
        for ai, bi in zip(a, b):
            z = ai + 1e-8 * cmath.exp(0.3j)
            assert abs(psi(z, a, b, 0.01) - bi) <= 1e-5 * 2.3

    def test_xi_checked(self):
        with pytest.raises(XiViolationError):
            psi(0.5, [1, 1], [1, 1.5], 0.0)

    def test_empty_vectors_rejected(self):
        with pytest.raises(XiViolationError):
            psi(0.5, [], [], 0.0)


class TestPsiStratified:
    def test_agrees_with_plain_form(self):
        rng = make_rng(23, 0)
        for k in range(60):
            n = int(rng.integers(1, 5))
            a, b, eta = sample_compatible_pair(n, rng)
            mt = multiplicity_type(a)
            z = complex(*rng.normal(size=2)) * 1.3
            scale = max(1.0, max(abs(v) for v in a + b))
            s = psi_stratified(z, a, b, eta, mt)
            p = psi(z, a, b, eta)
            assert abs(s - p) <= 1e-9 * scale

    def test_identity_case(self):
        a = (0.0, 1.0, 1.0)
        mt = multiplicity_type(a)
        z = 0.3 - 0.6j
        assert psi_stratified(z, a, a, 0.0, mt) == z

    def test_affine_in_b_and_eta(self):
        a = (0.0, 1.0, 2.0 + 1j)
        b0 = (0.0, 1.1, 2.1 + 1j)
        b1 = (0.0, 0.9, 1.9 + 0.9j)
        eta0, eta1 = 0.1, -0.05 + 0.2j
        mt = multiplicity_type(a)
        z = 0.45 + 0.8j
        mid_b = tuple((u + v) / 2 for u, v in zip(b0, b1))
        mid = psi_stratified(z, a, mid_b, (eta0 + eta1) / 2, mt)
        v0 = psi_stratified(z, a, b0, eta0, mt)
        v1 = psi_stratified(z, a, b1, eta1, mt)
        assert abs(mid - (v0 + v1) / 2) <= 1e-9

    def test_type_mismatch_rejected(self):
        a = (1.0, 2.0)
        wrong = multiplicity_type((1.0, 1.0))
        with pytest.raises(ValidationError):
            psi_stratified(0.3, a, a, 0.0, wrong)


class TestEtaDerivative:
    def test_exact_zeros(self):
        a = (1.0, 2.0 + 1j)
        assert dpsi_deta(0.0, a) == 0
        for ai in a:
            assert dpsi_deta(ai, a) == 0

    def test_single_root_value(self):
        assert abs(dpsi_deta(1.0, [2.0]) - 0.5) < 1e-12

    def test_matches_finite_differences(self):
        rng = make_rng(29, 0)
        checked = 0
        for k in range(300):
            n = int(rng.integers(1, 5))
            a, b, eta = sample_compatible_pair(n, rng)
            nonzero = [abs(v) for v in a if abs(v) > 1e-9]
            reach = min(nonzero) if nonzero else 1.0
            z = 0.2 * reach * cmath.exp(1j * rng.uniform(0, 7))
            de = dpsi_deta(z, a, b, eta)
            scale = max(1.0, max(abs(v) for v in a + b))
            if abs(de) < 1e-4 * scale:
                continue
            checked += 1
            h = 1e-6 * scale
            fd = (psi(z, a, b, eta + h) - psi(z, a, b, eta - h)) / (2 * h)
            assert abs(fd - de) <= 1e-6 * abs(de)
        assert checked > 100

    def test_nonzero_off_special_points(self):
        rng = make_rng(31, 0)
        for k in range(50):
            a, b, eta = sample_compatible_pair(2, rng)
            nonzero = [abs(v) for v in a if abs(v) > 1e-9]
            reach = min(nonzero) if nonzero else 1.0
            z = rng.uniform(0.1, 0.6) * reach * cmath.exp(1j * rng.uniform(0, 7))
            assert dpsi_deta(z, a, b, eta) != 0


class TestInverse:
    def test_round_trip(self):
        rng = make_rng(37, 0)
        for k in range(40):
            n = int(rng.integers(1, 5))
            a, b, eta = sample_compatible_pair(n, rng, spread=0.02)
            z = complex(*rng.normal(size=2))
            w = psi(z, a, b, eta)
            back = psi_inverse(w, a, b, eta)
            scale = max(1.0, abs(z))
            assert abs(back - z) <= 1e-9 * scale

    def test_identity_inverse(self):
        a = (1.0, 2.0)
        assert psi_inverse(0.7 + 0.2j, a, a, 0.0) == 0.7 + 0.2j

    def test_root_goes_back(self):
        a = (0.0, 1.0, 1.0)
        b = (0.0, 1.05, 1.05)
        back = psi_inverse(b[1], a, b, 0.0)
        assert abs(back - a[1]) <= 1e-8

    def test_gate_refusal(self):
        a = (0.1, 1.0)
        b = (0.1, 3.0)  # gamma ~ 2.2, far beyond the contraction gate
        with pytest.raises(ContractionError):
            psi_inverse(0.5, a, b, 0.0)


class TestLipschitzProbe:
    def test_identity_configuration(self):
        rep = lipschitz_probe((1.0, 2.0), (1.0, 2.0), 0.0, 40, seed=7)
        assert rep.empirical_lipschitz == 1.0
        assert rep.empirical_colipschitz == 1.0
        assert rep.bound_satisfied

    def test_bounds_on_sampled_sweep(self):
        rng = make_rng(41, 0)
        for k in range(25):
            n = int(rng.integers(2, 5))
            a, b, eta = sample_compatible_pair(n, rng, spread=0.01)
            rep = lipschitz_probe(a, b, eta, 24, seed=100 + k)
            assert rep.bound_satisfied

    def test_joint_permutation_invariance(self):
        a = (0.0, 1.0, 2.0 + 1j, 2.0 + 1j)
        b = (0.0, 1.1, 2.1 + 1j, 2.1 + 1j)
        perm = (2, 0, 3, 1)
        ap = tuple(a[i] for i in perm)
        bp = tuple(b[i] for i in perm)
        r1 = lipschitz_probe(a, b, 0.03, 30, seed=5)
        r2 = lipschitz_probe(ap, bp, 0.03, 30, seed=5)
        assert r1 == r2

    def test_sample_count_guard(self):
        with pytest.raises(ValidationError):
            lipschitz_probe((1.0,), (1.0,), 0.0, 1, seed=0)
