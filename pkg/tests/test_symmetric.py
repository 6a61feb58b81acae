import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratdeform.errors import AmbiguousClusterError, ValidationError
from stratdeform.polyalg import GaussianRational
from stratdeform.symmetric import (
    DiscriminantVector,
    elementary_symmetric,
    f_components,
    generalized_discriminants,
    multiplicity_type,
)

complex_entries = st.complex_numbers(
    min_magnitude=0.0, max_magnitude=3.0, allow_nan=False, allow_infinity=False
)


class TestElementarySymmetric:
    def test_small_example(self):
        assert elementary_symmetric([1, 2, 3]) == [6, 11, 6]

    def test_zeros(self):
        assert elementary_symmetric([0, 0, 0]) == [0, 0, 0]

    def test_single(self):
        assert elementary_symmetric([3 + 1j]) == [3 + 1j]

    @given(st.lists(complex_entries, min_size=1, max_size=6))
    @settings(max_examples=80, deadline=None)
    def test_against_poly_expansion(self, xs):
        # prod(u + x_i) has descending coefficients (1, s_1, ..., s_N)
        sig = elementary_symmetric(xs)
        coeffs = np.poly(np.asarray([-x for x in xs]))
        scale = 1.0 + float(np.max(np.abs(coeffs)))
        assert np.max(np.abs(np.asarray(sig) - coeffs[1:])) <= 1e-9 * scale


class TestKernelComponents:
    def test_single_slot(self):
        vals, total = f_components([2 + 1j])
        assert abs(vals[0] - 5.0) < 1e-12
        assert abs(total - 5.0) < 1e-12

    def test_homogeneity_degree(self):
        # degree 2 * N!: for N = 2 a factor 2 scales the total by 2^4
        _, t1 = f_components([1, 1])
        _, t2 = f_components([2, 2])
        assert abs(t2 - 16 * t1) <= 1e-10 * t2

    def test_positive_away_from_origin(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(1, 6))
            xs = rng.normal(size=n) + 1j * rng.normal(size=n)
            _, total = f_components(list(xs))
            assert total > 0.0
        vals, total = f_components([0.0, 0.0, 0.0])
        assert total == 0.0 and all(v == 0 for v in vals)

    def test_euler_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(80):
            n = int(rng.integers(1, 6))
            xs = list(rng.normal(size=n) + 1j * rng.normal(size=n))
            vals, total = f_components(xs)
            assert abs(sum(vals) - total) <= 1e-12 * total

    def test_scaling_law(self):
        rng = np.random.default_rng(9)
        for _ in range(40):
            n = int(rng.integers(1, 6))
            xs = list(rng.normal(size=n) + 1j * rng.normal(size=n))
            lam = float(10 ** rng.uniform(-1, 1))
            _, t1 = f_components(xs)
            _, t2 = f_components([lam * x for x in xs])
            d = 2 * math.factorial(n)
            assert abs(t2 - lam ** d * t1) <= 1e-8 * max(t2, lam ** d * t1)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(13)
        for _ in range(30):
            n = int(rng.integers(2, 6))
            xs = list(rng.normal(size=n) + 1j * rng.normal(size=n))
            perm = list(rng.permutation(n))
            vals, total = f_components(xs)
            pvals, ptotal = f_components([xs[i] for i in perm])
            assert abs(total - ptotal) <= 1e-10 * total
            for slot, src in enumerate(perm):
                assert abs(pvals[slot] - vals[src]) <= 1e-10 * (1 + abs(vals[src]))

    def test_cap_enforced(self):
        with pytest.raises(ValidationError):
            f_components([1.0] * 9)

    def test_overflow_flagged_beyond_float_range(self):
        # lifting the cap trades the guard for an explicit overflow signal:
        # the kernel total for nine unit entries is exp(~1.6e6)
        from stratdeform.errors import RangeOverflowError
        from stratdeform.symmetric import kernel_components_log

        with pytest.raises(RangeOverflowError):
            f_components([1.0] * 9, n_cap=9)
        _, total = kernel_components_log([1.0] * 9, n_cap=9)
        assert total.log_mag > 1e6  # representable in the log domain


class TestGeneralizedDiscriminants:
    def test_planted_example(self):
        dv = generalized_discriminants([Fraction(1), Fraction(1), Fraction(2)])
        assert [v.re for v in dv.values] == [3, 2, 0]
        assert dv.distinct_value_count() == 2

    def test_single_value(self):
        dv = generalized_discriminants([7, 7, 7])
        assert [v.re for v in dv.values] == [3, 0, 0]
        assert dv.distinct_value_count() == 1

    def test_all_distinct_with_zero(self):
        dv = generalized_discriminants([0, 1, 2])
        assert [v.re for v in dv.values] == [3, 6, 4]
        assert dv.distinct_value_count() == 3

    def test_float_entries(self):
        dv = generalized_discriminants([0.0, 1.0, 1.0])
        assert abs(dv.values[1] - 2.0) < 1e-12
        assert abs(dv.values[2]) < 1e-12

    def test_exact_gaussian_entries(self):
        i = GaussianRational(Fraction(0), Fraction(1))
        one = GaussianRational.one()
        dv = generalized_discriminants([i, one, one])
        assert dv.distinct_value_count() == 2

    def test_planted_multiplicities_exhaustive(self):
        # l distinct values <=> D_l != 0 and D_{l+1} = ... = D_N = 0
        for n in range(1, 8):
            for m0 in range(0, n + 1):
                rest = n - m0
                for k in range(0 if rest == 0 else 1, rest + 1):
                    if rest and k == 0:
                        continue
                    sizes = [rest // k + (1 if j < rest % k else 0)
                             for j in range(k)] if k else []
                    vec = [Fraction(0)] * m0
                    for j, size in enumerate(sizes):
                        vec.extend([Fraction(j + 1)] * size)
                    if not vec:
                        continue
                    planted = k + (1 if m0 > 0 else 0)
                    dv = generalized_discriminants(vec)
                    assert dv.distinct_value_count() == planted

    def test_json_serialization(self):
        dv = generalized_discriminants([0, 1, 2])
        assert dv.to_json() == [[3.0, 0.0], [6.0, 0.0], [4.0, 0.0]]


class TestMultiplicityType:
    def test_mixed_example(self):
        mt = multiplicity_type([0, 3, 3, 5])
        assert mt.m0 == 1
        assert mt.parts == (1, 2)
        assert mt.zero_class == (0,)
        assert mt.classes == ((3,), (1, 2))
        assert mt.distinct_value_count == 3

    def test_all_zero(self):
        mt = multiplicity_type([0, 0])
        assert mt.m0 == 2 and mt.parts == ()

    def test_distinct_nonzero(self):
        mt = multiplicity_type([1, 2])
        assert mt.m0 == 0 and mt.parts == (1, 1)

    def test_exact_tolerance(self):
        mt = multiplicity_type([1.0, 1.0, 2.0], tol=0)
        assert mt.parts == (1, 2)

    def test_ambiguous_band_reported(self):
        # gap of 1.2e-8 sits between the threshold 6e-9 and its 3x band
        with pytest.raises(AmbiguousClusterError):
            multiplicity_type([1.0, 1.0 + 1.2e-8, 5.0], tol=1e-9)

    def test_agrees_with_discriminants(self):
        rng = np.random.default_rng(21)
        for _ in range(40):
            n = int(rng.integers(1, 7))
            pool = [0, 1 + 1j, 2, -1.5j]
            xs = [pool[i] for i in rng.integers(0, len(pool), size=n)]
            mt = multiplicity_type(xs)
            dv = generalized_discriminants(xs)
            assert mt.distinct_value_count == dv.distinct_value_count()
