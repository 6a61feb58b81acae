import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratdeform.errors import (
    RootFindingError,
    SingularMatrixError,
    ValidationError,
)
from stratdeform.polyalg import (
    GaussianRational,
    MultiPoly,
    UniPolyView,
    discriminant_in_var,
    divides,
    exact_div,
    linear_coordinate_change,
    poly_eval,
    resultant,
    roots_univariate,
    squarefree_part,
    variables,
)


def view(p, var):
    return UniPolyView.from_poly(p, var)


# -- small exact polynomial strategies ----------------------------------------

coeff_ints = st.integers(min_value=-4, max_value=4)


@st.composite
def small_polys(draw, num_vars=2, max_deg=3, max_terms=4):
    n_terms = draw(st.integers(min_value=0, max_value=max_terms))
    terms = {}
    for _ in range(n_terms):
        exps = tuple(draw(st.integers(min_value=0, max_value=max_deg))
                     for _ in range(num_vars))
        c = draw(coeff_ints)
        if c:
            terms[exps] = GaussianRational(Fraction(c))
    return MultiPoly(num_vars, terms)


class TestEvaluate:
    def test_examples(self):
        x1, x2 = variables(2)
        p = x1 ** 2 - x1 * x2
        assert poly_eval(p, [2, 1]) == 2
        assert poly_eval(MultiPoly.constant(2, 1), [5.0, -3j]) == 1

    def test_homogeneity_example(self):
        x1, x2 = variables(2)
        p = x1 ** 2 - x1 * x2
        assert abs(poly_eval(p, [6, 3]) - 9 * poly_eval(p, [2, 1])) < 1e-12

    def test_dimension_mismatch(self):
        x1, _ = variables(2)
        with pytest.raises(ValidationError):
            poly_eval(x1, [1.0])

    @given(small_polys(), st.integers(min_value=0, max_value=7))
    @settings(max_examples=60, deadline=None)
    def test_homogeneous_scaling(self, p, angle_step):
        # restrict to the homogeneous part of top degree
        deg = p.total_degree()
        terms = {e: c for e, c in p.terms.items() if sum(e) == deg}
        hom = MultiPoly(2, terms)
        if hom.is_zero():
            return
        lam = 1.7 * complex(math.cos(angle_step), math.sin(angle_step))
        pt = [0.3 + 0.4j, -1.1 + 0.2j]
        lhs = poly_eval(hom, [lam * v for v in pt])
        rhs = lam ** deg * poly_eval(hom, pt)
        assert abs(lhs - rhs) <= 1e-10 * (1 + abs(rhs))


class TestSquarefree:
    def test_already_squarefree(self):
        x1, x2 = variables(2)
        p = x2 ** 2 - x1 * x2
        assert squarefree_part(view(p, 1)).to_poly() == p

    def test_collapses_power(self):
        x1, x2 = variables(2)
        assert squarefree_part(view(x2 ** 2, 1)).to_poly() == x2

    def test_collapses_cube(self):
        x1, x2 = variables(2)
        p = (x2 - x1) ** 3
        assert squarefree_part(view(p, 1)).to_poly() == x2 - x1

    def test_constant_returns_itself(self):
        p = MultiPoly.constant(2, 1)
        v = view(p, 1)
        assert squarefree_part(v).to_poly() == p

    def test_requires_monic(self):
        x1, x2 = variables(2)
        with pytest.raises(ValidationError):
            squarefree_part(view(x1 * x2 ** 2, 1))

    def test_squarefree_part_has_nonzero_discriminant(self):
        x1, x2 = variables(2)
        corpus = [
            x2 ** 3,
            (x2 - x1) ** 2 * x2,
            x2 ** 2 - x1 * x2,
            (x2 - x1) ** 2 * (x2 + x1) ** 3,
            x2 ** 4 - x1 ** 2 * x2 ** 2,
        ]
        for p in corpus:
            red = squarefree_part(view(p, 1))
            assert not discriminant_in_var(red).is_zero()


class TestResultant:
    def test_linear_pair_sign(self):
        x, a, b = variables(3)
        r = resultant(view(x - a, 0), view(x - b, 0))
        assert r == a - b

    def test_constant_second_argument(self):
        x, a, b = variables(3)
        r = resultant(view(x ** 2 + a * x, 0), view(MultiPoly.constant(3, 1), 0))
        assert r == MultiPoly.constant(3, 1)

    def test_quadratic_against_variable(self):
        x, u, _ = variables(3)
        r = resultant(view(x ** 2 - u, 0), view(x, 0))
        assert r == -u

    def test_two_constants_rejected(self):
        one = MultiPoly.constant(2, 1)
        with pytest.raises(ValidationError):
            resultant(view(one, 0), view(one, 0))

    def test_root_product_oracle(self):
        # Res(p, q) = prod over roots of p of q(root) for monic p
        rng = np.random.default_rng(11)
        x, u, _ = variables(3)
        for _ in range(25):
            cp = [Fraction(int(c)) for c in rng.integers(-3, 4, size=2)]
            cq = [Fraction(int(c)) for c in rng.integers(-3, 4, size=3)]
            p = x ** 2 + x.scale(cp[0]) + MultiPoly.constant(3, cp[1])
            q = x ** 3 + x.scale(cq[1]) + MultiPoly.constant(3, cq[2])
            r_exact = resultant(view(p, 0), view(q, 0)).evaluate([0, 0, 0])
            roots = roots_univariate([1, complex(cp[0]), complex(cp[1])])
            prod = 1.0
            for root in roots:
                prod *= q.evaluate([root, 0, 0])
            assert abs(r_exact - prod) <= 1e-8 * (1 + abs(prod))


class TestDiscriminant:
    def test_quadratic_formula(self):
        x, b, c = variables(3)
        disc = discriminant_in_var(view(x ** 2 + b * x + c, 0))
        assert disc == b ** 2 - c.scale(4)

    def test_example_with_zero_root(self):
        x1, x2 = variables(2)
        disc = discriminant_in_var(view(x2 ** 2 - x1 * x2, 1))
        assert disc == x1 ** 2

    def test_repeated_root_vanishes(self):
        x1, x2 = variables(2)
        assert discriminant_in_var(view(x2 ** 2, 1)).is_zero()

    def test_degree_zero_rejected(self):
        with pytest.raises(ValidationError):
            discriminant_in_var(view(MultiPoly.constant(2, 1), 1))


class TestRoots:
    def test_factored(self):
        assert roots_univariate([1, 0, -1]) == [-1, 1]

    def test_triple_zero(self):
        assert roots_univariate([1, 0, 0, 0]) == [0, 0, 0]

    def test_quadratic_formula(self):
        roots = roots_univariate([1, -2, 2])
        assert roots == [1 - 1j, 1 + 1j]

    def test_reconstruction_up_to_degree_12(self):
        rng = np.random.default_rng(5)
        for d in range(1, 13):
            coeffs = np.concatenate([[1.0], rng.normal(size=d)
                                     + 1j * rng.normal(size=d)])
            roots = roots_univariate(list(coeffs))
            rebuilt = np.poly(np.asarray(roots))
            scale = np.max(np.abs(coeffs))
            assert np.max(np.abs(rebuilt - coeffs)) <= 1e-8 * scale

    def test_multiple_nonzero_root_clusters(self):
        # (x - 1)^2 (x + 2) = x^3 - 3x + 2
        roots = roots_univariate([1, 0, -3, 2], cluster_tol=1e-7)
        assert roots[0] == -2 or abs(roots[0] + 2) < 1e-9
        assert roots[1] == roots[2]
        assert abs(roots[1] - 1) < 1e-7

    def test_monic_enforced(self):
        with pytest.raises(ValidationError):
            roots_univariate([2, 0, -1])

    def test_degree_zero_rejected(self):
        with pytest.raises(ValidationError):
            roots_univariate([1])


class TestLinearChange:
    def test_identity(self):
        x1, x2 = variables(2)
        p = x1 ** 2 - x1 * x2
        assert linear_coordinate_change(p, [[1, 0], [0, 1]]) == p

    def test_swap_symmetric(self):
        x1, x2 = variables(2)
        p = x1 * x2
        assert linear_coordinate_change(p, [[0, 1], [1, 0]]) == p

    def test_shear_binomial(self):
        x1, x2 = variables(2)
        got = linear_coordinate_change(x1 ** 2, [[1, 1], [0, 1]])
        assert got == x1 ** 2 + (x1 * x2).scale(2) + x2 ** 2

    def test_singular_matrix_rejected(self):
        x1, _ = variables(2)
        with pytest.raises(SingularMatrixError):
            linear_coordinate_change(x1, [[1, 1], [1, 1]])


class TestExactDivision:
    def test_divides(self):
        x1, x2 = variables(2)
        q = exact_div(x1 ** 2 - x2 ** 2, x1 - x2)
        assert q == x1 + x2

    def test_not_divisible(self):
        x1, x2 = variables(2)
        assert exact_div(x1 ** 2 + x2 ** 2, x1 - x2) is None
        assert not divides(x1 - x2, x1 ** 2 + x2 ** 2)

    @given(small_polys(), small_polys())
    @settings(max_examples=60, deadline=None)
    def test_product_division_roundtrip(self, p, q):
        if q.is_zero():
            return
        prod = p * q
        back = exact_div(prod, q)
        assert back == p


class TestJson:
    def test_fixed_document(self):
        x1, x2 = variables(2)
        p = x1 ** 2 - (x1 * x2).scale("1/2")
        doc = p.to_json()
        assert doc["vars"] == ["x1", "x2"]
        assert {"exp": [2, 0], "re": "1", "im": "0"} in doc["terms"]
        assert {"exp": [1, 1], "re": "-1/2", "im": "0"} in doc["terms"]

    @given(small_polys())
    @settings(max_examples=60, deadline=None)
    def test_roundtrip(self, p):
        assert MultiPoly.from_json(p.to_json()) == p

    def test_malformed_rejected(self):
        with pytest.raises(ValidationError):
            MultiPoly.from_json({"vars": ["x1"]})


class TestGaussianRational:
    def test_arithmetic(self):
        a = GaussianRational(Fraction(1, 2), Fraction(1))
        b = GaussianRational(Fraction(2), Fraction(-1, 3))
        assert (a * b) / b == a
        assert (a + b) - b == a

    def test_parse_strings(self):
        c = GaussianRational.of("3/4")
        assert c.re == Fraction(3, 4) and c.im == 0
