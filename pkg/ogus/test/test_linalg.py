"""
Test ogus/linalg.py
"""
import math
import random
import unittest
from fractions import Fraction

import ddt
import pytest
from hypothesis import given, settings, strategies as st

from ogus.exceptions import (
    InvalidMorphismError, MalformedInputError, NotInSubspaceError, NotPrimeError, NotSquareError, ShapeMismatchError,
)
from ogus.linalg import (
    LinearMap, Pullback, Pushout, RationalMatrix, Subspace, eigenspace, format_rational, padic_valuation,
    rational_roots, rational_spectrum, rref, stable_under, to_rational,
)
from ogus.test.tools import matrix, random_invertible, random_matrix, random_subspace


class RationalTest(unittest.TestCase):

    def test_to_rational(self):
        self.assertEqual(to_rational("3/6"), Fraction(1, 2))
        self.assertEqual(to_rational(" -4 "), Fraction(-4))
        self.assertEqual(to_rational(7), Fraction(7))

    def test_inexact_values_are_refused(self):
        for value in (0.5, True, "x/2", "1/0", None):
            with pytest.raises(MalformedInputError):
                to_rational(value)

    def test_format(self):
        self.assertEqual(format_rational(Fraction(4, 2)), "2")
        self.assertEqual(format_rational(Fraction(-1, 3)), "-1/3")


@ddt.ddt
class RrefTest(unittest.TestCase):
    """
    Tests for row reduction and rank.
    """

    def test_proportional_rows(self):
        reduced, rank = rref(matrix([[2, 4], [1, 2]]))
        self.assertEqual(reduced, matrix([[1, 2], [0, 0]]))
        self.assertEqual(rank, 1)

    def test_identity(self):
        reduced, rank = rref(RationalMatrix.identity(3))
        self.assertEqual(reduced, RationalMatrix.identity(3))
        self.assertEqual(rank, 3)

    @ddt.data(
        ([[1, 2, 3], [4, 5, 6], [7, 8, 9]], 2),
        ([[0, 0], [0, 0]], 0),
        ([[1, "1/2"], [2, 1]], 1),
    )
    @ddt.unpack
    def test_rank(self, rows, expected):
        self.assertEqual(matrix(rows).rank(), expected)

    def test_empty_shapes(self):
        self.assertEqual(RationalMatrix.zeros(0, 3).rank(), 0)
        self.assertEqual(RationalMatrix.zeros(2, 0).rank(), 0)
        self.assertEqual(RationalMatrix.zeros(0, 0).det(), 1)

    def test_ragged_rows(self):
        with pytest.raises(ShapeMismatchError):
            matrix([[1, 2], [3]])


class MatrixAlgebraTest(unittest.TestCase):

    def test_products_and_inverse(self):
        m = matrix([[2, 1], [1, 1]])
        self.assertEqual(m @ m.inverse(), RationalMatrix.identity(2))
        self.assertEqual(m.det(), 1)
        self.assertEqual(m.charpoly(), (1, -3, 1))

    def test_singular_inverse(self):
        with pytest.raises(ZeroDivisionError):
            matrix([[1, 2], [2, 4]]).inverse()
        with pytest.raises(NotSquareError):
            matrix([[1, 2]]).inverse()

    def test_kron_vectorization(self):
        left, x, right = matrix([[1, 2], [0, 1]]), matrix([[1, -1], [2, 3]]), matrix([[0, 1], [1, 1]])
        vec = RationalMatrix([[entry] for entry in x.flatten()], 1)
        product = left.kron(right.T) @ vec
        self.assertEqual(product.flatten(), (left @ x @ right).flatten())

    def test_blocks(self):
        block = RationalMatrix.block_diagonal(matrix([[1]]), matrix([[2, 3]]))
        self.assertEqual(block, matrix([[1, 0, 0], [0, 2, 3]]))
        self.assertEqual(RationalMatrix.hstack(matrix([[1]]), matrix([[2]])), matrix([[1, 2]]))
        self.assertEqual(RationalMatrix.vstack(matrix([[1]]), matrix([[2]])), matrix([[1], [2]]))

    def test_json(self):
        m = matrix([["1/2", 0]])
        self.assertEqual(m.to_json(), [["1/2", "0"]])
        self.assertEqual(RationalMatrix.from_json([], 3).shape, (0, 3))
        with pytest.raises(MalformedInputError):
            RationalMatrix.from_json("nope")


class SubspaceTest(unittest.TestCase):
    """
    Tests for subspaces and their lattice operations.
    """

    def test_canonical_form(self):
        first = Subspace(2, [[2, 2]])
        second = Subspace(2, [[-1, -1]])
        self.assertEqual(first, second)
        self.assertEqual(first.vectors, ((1, 1),))

    def test_sum_and_intersection(self):
        x_axis, y_axis = Subspace(2, [[1, 0]]), Subspace(2, [[0, 1]])
        self.assertTrue((x_axis + y_axis).is_full())
        self.assertTrue((x_axis & y_axis).is_zero())
        plane = Subspace(3, [[1, 0, 0], [0, 1, 0]])
        other = Subspace(3, [[0, 1, 0], [0, 0, 1]])
        self.assertEqual(plane & other, Subspace(3, [[0, 1, 0]]))

    def test_coordinates(self):
        space = Subspace(3, [[1, 2, 0], [0, 0, 1]])
        self.assertEqual(space.coordinates((2, 4, 5)), (2, 5))
        with pytest.raises(NotInSubspaceError):
            space.coordinates((0, 1, 0))

    def test_quotient(self):
        space = Subspace(3, [[1, 1, 0]])
        projection = space.quotient_map()
        self.assertEqual(projection.codomain_dim, 2)
        self.assertTrue(projection.kernel() == space)
        self.assertEqual(projection @ space.quotient_section(), LinearMap.identity(2))

    def test_wrong_ambient(self):
        with pytest.raises(ShapeMismatchError):
            Subspace(2, [[1, 0]]) + Subspace(3)


class KernelImageTest(unittest.TestCase):

    def test_zero_map_kernel_is_everything(self):
        self.assertTrue(LinearMap(RationalMatrix.zeros(1, 2)).kernel().is_full())

    def test_identity_kernel_is_zero(self):
        self.assertTrue(LinearMap.identity(3).kernel().is_zero())

    def test_sum_map(self):
        self.assertEqual(LinearMap(matrix([[1, 1]])).kernel(), Subspace(2, [[1, -1]]))

    def test_restrict_and_induce(self):
        f = LinearMap(matrix([[1, 1], [0, 2]]))
        line = Subspace(2, [[1, 0]])
        self.assertEqual(f.restrict(line, line), LinearMap(matrix([[1]])))
        self.assertEqual(f.induced_on_quotients(line, line), LinearMap(matrix([[2]])))
        with pytest.raises(NotInSubspaceError):
            f.restrict(Subspace(2, [[0, 1]]), Subspace(2, [[0, 1]]))

    def test_preimage(self):
        f = LinearMap(matrix([[1, 0], [0, 0]]))
        self.assertEqual(f.preimage(Subspace(2)), Subspace(2, [[0, 1]]))

    def test_composition_shape(self):
        with pytest.raises(ShapeMismatchError):
            LinearMap(matrix([[1, 2]])) @ LinearMap(matrix([[1, 2]]))


class UniversalPropertyTest(unittest.TestCase):
    """
    Tests for pullbacks and pushouts.
    """

    def test_pullback_of_identities_is_diagonal(self):
        corner = Pullback(LinearMap.identity(1), LinearMap.identity(1))
        self.assertEqual(corner.subspace, Subspace(2, [[1, 1]]))

    def test_pullback_over_zero(self):
        corner = Pullback(LinearMap.zero(2, 0), LinearMap.zero(1, 0))
        self.assertEqual(corner.dim, 3)

    def test_pullback_parametrized(self):
        corner = Pullback(LinearMap(matrix([[1, 0]])), LinearMap(matrix([[2]])))
        self.assertEqual(corner.dim, 2)
        self.assertEqual(corner.subspace, Subspace(3, [[2, 0, 1], [0, 1, 0]]))

    def test_pullback_factor(self):
        f, g = LinearMap(matrix([[1, 0]])), LinearMap(matrix([[2]]))
        corner = Pullback(f, g)
        h, k = LinearMap(matrix([[2], [5]])), LinearMap(matrix([[1]]))
        u = corner.factor(h, k)
        self.assertEqual(corner.first @ u, h)
        self.assertEqual(corner.second @ u, k)
        with pytest.raises(InvalidMorphismError):
            corner.factor(h, LinearMap(matrix([[3]])))

    def test_pushout_of_zero_maps(self):
        self.assertEqual(Pushout(LinearMap.zero(1, 1), LinearMap.zero(1, 1)).dim, 2)

    def test_pushout_of_identity_and_zero(self):
        self.assertEqual(Pushout(LinearMap.identity(1), LinearMap.zero(1, 0)).dim, 0)

    def test_pushout_of_inclusion(self):
        corner = Pushout(LinearMap(matrix([[1], [0]])), LinearMap.identity(1))
        self.assertEqual(corner.dim, 2)
        self.assertEqual(corner.first @ corner.f, corner.second @ corner.g)

    def test_pushout_factor(self):
        corner = Pushout(LinearMap(matrix([[1], [0]])), LinearMap.identity(1))
        h, k = LinearMap(matrix([[1, 4]])), LinearMap(matrix([[1]]))
        u = corner.factor(h, k)
        self.assertEqual(u @ corner.first, h)
        self.assertEqual(u @ corner.second, k)


@ddt.ddt
class SpectrumTest(unittest.TestCase):

    def test_diagonal(self):
        spectrum = rational_spectrum(RationalMatrix.diagonal([2, 3]))
        self.assertEqual(spectrum.eigenvalues, ((2, 1), (3, 1)))
        self.assertTrue(spectrum.is_complete)

    def test_rotation(self):
        spectrum = rational_spectrum(matrix([[0, -1], [1, 0]]))
        self.assertEqual(spectrum.eigenvalues, ())
        self.assertFalse(spectrum.is_complete)

    def test_jordan_block(self):
        spectrum = rational_spectrum(matrix([[2, 1], [0, 2]]))
        self.assertEqual(spectrum.eigenvalues, ((2, 2),))
        self.assertTrue(spectrum.is_complete)
        self.assertEqual(eigenspace(matrix([[2, 1], [0, 2]]), 2).dim, 1)
        self.assertEqual(eigenspace(matrix([[2, 1], [0, 2]]), 2, power=2).dim, 2)

    @ddt.data(
        ([1, -3, 2], [(1, 1), (2, 1)]),
        ([1, 0, 0], [(0, 2)]),
        ([2, -1], [(Fraction(1, 2), 1)]),
        ([1, 0, 1], []),
    )
    @ddt.unpack
    def test_rational_roots(self, coefficients, expected):
        self.assertEqual(rational_roots(coefficients), expected)

    def test_stable_under(self):
        phi = matrix([[1, 1], [0, 2]])
        self.assertTrue(stable_under(Subspace(2, [[1, 0]]), phi))
        self.assertFalse(stable_under(Subspace(2, [[0, 1]]), phi))


@ddt.ddt
class ValuationTest(unittest.TestCase):

    @ddt.data((12, 2, 2), (Fraction(1, 9), 3, -2), (5, 2, 0))
    @ddt.unpack
    def test_valuation(self, value, prime, expected):
        self.assertEqual(padic_valuation(value, prime), expected)

    def test_zero(self):
        self.assertEqual(padic_valuation(0, 5), math.inf)

    def test_not_prime(self):
        with pytest.raises(NotPrimeError):
            padic_valuation(3, 4)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_rank_nullity(seed):
    rng = random.Random(seed)
    m = random_matrix(rng, rng.randint(0, 4), rng.randint(0, 4))
    f = LinearMap(m, m.ncols, m.nrows)
    assert f.kernel().dim + f.image().dim == m.ncols


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_modular_law(seed):
    rng = random.Random(seed)
    dim = rng.randint(1, 4)
    first, second = random_subspace(rng, dim), random_subspace(rng, dim)
    assert (first + second).dim + (first & second).dim == first.dim + second.dim


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_inverse(seed):
    rng = random.Random(seed)
    m = random_invertible(rng, rng.randint(1, 4))
    assert m.inverse() @ m == RationalMatrix.identity(m.nrows)
