"""
Exact linear algebra over the rationals.

Matrices, subspaces and linear maps are immutable. Entries are
:class:`fractions.Fraction`; row reduction, ranks, determinants, inverses and
characteristic polynomials are delegated to sympy's ``DomainMatrix`` over
``QQ``. Subspaces are stored as the reduced row-echelon form of a basis, so two
subspaces are equal exactly when their representatives are.
"""
import logging
import math
from fractions import Fraction

from sympy import Poly, QQ, Rational as SympyRational, Symbol, divisors, isprime, multiplicity
from sympy.polys.matrices import DomainMatrix

from ogus.exceptions import (
    InvalidMorphismError,
    MalformedInputError,
    NotInSubspaceError,
    NotPrimeError,
    NotSquareError,
    ShapeMismatchError,
)

log = logging.getLogger(__name__)

INFINITY = math.inf

_X = Symbol('x')


def to_rational(value):
    """
    Coerce `value` to a :class:`Fraction`.

    Accepts integers, fractions, sympy and domain rationals, and strings of
    the form ``"a"`` or ``"a/b"``. Floats are refused: nothing here is
    approximate.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise MalformedInputError("Refusing inexact or boolean scalar {!r}".format(value))
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInputError("Not a rational number: {!r}".format(value)) from exc
    numerator = getattr(value, 'numerator', None)
    denominator = getattr(value, 'denominator', None)
    if numerator is not None and denominator is not None and not callable(numerator):
        return Fraction(int(numerator), int(denominator))
    raise MalformedInputError("Not a rational number: {!r}".format(value))


def format_rational(value):
    """
    The string convention shared by every file format: ``"a/b"``, or ``"a"`` when b = 1.
    """
    return str(to_rational(value))


def _to_qq(value):
    return QQ(value.numerator, value.denominator)


def _from_qq(element):
    return Fraction(int(QQ.numer(element)), int(QQ.denom(element)))


class RationalMatrix:
    """
    An immutable matrix with rational entries.
    """

    def __init__(self, rows, ncols=None):
        rows = tuple(tuple(to_rational(entry) for entry in row) for row in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for index, row in enumerate(rows):
            if len(row) != ncols:
                raise ShapeMismatchError("matrix row {}".format(index), ncols, len(row))
        self._rows = rows
        self._ncols = ncols
        self._domain = None

    @classmethod
    def zeros(cls, nrows, ncols):
        return cls([[Fraction(0)] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, size):
        return cls([[Fraction(int(i == j)) for j in range(size)] for i in range(size)], size)

    @classmethod
    def diagonal(cls, values):
        values = [to_rational(value) for value in values]
        size = len(values)
        return cls([[values[i] if i == j else Fraction(0) for j in range(size)] for i in range(size)], size)

    @classmethod
    def from_columns(cls, columns, nrows):
        columns = [tuple(column) for column in columns]
        for column in columns:
            if len(column) != nrows:
                raise ShapeMismatchError("matrix column", nrows, len(column))
        return cls([[column[i] for column in columns] for i in range(nrows)], len(columns))

    @classmethod
    def from_flat(cls, values, nrows, ncols):
        values = list(values)
        if len(values) != nrows * ncols:
            raise ShapeMismatchError("flattened matrix", nrows * ncols, len(values))
        return cls([values[i * ncols:(i + 1) * ncols] for i in range(nrows)], ncols)

    @classmethod
    def hstack(cls, *blocks):
        """
        Place `blocks` side by side; all must have the same number of rows.
        """
        if not blocks:
            raise ValueError("hstack needs at least one block")
        nrows = blocks[0].nrows
        for block in blocks:
            if block.nrows != nrows:
                raise ShapeMismatchError("hstack rows", nrows, block.nrows)
        rows = [sum((block.row(i) for block in blocks), ()) for i in range(nrows)]
        return cls(rows, sum(block.ncols for block in blocks))

    @classmethod
    def vstack(cls, *blocks):
        """
        Place `blocks` on top of each other; all must have the same number of columns.
        """
        if not blocks:
            raise ValueError("vstack needs at least one block")
        ncols = blocks[0].ncols
        for block in blocks:
            if block.ncols != ncols:
                raise ShapeMismatchError("vstack columns", ncols, block.ncols)
        return cls(sum((block.rows for block in blocks), ()), ncols)

    @classmethod
    def block_diagonal(cls, *blocks):
        nrows = sum(block.nrows for block in blocks)
        ncols = sum(block.ncols for block in blocks)
        rows = []
        offset = 0
        for block in blocks:
            for row in block.rows:
                rows.append((Fraction(0),) * offset + row + (Fraction(0),) * (ncols - offset - block.ncols))
            offset += block.ncols
        return cls(rows, ncols) if rows else cls.zeros(nrows, ncols)

    @classmethod
    def from_domain(cls, matrix):
        nrows, ncols = matrix.shape
        if nrows == 0 or ncols == 0:
            return cls.zeros(nrows, ncols)
        return cls([[_from_qq(entry) for entry in row] for row in matrix.to_list()], ncols)

    @classmethod
    def from_json(cls, value, ncols=None):
        """
        Decode a row-major array of rational strings.

        `ncols` is needed only to recover the width of a matrix with no rows.
        """
        if not isinstance(value, (list, tuple)) or not all(isinstance(row, (list, tuple)) for row in value):
            raise MalformedInputError("A matrix must be a list of rows, got {!r}".format(value))
        if not value:
            return cls.zeros(0, ncols or 0)
        return cls(value, ncols)

    @property
    def rows(self):
        return self._rows

    @property
    def nrows(self):
        return len(self._rows)

    @property
    def ncols(self):
        return self._ncols

    @property
    def shape(self):
        return (self.nrows, self._ncols)

    @property
    def columns(self):
        return tuple(self.column(j) for j in range(self._ncols))

    @property
    def is_square(self):
        return self.nrows == self._ncols

    @property
    def T(self):  # pylint: disable=invalid-name
        return self.transpose()

    def row(self, index):
        return self._rows[index]

    def column(self, index):
        return tuple(row[index] for row in self._rows)

    def __getitem__(self, position):
        i, j = position
        return self._rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, self._rows))

    def __repr__(self):
        return "RationalMatrix({!r}, ncols={})".format(self.to_json(), self._ncols)

    def to_json(self):
        return [[format_rational(entry) for entry in row] for row in self._rows]

    def flatten(self):
        """
        Entries in row-major order.
        """
        return tuple(entry for row in self._rows for entry in row)

    def to_domain(self):
        if self._domain is None:
            self._domain = DomainMatrix(
                [[_to_qq(entry) for entry in row] for row in self._rows], self.shape, QQ,
            )
        return self._domain

    def is_zero(self):
        return all(entry == 0 for row in self._rows for entry in row)

    def is_identity(self):
        return self.is_square and self == RationalMatrix.identity(self.nrows)

    def transpose(self):
        return RationalMatrix([self.column(j) for j in range(self._ncols)], self.nrows)

    def submatrix(self, rows=None, cols=None):
        rows = range(self.nrows) if rows is None else list(rows)
        cols = range(self._ncols) if cols is None else list(cols)
        return RationalMatrix([[self._rows[i][j] for j in cols] for i in rows], len(cols))

    def _check_same_shape(self, other, what):
        if self.shape != other.shape:
            raise ShapeMismatchError(what, self.shape, other.shape)

    def __add__(self, other):
        self._check_same_shape(other, "matrix sum")
        return RationalMatrix(
            [[a + b for a, b in zip(left, right)] for left, right in zip(self._rows, other.rows)], self._ncols,
        )

    def __sub__(self, other):
        self._check_same_shape(other, "matrix difference")
        return RationalMatrix(
            [[a - b for a, b in zip(left, right)] for left, right in zip(self._rows, other.rows)], self._ncols,
        )

    def __neg__(self):
        return self.scale(-1)

    def scale(self, scalar):
        scalar = to_rational(scalar)
        return RationalMatrix([[scalar * entry for entry in row] for row in self._rows], self._ncols)

    def __matmul__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if self._ncols != other.nrows:
            raise ShapeMismatchError("matrix product", (self._ncols, '*'), other.shape)
        if self.nrows == 0 or other.ncols == 0 or self._ncols == 0:
            return RationalMatrix.zeros(self.nrows, other.ncols)
        return RationalMatrix.from_domain(self.to_domain().matmul(other.to_domain()))

    def apply(self, vector):
        """
        The product with a column vector, returned as a tuple.
        """
        vector = [to_rational(entry) for entry in vector]
        if len(vector) != self._ncols:
            raise ShapeMismatchError("vector", self._ncols, len(vector))
        return tuple(sum((a * b for a, b in zip(row, vector)), Fraction(0)) for row in self._rows)

    def power(self, exponent):
        if not self.is_square:
            raise NotSquareError(self.shape)
        result = RationalMatrix.identity(self.nrows)
        for _ in range(exponent):
            result = result @ self
        return result

    def kron(self, other):
        """
        The Kronecker product, indexed so that row-major vectorization satisfies
        vec(L X R) = (L kron R^T) vec(X).
        """
        rows = []
        for left_row in self._rows:
            for right_row in other.rows:
                rows.append([a * b for a in left_row for b in right_row])
        return RationalMatrix(rows, self._ncols * other.ncols) if rows else RationalMatrix.zeros(
            0, self._ncols * other.ncols,
        )

    def rref_with_pivots(self):
        """
        The reduced row-echelon form and its pivot columns.
        """
        if self.nrows == 0 or self._ncols == 0:
            return RationalMatrix.zeros(self.nrows, self._ncols), ()
        reduced, pivots = self.to_domain().rref()
        return RationalMatrix.from_domain(reduced), tuple(pivots)

    def rank(self):
        if self.nrows == 0 or self._ncols == 0:
            return 0
        return self.to_domain().rank()

    def det(self):
        if not self.is_square:
            raise NotSquareError(self.shape)
        if self.nrows == 0:
            return Fraction(1)
        return _from_qq(self.to_domain().det())

    def is_invertible(self):
        return self.is_square and self.rank() == self.nrows

    def inverse(self):
        if not self.is_square:
            raise NotSquareError(self.shape)
        if self.nrows == 0:
            return self
        if not self.is_invertible():
            raise ZeroDivisionError("Matrix is singular")
        return RationalMatrix.from_domain(self.to_domain().inv())

    def charpoly(self):
        """
        Coefficients of det(x - M), leading coefficient first.
        """
        if not self.is_square:
            raise NotSquareError(self.shape)
        if self.nrows == 0:
            return (Fraction(1),)
        return tuple(_from_qq(c) for c in self.to_domain().charpoly())


def rref(matrix):
    """
    Reduced row-echelon form of `matrix` together with its rank.
    """
    reduced, pivots = matrix.rref_with_pivots()
    return reduced, len(pivots)


class Subspace:
    """
    A subspace of Q^n.

    The representative is the RREF of a basis: nonzero rows, increasing pivot
    columns, pivots equal to one with zeros above and below.
    """

    def __init__(self, ambient_dim, vectors=()):
        if isinstance(vectors, RationalMatrix):
            matrix = vectors
            if matrix.ncols != ambient_dim:
                raise ShapeMismatchError("subspace spanning set", ambient_dim, matrix.ncols)
        else:
            matrix = RationalMatrix(list(vectors), ambient_dim)
        reduced, pivots = matrix.rref_with_pivots()
        self.ambient_dim = ambient_dim
        self._pivots = pivots
        self._basis = RationalMatrix(reduced.rows[:len(pivots)], ambient_dim)

    @classmethod
    def zero(cls, ambient_dim):
        return cls(ambient_dim)

    @classmethod
    def full(cls, ambient_dim):
        return cls(ambient_dim, RationalMatrix.identity(ambient_dim))

    @classmethod
    def from_json(cls, value, ambient_dim):
        return cls(ambient_dim, RationalMatrix.from_json(value, ambient_dim))

    @property
    def dim(self):
        return len(self._pivots)

    @property
    def codim(self):
        return self.ambient_dim - self.dim

    @property
    def basis(self):
        return self._basis

    @property
    def vectors(self):
        return self._basis.rows

    @property
    def pivots(self):
        return self._pivots

    @property
    def nonpivots(self):
        pivots = set(self._pivots)
        return tuple(column for column in range(self.ambient_dim) if column not in pivots)

    def is_zero(self):
        return self.dim == 0

    def is_full(self):
        return self.dim == self.ambient_dim

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self._basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self._basis))

    def __repr__(self):
        return "Subspace({}, {!r})".format(self.ambient_dim, self._basis.to_json())

    def to_json(self):
        return self._basis.to_json()

    def _check_ambient(self, other):
        if other.ambient_dim != self.ambient_dim:
            raise ShapeMismatchError("ambient dimension", self.ambient_dim, other.ambient_dim)

    def __contains__(self, vector):
        vector = tuple(to_rational(entry) for entry in vector)
        if len(vector) != self.ambient_dim:
            raise ShapeMismatchError("vector", self.ambient_dim, len(vector))
        residue = list(vector)
        for row, pivot in zip(self.vectors, self._pivots):
            coefficient = vector[pivot]
            if coefficient:
                residue = [r - coefficient * b for r, b in zip(residue, row)]
        return not any(residue)

    def __le__(self, other):
        self._check_ambient(other)
        return all(vector in other for vector in self.vectors)

    def __ge__(self, other):
        return other <= self

    def __add__(self, other):
        self._check_ambient(other)
        return Subspace(self.ambient_dim, self.vectors + other.vectors)

    def __and__(self, other):
        """
        Intersection: solve x B1 = y B2 and keep x B1.
        """
        self._check_ambient(other)
        if self.is_zero() or other.is_zero():
            return Subspace.zero(self.ambient_dim)
        relations = LinearMap(RationalMatrix.vstack(self._basis, -other.basis).T)
        solutions = relations.kernel()
        head = RationalMatrix([vector[:self.dim] for vector in solutions.vectors], self.dim)
        return Subspace(self.ambient_dim, head @ self._basis)

    intersection = __and__

    def coordinates(self, vector):
        """
        Coordinates of a member vector in the stored basis.
        """
        if vector not in self:
            raise NotInSubspaceError("Vector {!r} is not in {!r}".format(
                [format_rational(entry) for entry in vector], self,
            ))
        return tuple(to_rational(vector[pivot]) for pivot in self._pivots)

    def inclusion(self):
        """
        The map Q^dim -> Q^ambient sending coordinates to vectors.
        """
        return LinearMap(self._basis.T, self.dim, self.ambient_dim)

    def coordinate_map(self):
        """
        The map Q^ambient -> Q^dim reading pivot entries; a left inverse of :meth:`inclusion`.
        """
        rows = [[Fraction(int(column == pivot)) for column in range(self.ambient_dim)] for pivot in self._pivots]
        return LinearMap(RationalMatrix(rows, self.ambient_dim), self.ambient_dim, self.dim)

    def quotient_map(self):
        """
        The canonical projection Q^ambient -> Q^ambient / self.

        The quotient is identified with the non-pivot coordinates of the
        reduction of a vector modulo the basis.
        """
        nonpivots = self.nonpivots
        rows = []
        for column_index in nonpivots:
            row = [Fraction(0)] * self.ambient_dim
            row[column_index] = Fraction(1)
            for basis_row, pivot in zip(self.vectors, self._pivots):
                row[pivot] = -basis_row[column_index]
            rows.append(row)
        return LinearMap(RationalMatrix(rows, self.ambient_dim), self.ambient_dim, len(nonpivots))

    def quotient_section(self):
        """
        The standard section of :meth:`quotient_map` (unit vectors at non-pivot columns).
        """
        nonpivots = self.nonpivots
        columns = [[Fraction(int(row == column)) for row in range(self.ambient_dim)] for column in nonpivots]
        return LinearMap(RationalMatrix.from_columns(columns, self.ambient_dim), len(nonpivots), self.ambient_dim)

    def transport(self, linear_map):
        """
        The image of this subspace under `linear_map`.
        """
        return linear_map.image_of(self)


class LinearMap:
    """
    A linear map Q^domain_dim -> Q^codomain_dim given by a codomain x domain matrix.
    """

    def __init__(self, matrix, domain_dim=None, codomain_dim=None):
        if not isinstance(matrix, RationalMatrix):
            rows = list(matrix)
            if not rows and domain_dim is None:
                raise MalformedInputError("Empty map matrix needs an explicit domain dimension")
            matrix = RationalMatrix(rows, domain_dim)
        if matrix.nrows == 0 and domain_dim is not None and matrix.ncols != domain_dim:
            matrix = RationalMatrix.zeros(0, domain_dim)
        if domain_dim is not None and matrix.ncols != domain_dim:
            raise ShapeMismatchError("map domain", domain_dim, matrix.ncols)
        if codomain_dim is not None and matrix.nrows != codomain_dim:
            raise ShapeMismatchError("map codomain", codomain_dim, matrix.nrows)
        self.matrix = matrix

    @classmethod
    def identity(cls, dim):
        return cls(RationalMatrix.identity(dim))

    @classmethod
    def zero(cls, domain_dim, codomain_dim):
        return cls(RationalMatrix.zeros(codomain_dim, domain_dim))

    @classmethod
    def from_json(cls, value, domain_dim, codomain_dim):
        return cls(RationalMatrix.from_json(value, domain_dim), domain_dim, codomain_dim)

    @property
    def domain_dim(self):
        return self.matrix.ncols

    @property
    def codomain_dim(self):
        return self.matrix.nrows

    def __eq__(self, other):
        if not isinstance(other, LinearMap):
            return NotImplemented
        return self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return "LinearMap({} -> {}, {!r})".format(self.domain_dim, self.codomain_dim, self.matrix.to_json())

    def to_json(self):
        return self.matrix.to_json()

    def __call__(self, vector):
        return self.matrix.apply(vector)

    def compose(self, other):
        """
        self after other.
        """
        if other.codomain_dim != self.domain_dim:
            raise ShapeMismatchError("composition", self.domain_dim, other.codomain_dim)
        return LinearMap(self.matrix @ other.matrix)

    def __matmul__(self, other):
        if not isinstance(other, LinearMap):
            return NotImplemented
        return self.compose(other)

    def __add__(self, other):
        return LinearMap(self.matrix + other.matrix)

    def __sub__(self, other):
        return LinearMap(self.matrix - other.matrix)

    def __neg__(self):
        return LinearMap(-self.matrix)

    def scale(self, scalar):
        return LinearMap(self.matrix.scale(scalar))

    def rank(self):
        return self.matrix.rank()

    def kernel(self):
        return kernel(self)

    def image(self):
        return Subspace(self.codomain_dim, self.matrix.T)

    def is_zero(self):
        return self.matrix.is_zero()

    def is_injective(self):
        return self.rank() == self.domain_dim

    def is_surjective(self):
        return self.rank() == self.codomain_dim

    def is_invertible(self):
        return self.domain_dim == self.codomain_dim and self.is_injective()

    def inverse(self):
        return LinearMap(self.matrix.inverse())

    def image_of(self, subspace):
        if subspace.ambient_dim != self.domain_dim:
            raise ShapeMismatchError("image of subspace", self.domain_dim, subspace.ambient_dim)
        return self.compose(subspace.inclusion()).image()

    def preimage(self, subspace):
        if subspace.ambient_dim != self.codomain_dim:
            raise ShapeMismatchError("preimage of subspace", self.codomain_dim, subspace.ambient_dim)
        return subspace.quotient_map().compose(self).kernel()

    def maps_into(self, source, target):
        """
        True iff the image of `source` lies in `target`.
        """
        return self.image_of(source) <= target

    def restrict(self, domain=None, codomain=None):
        """
        This map in the coordinates of subspaces of its domain and codomain.
        """
        domain = Subspace.full(self.domain_dim) if domain is None else domain
        codomain = Subspace.full(self.codomain_dim) if codomain is None else codomain
        if not self.maps_into(domain, codomain):
            raise NotInSubspaceError("Map does not send the given subspace into the target subspace")
        return codomain.coordinate_map().compose(self).compose(domain.inclusion())

    def induced_on_quotients(self, source_sub, target_sub):
        """
        The map V/source_sub -> W/target_sub induced by this map.
        """
        if not self.maps_into(source_sub, target_sub):
            raise NotInSubspaceError("Map does not send the given subspace into the target subspace")
        return target_sub.quotient_map().compose(self).compose(source_sub.quotient_section())


def direct_sum(*maps):
    """
    The block-diagonal map of `maps`.
    """
    return LinearMap(RationalMatrix.block_diagonal(*(linear_map.matrix for linear_map in maps)))


def kernel(f):
    """
    The kernel of `f` in canonical form.
    """
    if f.domain_dim == 0:
        return Subspace.zero(0)
    reduced, pivots = f.matrix.rref_with_pivots()
    pivot_set = set(pivots)
    vectors = []
    for free in range(f.domain_dim):
        if free in pivot_set:
            continue
        vector = [Fraction(0)] * f.domain_dim
        vector[free] = Fraction(1)
        for row_index, pivot in enumerate(pivots):
            vector[pivot] = -reduced[row_index, free]
        vectors.append(vector)
    return Subspace(f.domain_dim, vectors)


def image(f):
    return f.image()


class Pullback:
    """
    The fibre product {(a, b) : f(a) = g(b)} of two maps into a common space.
    """

    def __init__(self, f, g):
        if f.codomain_dim != g.codomain_dim:
            raise ShapeMismatchError("pullback codomains", f.codomain_dim, g.codomain_dim)
        self.f = f
        self.g = g
        self.subspace = LinearMap(RationalMatrix.hstack(f.matrix, -g.matrix)).kernel()
        inclusion = self.subspace.inclusion().matrix
        self.first = LinearMap(inclusion.submatrix(rows=range(f.domain_dim)), self.dim, f.domain_dim)
        self.second = LinearMap(
            inclusion.submatrix(rows=range(f.domain_dim, f.domain_dim + g.domain_dim)), self.dim, g.domain_dim,
        )

    @property
    def dim(self):
        return self.subspace.dim

    def factor(self, h, k):
        """
        The unique map u with first∘u = h and second∘u = k, for f∘h = g∘k.
        """
        if (self.f @ h) != (self.g @ k):
            raise InvalidMorphismError("The pair does not commute over the pullback base")
        stacked = LinearMap(RationalMatrix.vstack(h.matrix, k.matrix))
        return self.subspace.coordinate_map() @ stacked


class Pushout:
    """
    The amalgamated sum (cod f + cod g) / {(f(x), -g(x))} of two maps out of a common space.
    """

    def __init__(self, f, g):
        if f.domain_dim != g.domain_dim:
            raise ShapeMismatchError("pushout domains", f.domain_dim, g.domain_dim)
        self.f = f
        self.g = g
        total = f.codomain_dim + g.codomain_dim
        self.relations = LinearMap(RationalMatrix.vstack(f.matrix, -g.matrix), f.domain_dim, total).image()
        projection = self.relations.quotient_map()
        self._section = self.relations.quotient_section()
        self.first = LinearMap(projection.matrix.submatrix(cols=range(f.codomain_dim)), f.codomain_dim, self.dim)
        self.second = LinearMap(
            projection.matrix.submatrix(cols=range(f.codomain_dim, total)), g.codomain_dim, self.dim,
        )

    @property
    def dim(self):
        return self.relations.codim

    def factor(self, h, k):
        """
        The unique map u with u∘first = h and u∘second = k, for h∘f = k∘g.
        """
        if (h @ self.f) != (k @ self.g):
            raise InvalidMorphismError("The pair does not commute under the pushout source")
        joined = LinearMap(RationalMatrix.hstack(h.matrix, k.matrix))
        return joined @ self._section


def pullback(f, g):
    return Pullback(f, g)


def pushout(f, g):
    return Pushout(f, g)


def padic_valuation(value, prime):
    """
    The p-adic valuation of a rational number; ``math.inf`` for zero.
    """
    if not isinstance(prime, int) or isinstance(prime, bool) or not isprime(prime):
        raise NotPrimeError(prime)
    value = to_rational(value)
    if value == 0:
        return INFINITY
    return multiplicity(prime, abs(value.numerator)) - multiplicity(prime, value.denominator)


def rational_roots(coefficients):
    """
    Rational roots, with multiplicities, of a polynomial given leading coefficient first.

    Uses the rational-root theorem on the integer-scaled polynomial, peeling
    each root off by exact division.
    """
    coefficients = [to_rational(c) for c in coefficients]
    while coefficients and coefficients[0] == 0:
        coefficients.pop(0)
    if len(coefficients) <= 1:
        return []
    poly = Poly([SympyRational(c.numerator, c.denominator) for c in coefficients], _X, domain=QQ)
    _, poly = poly.clear_denoms()
    roots = []
    zero_multiplicity = 0
    while poly.degree() > 0 and poly.eval(0) == 0:
        poly = poly.quo(Poly(_X, _X, domain=poly.domain))
        zero_multiplicity += 1
    if zero_multiplicity:
        roots.append((Fraction(0), zero_multiplicity))
    if poly.degree() > 0:
        leading = abs(int(poly.LC()))
        constant = abs(int(poly.eval(0)))
        candidates = set()
        for numerator in divisors(constant):
            for denominator in divisors(leading):
                candidates.add(Fraction(numerator, denominator))
                candidates.add(Fraction(-numerator, denominator))
        for candidate in sorted(candidates):
            root = SympyRational(candidate.numerator, candidate.denominator)
            count = 0
            while poly.degree() > 0 and poly.eval(root) == 0:
                poly = poly.quo(Poly(_X - root, _X, domain=QQ))
                count += 1
            if count:
                roots.append((candidate, count))
    return sorted(roots)


class RationalSpectrum:
    """
    The rational eigenvalues of a square matrix with their algebraic multiplicities.
    """

    def __init__(self, eigenvalues, dim):
        self.eigenvalues = tuple(sorted(eigenvalues))
        self.dim = dim

    @property
    def is_complete(self):
        return sum(count for _, count in self.eigenvalues) == self.dim

    @property
    def is_multiplicity_free(self):
        return all(count == 1 for _, count in self.eigenvalues)

    @property
    def values(self):
        return tuple(value for value, _ in self.eigenvalues)

    def __eq__(self, other):
        if not isinstance(other, RationalSpectrum):
            return NotImplemented
        return (self.eigenvalues, self.dim) == (other.eigenvalues, other.dim)

    def __hash__(self):
        return hash((self.eigenvalues, self.dim))

    def __repr__(self):
        return "RationalSpectrum({!r}, complete={})".format(
            [(format_rational(value), count) for value, count in self.eigenvalues], self.is_complete,
        )


def rational_spectrum(matrix):
    """
    Rational eigenvalues of a square matrix, from the rational roots of its characteristic polynomial.
    """
    if not matrix.is_square:
        raise NotSquareError(matrix.shape)
    return RationalSpectrum(rational_roots(matrix.charpoly()), matrix.nrows)


def eigenspace(matrix, value, power=1):
    """
    ker (M - value)^power.
    """
    shifted = matrix - RationalMatrix.identity(matrix.nrows).scale(value)
    return LinearMap(shifted.power(power)).kernel()


def stable_under(subspace, matrix):
    """
    True iff `matrix` maps `subspace` into itself.
    """
    return LinearMap(matrix).maps_into(subspace, subspace)
