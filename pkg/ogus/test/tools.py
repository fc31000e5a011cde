"""
Fixtures and random generators for testing ogus.

Generators take a :class:`random.Random` so a hypothesis-drawn integer seed
reproduces the whole instance.
"""
import os
from contextlib import contextmanager
from fractions import Fraction

from mock import patch

from ogus.devissage import LinearizedLaumonMotive, build_gamma
from ogus.diagrams import DiagramObject, DiagramShape, Edge, map_shape
from ogus.filtered import Filtration, FilteredPhiModule, FrobeniusAt, WeightFiltration
from ogus.linalg import LinearMap, RationalMatrix, Subspace
from ogus.settings import SAMPLES_ENV_VAR
from ogus.structures import OgusMorphism, OgusObject, hom

DATA_DIR = os.path.join(os.path.dirname(__file__), 'data')


def data_file(name):
    return os.path.join(DATA_DIR, name)


@contextmanager
def few_samples(count=20):
    """
    Run with few falsification samples.
    """
    with patch.dict(os.environ, {SAMPLES_ENV_VAR: str(count)}):
        yield


def matrix(rows, ncols=None):
    return RationalMatrix(rows, ncols)


def line(*entries):
    return Subspace(len(entries), [entries])


# Named objects

def unit_object(primes=(2, 3)):
    """
    Q(0): weight 0, Fil^0 = T, phi = 1.
    """
    return OgusObject(
        t_dr=1,
        weight=[(0, Subspace.full(1))],
        hodge=[(0, Subspace.full(1))],
        frobenii=[FrobeniusAt(place="v{}".format(p), prime=p, phi=matrix([[1]])) for p in primes],
    )


def tate_object(primes=(2, 3), inverted=False):
    """
    Q(1): weight -2, Fil^-1 = T, Fil^0 = 0, phi = 1/p (or p when `inverted`).
    """
    return OgusObject(
        t_dr=1,
        weight=[(-2, Subspace.full(1))],
        hodge=[(-1, Subspace.full(1))],
        frobenii=[FrobeniusAt(place="v{}".format(p), prime=p, phi=matrix([[p if inverted else Fraction(1, p)]]))
                  for p in primes],
    )


def tate_module(prime=2, fil0_full=False, phi=None):
    hodge = [(0, Subspace.full(1))] if fil0_full else [(-1, Subspace.full(1))]
    return FilteredPhiModule(
        dim=1,
        filtration=hodge,
        frobenii=[FrobeniusAt(place='v', prime=prime, phi=matrix([[Fraction(1, prime) if phi is None else phi]]))],
    )


def map_object(z0, z1, rows):
    return DiagramObject(shape=map_shape(), spaces={'0': z0, '1': z1}, maps={'f': RationalMatrix(rows, z0)})


# Random data

def random_matrix(rng, nrows, ncols, low=-2, high=2):
    return RationalMatrix([[rng.randint(low, high) for _ in range(ncols)] for _ in range(nrows)], ncols)


def random_invertible(rng, size):
    while True:
        candidate = random_matrix(rng, size, size)
        if candidate.is_invertible():
            return candidate


def random_subspace(rng, ambient_dim):
    return Subspace(ambient_dim, random_matrix(rng, rng.randint(0, ambient_dim), ambient_dim))


def random_hodge(rng, dim, low=-1, high=1):
    """
    A random decreasing filtration: each vector of a random basis gets a jump index.
    """
    basis = random_invertible(rng, dim).rows if dim else ()
    jumps = [rng.randint(low, high) for _ in basis]
    steps = []
    for index in sorted(set(jumps)):
        steps.append((index, Subspace(dim, [vector for vector, jump in zip(basis, jumps) if jump >= index])))
    return Filtration(dim, steps)


def _units(prime, count):
    units = []
    candidate = 1
    while len(units) < count:
        if candidate % prime:
            units.append(candidate)
        candidate += 1
    return units


def random_module(rng, dim, prime, balanced=True):
    """
    A filtered phi-module with a multiplicity-free rational spectrum.

    With `balanced` the eigenvalue valuations sum to t_H, so the total condition holds.
    """
    hodge = random_hodge(rng, dim)
    valuations = [rng.randint(-1, 1) for _ in range(dim)]
    if balanced and dim:
        valuations[-1] = hodge.weighted_total() - sum(valuations[:-1])
    eigenvalues = [rng.choice((1, -1)) * unit * Fraction(prime) ** valuation
                   for unit, valuation in zip(_units(prime, dim), valuations)]
    change = random_invertible(rng, dim)
    phi = change @ RationalMatrix.diagonal(eigenvalues) @ change.inverse()
    module = FilteredPhiModule(dim=dim, filtration=hodge,
                               frobenii=[FrobeniusAt(place='v', prime=prime, phi=phi)])
    eigenvectors = [change.column(index) for index in range(dim)]
    return module, list(zip(eigenvectors, valuations))


def _level1_frobenius(rng, tates, pairs, units, prime, extended):
    """
    phi in a basis adapted to W: 1/p on weight -2, x^2 + 1/p on each weight -1 pair, 1 on weight 0.

    With `extended`, entries mapping higher weights into lower ones are random.
    """
    weights = [-2] * tates + [-1] * (2 * pairs) + [0] * units
    dim = len(weights)
    rows = [[Fraction(0)] * dim for _ in range(dim)]
    for index in range(tates):
        rows[index][index] = Fraction(1, prime)
    for start in range(tates, tates + 2 * pairs, 2):
        rows[start][start + 1] = -Fraction(1, prime)
        rows[start + 1][start] = Fraction(1)
    for index in range(tates + 2 * pairs, dim):
        rows[index][index] = Fraction(1)
    if extended:
        for row in range(dim):
            for column in range(dim):
                if weights[row] < weights[column]:
                    rows[row][column] = Fraction(rng.randint(-1, 1))
    return RationalMatrix(rows, dim)


def _level1_fil0(rng, tates, pairs, units):
    """
    Fil^0 in the adapted basis: meets W_-2 in 0, cuts a line out of each weight -1 pair and maps onto gr^W_0.
    """
    dim = tates + 2 * pairs + units
    columns = []
    for start in range(tates, tates + 2 * pairs, 2):
        column = [rng.randint(-1, 1) for _ in range(tates)] + [0] * (dim - tates)
        column[start], column[start + 1] = 1, rng.randint(-1, 1)
        columns.append(column)
    for index in range(tates + 2 * pairs, dim):
        column = [rng.randint(-1, 1) for _ in range(tates + 2 * pairs)] + [0] * units
        column[index] = 1
        columns.append(column)
    return RationalMatrix([[column[row] for column in columns] for row in range(dim)], len(columns))


def random_level1_object(rng, max_dim=3, primes=(2, 3), exact_dim=None):
    """
    A valid object of level <= 1 with a Frobenius at each of `primes`.

    In a basis adapted to W it is built from unit, Tate and pure weight -1 pieces, possibly as a non-split
    extension, with Fil^0 any complement of W_-2 compatible with the pieces; a random basis change hides the
    adapted basis. The result is admissible at every place.
    """
    dim = rng.randint(0, max_dim) if exact_dim is None else exact_dim
    if not dim:
        return OgusObject(t_dr=0, weight=[(0, Subspace.full(0))], hodge=[(0, Subspace.full(0))])
    pairs = 1 if dim >= 2 and rng.random() < 0.4 else 0
    tates = rng.randint(0, dim - 2 * pairs)
    units = dim - 2 * pairs - tates
    extended = rng.random() < 0.7
    change = random_invertible(rng, dim)
    columns = change.columns
    fil0 = change @ _level1_fil0(rng, tates, pairs, units)
    weight = [
        (-2, Subspace(dim, columns[:tates])),
        (-1, Subspace(dim, columns[:tates + 2 * pairs])),
        (0, Subspace.full(dim)),
    ]
    frobenii = []
    for prime in primes:
        phi = _level1_frobenius(rng, tates, pairs, units, prime, extended)
        frobenii.append(FrobeniusAt(place='v{}'.format(prime), prime=prime,
                                    phi=change @ phi @ change.inverse()))
    return OgusObject(
        t_dr=dim,
        weight=weight,
        hodge=[(-1, Subspace.full(dim)), (0, Subspace(dim, fil0.columns))],
        frobenii=frobenii,
    )


def random_morphism(rng, source, target):
    """
    A random combination of a Hom basis; the zero morphism when Hom is zero.
    """
    basis = hom(source, target)
    result = RationalMatrix.zeros(target.t_dr, source.t_dr)
    for morphism in basis:
        result = result + morphism.matrix.scale(rng.randint(-2, 2))
    return OgusMorphism(source=source, target=target, matrix=result)


def random_motive(rng, max_etale=2, max_lie_f=2, max_v=2, lie_f=None, v=None, primes=(2, 3)):
    """
    A valid linearized motive with a random row, vector part and gamma built from a section and a lift.
    """
    etale = random_level1_object(rng, max_etale, primes)
    lie_f = rng.randint(0, max_lie_f) if lie_f is None else lie_f
    v = rng.randint(0, max_v) if v is None else v
    fil0 = etale.fil0
    u_m = fil0.dim + lie_f
    change = random_invertible(rng, u_m) if u_m else RationalMatrix.identity(0)
    j = change @ RationalMatrix.vstack(RationalMatrix.identity(fil0.dim), RationalMatrix.zeros(lie_f, fil0.dim))
    q = RationalMatrix.hstack(RationalMatrix.zeros(lie_f, fil0.dim), RationalMatrix.identity(lie_f)) @ \
        change.inverse()
    sigma = change @ RationalMatrix.vstack(RationalMatrix.zeros(fil0.dim, lie_f), RationalMatrix.identity(lie_f))
    du = random_matrix(rng, fil0.codim, lie_f)
    motive = LinearizedLaumonMotive(
        etale=etale, lie_f=lie_f, du_times=du, v=v, u_m=u_m, j=j, q=q, alpha=random_matrix(rng, v, u_m),
    )
    lift = fil0.quotient_section() @ LinearMap(du, lie_f, fil0.codim)
    lift = lift + fil0.inclusion() @ LinearMap(random_matrix(rng, fil0.dim, lie_f), lie_f, fil0.dim)
    return motive.with_gamma(build_gamma(motive, LinearMap(sigma, lie_f, u_m), lift))


def deligne_motive(etale):
    """
    Lie F = 0 and V = 0: gamma is forced to be the inclusion of Fil^0.
    """
    fil0 = etale.fil0.dim
    motive = LinearizedLaumonMotive(
        etale=etale, lie_f=0, du_times=RationalMatrix.zeros(etale.fil0.codim, 0), v=0, u_m=fil0,
        j=RationalMatrix.identity(fil0), q=RationalMatrix.zeros(0, fil0), alpha=RationalMatrix.zeros(0, fil0),
    )
    return motive.with_gamma(build_gamma(motive, RationalMatrix.zeros(fil0, 0), RationalMatrix.zeros(etale.t_dr, 0)))


def random_quiver(rng, max_vertices=3, max_edges=3):
    vertices = [str(index) for index in range(rng.randint(1, max_vertices))]
    edges = []
    for index in range(rng.randint(0, max_edges)):
        edges.append(Edge(label="e{}".format(index), source=rng.choice(vertices), target=rng.choice(vertices)))
    return DiagramShape(vertices=vertices, edges=edges)


def random_diagram(rng, shape, max_dim=2):
    spaces = {vertex: rng.randint(0, max_dim) for vertex in shape.vertices}
    return DiagramObject(shape=shape, spaces=spaces, maps={
        edge.label: random_matrix(rng, spaces[edge.target], spaces[edge.source]) for edge in shape.edges
    })
