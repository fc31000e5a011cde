"""
Filtered phi-modules at p-adic places.

A :class:`FilteredPhiModule` is Q^n with a decreasing Hodge filtration and a
Frobenius matrix at each of finitely many labeled places. This module computes
Hodge and Newton numbers and polygons and decides weak admissibility:
t_H(T) = t_N(T), and t_H(W) <= t_N(W) for every Frobenius-stable subspace W.
"""
import itertools
import logging
import random

from ogus import settings
from ogus.exceptions import (
    ExemptPlaceError,
    InvalidMorphismError,
    MalformedInputError,
    NotInSubspaceError,
    NotStableError,
    ShapeMismatchError,
    UnknownPlaceError,
)
from ogus.fields import (
    AmbientField, Boolean, Choice, Count, Integer, ListField, Matrix, Prime, Rational, Record, RecordField, String,
)
from ogus.linalg import (
    LinearMap, RationalMatrix, Subspace, eigenspace, padic_valuation, rational_spectrum, stable_under,
)
from ogus.polynomials import lies_above, newton_slopes, polygon_vertices

log = logging.getLogger(__name__)


class SteppedFiltration:
    """
    A filtration of Q^n given by finitely many (index, subspace) steps.

    Between listed indices the filtration is constant. Subclasses fix the
    direction and the values outside the listed range.
    """

    def __init__(self, ambient_dim, steps=()):
        normalized = []
        for step in steps:
            try:
                index, space = step
            except (TypeError, ValueError) as exc:
                raise MalformedInputError("Filtration step must be [index, basis], got {!r}".format(step)) from exc
            if isinstance(index, bool) or not isinstance(index, int):
                raise MalformedInputError("Filtration index must be an integer, got {!r}".format(index))
            if not isinstance(space, Subspace):
                space = Subspace.from_json(space, ambient_dim)
            if space.ambient_dim != ambient_dim:
                raise ShapeMismatchError("filtration step {}".format(index), ambient_dim, space.ambient_dim)
            normalized.append((index, space))
        normalized.sort(key=lambda step: step[0])
        indices = [index for index, _ in normalized]
        if len(set(indices)) != len(indices):
            raise MalformedInputError("Repeated filtration index in {}".format(indices))
        self.ambient_dim = ambient_dim
        self.steps = tuple(normalized)

    @classmethod
    def from_json(cls, value, ambient_dim):
        if not isinstance(value, (list, tuple)):
            raise MalformedInputError("A filtration must be a list of [index, basis] pairs, got {!r}".format(value))
        return cls(ambient_dim, value)

    @classmethod
    def trivial(cls, ambient_dim, index=0):
        """
        The filtration with a single jump at `index`.
        """
        return cls(ambient_dim, [(index, Subspace.full(ambient_dim))])

    def to_json(self):
        return [[index, space.to_json()] for index, space in self.steps]

    @property
    def indices(self):
        return tuple(index for index, _ in self.steps)

    def _listed_at(self, index):
        found = None
        for listed, space in self.steps:
            if listed > index:
                break
            found = space
        return found

    def at(self, index):
        raise NotImplementedError

    __getitem__ = at

    def _candidate_indices(self):
        if not self.steps:
            return [-1, 0, 1]
        return sorted({index + shift for index in self.indices for shift in (-1, 0, 1)})

    def _canonical(self):
        return tuple((index, self.at(index)) for index in self.breakpoints())

    def breakpoints(self):
        """
        Indices where the filtration changes (compared with the index below).
        """
        return tuple(index for index in self._candidate_indices() if self.at(index) != self.at(index - 1))

    def __eq__(self, other):
        if type(other) is not type(self):  # pylint: disable=unidiomatic-typecheck
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self._canonical() == other._canonical()

    def __hash__(self):
        return hash((type(self).__name__, self.ambient_dim, self._canonical()))

    def __repr__(self):
        return "{}({}, {!r})".format(type(self).__name__, self.ambient_dim, self.to_json())

    def _map_steps(self, function, ambient_dim):
        return type(self)(ambient_dim, [(index, function(space)) for index, space in self.steps])

    def induced(self, subspace):
        """
        The filtration induced on `subspace`, in its coordinates.
        """
        if subspace.ambient_dim != self.ambient_dim:
            raise NotInSubspaceError("Subspace of Q^{} is not inside Q^{}".format(subspace.ambient_dim, self.ambient_dim))
        coordinates = subspace.coordinate_map()
        return self._map_steps(lambda space: coordinates.image_of(space & subspace), subspace.dim)

    def quotient(self, subspace):
        """
        The image filtration on the quotient by `subspace`.
        """
        if subspace.ambient_dim != self.ambient_dim:
            raise NotInSubspaceError("Subspace of Q^{} is not inside Q^{}".format(subspace.ambient_dim, self.ambient_dim))
        projection = subspace.quotient_map()
        return self._map_steps(projection.image_of, subspace.codim)

    def transport(self, linear_map):
        """
        The filtration carried along an invertible change of basis.
        """
        return self._map_steps(linear_map.image_of, linear_map.codomain_dim)

    def direct_sum(self, other):
        indices = sorted(set(self._candidate_indices()) | set(other._candidate_indices()))
        total = self.ambient_dim + other.ambient_dim
        steps = []
        for index in indices:
            left, right = self.at(index), other.at(index)
            vectors = [tuple(v) + (0,) * other.ambient_dim for v in left.vectors]
            vectors += [(0,) * self.ambient_dim + tuple(v) for v in right.vectors]
            steps.append((index, Subspace(total, vectors)))
        return type(self)(total, steps)

    def graded_dims(self):
        """
        (index, dim gr) for every index with a nonzero graded piece.
        """
        raise NotImplementedError

    def slopes(self):
        """
        Jump indices repeated by the dimension of their graded pieces, ascending.
        """
        return sorted(itertools.chain.from_iterable([index] * dim for index, dim in self.graded_dims()))

    def weighted_total(self):
        return sum(index * dim for index, dim in self.graded_dims())

    def violations(self):
        """
        (index, text) pairs for steps breaking monotonicity.
        """
        raise NotImplementedError

    def check(self):
        problems = self.violations()
        if problems:
            index, text = problems[0]
            raise MalformedInputError("Filtration step {}: {}".format(index, text))


class Filtration(SteppedFiltration):
    """
    A decreasing (Hodge) filtration.

    Fil^i is the step at the largest listed index <= i; the whole space below
    the lowest listed index and 0 above the highest. With no steps it is the
    trivial filtration with its jump in degree 0.
    """

    def at(self, index):
        if not self.steps:
            return Subspace.full(self.ambient_dim) if index <= 0 else Subspace.zero(self.ambient_dim)
        if index > self.steps[-1][0]:
            return Subspace.zero(self.ambient_dim)
        found = self._listed_at(index)
        return Subspace.full(self.ambient_dim) if found is None else found

    def graded_dims(self):
        dims = []
        for index in self._candidate_indices():
            dim = self.at(index).dim - self.at(index + 1).dim
            if dim:
                dims.append((index, dim))
        return dims

    def violations(self):
        problems = []
        for (index, space), (_, following) in zip(self.steps, self.steps[1:]):
            if not following <= space:
                problems.append((index, "step does not contain the next step"))
        return problems

    def deepest_nonzero(self):
        """
        The largest index with a nonzero step, or None on the zero space.
        """
        nonzero = [index for index, dim in self.graded_dims()]
        return max(nonzero) if nonzero else None

    def whole_until(self):
        """
        The largest index at which the filtration is still the whole space.
        """
        full = [index for index in self._candidate_indices() if self.at(index).is_full()]
        return max(full) if full else None


class WeightFiltration(SteppedFiltration):
    """
    An increasing (weight) filtration.

    W_j is the step at the largest listed index <= j and 0 below the lowest
    listed index. With no steps everything has weight 0.
    """

    def at(self, index):
        if not self.steps:
            return Subspace.full(self.ambient_dim) if index >= 0 else Subspace.zero(self.ambient_dim)
        found = self._listed_at(index)
        return Subspace.zero(self.ambient_dim) if found is None else found

    def graded_dims(self):
        dims = []
        for index in self._candidate_indices():
            dim = self.at(index).dim - self.at(index - 1).dim
            if dim:
                dims.append((index, dim))
        return dims

    def violations(self):
        problems = []
        for (index, space), (_, following) in zip(self.steps, self.steps[1:]):
            if not space <= following:
                problems.append((index, "step is not contained in the next step"))
        return problems

    def is_exhaustive(self):
        return not self.steps or self.steps[-1][1].is_full()

    def graded_piece(self, index):
        """
        (W_j, W_{j-1}) for the graded piece of weight `index`.
        """
        return self.at(index), self.at(index - 1)


class Place(Record):
    label = String()
    prime = Prime()


class FrobeniusAt(Record):
    """
    The Frobenius at one place, acting on the de Rham space.
    """
    place = String(help="Label of the place")
    prime = Prime(help="Residue characteristic of the place")
    phi = Matrix()
    exempt = Boolean(default=False, help="True when admissibility is not asserted at this place")

    def check(self):
        if not self.phi.is_square:
            raise ShapeMismatchError("Frobenius at {}".format(self.place), "square", self.phi.shape)
        if not self.phi.is_invertible():
            raise MalformedInputError("Frobenius at {} is not invertible".format(self.place))

    @property
    def site(self):
        return Place(label=self.place, prime=self.prime)

    @property
    def dim(self):
        return self.phi.nrows

    def restricted(self, subspace):
        """
        The Frobenius on a stable subspace, in its coordinates.
        """
        if not stable_under(subspace, self.phi):
            raise NotStableError("Subspace is not stable under the Frobenius at {}".format(self.place))
        return self.replace(phi=LinearMap(self.phi).restrict(subspace, subspace).matrix)

    def on_quotient(self, subspace):
        if not stable_under(subspace, self.phi):
            raise NotStableError("Subspace is not stable under the Frobenius at {}".format(self.place))
        return self.replace(phi=LinearMap(self.phi).induced_on_quotients(subspace, subspace).matrix)

    def transported(self, change):
        """
        g phi g^-1 for an invertible change of basis g.
        """
        return self.replace(phi=change.matrix @ self.phi @ change.matrix.inverse())


def _square_dim(values, key=None):  # pylint: disable=unused-argument
    return values['dim']


def _frobenius_labels(frobenii):
    labels = [frobenius.place for frobenius in frobenii]
    if len(set(labels)) != len(labels):
        raise MalformedInputError("Place labels must be unique, got {}".format(labels))


class FilteredPhiModule(Record):
    """
    Q^dim with a Hodge filtration and Frobenius matrices at labeled places.
    """
    dim = Count()
    filtration = AmbientField(Filtration, ambient=_square_dim, default=())
    frobenii = ListField(RecordField(FrobeniusAt), sort_key=lambda frobenius: frobenius.place, default=())

    def check(self):
        self.filtration.check()
        _frobenius_labels(self.frobenii)
        for frobenius in self.frobenii:
            if frobenius.dim != self.dim:
                raise ShapeMismatchError("Frobenius at {}".format(frobenius.place), self.dim, frobenius.dim)

    @property
    def places(self):
        return tuple(frobenius.place for frobenius in self.frobenii)

    def frobenius(self, label):
        for frobenius in self.frobenii:
            if frobenius.place == label:
                return frobenius
        raise UnknownPlaceError(label)

    def restrict(self, subspace):
        """
        The sub-object on a subspace stable under every Frobenius.
        """
        return FilteredPhiModule(
            dim=subspace.dim,
            filtration=self.filtration.induced(subspace),
            frobenii=[frobenius.restricted(subspace) for frobenius in self.frobenii],
        )

    def quotient(self, subspace):
        return FilteredPhiModule(
            dim=subspace.codim,
            filtration=self.filtration.quotient(subspace),
            frobenii=[frobenius.on_quotient(subspace) for frobenius in self.frobenii],
        )

    def transport(self, change):
        """
        The same module written in another basis: filtration carried along, Frobenius conjugated.
        """
        return FilteredPhiModule(
            dim=self.dim,
            filtration=self.filtration.transport(change),
            frobenii=[frobenius.transported(change) for frobenius in self.frobenii],
        )


def _module_dim(values, key=None):  # pylint: disable=unused-argument
    return values['source'].dim


class FilteredPhiMorphism(Record):
    source = RecordField(FilteredPhiModule)
    target = RecordField(FilteredPhiModule)
    matrix = Matrix(shape=lambda values, key: (values['target'].dim, values['source'].dim))

    @property
    def linear_map(self):
        return LinearMap(self.matrix)


def hodge_number(module, restricted_to=None):
    """
    t_H: the sum of i * dim gr^i of the (induced) Hodge filtration.
    """
    filtration = module.filtration
    if restricted_to is not None:
        filtration = filtration.induced(restricted_to)
    return filtration.weighted_total()


def _valuation_of_det(matrix, prime):
    return padic_valuation(matrix.det(), prime)


def newton_number(module, place, restricted_to=None):
    """
    t_N: the p-adic valuation of det(phi), restricted to a stable subspace when given.
    """
    frobenius = module.frobenius(place)
    if restricted_to is not None:
        if restricted_to.ambient_dim != module.dim:
            raise NotInSubspaceError("Subspace is not inside the module")
        frobenius = frobenius.restricted(restricted_to)
    return _valuation_of_det(frobenius.phi, frobenius.prime)


def hodge_slopes(module):
    return module.filtration.slopes()


def newton_slopes_at(module, place):
    frobenius = module.frobenius(place)
    return newton_slopes(frobenius.phi.charpoly(), frobenius.prime)


def hodge_polygon(module):
    return polygon_vertices(hodge_slopes(module))


def newton_polygon(module, place):
    return polygon_vertices(newton_slopes_at(module, place))


ADMISSIBLE = 'admissible'
NOT_ADMISSIBLE = 'not-admissible'
UNDETERMINED = 'undetermined'


class AdmissibilityVerdict(Record):
    """
    The outcome of a weak-admissibility check at one place.

    `witness` is a Frobenius-stable subspace with t_H > t_N; it is present only
    for NotAdmissible verdicts, which may also be decided without one (total
    mismatch, Newton polygon below the Hodge polygon, irrational witnesses).
    """
    place = String()
    dim = Count()
    status = Choice([ADMISSIBLE, NOT_ADMISSIBLE, UNDETERMINED])
    t_h_total = Integer()
    t_n_total = Integer()
    witness = AmbientField(Subspace, ambient=_square_dim, default=None)
    method = Choice(['totals', 'eigenspans', 'lines', 'polygons', 'falsification'])
    reason = String(default='')
    seed = Integer(default=None)
    samples = Count(default=0)
    hodge_slopes = ListField(Rational(), default=())
    newton_slopes = ListField(Rational(), default=())

    def check(self):
        if self.witness is not None and self.status != NOT_ADMISSIBLE:
            raise MalformedInputError("Only NotAdmissible verdicts carry a witness")

    @property
    def is_admissible(self):
        return self.status == ADMISSIBLE


class AdmissibilityChecker:
    """
    Weak admissibility of a filtered phi-module at one place.

    Tries, in order: the total equality; exact enumeration of eigenvector
    spans when the rational spectrum is complete and multiplicity-free; the
    line analysis in dimension at most two; Mazur's inequality between the
    Newton and Hodge polygons; randomized search for violating stable
    subspaces. Only the last step can leave the verdict undetermined.
    """

    def __init__(self, module, place, seed=None, samples=None):
        frobenius = module.frobenius(place)
        if frobenius.exempt:
            raise ExemptPlaceError(place)
        self.module = module
        self.place = place
        self.phi = frobenius.phi
        self.prime = frobenius.prime
        self.seed = settings.default_seed(module.to_string()) if seed is None else seed
        self.samples = settings.default_samples() if samples is None else samples
        self.hodge_slopes = hodge_slopes(module)
        self.newton_slopes = newton_slopes(self.phi.charpoly(), self.prime)
        self.t_h_total = hodge_number(module)
        self.t_n_total = _valuation_of_det(self.phi, self.prime)

    def _verdict(self, status, method, witness=None, reason='', samples=0):
        log.debug('place %s: %s via %s (%s)', self.place, status, method, reason)
        return AdmissibilityVerdict(
            place=self.place,
            dim=self.module.dim,
            status=status,
            t_h_total=self.t_h_total,
            t_n_total=self.t_n_total,
            witness=witness,
            method=method,
            reason=reason,
            seed=self.seed if samples else None,
            samples=samples,
            hodge_slopes=self.hodge_slopes,
            newton_slopes=self.newton_slopes,
        )

    def excess(self, subspace):
        """
        t_H(W) - t_N(W) for a stable subspace W.
        """
        t_h = self.module.filtration.induced(subspace).weighted_total()
        restricted = LinearMap(self.phi).restrict(subspace, subspace).matrix
        return t_h - _valuation_of_det(restricted, self.prime)

    def verdict(self):
        if self.t_h_total != self.t_n_total:
            witness = Subspace.full(self.module.dim) if self.t_h_total > self.t_n_total else None
            return self._verdict(NOT_ADMISSIBLE, 'totals', witness=witness, reason='total-mismatch')
        spectrum = rational_spectrum(self.phi)
        if spectrum.is_complete and spectrum.is_multiplicity_free and self.module.dim <= settings.EIGENSPAN_LIMIT:
            return self._eigenspans(spectrum)
        if self.module.dim <= 2:
            return self._lines(spectrum)
        return self._search(spectrum)

    def _eigenspans(self, spectrum):
        lines = [(eigenspace(self.phi, value).vectors[0], padic_valuation(value, self.prime))
                 for value in spectrum.values]
        worst = None
        for size in range(len(lines) + 1):
            for chosen in itertools.combinations(lines, size):
                span = Subspace(self.module.dim, [vector for vector, _ in chosen])
                t_n = sum(valuation for _, valuation in chosen)
                excess = hodge_number(self.module, span) - t_n
                if excess > 0 and (worst is None or excess > worst[0]):
                    worst = (excess, span)
        if worst is None:
            return self._verdict(ADMISSIBLE, 'eigenspans')
        return self._verdict(NOT_ADMISSIBLE, 'eigenspans', witness=worst[1], reason='stable-subspace')

    def _lines(self, spectrum):
        dim = self.module.dim
        if dim < 2:
            return self._verdict(ADMISSIBLE, 'lines', reason='no-proper-subspaces')
        filtration = self.module.filtration
        if spectrum.is_complete:
            value = spectrum.values[0]
            valuation = padic_valuation(value, self.prime)
            scalar = RationalMatrix.identity(dim).scale(value)
            if self.phi == scalar:
                deepest = filtration.deepest_nonzero()
                line = Subspace(dim, [filtration.at(deepest).vectors[0]])
            else:
                line = eigenspace(self.phi, value)
            if hodge_number(self.module, line) > valuation:
                return self._verdict(NOT_ADMISSIBLE, 'lines', witness=line, reason='stable-line')
            return self._verdict(ADMISSIBLE, 'lines')
        # No rational eigenvalue. Stable lines exist only over Q_p, where they are never rational, so the
        # deepest step containing one is the last step equal to the whole space.
        low = self.newton_slopes[0]
        whole = filtration.whole_until()
        if whole is None or whole <= low:
            return self._verdict(ADMISSIBLE, 'lines', reason='irrational-lines-satisfy')
        # Equal totals give whole <= (low + high) / 2, so low < high and phi has a Q_p-line of slope low.
        return self._verdict(NOT_ADMISSIBLE, 'lines', reason='irrational-stable-line')

    def _search(self, spectrum):
        if not lies_above(self.newton_slopes, self.hodge_slopes):
            return self._verdict(NOT_ADMISSIBLE, 'polygons', reason='newton-below-hodge')
        found, drawn = self._falsify(spectrum)
        if found is not None:
            return self._verdict(NOT_ADMISSIBLE, 'falsification', witness=found, reason='stable-subspace',
                                 samples=drawn)
        return self._verdict(UNDETERMINED, 'falsification', reason='no-violation-found', samples=drawn)

    def _krylov(self, vectors):
        phi = LinearMap(self.phi)
        span = Subspace(self.module.dim, vectors)
        frontier = list(span.vectors)
        while frontier:
            images = [phi(vector) for vector in frontier]
            grown = span + Subspace(self.module.dim, images)
            if grown == span:
                break
            frontier = [vector for vector in grown.vectors if vector not in span]
            span = grown
        return span

    def _seed_spaces(self, spectrum):
        spaces = [Subspace.full(self.module.dim)]
        for value, count in spectrum.eigenvalues:
            spaces.append(eigenspace(self.phi, value))
            spaces.append(eigenspace(self.phi, value, count))
        spaces.extend(space for _, space in self.module.filtration.steps if not space.is_zero())
        return spaces

    def _falsify(self, spectrum):
        """
        Sample stable subspaces; return the worst violating one and the number drawn.
        """
        rng = random.Random(self.seed)
        dim = self.module.dim
        generalized = [eigenspace(self.phi, value, count) for value, count in spectrum.eigenvalues]
        candidates = []
        for size in range(1, len(generalized) + 1):
            for chosen in itertools.combinations(generalized, size):
                candidates.append(Subspace(dim, [v for space in chosen for v in space.vectors]))
        seeds = self._seed_spaces(spectrum)
        seen = set()
        worst = None
        drawn = 0

        def consider(space):
            nonlocal worst
            if space in seen or space.is_zero():
                return
            seen.add(space)
            excess = self.excess(space)
            if excess > 0 and (worst is None or (excess, -space.dim) > (worst[0], -worst[1].dim)):
                worst = (excess, space)

        for space in candidates:
            consider(space)
        for _ in range(self.samples):
            drawn += 1
            source = rng.choice(seeds)
            if source.is_zero():
                continue
            coefficients = [rng.randint(-3, 3) for _ in range(source.dim)]
            if not any(coefficients):
                coefficients[rng.randrange(source.dim)] = 1
            vector = [sum(c * row[i] for c, row in zip(coefficients, source.vectors)) for i in range(dim)]
            space = self._krylov([vector])
            roll = rng.random()
            if roll < 0.3 and generalized:
                space = space + rng.choice(generalized)
            elif roll < 0.5 and generalized:
                space = space & rng.choice(generalized)
            consider(space)
        log.debug('place %s: %d samples, %d distinct stable subspaces', self.place, drawn, len(seen))
        return (worst[1] if worst else None), drawn


def check_admissible(module, place, seed=None, samples=None):
    """
    Decide weak admissibility of `module` at `place`.
    """
    return AdmissibilityChecker(module, place, seed=seed, samples=samples).verdict()


def _check_indices(*filtrations):
    indices = set()
    for filtration in filtrations:
        indices.update(filtration._candidate_indices())  # pylint: disable=protected-access
    return sorted(indices)


def compatibility_failures(linear_map, source, target):
    """
    Indices i where the map does not send source step i into target step i.
    """
    return [index for index in _check_indices(source, target)
            if not linear_map.maps_into(source.at(index), target.at(index))]


def strictness_failures(linear_map, source, target):
    """
    Indices i where f(source_i) differs from im(f) meet target_i.
    """
    image = linear_map.image()
    return [index for index in _check_indices(source, target)
            if linear_map.image_of(source.at(index)) != (image & target.at(index))]


def is_strict(morphism):
    """
    True iff the morphism is strict for the Hodge filtrations.
    """
    linear_map = morphism.linear_map
    source, target = morphism.source, morphism.target
    failures = compatibility_failures(linear_map, source.filtration, target.filtration)
    if failures:
        raise InvalidMorphismError("Map does not respect the filtrations at {}".format(failures), clause='hodge')
    for label in sorted(set(source.places) & set(target.places)):
        phi_source = source.frobenius(label).phi
        phi_target = target.frobenius(label).phi
        if morphism.matrix @ phi_source != phi_target @ morphism.matrix:
            raise InvalidMorphismError("Map does not commute with the Frobenius at {}".format(label),
                                       clause='frobenius')
    return not strictness_failures(linear_map, source.filtration, target.filtration)
