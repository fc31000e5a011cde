"""
Ogus structures: a de Rham space with an increasing weight filtration, a
decreasing Hodge filtration and a Frobenius matrix at each labeled place.

Objects are plain records; :func:`validate` reports every failed clause.
Morphisms are matrices respecting both filtrations and commuting with the
Frobenius at every place the two ends share.
"""
import logging
from collections import namedtuple
from fractions import Fraction

from ogus.diagrams import DiagramObject, DiagramShape, Edge, Slot, hom_system
from ogus.exceptions import (
    InvalidMorphismError, LevelError, MalformedInputError, ShapeMismatchError, UnknownPlaceError,
)
from ogus.fields import AmbientField, Count, ListField, Matrix, Record, RecordField
from ogus.filtered import (
    NOT_ADMISSIBLE,
    UNDETERMINED,
    Filtration,
    FilteredPhiModule,
    FrobeniusAt,
    WeightFiltration,
    check_admissible,
    compatibility_failures,
    strictness_failures,
)
from ogus.linalg import LinearMap, RationalMatrix, stable_under
from ogus.polynomials import roots_on_circle
from ogus.validation import Validation

log = logging.getLogger(__name__)


def _de_rham_dim(values, key=None):  # pylint: disable=unused-argument
    return values['t_dr']


class OgusObject(Record):
    """
    (T_dR, W, Fil, (phi_v)_v) with all Frobenius matrices acting on T_dR.
    """
    t_dr = Count(help="Dimension of the de Rham space")
    weight = AmbientField(WeightFiltration, ambient=_de_rham_dim, default=())
    hodge = AmbientField(Filtration, ambient=_de_rham_dim, default=())
    frobenii = ListField(RecordField(FrobeniusAt), sort_key=lambda frobenius: frobenius.place, default=())

    def check(self):
        labels = self.places
        if len(set(labels)) != len(labels):
            raise MalformedInputError("Place labels must be unique, got {}".format(list(labels)))
        for frobenius in self.frobenii:
            if frobenius.dim != self.t_dr:
                raise ShapeMismatchError("Frobenius at {}".format(frobenius.place), self.t_dr, frobenius.dim)

    @classmethod
    def zero(cls):
        return cls(t_dr=0)

    @property
    def places(self):
        return tuple(frobenius.place for frobenius in self.frobenii)

    def frobenius(self, label):
        for frobenius in self.frobenii:
            if frobenius.place == label:
                return frobenius
        raise UnknownPlaceError(label)

    @property
    def fil0(self):
        return self.hodge.at(0)

    def lie_projection(self):
        """
        T -> T/Fil^0.
        """
        return self.fil0.quotient_map()

    def filtered_phi(self):
        """
        The underlying filtered phi-module (the weight filtration forgotten).
        """
        return FilteredPhiModule(dim=self.t_dr, filtration=self.hodge, frobenii=self.frobenii)


def _graded_frobenius(weight, phi, index):
    upper, lower = weight.graded_piece(index)
    on_step = LinearMap(phi).restrict(upper, upper)
    inside = upper.coordinate_map().image_of(lower)
    return on_step.induced_on_quotients(inside, inside).matrix


def validate(obj, seed=None, samples=None):
    """
    Check every clause of an Ogus object and report each failure.
    """
    validation = Validation(obj)
    for index, text in obj.weight.violations():
        validation.error('weight-increasing', "W_{}: {}".format(index, text), index=index)
    if not obj.weight.is_exhaustive():
        validation.error('weight-exhaustive', "The top weight step is not the whole space")
    hodge_violations = obj.hodge.violations()
    for index, text in hodge_violations:
        validation.error('hodge-decreasing', "Fil^{}: {}".format(index, text), index=index)
    weight_stable = set()
    for frobenius in obj.frobenii:
        unstable = [index for index, space in obj.weight.steps if not stable_under(space, frobenius.phi)]
        for index in unstable:
            validation.error('frobenius-weight-stable', "phi at {} does not preserve W_{}".format(
                frobenius.place, index), place=frobenius.place, index=index)
        if not unstable:
            weight_stable.add(frobenius.place)
    module = None if hodge_violations else obj.filtered_phi()
    for frobenius in obj.frobenii:
        if frobenius.exempt:
            continue
        if frobenius.place in weight_stable and not obj.weight.violations():
            _check_purity(validation, obj, frobenius)
        if module is None:
            continue
        verdict = check_admissible(module, frobenius.place, seed=seed, samples=samples)
        if verdict.status == NOT_ADMISSIBLE:
            validation.error('admissible', "Not weakly admissible at {} (t_H = {}, t_N = {}, {})".format(
                frobenius.place, verdict.t_h_total, verdict.t_n_total, verdict.reason or verdict.method,
            ), place=frobenius.place)
        elif verdict.status == UNDETERMINED:
            validation.undetermined('admissible', "Admissibility at {} undetermined after {} samples".format(
                frobenius.place, verdict.samples), place=frobenius.place)
    return validation


def _check_purity(validation, obj, frobenius):
    for index, _ in obj.weight.graded_dims():
        graded = _graded_frobenius(obj.weight, frobenius.phi, index)
        radius_squared = Fraction(frobenius.prime) ** index
        if not roots_on_circle(graded.charpoly(), radius_squared):
            validation.error('weight-purity', "phi at {} on gr^W_{} is not pure of weight {}".format(
                frobenius.place, index, index), place=frobenius.place, index=index)


def _matrix_shape(values, key=None):  # pylint: disable=unused-argument
    return values['target'].t_dr, values['source'].t_dr


class OgusMorphism(Record):
    source = RecordField(OgusObject)
    target = RecordField(OgusObject)
    matrix = Matrix(shape=_matrix_shape)

    @classmethod
    def identity(cls, obj):
        return cls(source=obj, target=obj, matrix=RationalMatrix.identity(obj.t_dr))

    @property
    def linear_map(self):
        return LinearMap(self.matrix)

    @property
    def shared_places(self):
        return tuple(sorted(set(self.source.places) & set(self.target.places)))

    def compose(self, other):
        """
        self after other.
        """
        return OgusMorphism(source=other.source, target=self.target, matrix=self.matrix @ other.matrix)


def validate_morphism(morphism):
    validation = Validation(morphism)
    linear_map = morphism.linear_map
    source, target = morphism.source, morphism.target
    for index in compatibility_failures(linear_map, source.weight, target.weight):
        validation.error('weight-compatible', "W_{} is not mapped into W_{}".format(index, index), index=index)
    for index in compatibility_failures(linear_map, source.hodge, target.hodge):
        validation.error('hodge-compatible', "Fil^{} is not mapped into Fil^{}".format(index, index), index=index)
    for label in morphism.shared_places:
        if morphism.matrix @ source.frobenius(label).phi != target.frobenius(label).phi @ morphism.matrix:
            validation.error('frobenius-commutes', "Map does not commute with phi at {}".format(label), place=label)
    if set(source.places) != set(target.places):
        log.warning('Morphism ends have place sets %s and %s', source.places, target.places)
        validation.warning('place-sets', "Place sets differ; only {} are compared".format(list(morphism.shared_places)))
    return validation


def _require_valid(morphism):
    validation = validate_morphism(morphism)
    if not validation.valid:
        raise InvalidMorphismError("Invalid morphism: {}".format(", ".join(validation.clauses)),
                                   clause=validation.clauses[0])
    return validation


def _common_indices(filtrations):
    indices = set()
    for filtration in filtrations:
        indices.update(filtration._candidate_indices())  # pylint: disable=protected-access
    return sorted(indices)


class HomPresentation:
    """
    Ogus objects as diagrams: vertex T, an invertible loop per shared place,
    and a slot for each weight and Hodge step index relevant to either end.
    """
    VERTEX = 'T'

    def __init__(self, *objects):
        self.places = sorted(set.intersection(*(set(obj.places) for obj in objects))) if objects else []
        self.weight_indices = _common_indices(obj.weight for obj in objects)
        self.hodge_indices = _common_indices(obj.hodge for obj in objects)
        self.shape = DiagramShape(
            vertices=[self.VERTEX],
            edges=[Edge(label=self.loop(place), source=self.VERTEX, target=self.VERTEX, invertible=True)
                   for place in self.places],
            slots=[Slot(label=self.weight_slot(index), vertex=self.VERTEX) for index in self.weight_indices]
            + [Slot(label=self.hodge_slot(index), vertex=self.VERTEX) for index in self.hodge_indices],
        )

    @staticmethod
    def loop(place):
        return "phi:{}".format(place)

    @staticmethod
    def weight_slot(index):
        return "W{}".format(index)

    @staticmethod
    def hodge_slot(index):
        return "Fil{}".format(index)

    def diagram(self, obj):
        slots = {self.weight_slot(index): obj.weight.at(index) for index in self.weight_indices}
        slots.update({self.hodge_slot(index): obj.hodge.at(index) for index in self.hodge_indices})
        return DiagramObject(
            shape=self.shape,
            spaces={self.VERTEX: obj.t_dr},
            maps={self.loop(place): obj.frobenius(place).phi for place in self.places},
            slots=slots,
        )


def hom(a, b):
    """
    A basis of Hom(a, b).
    """
    presentation = HomPresentation(a, b)
    system = hom_system(presentation.diagram(a), presentation.diagram(b))
    return [OgusMorphism(source=a, target=b, matrix=solution[HomPresentation.VERTEX])
            for solution in system.solutions()]


def hom_dimension(a, b):
    presentation = HomPresentation(a, b)
    return hom_system(presentation.diagram(a), presentation.diagram(b)).solution_space().dim


def add_morphism_equations(system, name, a, b):
    """
    Constrain the unknown `name` of a :class:`LinearSystem` to be a morphism a -> b.
    """
    presentation = HomPresentation(a, b)
    source, target = presentation.diagram(a), presentation.diagram(b)
    for edge in presentation.shape.edges:
        system.equation([
            (target.map(edge.label).matrix, name, RationalMatrix.identity(a.t_dr)),
            (-RationalMatrix.identity(b.t_dr), name, source.map(edge.label).matrix),
        ])
    for slot in presentation.shape.slots:
        system.equation([
            (target.slot(slot.label).quotient_map().matrix, name, source.slot(slot.label).inclusion().matrix),
        ])


def _sub_object(obj, subspace, places):
    return OgusObject(
        t_dr=subspace.dim,
        weight=obj.weight.induced(subspace),
        hodge=obj.hodge.induced(subspace),
        frobenii=[obj.frobenius(place).restricted(subspace) for place in places],
    )


def _quotient_object(obj, subspace, places):
    return OgusObject(
        t_dr=subspace.codim,
        weight=obj.weight.quotient(subspace),
        hodge=obj.hodge.quotient(subspace),
        frobenii=[obj.frobenius(place).on_quotient(subspace) for place in places],
    )


Construction = namedtuple('Construction', 'obj morphism validation')


def kernel(morphism, seed=None, samples=None):
    """
    The kernel with induced filtrations and restricted Frobenius, its inclusion, and its validation.
    """
    _require_valid(morphism)
    space = morphism.linear_map.kernel()
    obj = _sub_object(morphism.source, space, morphism.shared_places)
    inclusion = OgusMorphism(source=obj, target=morphism.source, matrix=space.inclusion().matrix)
    return Construction(obj, inclusion, validate(obj, seed=seed, samples=samples))


def cokernel(morphism, seed=None, samples=None):
    """
    The cokernel with image filtrations and induced Frobenius, the projection, and its validation.
    """
    _require_valid(morphism)
    space = morphism.linear_map.image()
    obj = _quotient_object(morphism.target, space, morphism.shared_places)
    projection = OgusMorphism(source=morphism.target, target=obj, matrix=space.quotient_map().matrix)
    return Construction(obj, projection, validate(obj, seed=seed, samples=samples))


def image_object(morphism):
    _require_valid(morphism)
    return _sub_object(morphism.target, morphism.linear_map.image(), morphism.shared_places)


def coimage_object(morphism):
    _require_valid(morphism)
    return _quotient_object(morphism.source, morphism.linear_map.kernel(), morphism.shared_places)


def coimage_to_image(morphism):
    """
    The canonical map coim(m) -> im(m); a linear isomorphism for every morphism.
    """
    image = morphism.linear_map.image()
    kernel_space = morphism.linear_map.kernel()
    matrix = (image.coordinate_map() @ morphism.linear_map @ kernel_space.quotient_section()).matrix
    return OgusMorphism(source=coimage_object(morphism), target=image_object(morphism), matrix=matrix)


def direct_sum(a, b):
    """
    a + b over the places both carry.
    """
    frobenii = []
    for place in sorted(set(a.places) & set(b.places)):
        left, right = a.frobenius(place), b.frobenius(place)
        if left.prime != right.prime:
            raise MalformedInputError("Place {} has primes {} and {}".format(place, left.prime, right.prime))
        frobenii.append(left.replace(
            phi=RationalMatrix.block_diagonal(left.phi, right.phi), exempt=left.exempt or right.exempt,
        ))
    return OgusObject(
        t_dr=a.t_dr + b.t_dr,
        weight=a.weight.direct_sum(b.weight),
        hodge=a.hodge.direct_sum(b.hodge),
        frobenii=frobenii,
    )


class StrictnessAudit:
    """
    Weight and Hodge strictness of one morphism, decided independently.
    """

    def __init__(self, weight_failures, hodge_failures):
        self.weight_failures = tuple(weight_failures)
        self.hodge_failures = tuple(hodge_failures)

    @property
    def weight_strict(self):
        return not self.weight_failures

    @property
    def hodge_strict(self):
        return not self.hodge_failures

    def to_json(self):
        return {
            "weight": {"strict": self.weight_strict, "failures": list(self.weight_failures)},
            "hodge": {"strict": self.hodge_strict, "failures": list(self.hodge_failures)},
        }


def strictness_audit(morphism):
    _require_valid(morphism)
    linear_map = morphism.linear_map
    audit = StrictnessAudit(
        strictness_failures(linear_map, morphism.source.weight, morphism.target.weight),
        strictness_failures(linear_map, morphism.source.hodge, morphism.target.hodge),
    )
    if not audit.hodge_strict:
        log.info('Hodge strictness fails at indices %s', list(audit.hodge_failures))
    return audit


def is_level_le_1(obj):
    """
    True iff Fil^1 = 0, Fil^-1 = T and all weights lie in [-2, 0].
    """
    return (
        obj.hodge.at(1).is_zero()
        and obj.hodge.at(-1).is_full()
        and obj.weight.at(-3).is_zero()
        and obj.weight.at(0).is_full()
    )


def require_level_le_1(obj):
    if not is_level_le_1(obj):
        raise LevelError("Object is not of level <= 1")
    return obj
