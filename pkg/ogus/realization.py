"""
The category of Ogus objects of level <= 1 enriched with vector data.

An :class:`MFOgAObject` is a level <= 1 Ogus object T together with maps
alpha: A0 -> A1, beta: B0 -> B1, an isomorphism delta: B1 -> T/Fil^0,
gamma: A0 -> T and epsilon: A0 -> B0 such that the square

    A0 --gamma--> T
    |epsilon      |pi
    B0 --delta∘beta--> T/Fil^0

commutes and is cartesian. Its JSON form is the base object's keys plus
a0, a1, b0, b1, alpha, beta, delta, gamma and epsilon.
"""
import logging

from ogus import structures
from ogus.devissage import require_valid_motive
from ogus.diagrams import LinearSystem
from ogus.exceptions import InvalidObjectError, LevelError, MalformedInputError, NotCartesianError
from ogus.fields import Count, Map, Matrix, Record, RecordField
from ogus.linalg import LinearMap, RationalMatrix, Pullback, Pushout
from ogus.structures import OgusMorphism, OgusObject, add_morphism_equations, is_level_le_1
from ogus.validation import Validation

log = logging.getLogger(__name__)

_EXTRA_KEYS = ('a0', 'a1', 'b0', 'b1', 'alpha', 'beta', 'delta', 'gamma', 'epsilon')


def _lie_g(values):
    return values['base'].fil0.codim


class MFOgAObject(Record):
    base = RecordField(OgusObject)
    a0 = Count()
    a1 = Count()
    b0 = Count()
    b1 = Count()
    alpha = Map(shape=lambda values, key: (values['a1'], values['a0']))
    beta = Map(shape=lambda values, key: (values['b1'], values['b0']))
    delta = Map(shape=lambda values, key: (_lie_g(values), values['b1']))
    gamma = Map(shape=lambda values, key: (values['base'].t_dr, values['a0']))
    epsilon = Map(shape=lambda values, key: (values['b0'], values['a0']))

    def to_json(self):
        nested = super().to_json()
        flat = nested.pop('base')
        flat.update(nested)
        return flat

    @classmethod
    def from_json(cls, doc):
        if not isinstance(doc, dict):
            raise MalformedInputError("MFOgAObject must be a JSON object, got {!r}".format(type(doc).__name__))
        base = {key: value for key, value in doc.items() if key not in _EXTRA_KEYS}
        nested = {key: value for key, value in doc.items() if key in _EXTRA_KEYS}
        nested['base'] = base
        return super().from_json(nested)

    @property
    def fil0(self):
        return self.base.fil0

    def projection(self):
        return self.base.lie_projection()

    def fil0_embedding(self):
        """
        Fil^0 -> A0: the inverse of gamma on ker(epsilon), followed by the inclusion.
        """
        kernel = self.epsilon.kernel()
        onto_fil0 = self.fil0.coordinate_map() @ self.gamma @ kernel.inclusion()
        return kernel.inclusion() @ onto_fil0.inverse()


def _structure_validation(obj, validation):
    if not is_level_le_1(obj.base):
        validation.error('level', "The base object is not of level <= 1")
    if not obj.delta.is_invertible():
        validation.error('delta-invertible', "delta: B1 -> T/Fil^0 is not invertible")
    pi = obj.projection()
    bottom = obj.delta @ obj.beta
    if pi @ obj.gamma != bottom @ obj.epsilon:
        validation.error('square-commutes', "pi∘gamma differs from delta∘beta∘epsilon")
        validation.error('cartesian', "The square does not commute, so it has no induced map to the pullback")
    else:
        corner = Pullback(pi, bottom)
        induced = corner.factor(obj.gamma, obj.epsilon)
        if not (corner.dim == obj.a0 and induced.is_invertible()):
            validation.error('cartesian', "A0 -> T x B0 is not an isomorphism (dim A0 = {}, pullback {})".format(
                obj.a0, corner.dim))
    kernel = obj.epsilon.kernel()
    if obj.gamma.image_of(kernel) != obj.fil0 or kernel.dim != obj.fil0.dim:
        validation.error('fil0-kernel', "gamma does not map ker(epsilon) isomorphically onto Fil^0")
    return validation


def validate_a(obj, seed=None, samples=None):
    """
    Check the base object and the cartesian square.
    """
    validation = Validation(obj)
    validation.add_messages(structures.validate(obj.base, seed=seed, samples=samples), prefix='base')
    return _structure_validation(obj, validation)


def _require_structure(obj, error=InvalidObjectError):
    validation = _structure_validation(obj, Validation(obj))
    if not validation.valid:
        raise error("Invalid MFOg^a object: {}".format(", ".join(validation.clauses)), validation=validation)
    return validation


def _identity(size):
    return RationalMatrix.identity(size)


class MFOgAMorphism(Record):
    source = RecordField(MFOgAObject)
    target = RecordField(MFOgAObject)
    eta = Matrix(shape=lambda values, key: (values['target'].base.t_dr, values['source'].base.t_dr))
    on_a0 = Matrix(shape=lambda values, key: (values['target'].a0, values['source'].a0))
    on_a1 = Matrix(shape=lambda values, key: (values['target'].a1, values['source'].a1))
    on_b0 = Matrix(shape=lambda values, key: (values['target'].b0, values['source'].b0))
    on_b1 = Matrix(shape=lambda values, key: (values['target'].b1, values['source'].b1))

    @property
    def base_morphism(self):
        return OgusMorphism(source=self.source.base, target=self.target.base, matrix=self.eta)

    def lie_component(self):
        """
        The map T/Fil^0 -> T'/Fil'^0 induced by eta.
        """
        return (self.target.projection() @ LinearMap(self.eta) @ self.source.fil0.quotient_section()).matrix


def identity_a(obj):
    return MFOgAMorphism(
        source=obj, target=obj, eta=_identity(obj.base.t_dr), on_a0=_identity(obj.a0), on_a1=_identity(obj.a1),
        on_b0=_identity(obj.b0), on_b1=_identity(obj.b1),
    )


def validate_morphism_a(morphism):
    validation = Validation(morphism)
    validation.add_messages(structures.validate_morphism(morphism.base_morphism), prefix='eta')
    if not validation.valid:
        return validation
    source, target = morphism.source, morphism.target
    checks = [
        ('alpha', target.alpha.matrix @ morphism.on_a0, morphism.on_a1 @ source.alpha.matrix),
        ('beta', target.beta.matrix @ morphism.on_b0, morphism.on_b1 @ source.beta.matrix),
        ('delta', target.delta.matrix @ morphism.on_b1, morphism.lie_component() @ source.delta.matrix),
        ('gamma', target.gamma.matrix @ morphism.on_a0, morphism.eta @ source.gamma.matrix),
        ('epsilon', target.epsilon.matrix @ morphism.on_a0, morphism.on_b0 @ source.epsilon.matrix),
    ]
    for clause, left, right in checks:
        if left != right:
            validation.error(clause, "The morphism does not intertwine {}".format(clause))
    return validation


def _require_valid_morphism(morphism):
    validation = validate_morphism_a(morphism)
    if not validation.valid:
        raise InvalidObjectError("Invalid MFOg^a morphism: {}".format(", ".join(validation.clauses)),
                                 validation=validation)


def hom_system_a(source, target):
    system = LinearSystem()
    system.unknown('eta', target.base.t_dr, source.base.t_dr)
    system.unknown('on_a0', target.a0, source.a0)
    system.unknown('on_a1', target.a1, source.a1)
    system.unknown('on_b0', target.b0, source.b0)
    system.unknown('on_b1', target.b1, source.b1)
    add_morphism_equations(system, 'eta', source.base, target.base)
    system.equation([
        (target.alpha.matrix, 'on_a0', _identity(source.a0)),
        (-_identity(target.a1), 'on_a1', source.alpha.matrix),
    ])
    system.equation([
        (target.beta.matrix, 'on_b0', _identity(source.b0)),
        (-_identity(target.b1), 'on_b1', source.beta.matrix),
    ])
    system.equation([
        (target.delta.matrix, 'on_b1', _identity(source.b1)),
        (-target.projection().matrix, 'eta', source.fil0.quotient_section().matrix @ source.delta.matrix),
    ])
    system.equation([
        (target.gamma.matrix, 'on_a0', _identity(source.a0)),
        (-_identity(target.base.t_dr), 'eta', source.gamma.matrix),
    ])
    system.equation([
        (target.epsilon.matrix, 'on_a0', _identity(source.a0)),
        (-_identity(target.b0), 'on_b0', source.epsilon.matrix),
    ])
    return system


def hom_a(source, target):
    """
    A basis of the morphisms source -> target.
    """
    return [MFOgAMorphism(source=source, target=target, **solution)
            for solution in hom_system_a(source, target).solutions()]


def hom_a_dimension(source, target):
    return hom_system_a(source, target).solution_space().dim


def embed_level1(obj):
    """
    (T, Fil) as (T, Fil, Fil^0 -> 0, 0 -> T/Fil^0).
    """
    if not is_level_le_1(obj):
        raise LevelError("Only objects of level <= 1 embed")
    fil0 = obj.fil0
    return MFOgAObject(
        base=obj,
        a0=fil0.dim,
        a1=0,
        b0=0,
        b1=fil0.codim,
        alpha=RationalMatrix.zeros(0, fil0.dim),
        beta=RationalMatrix.zeros(fil0.codim, 0),
        delta=_identity(fil0.codim),
        gamma=fil0.inclusion(),
        epsilon=RationalMatrix.zeros(0, fil0.dim),
    )


def embed_morphism(morphism):
    source, target = embed_level1(morphism.source), embed_level1(morphism.target)
    eta = LinearMap(morphism.matrix)
    return MFOgAMorphism(
        source=source,
        target=target,
        eta=morphism.matrix,
        on_a0=eta.restrict(source.fil0, target.fil0).matrix,
        on_a1=RationalMatrix.zeros(0, 0),
        on_b0=RationalMatrix.zeros(0, 0),
        on_b1=(target.projection() @ eta @ source.fil0.quotient_section()).matrix,
    )


def forget_to_base(obj):
    return obj.base


def t_a(motive):
    """
    The realization of a motive: A0 = U(M), A1 = V, B0 = Lie F, B1 = Lie G.
    """
    require_valid_motive(motive)
    obj = MFOgAObject(
        base=motive.etale,
        a0=motive.u_m,
        a1=motive.v,
        b0=motive.lie_f,
        b1=motive.lie_g,
        alpha=motive.alpha,
        beta=motive.du_times,
        delta=_identity(motive.lie_g),
        gamma=motive.gamma,
        epsilon=motive.q,
    )
    _require_structure(obj)
    return obj


class SharpRealization:
    """
    S(o) = (T pushed out along Fil^0 -> A0) + A1, with its legs from T, A0 and A1.
    """

    def __init__(self, obj):
        self.obj = obj
        self.pushout = Pushout(obj.fil0.inclusion(), obj.fil0_embedding())
        self.dim = self.pushout.dim + obj.a1
        self.from_t = LinearMap(RationalMatrix.vstack(
            self.pushout.first.matrix, RationalMatrix.zeros(obj.a1, obj.base.t_dr),
        ))
        self.from_a0 = LinearMap(RationalMatrix.vstack(
            self.pushout.second.matrix, RationalMatrix.zeros(obj.a1, obj.a0),
        ))
        self.from_a1 = LinearMap(RationalMatrix.vstack(
            RationalMatrix.zeros(self.pushout.dim, obj.a1), _identity(obj.a1),
        ))

    @property
    def summary(self):
        obj = self.obj
        return "dim = T + LieF + V = {} + {} + {} = {}".format(
            obj.base.t_dr, obj.a0 - obj.fil0.dim, obj.a1, self.dim,
        )

    def to_json(self):
        return {
            "dim": self.dim,
            "pushout_dim": self.pushout.dim,
            "summary": self.summary,
            "from_t": self.from_t.to_json(),
            "from_a0": self.from_a0.to_json(),
            "from_a1": self.from_a1.to_json(),
        }


def sharp_s(obj):
    _require_structure(obj)
    return SharpRealization(obj)


def _componentwise(morphism, factory):
    _require_valid_morphism(morphism)
    obj = factory()
    validation = _structure_validation(obj, Validation(obj))
    if not validation.valid:
        log.info('Componentwise construction breaks %s', validation.clauses)
        raise NotCartesianError("Componentwise construction is not an MFOg^a object: {}".format(
            ", ".join(validation.clauses)), validation=validation)
    return obj, validation


def kernel_a(morphism):
    """
    The componentwise kernel and its inclusion; :class:`NotCartesianError` when the square breaks.
    """
    source = morphism.source
    base = structures.kernel(morphism.base_morphism)
    kernels = {name: LinearMap(getattr(morphism, 'on_' + name)).kernel() for name in ('a0', 'a1', 'b0', 'b1')}
    eta_kernel = morphism.base_morphism.linear_map.kernel()

    def build():
        lie = base.obj.fil0.quotient_section()
        to_lie = source.projection() @ LinearMap(base.morphism.matrix) @ lie
        image = to_lie.image()
        delta = source.delta @ kernels['b1'].inclusion()
        if not delta.image() <= image:
            raise NotCartesianError("delta does not descend to the kernel")
        onto = image.coordinate_map() @ to_lie
        return MFOgAObject(
            base=base.obj,
            a0=kernels['a0'].dim,
            a1=kernels['a1'].dim,
            b0=kernels['b0'].dim,
            b1=kernels['b1'].dim,
            alpha=source.alpha.restrict(kernels['a0'], kernels['a1']),
            beta=source.beta.restrict(kernels['b0'], kernels['b1']),
            delta=onto.inverse() @ image.coordinate_map() @ delta,
            gamma=source.gamma.restrict(kernels['a0'], eta_kernel),
            epsilon=source.epsilon.restrict(kernels['a0'], kernels['b0']),
        )

    obj, validation = _componentwise(morphism, build)
    inclusion = MFOgAMorphism(
        source=obj, target=source, eta=base.morphism.matrix,
        **{'on_' + name: space.inclusion().matrix for name, space in kernels.items()}
    )
    return structures.Construction(obj, inclusion, validation)


def cokernel_a(morphism):
    """
    The componentwise cokernel and its projection; :class:`NotCartesianError` when the square breaks.
    """
    target = morphism.target
    base = structures.cokernel(morphism.base_morphism)
    images = {name: LinearMap(getattr(morphism, 'on_' + name)).image() for name in ('a0', 'a1', 'b0', 'b1')}
    eta_image = morphism.base_morphism.linear_map.image()

    def build():
        to_lie = base.obj.lie_projection() @ LinearMap(base.morphism.matrix) @ target.fil0.quotient_section()
        delta = to_lie @ target.delta @ images['b1'].quotient_section()
        return MFOgAObject(
            base=base.obj,
            a0=images['a0'].codim,
            a1=images['a1'].codim,
            b0=images['b0'].codim,
            b1=images['b1'].codim,
            alpha=target.alpha.induced_on_quotients(images['a0'], images['a1']),
            beta=target.beta.induced_on_quotients(images['b0'], images['b1']),
            delta=delta,
            gamma=target.gamma.induced_on_quotients(images['a0'], eta_image),
            epsilon=target.epsilon.induced_on_quotients(images['a0'], images['b0']),
        )

    obj, validation = _componentwise(morphism, build)
    projection = MFOgAMorphism(
        source=target, target=obj, eta=base.morphism.matrix,
        **{'on_' + name: space.quotient_map().matrix for name, space in images.items()}
    )
    return structures.Construction(obj, projection, validation)
