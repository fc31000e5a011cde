"""
Linearized Laumon 1-motives and their devissage.

A motive is an étale Ogus object T of level <= 1 (with U = Fil^0 and
Lie G = T/Fil^0), a map du: Lie F -> Lie G, an exact row
0 -> Fil^0 -j-> U(M) -q-> Lie F -> 0, a map alpha: U(M) -> V and a map
gamma: U(M) -> T lifting du∘q and extending the inclusion of Fil^0.
"""
import logging

from ogus.diagrams import (
    DiagramObject, Edge, FibreProduct, FibreProductObject, LinearSystem, Selection, hom_dimension, map_shape,
)
from ogus.exceptions import InvalidObjectError, ShapeMismatchError, SplittingError
from ogus.fields import Count, Map, Matrix, Record, RecordField
from ogus.linalg import LinearMap, RationalMatrix
from ogus.structures import HomPresentation, OgusObject, add_morphism_equations, is_level_le_1, validate
from ogus.validation import Validation

log = logging.getLogger(__name__)


def _fil0_dim(values):
    return values['etale'].fil0.dim


def _lie_g_dim(values):
    return values['etale'].fil0.codim


class TimesMotiveData(Record):
    """
    (M_et, Lie F, du): the motive with its vector part forgotten.
    """
    etale = RecordField(OgusObject)
    lie_f = Count()
    du_times = Map(shape=lambda values, key: (_lie_g_dim(values), values['lie_f']))


class AlphaRow(Record):
    """
    The row data (V, U(M), j, q, alpha, gamma) attached to a times-motive.

    Shapes are only checked against the dimensions this record holds.
    """
    v = Count()
    u_m = Count()
    j = Matrix(shape=lambda values, key: (values['u_m'], None))
    q = Matrix(shape=lambda values, key: (None, values['u_m']))
    alpha = Matrix(shape=lambda values, key: (values['v'], values['u_m']))
    gamma = Matrix(shape=lambda values, key: (None, values['u_m']), default=None)


class LinearizedLaumonMotive(Record):
    etale = RecordField(OgusObject)
    lie_f = Count(help="Dimension of Lie F")
    du_times = Map(shape=lambda values, key: (_lie_g_dim(values), values['lie_f']))
    v = Count(help="Dimension of the vector part V")
    u_m = Count(help="Dimension of U(M)")
    j = Map(shape=lambda values, key: (values['u_m'], _fil0_dim(values)))
    q = Map(shape=lambda values, key: (values['lie_f'], values['u_m']))
    alpha = Map(shape=lambda values, key: (values['v'], values['u_m']))
    gamma = Map(shape=lambda values, key: (values['etale'].t_dr, values['u_m']), default=None)

    @property
    def fil0(self):
        return self.etale.fil0

    @property
    def lie_g(self):
        return self.fil0.codim

    def projection(self):
        """
        pi: T -> Lie G = T/Fil^0.
        """
        return self.etale.lie_projection()

    def with_gamma(self, gamma):
        return self.replace(gamma=gamma)

    @classmethod
    def zero(cls):
        return cls(etale=OgusObject.zero(), lie_f=0, du_times=[], v=0, u_m=0, j=[], q=[], alpha=[], gamma=[])


def _row_validation(motive, validation):
    j, q = motive.j, motive.q
    fil0_dim = motive.fil0.dim
    if motive.u_m != fil0_dim + motive.lie_f:
        validation.error('row-exact', "dim U(M) = {} but dim Fil^0 + dim Lie F = {}".format(
            motive.u_m, fil0_dim + motive.lie_f))
    if not j.is_injective():
        validation.error('row-exact', "j is not injective")
    if not q.is_surjective():
        validation.error('row-exact', "q is not surjective")
    if not (q @ j).is_zero():
        validation.error('row-exact', "q∘j is not zero")


def validate_motive(motive, seed=None, samples=None):
    """
    Check the étale part and every row and gamma invariant of a motive.
    """
    validation = Validation(motive)
    if not is_level_le_1(motive.etale):
        validation.error('level', "The étale part is not of level <= 1")
    validation.add_messages(validate(motive.etale, seed=seed, samples=samples), prefix='etale')
    _row_validation(motive, validation)
    gamma = motive.gamma
    if gamma is None:
        validation.error('gamma-lift', "gamma is missing")
        return validation
    if motive.projection() @ gamma != motive.du_times @ motive.q:
        validation.error('gamma-lift', "pi∘gamma differs from du∘q")
    if gamma @ motive.j != motive.fil0.inclusion():
        validation.error('gamma-on-fil0', "gamma∘j is not the inclusion of Fil^0")
    return validation


def require_valid_motive(motive):
    validation = validate_motive(motive)
    if not validation.valid:
        raise InvalidObjectError("Invalid motive: {}".format(", ".join(validation.clauses)), validation=validation)
    return motive


def _left_inverse(injective):
    """
    A left inverse of an injective map, defined on its image.
    """
    image = injective.image()
    onto_image = image.coordinate_map() @ injective
    return onto_image.inverse() @ image.coordinate_map()


def build_gamma(motive, sigma, lift):
    """
    gamma = incl∘j^-1∘(1 - sigma∘q) + lift∘q for a section sigma of q and a lift of du through pi.
    """
    validation = Validation(motive)
    _row_validation(motive, validation)
    if not validation.valid:
        raise InvalidObjectError("The row of the motive is not exact", validation=validation)
    sigma = sigma if isinstance(sigma, LinearMap) else LinearMap(sigma, motive.lie_f, motive.u_m)
    lift = lift if isinstance(lift, LinearMap) else LinearMap(lift, motive.lie_f, motive.etale.t_dr)
    if (sigma.domain_dim, sigma.codomain_dim) != (motive.lie_f, motive.u_m):
        raise ShapeMismatchError("sigma", (motive.u_m, motive.lie_f), sigma.matrix.shape)
    if (lift.domain_dim, lift.codomain_dim) != (motive.lie_f, motive.etale.t_dr):
        raise ShapeMismatchError("lift", (motive.etale.t_dr, motive.lie_f), lift.matrix.shape)
    if motive.q @ sigma != LinearMap.identity(motive.lie_f):
        raise SplittingError("sigma is not a section of q")
    if motive.projection() @ lift != motive.du_times:
        raise SplittingError("The lift does not lift du through T -> T/Fil^0")
    complement = LinearMap.identity(motive.u_m) - sigma @ motive.q
    return motive.fil0.inclusion() @ _left_inverse(motive.j) @ complement + lift @ motive.q


def assemble(times, row):
    return LinearizedLaumonMotive(
        etale=times.etale,
        lie_f=times.lie_f,
        du_times=times.du_times,
        v=row.v,
        u_m=row.u_m,
        j=row.j,
        q=row.q,
        alpha=row.alpha,
        gamma=row.gamma,
    )


def disassemble(motive):
    times = TimesMotiveData(etale=motive.etale, lie_f=motive.lie_f, du_times=motive.du_times)
    row = AlphaRow(
        v=motive.v,
        u_m=motive.u_m,
        j=motive.j.matrix,
        q=motive.q.matrix,
        alpha=motive.alpha.matrix,
        gamma=None if motive.gamma is None else motive.gamma.matrix,
    )
    return times, row


class MotiveMorphism(Record):
    """
    (eta; a, v; b, c) between two motives.
    """
    source = RecordField(LinearizedLaumonMotive)
    target = RecordField(LinearizedLaumonMotive)
    eta = Matrix(shape=lambda values, key: (values['target'].etale.t_dr, values['source'].etale.t_dr))
    a = Matrix(shape=lambda values, key: (values['target'].u_m, values['source'].u_m))
    v = Matrix(shape=lambda values, key: (values['target'].v, values['source'].v))
    b = Matrix(shape=lambda values, key: (values['target'].lie_f, values['source'].lie_f))
    c = Matrix(shape=lambda values, key: (values['target'].lie_g, values['source'].lie_g))


UNKNOWNS = ('eta', 'a', 'v', 'b', 'c')


def _identity(size):
    return RationalMatrix.identity(size)


def motive_system(source, target):
    """
    The linear system whose solutions are the morphisms source -> target.
    """
    for motive in (source, target):
        require_valid_motive(motive)
    system = LinearSystem()
    system.unknown('eta', target.etale.t_dr, source.etale.t_dr)
    system.unknown('a', target.u_m, source.u_m)
    system.unknown('v', target.v, source.v)
    system.unknown('b', target.lie_f, source.lie_f)
    system.unknown('c', target.lie_g, source.lie_g)
    add_morphism_equations(system, 'eta', source.etale, target.etale)
    pi, pi_target = source.projection().matrix, target.projection().matrix
    system.equation([
        (_identity(target.lie_g), 'c', pi),
        (-pi_target, 'eta', _identity(source.etale.t_dr)),
    ])
    system.equation([
        (_identity(target.lie_g), 'c', source.du_times.matrix),
        (-target.du_times.matrix, 'b', _identity(source.lie_f)),
    ])
    system.equation([
        (target.q.matrix, 'a', _identity(source.u_m)),
        (-_identity(target.lie_f), 'b', source.q.matrix),
    ])
    system.equation([
        (_identity(target.u_m), 'a', source.j.matrix),
        (-(target.j.matrix @ target.fil0.coordinate_map().matrix), 'eta', source.fil0.inclusion().matrix),
    ])
    system.equation([
        (_identity(target.v), 'v', source.alpha.matrix),
        (-target.alpha.matrix, 'a', _identity(source.u_m)),
    ])
    system.equation([
        (target.gamma.matrix, 'a', _identity(source.u_m)),
        (-_identity(target.etale.t_dr), 'eta', source.gamma.matrix),
    ])
    return system


def hom_motives(source, target):
    """
    A basis of the morphisms source -> target.
    """
    return [MotiveMorphism(source=source, target=target, **solution)
            for solution in motive_system(source, target).solutions()]


def hom_motives_dimension(source, target):
    return motive_system(source, target).solution_space().dim


def forgetting_rank(source, target):
    """
    Dimension of the Hom space and the ranks of forgetting a, and of forgetting a and v.
    """
    system = motive_system(source, target)
    solutions = system.solution_space().vectors
    ranks = {}
    for key, kept in (('forget_a', ('eta', 'v', 'b', 'c')), ('forget_a_v', ('eta', 'b', 'c'))):
        rows = []
        for vector in solutions:
            values = system.unpack(vector)
            rows.append(tuple(entry for name in kept for entry in values[name].flatten()))
        width = sum(system.shape_of(name)[0] * system.shape_of(name)[1] for name in kept)
        ranks[key] = RationalMatrix(rows, width).rank() if rows else 0
    ranks['dim'] = len(solutions)
    return ranks


class MotivePresentation:
    """
    The iterated fibre product presenting motives as diagrams.

    The étale shape (T with Frobenius loops and filtration slots, Fil0 -incl-> T
    -pi-> LieG) is glued to Map at LieG = du.1, extended by U(M) with edges j, q
    and gamma, and glued to Map again at U = alpha.0.
    """

    def __init__(self, *motives):
        self.etale_presentation = HomPresentation(*(motive.etale for motive in motives))
        self.etale_shape = self.etale_presentation.shape.extend(
            vertices=['Fil0', 'LieG'],
            edges=[Edge(label='incl', source='Fil0', target='T'), Edge(label='pi', source='T', target='LieG')],
        )
        self.inner = FibreProduct(
            self.etale_shape, map_shape(), Selection(vertex='LieG'), Selection(vertex='1'),
            prefixes=('et', 'du'), theta='theta:du',
        )
        self.extended_shape = self.inner.shape.extend(
            vertices=['U'],
            edges=[
                Edge(label='j', source='et.Fil0', target='U'),
                Edge(label='q', source='U', target='du.0'),
                Edge(label='gamma', source='U', target='et.T'),
            ],
        )
        self.outer = FibreProduct(
            self.extended_shape, map_shape(), Selection(vertex='U'), Selection(vertex='0'),
            prefixes=('m', 'alpha'), theta='theta:alpha',
        )

    @property
    def shape(self):
        return self.outer.shape

    def etale_diagram(self, motive):
        base = self.etale_presentation.diagram(motive.etale)
        spaces = dict(base.spaces, Fil0=motive.fil0.dim, LieG=motive.lie_g)
        maps = dict(base.maps, incl=motive.fil0.inclusion(), pi=motive.projection())
        return DiagramObject(shape=self.etale_shape, spaces=spaces, maps=maps, slots=base.slots)

    def chain(self, motive):
        """
        The two fibre-product objects, innermost first.
        """
        du = DiagramObject(shape=map_shape(), spaces={'0': motive.lie_f, '1': motive.lie_g},
                           maps={'f': motive.du_times})
        inner = FibreProductObject(x=self.etale_diagram(motive), y=du, theta=_identity(motive.lie_g))
        glued = self.inner.combine(inner)
        extended = DiagramObject(
            shape=self.extended_shape,
            spaces=dict(glued.spaces, U=motive.u_m),
            maps=dict(glued.maps, j=motive.j, q=motive.q, gamma=motive.gamma),
            slots=glued.slots,
        )
        alpha = DiagramObject(shape=map_shape(), spaces={'0': motive.u_m, '1': motive.v},
                              maps={'f': motive.alpha})
        outer = FibreProductObject(x=extended, y=alpha, theta=_identity(motive.u_m))
        return inner, outer

    def diagram(self, motive):
        _, outer = self.chain(motive)
        return self.outer.combine(outer)


def fibre_presentation(motive):
    """
    The motive as a diagram object of the iterated fibre-product shape.
    """
    require_valid_motive(motive)
    return MotivePresentation(motive).diagram(motive)


def presentation_hom_dimension(source, target):
    """
    dim Hom computed in the fibre-product presentation.
    """
    for motive in (source, target):
        require_valid_motive(motive)
    presentation = MotivePresentation(source, target)
    log.debug('presentation shape has %d vertices', len(presentation.shape.vertices))
    return hom_dimension(presentation.diagram(source), presentation.diagram(target))
