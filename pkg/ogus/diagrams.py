"""
Finite-dimensional linear diagram categories.

A :class:`DiagramShape` is a quiver whose edges may be flagged invertible,
with distinguished subspaces ("slots") at vertices and optional commutativity
relations. Objects put a space at each vertex and a matrix on each edge;
morphisms are vertexwise matrices making every square commute and preserving
every slot. Hom spaces, kernels and cokernels are computed for any shape;
Ext^1 by cocycles for shapes without relations or slots; fibre products of
two shapes along vertex-selection functors are shapes again.

Paths in relations list edge labels in the order they are traversed.
"""
import logging
from collections import namedtuple
from fractions import Fraction

from ogus.exceptions import (
    ExtensionError,
    InvalidMorphismError,
    InvalidObjectError,
    MalformedInputError,
    SelectionError,
    ShapeMismatchError,
    UnsupportedShapeError,
)
from ogus.fields import (
    AmbientField, Boolean, Choice, Count, ListField, Map, MappingField, Matrix, Record, RecordField, String,
)
from ogus.linalg import LinearMap, RationalMatrix, Subspace

log = logging.getLogger(__name__)


class Edge(Record):
    label = String()
    source = String()
    target = String()
    invertible = Boolean(default=False)


class Slot(Record):
    label = String()
    vertex = String()


class Relation(Record):
    left = ListField(String())
    right = ListField(String())


class DiagramShape(Record):
    """
    Vertices, edges, slots and relations of a diagram category.
    """
    vertices = ListField(String(), sort_key=str)
    edges = ListField(RecordField(Edge), sort_key=lambda edge: edge.label, default=())
    slots = ListField(RecordField(Slot), sort_key=lambda slot: slot.label, default=())
    relations = ListField(RecordField(Relation), default=())

    def check(self):
        vertices = set(self.vertices)
        if len(vertices) != len(self.vertices):
            raise MalformedInputError("Repeated vertex label in {}".format(list(self.vertices)))
        labels = [edge.label for edge in self.edges]
        if len(set(labels)) != len(labels):
            raise MalformedInputError("Repeated edge label in {}".format(labels))
        for edge in self.edges:
            for end in (edge.source, edge.target):
                if end not in vertices:
                    raise MalformedInputError("Edge {} uses unknown vertex {!r}".format(edge.label, end))
        slot_labels = [slot.label for slot in self.slots]
        if len(set(slot_labels)) != len(slot_labels):
            raise MalformedInputError("Repeated slot label in {}".format(slot_labels))
        for slot in self.slots:
            if slot.vertex not in vertices:
                raise MalformedInputError("Slot {} sits at unknown vertex {!r}".format(slot.label, slot.vertex))
        for relation in self.relations:
            if self.path_ends(relation.left) != self.path_ends(relation.right):
                raise MalformedInputError("Relation paths {} and {} do not share endpoints".format(
                    list(relation.left), list(relation.right),
                ))

    def edge(self, label):
        for edge in self.edges:
            if edge.label == label:
                return edge
        raise MalformedInputError("Unknown edge {!r}".format(label))

    def slot(self, label):
        for slot in self.slots:
            if slot.label == label:
                return slot
        raise MalformedInputError("Unknown slot {!r}".format(label))

    def slots_at(self, vertex):
        return tuple(slot for slot in self.slots if slot.vertex == vertex)

    def path_ends(self, path):
        if not path:
            raise MalformedInputError("Relation paths must be nonempty")
        edges = [self.edge(label) for label in path]
        for first, second in zip(edges, edges[1:]):
            if first.target != second.source:
                raise MalformedInputError("Edges {} and {} do not compose".format(first.label, second.label))
        return edges[0].source, edges[-1].target

    @property
    def edge_labels(self):
        return tuple(edge.label for edge in self.edges)

    @property
    def slot_labels(self):
        return tuple(slot.label for slot in self.slots)

    def is_relation_free(self):
        return not self.relations

    def extend(self, vertices=(), edges=(), slots=(), relations=()):
        """
        This shape with more vertices, edges, slots and relations.
        """
        return DiagramShape(
            vertices=tuple(self.vertices) + tuple(vertices),
            edges=tuple(self.edges) + tuple(edges),
            slots=tuple(self.slots) + tuple(slots),
            relations=tuple(self.relations) + tuple(relations),
        )


def mod_shape(vertex='0'):
    """
    One vertex, no edges: the category of vector spaces.
    """
    return DiagramShape(vertices=[vertex])


def map_shape():
    """
    Two vertices and one edge f: 0 -> 1: the category of linear maps.
    """
    return DiagramShape(vertices=['0', '1'], edges=[Edge(label='f', source='0', target='1')])


def _edge_shape(values, key):
    edge = values['shape'].edge(key)
    return values['spaces'][edge.target], values['spaces'][edge.source]


def _slot_ambient(values, key):
    return values['spaces'][values['shape'].slot(key).vertex]


class DiagramObject(Record):
    """
    A representation of a diagram shape: spaces at vertices, maps on edges, subspaces in slots.

    Omitted maps are zero and omitted slots are the zero subspace.
    """
    shape = RecordField(DiagramShape)
    spaces = MappingField(Count(), keys=lambda values: values['shape'].vertices)
    maps = MappingField(
        Map(shape=_edge_shape),
        keys=lambda values: values['shape'].edge_labels,
        fill=lambda values, key: RationalMatrix.zeros(*_edge_shape(values, key)),
        default={},
    )
    slots = MappingField(
        AmbientField(Subspace, ambient=_slot_ambient),
        keys=lambda values: values['shape'].slot_labels,
        fill=lambda values, key: Subspace.zero(_slot_ambient(values, key)),
        default={},
    )

    def check(self):
        for edge in self.shape.edges:
            if edge.invertible and not self.maps[edge.label].is_invertible():
                raise InvalidObjectError("Edge {} is flagged invertible but its map is not".format(edge.label))
        for relation in self.shape.relations:
            if self.path_map(relation.left) != self.path_map(relation.right):
                raise InvalidObjectError("Relation {} = {} does not hold".format(
                    list(relation.left), list(relation.right),
                ))

    @classmethod
    def zero(cls, shape):
        return cls(shape=shape, spaces={vertex: 0 for vertex in shape.vertices})

    def dim(self, vertex):
        return self.spaces[vertex]

    @property
    def total_dim(self):
        return sum(self.spaces.values())

    def map(self, label):
        return self.maps[label]

    def slot(self, label):
        return self.slots[label]

    def path_map(self, path):
        composite = None
        for label in path:
            step = self.maps[label]
            composite = step if composite is None else step @ composite
        return composite


def _component_shape(values, key):
    return values['target'].dim(key), values['source'].dim(key)


class DiagramMorphism(Record):
    """
    Vertexwise matrices between two objects of the same shape.
    """
    source = RecordField(DiagramObject)
    target = RecordField(DiagramObject)
    components = MappingField(
        Matrix(shape=_component_shape),
        keys=lambda values: values['source'].shape.vertices,
        fill=lambda values, key: RationalMatrix.zeros(*_component_shape(values, key)),
        default={},
    )

    def check(self):
        if self.source.shape != self.target.shape:
            raise MalformedInputError("Morphism endpoints have different shapes")
        shape = self.source.shape
        for edge in shape.edges:
            left = self.target.map(edge.label).matrix @ self.components[edge.source]
            right = self.components[edge.target] @ self.source.map(edge.label).matrix
            if left != right:
                raise InvalidMorphismError("Square at edge {} does not commute".format(edge.label), clause=edge.label)
        for slot in shape.slots:
            component = LinearMap(self.components[slot.vertex])
            if not component.maps_into(self.source.slot(slot.label), self.target.slot(slot.label)):
                raise InvalidMorphismError("Slot {} is not preserved".format(slot.label), clause=slot.label)

    @classmethod
    def identity(cls, obj):
        return cls(source=obj, target=obj, components={
            vertex: RationalMatrix.identity(obj.dim(vertex)) for vertex in obj.shape.vertices
        })

    @classmethod
    def zero(cls, source, target):
        return cls(source=source, target=target)

    @property
    def shape(self):
        return self.source.shape

    def component(self, vertex):
        return LinearMap(self.components[vertex])

    def compose(self, other):
        """
        self after other.
        """
        return DiagramMorphism(source=other.source, target=self.target, components={
            vertex: self.components[vertex] @ other.components[vertex] for vertex in self.shape.vertices
        })

    def __add__(self, other):
        return DiagramMorphism(source=self.source, target=self.target, components={
            vertex: self.components[vertex] + other.components[vertex] for vertex in self.shape.vertices
        })

    def scale(self, scalar):
        return DiagramMorphism(source=self.source, target=self.target, components={
            vertex: matrix.scale(scalar) for vertex, matrix in self.components.items()
        })

    def is_zero(self):
        return all(matrix.is_zero() for matrix in self.components.values())

    def flatten(self):
        return tuple(entry for vertex in self.shape.vertices for entry in self.components[vertex].flatten())


class LinearSystem:
    """
    Homogeneous linear equations in named matrix unknowns.

    Each equation is a sum of terms ``L @ X @ R`` over unknown blocks ``X``.
    Unknowns are vectorized row-major and concatenated in declaration order,
    so vec(L X R) = (L kron R^T) vec(X) gives the coefficient blocks.
    """

    def __init__(self):
        self._unknowns = {}
        self._size = 0
        self._equations = []

    @property
    def size(self):
        return self._size

    def unknown(self, name, rows, cols):
        if name in self._unknowns:
            raise ValueError("Unknown {!r} declared twice".format(name))
        self._unknowns[name] = (rows, cols, self._size)
        self._size += rows * cols

    def shape_of(self, name):
        rows, cols, _ = self._unknowns[name]
        return rows, cols

    def equation(self, terms):
        """
        Require ``sum(L @ X[name] @ R for L, name, R in terms) == 0``.
        """
        shape = None
        checked = []
        for left, name, right in terms:
            rows, cols, _ = self._unknowns[name]
            if left.ncols != rows or right.nrows != cols:
                raise ShapeMismatchError("term in {}".format(name), (rows, cols), (left.ncols, right.nrows))
            output = (left.nrows, right.ncols)
            if shape is not None and output != shape:
                raise ShapeMismatchError("equation terms", shape, output)
            shape = output
            checked.append((left, name, right))
        if shape is not None and shape[0] * shape[1]:
            self._equations.append((shape, checked))

    def coefficient_matrix(self):
        rows = []
        for (nrows, ncols), terms in self._equations:
            block = [[Fraction(0)] * self._size for _ in range(nrows * ncols)]
            for left, name, right in terms:
                _, _, offset = self._unknowns[name]
                coefficients = left.kron(right.T)
                for i, coefficient_row in enumerate(coefficients.rows):
                    target = block[i]
                    for j, value in enumerate(coefficient_row):
                        if value:
                            target[offset + j] += value
            rows.extend(block)
        return RationalMatrix(rows, self._size) if rows else RationalMatrix.zeros(0, self._size)

    def solution_space(self):
        return LinearMap(self.coefficient_matrix()).kernel()

    def unpack(self, vector):
        values = {}
        for name, (rows, cols, offset) in self._unknowns.items():
            values[name] = RationalMatrix.from_flat(vector[offset:offset + rows * cols], rows, cols)
        return values

    def pack(self, values):
        vector = []
        for name, (rows, cols, _) in self._unknowns.items():
            matrix = values.get(name, RationalMatrix.zeros(rows, cols))
            vector.extend(matrix.flatten())
        return tuple(vector)

    def solutions(self):
        """
        A basis of the solution space, each solution as a dict of matrices.
        """
        return [self.unpack(vector) for vector in self.solution_space().vectors]


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise ShapeMismatchError("diagram shape", a.shape.vertices, b.shape.vertices)


def _identity(size):
    return RationalMatrix.identity(size)


def _add_edge_equation(system, a, b, edge):
    system.equation([
        (b.map(edge.label).matrix, edge.source, _identity(a.dim(edge.source))),
        (-_identity(b.dim(edge.target)), edge.target, a.map(edge.label).matrix),
    ])


def hom_system(a, b):
    """
    The linear system whose solutions are the morphisms a -> b.
    """
    _check_same_shape(a, b)
    system = LinearSystem()
    for vertex in a.shape.vertices:
        system.unknown(vertex, b.dim(vertex), a.dim(vertex))
    for edge in a.shape.edges:
        _add_edge_equation(system, a, b, edge)
    for slot in a.shape.slots:
        system.equation([(
            b.slot(slot.label).quotient_map().matrix, slot.vertex, a.slot(slot.label).inclusion().matrix,
        )])
    return system


def hom_basis(a, b):
    """
    A basis of Hom(a, b).
    """
    return [DiagramMorphism(source=a, target=b, components=solution) for solution in hom_system(a, b).solutions()]


def hom_dimension(a, b):
    return hom_system(a, b).solution_space().dim


def direct_sum(a, b):
    """
    The vertexwise direct sum a + b.
    """
    _check_same_shape(a, b)
    slots = {}
    for slot in a.shape.slots:
        left, right = a.slot(slot.label), b.slot(slot.label)
        width = right.ambient_dim
        vectors = [tuple(v) + (0,) * width for v in left.vectors]
        vectors += [(0,) * left.ambient_dim + tuple(v) for v in right.vectors]
        slots[slot.label] = Subspace(left.ambient_dim + width, vectors)
    return DiagramObject(
        shape=a.shape,
        spaces={vertex: a.dim(vertex) + b.dim(vertex) for vertex in a.shape.vertices},
        maps={edge.label: RationalMatrix.block_diagonal(a.map(edge.label).matrix, b.map(edge.label).matrix)
              for edge in a.shape.edges},
        slots=slots,
    )


def kernel_object(morphism):
    """
    The kernel of a morphism and its inclusion into the source.
    """
    source = morphism.source
    kernels = {vertex: morphism.component(vertex).kernel() for vertex in source.shape.vertices}
    obj = DiagramObject(
        shape=source.shape,
        spaces={vertex: space.dim for vertex, space in kernels.items()},
        maps={edge.label: source.map(edge.label).restrict(kernels[edge.source], kernels[edge.target])
              for edge in source.shape.edges},
        slots={slot.label: kernels[slot.vertex].coordinate_map().image_of(
            source.slot(slot.label) & kernels[slot.vertex]) for slot in source.shape.slots},
    )
    inclusion = DiagramMorphism(source=obj, target=source, components={
        vertex: space.inclusion().matrix for vertex, space in kernels.items()
    })
    return obj, inclusion


def cokernel_object(morphism):
    """
    The cokernel of a morphism and the projection from the target.
    """
    target = morphism.target
    images = {vertex: morphism.component(vertex).image() for vertex in target.shape.vertices}
    obj = DiagramObject(
        shape=target.shape,
        spaces={vertex: space.codim for vertex, space in images.items()},
        maps={edge.label: target.map(edge.label).induced_on_quotients(images[edge.source], images[edge.target])
              for edge in target.shape.edges},
        slots={slot.label: images[slot.vertex].quotient_map().image_of(target.slot(slot.label))
               for slot in target.shape.slots},
    )
    projection = DiagramMorphism(source=target, target=obj, components={
        vertex: space.quotient_map().matrix for vertex, space in images.items()
    })
    return obj, projection


def kernel_factor(morphism, test):
    """
    The unique u with inclusion∘u = test, for a test morphism killed by `morphism`.
    """
    obj, _ = kernel_object(morphism)
    if not morphism.compose(test).is_zero():
        raise InvalidMorphismError("Test morphism is not killed by the morphism")
    return DiagramMorphism(source=test.source, target=obj, components={
        vertex: morphism.component(vertex).kernel().coordinate_map().matrix @ test.components[vertex]
        for vertex in obj.shape.vertices
    })


def cokernel_factor(morphism, test):
    """
    The unique u with u∘projection = test, for a test morphism killing `morphism`.
    """
    obj, _ = cokernel_object(morphism)
    if not test.compose(morphism).is_zero():
        raise InvalidMorphismError("Test morphism does not kill the morphism")
    return DiagramMorphism(source=obj, target=test.target, components={
        vertex: test.components[vertex] @ morphism.component(vertex).image().quotient_section().matrix
        for vertex in obj.shape.vertices
    })


def _require_cocycle_shape(shape):
    if not shape.is_relation_free():
        raise UnsupportedShapeError("Ext^1 is only available for shapes without relations")
    if shape.slots:
        raise UnsupportedShapeError("Ext^1 is only available for shapes without slots")


def coboundary_system(a, b, vertices=None, edges=None):
    """
    The system of d: (u_v) -> (b_e u_src - u_tgt a_e), over chosen vertices and edges.

    Its coefficient matrix is d, rows ordered by edge and columns by vertex.
    """
    vertices = a.shape.vertices if vertices is None else vertices
    edges = a.shape.edges if edges is None else edges
    system = LinearSystem()
    for vertex in vertices:
        system.unknown(vertex, b.dim(vertex), a.dim(vertex))
    for edge in edges:
        _add_edge_equation(system, a, b, edge)
    return system


class Ext1:
    """
    Ext^1(a, b) as cocycles modulo coboundaries.

    A cocycle is a dict edge label -> matrix Hom(a_src, b_tgt); every edge,
    invertible or not, contributes a free component.
    """

    def __init__(self, a, b):
        _check_same_shape(a, b)
        _require_cocycle_shape(a.shape)
        self.a = a
        self.b = b
        self.layout = []
        offset = 0
        for edge in a.shape.edges:
            rows, cols = b.dim(edge.target), a.dim(edge.source)
            self.layout.append((edge.label, rows, cols, offset))
            offset += rows * cols
        self.cochain_dim = offset
        differential = coboundary_system(a, b).coefficient_matrix()
        self.coboundaries = Subspace(offset, differential.T)

    @property
    def dimension(self):
        return self.coboundaries.codim

    def to_vector(self, cocycle):
        vector = []
        for label, rows, cols, _ in self.layout:
            matrix = cocycle.get(label, RationalMatrix.zeros(rows, cols))
            if matrix.shape != (rows, cols):
                raise ShapeMismatchError("cocycle at {}".format(label), (rows, cols), matrix.shape)
            vector.extend(matrix.flatten())
        return tuple(vector)

    def from_vector(self, vector):
        return {label: RationalMatrix.from_flat(vector[offset:offset + rows * cols], rows, cols)
                for label, rows, cols, offset in self.layout}

    def representatives(self):
        """
        Cocycles whose classes form a basis of Ext^1.
        """
        section = self.coboundaries.quotient_section().matrix
        return [self.from_vector(column) for column in section.columns]

    def class_of(self, cocycle):
        return self.coboundaries.quotient_map()(self.to_vector(cocycle))

    def is_coboundary(self, cocycle):
        return self.to_vector(cocycle) in self.coboundaries

    def coboundary(self, components):
        """
        d(u) for vertexwise matrices u: a_v -> b_v.
        """
        return {label: self.b.map(label).matrix @ components[self.a.shape.edge(label).source]
                - components[self.a.shape.edge(label).target] @ self.a.map(label).matrix
                for label, _, _, _ in self.layout}


def ext1_basis(a, b):
    return Ext1(a, b)


Extension = namedtuple('Extension', 'obj inclusion projection')


def realize_extension(a, b, cocycle):
    """
    The block-triangular extension 0 -> b -> E -> a -> 0 of a cocycle.
    """
    _check_same_shape(a, b)
    _require_cocycle_shape(a.shape)
    maps = {}
    for edge in a.shape.edges:
        correction = cocycle.get(edge.label, RationalMatrix.zeros(b.dim(edge.target), a.dim(edge.source)))
        top = RationalMatrix.hstack(b.map(edge.label).matrix, correction)
        bottom = RationalMatrix.hstack(
            RationalMatrix.zeros(a.dim(edge.target), b.dim(edge.source)), a.map(edge.label).matrix,
        )
        block = RationalMatrix.vstack(top, bottom)
        if edge.invertible and not block.is_invertible():
            raise ExtensionError("Extension breaks invertibility of edge {}".format(edge.label))
        maps[edge.label] = block
    obj = DiagramObject(
        shape=a.shape,
        spaces={vertex: b.dim(vertex) + a.dim(vertex) for vertex in a.shape.vertices},
        maps=maps,
    )
    inclusion = DiagramMorphism(source=b, target=obj, components={
        vertex: RationalMatrix.vstack(_identity(b.dim(vertex)), RationalMatrix.zeros(a.dim(vertex), b.dim(vertex)))
        for vertex in a.shape.vertices
    })
    projection = DiagramMorphism(source=obj, target=a, components={
        vertex: RationalMatrix.hstack(RationalMatrix.zeros(a.dim(vertex), b.dim(vertex)), _identity(a.dim(vertex)))
        for vertex in a.shape.vertices
    })
    return Extension(obj, inclusion, projection)


def pushforward_cocycle(cocycle, morphism):
    """
    The cocycle moved along b -> b'.
    """
    shape = morphism.shape
    return {label: morphism.components[shape.edge(label).target] @ matrix for label, matrix in cocycle.items()}


def pullback_cocycle(cocycle, morphism):
    """
    The cocycle moved along a' -> a.
    """
    shape = morphism.shape
    return {label: matrix @ morphism.components[shape.edge(label).source] for label, matrix in cocycle.items()}


def pushout_extension(extension, morphism):
    """
    The extension of a by b' obtained by pushing `extension` out along b -> b'.
    """
    middle, inclusion, projection = extension
    target = morphism.target
    total = direct_sum(middle, target)
    relations = DiagramMorphism(source=inclusion.source, target=total, components={
        vertex: RationalMatrix.vstack(inclusion.components[vertex], -morphism.components[vertex])
        for vertex in middle.shape.vertices
    })
    obj, quotient = cokernel_object(relations)
    new_inclusion = quotient.compose(DiagramMorphism(source=target, target=total, components={
        vertex: RationalMatrix.vstack(
            RationalMatrix.zeros(middle.dim(vertex), target.dim(vertex)), _identity(target.dim(vertex)),
        ) for vertex in middle.shape.vertices
    }))
    collapse = DiagramMorphism(source=total, target=projection.target, components={
        vertex: RationalMatrix.hstack(
            projection.components[vertex],
            RationalMatrix.zeros(projection.target.dim(vertex), target.dim(vertex)),
        ) for vertex in middle.shape.vertices
    })
    return Extension(obj, new_inclusion, cokernel_factor(relations, collapse))


def splits(projection):
    """
    True iff the epimorphism admits a section.
    """
    base = projection.target
    sections = hom_basis(base, projection.source)
    identity = DiagramMorphism.identity(base).flatten()
    images = [projection.compose(section).flatten() for section in sections]
    return identity in Subspace(len(identity), images) if identity else True


class Selection(Record):
    """
    A vertex-selection functor into the category of vector spaces.

    `part` is 'whole' for the space at the vertex, or 'sub' / 'quotient' for a
    slot at that vertex or the quotient by it.
    """
    vertex = String()
    slot = String(default=None)
    part = Choice(['whole', 'sub', 'quotient'], default='whole')

    def check(self):
        if (self.slot is None) != (self.part == 'whole'):
            raise MalformedInputError("A slot is required exactly for 'sub' and 'quotient' selections")

    def dimension(self, obj):
        if self.part == 'whole':
            return obj.dim(self.vertex)
        space = obj.slot(self.slot)
        return space.dim if self.part == 'sub' else space.codim


class FibreProductObject(Record):
    """
    Objects x of X and y of Y with an isomorphism theta: F(x) -> G(y).
    """
    x = RecordField(DiagramObject)
    y = RecordField(DiagramObject)
    theta = Matrix()

    def check(self):
        if not self.theta.is_invertible():
            raise InvalidObjectError("theta must be an invertible square matrix")


def _prefixed(prefix, label):
    return "{}.{}".format(prefix, label)


class FibreProduct:
    """
    The fibre product X x_Mod Y along two selection functors F and G.

    The combined shape holds both shapes with prefixed labels, an auxiliary
    vertex for every slot selection (reached by the slot inclusion or the
    quotient projection), and one invertible edge from F's vertex to G's.
    """

    def __init__(self, x_shape, y_shape, f_selection, g_selection, prefixes=('x', 'y'), theta='theta'):
        if prefixes[0] == prefixes[1]:
            raise SelectionError("The two prefixes must differ")
        self.x_shape = x_shape
        self.y_shape = y_shape
        self.f_selection = f_selection
        self.g_selection = g_selection
        self.prefixes = tuple(prefixes)
        self.theta = theta
        vertices, edges, slots, relations = [], [], [], []
        ends = []
        for prefix, shape, selection in zip(self.prefixes, (x_shape, y_shape), (f_selection, g_selection)):
            self._check_selection(shape, selection)
            vertices.extend(_prefixed(prefix, vertex) for vertex in shape.vertices)
            edges.extend(Edge(
                label=_prefixed(prefix, edge.label),
                source=_prefixed(prefix, edge.source),
                target=_prefixed(prefix, edge.target),
                invertible=edge.invertible,
            ) for edge in shape.edges)
            slots.extend(Slot(label=_prefixed(prefix, slot.label), vertex=_prefixed(prefix, slot.vertex))
                         for slot in shape.slots)
            relations.extend(Relation(
                left=[_prefixed(prefix, label) for label in relation.left],
                right=[_prefixed(prefix, label) for label in relation.right],
            ) for relation in shape.relations)
            end = _prefixed(prefix, selection.vertex)
            if selection.part != 'whole':
                auxiliary = self._auxiliary_vertex(prefix, selection)
                vertices.append(auxiliary)
                if selection.part == 'sub':
                    edges.append(Edge(label=self._auxiliary_edge(prefix, selection), source=auxiliary, target=end))
                else:
                    edges.append(Edge(label=self._auxiliary_edge(prefix, selection), source=end, target=auxiliary))
                end = auxiliary
            ends.append(end)
        edges.append(Edge(label=theta, source=ends[0], target=ends[1], invertible=True))
        self.ends = tuple(ends)
        self.shape = DiagramShape(vertices=vertices, edges=edges, slots=slots, relations=relations)

    @staticmethod
    def _check_selection(shape, selection):
        if selection.vertex not in shape.vertices:
            raise SelectionError("Selected vertex {!r} is not in the shape".format(selection.vertex))
        if selection.slot is not None and selection.slot not in shape.slot_labels:
            raise SelectionError("Selected slot {!r} is not in the shape".format(selection.slot))
        if selection.slot is not None and shape.slot(selection.slot).vertex != selection.vertex:
            raise SelectionError("Slot {!r} does not sit at vertex {!r}".format(selection.slot, selection.vertex))

    @staticmethod
    def _auxiliary_vertex(prefix, selection):
        marker = '' if selection.part == 'sub' else '/'
        return "{}.{}/{}{}".format(prefix, selection.vertex, marker, selection.slot)

    @staticmethod
    def _auxiliary_edge(prefix, selection):
        kind = 'incl' if selection.part == 'sub' else 'proj'
        return "{}.{}:{}".format(prefix, kind, selection.slot)

    def _side(self, index):
        return (self.prefixes[index], (self.x_shape, self.y_shape)[index], (self.f_selection, self.g_selection)[index])

    def _embed(self, index, obj, spaces, maps, slots):
        prefix, shape, selection = self._side(index)
        for vertex in shape.vertices:
            spaces[_prefixed(prefix, vertex)] = obj.dim(vertex)
        for edge in shape.edges:
            maps[_prefixed(prefix, edge.label)] = obj.map(edge.label).matrix
        for slot in shape.slots:
            slots[_prefixed(prefix, slot.label)] = obj.slot(slot.label)
        if selection.part != 'whole':
            space = obj.slot(selection.slot)
            spaces[self._auxiliary_vertex(prefix, selection)] = space.dim if selection.part == 'sub' else space.codim
            structure = space.inclusion() if selection.part == 'sub' else space.quotient_map()
            maps[self._auxiliary_edge(prefix, selection)] = structure.matrix

    def combine(self, pair):
        """
        The object of the combined shape presenting a :class:`FibreProductObject`.
        """
        expected = (self.f_selection.dimension(pair.x), self.g_selection.dimension(pair.y))
        if pair.theta.shape != expected:
            raise ShapeMismatchError("theta", expected, pair.theta.shape)
        spaces, maps, slots = {}, {}, {}
        self._embed(0, pair.x, spaces, maps, slots)
        self._embed(1, pair.y, spaces, maps, slots)
        maps[self.theta] = pair.theta
        return DiagramObject(shape=self.shape, spaces=spaces, maps=maps, slots=slots)

    def _project(self, index, obj):
        prefix, shape, _ = self._side(index)
        return DiagramObject(
            shape=shape,
            spaces={vertex: obj.dim(_prefixed(prefix, vertex)) for vertex in shape.vertices},
            maps={edge.label: obj.map(_prefixed(prefix, edge.label)).matrix for edge in shape.edges},
            slots={slot.label: obj.slot(_prefixed(prefix, slot.label)) for slot in shape.slots},
        )

    def project_x(self, obj):
        return self._project(0, obj)

    def project_y(self, obj):
        return self._project(1, obj)

    def split(self, obj):
        """
        The :class:`FibreProductObject` presented by an object of the combined shape.
        """
        return FibreProductObject(x=self.project_x(obj), y=self.project_y(obj), theta=obj.map(self.theta).matrix)

    def _project_morphism(self, index, morphism):
        prefix, shape, _ = self._side(index)
        source = self._project(index, morphism.source)
        target = self._project(index, morphism.target)
        return DiagramMorphism(source=source, target=target, components={
            vertex: morphism.components[_prefixed(prefix, vertex)] for vertex in shape.vertices
        })

    def project_morphism_x(self, morphism):
        return self._project_morphism(0, morphism)

    def project_morphism_y(self, morphism):
        return self._project_morphism(1, morphism)


def fibre_product_category(x_shape, y_shape, f_selection, g_selection):
    """
    The combined shape of X x_Mod Y along two selection functors.
    """
    return FibreProduct(x_shape, y_shape, f_selection, g_selection).shape


LesNode = namedtuple('LesNode', 'name dim rank_in rank_out exact')


class LesReport:
    """
    Ranks along 0 -> Hom_P -> Hom_X + Hom_Y -> Hom_S -> Ext_P -> Ext_X + Ext_Y -> 0.
    """

    def __init__(self, nodes):
        self.nodes = tuple(nodes)

    @property
    def all_exact(self):
        return all(node.exact for node in self.nodes)

    def to_json(self):
        return {
            "exact": self.all_exact,
            "nodes": [dict(node._asdict()) for node in self.nodes],
        }


def _restricted_rows(matrix, offsets):
    return matrix.submatrix(rows=offsets)


def les_check(product, a, b):
    """
    Check exactness of the long exact sequence of a fibre product over Mod.

    `a` and `b` are :class:`FibreProductObject` values; both factor shapes
    must be free of relations and slots and both selections whole vertices.
    """
    for shape in (product.x_shape, product.y_shape):
        _require_cocycle_shape(shape)
    if product.f_selection.part != 'whole' or product.g_selection.part != 'whole':
        raise UnsupportedShapeError("les_check needs whole-vertex selections")
    a_obj, b_obj = product.combine(a), product.combine(b)
    shape = product.shape
    x_prefix, y_prefix = product.prefixes
    x_vertices = [v for v in shape.vertices if v.startswith(x_prefix + '.')]
    y_vertices = [v for v in shape.vertices if v.startswith(y_prefix + '.')]
    x_edges = [e for e in shape.edges if e.label.startswith(x_prefix + '.')]
    y_edges = [e for e in shape.edges if e.label.startswith(y_prefix + '.')]
    theta_edge = shape.edge(product.theta)

    vertices = x_vertices + y_vertices
    d_p = coboundary_system(a_obj, b_obj, vertices, x_edges + y_edges + [theta_edge]).coefficient_matrix()
    d_x = coboundary_system(a_obj, b_obj, x_vertices, x_edges).coefficient_matrix()
    d_y = coboundary_system(a_obj, b_obj, y_vertices, y_edges).coefficient_matrix()
    c0_x, c0_y = d_x.ncols, d_y.ncols
    c1_x, c1_y = d_x.nrows, d_y.nrows
    c1_theta = d_p.nrows - c1_x - c1_y
    c0 = c0_x + c0_y

    hom_p = LinearMap(d_p).kernel()
    hom_x = LinearMap(d_x).kernel()
    hom_y = LinearMap(d_y).kernel()
    hom_xy = Subspace(c0, [tuple(v) + (0,) * c0_y for v in hom_x.vectors]
                      + [(0,) * c0_x + tuple(v) for v in hom_y.vectors])
    coboundaries_p = Subspace(d_p.nrows, d_p.T)
    coboundaries_xy = Subspace(c1_x + c1_y, RationalMatrix.block_diagonal(d_x, d_y).T)

    restrict_hom = hom_xy.coordinate_map() @ hom_p.inclusion()
    theta_rows = LinearMap(d_p.submatrix(rows=range(c1_x + c1_y, d_p.nrows)))
    connecting_hom = theta_rows @ hom_xy.inclusion()
    embed_theta = LinearMap(RationalMatrix.vstack(
        RationalMatrix.zeros(c1_x + c1_y, c1_theta), RationalMatrix.identity(c1_theta),
    ))
    boundary = coboundaries_p.quotient_map() @ embed_theta
    drop_theta = LinearMap(RationalMatrix.hstack(
        RationalMatrix.identity(c1_x + c1_y), RationalMatrix.zeros(c1_x + c1_y, c1_theta),
    ))
    restrict_ext = coboundaries_xy.quotient_map() @ drop_theta @ coboundaries_p.quotient_section()

    chain = [
        ('Hom_P', LinearMap.zero(0, hom_p.dim), restrict_hom),
        ('Hom_X+Hom_Y', restrict_hom, connecting_hom),
        ('Hom_S', connecting_hom, boundary),
        ('Ext_P', boundary, restrict_ext),
        ('Ext_X+Ext_Y', restrict_ext, LinearMap.zero(coboundaries_xy.codim, 0)),
    ]
    nodes = []
    for name, incoming, outgoing in chain:
        composite_zero = (outgoing @ incoming).is_zero()
        rank_in, rank_out = incoming.rank(), outgoing.rank()
        exact = composite_zero and rank_in + rank_out == incoming.codomain_dim
        if not exact:
            log.warning('Sequence not exact at %s: rank in %d, rank out %d, dim %d',
                        name, rank_in, rank_out, incoming.codomain_dim)
        nodes.append(LesNode(name, incoming.codomain_dim, rank_in, rank_out, exact))
    return LesReport(nodes)
