"""
Test ogus/fields.py
"""
import unittest
from fractions import Fraction

import ddt
import pytest

from ogus.exceptions import MalformedInputError, NotPrimeError, ShapeMismatchError
from ogus.fields import (
    AmbientField, Boolean, Choice, Count, Field, Integer, ListField, Map, MappingField, Matrix, Prime, Rational,
    Record, RecordField, String, canonical_json, load_document,
)
from ogus.linalg import LinearMap, RationalMatrix, Subspace


class Point(Record):
    x = Rational()
    y = Rational(default="0")


class Labeled(Record):
    """
    A record exercising every field type.
    """
    name = String()
    size = Count(help="Dimension")
    shift = Integer(default=0)
    prime = Prime(default=2)
    flag = Boolean(default=False)
    kind = Choice(['left', 'right'], default='left')
    block = Matrix(shape=lambda values, key: (values['size'], values['size']), default=None)
    action = Map(shape=lambda values, key: (values['size'], values['size']), default=None)
    line = AmbientField(Subspace, ambient=lambda values, key: values['size'], default=None)
    points = ListField(RecordField(Point), sort_key=lambda point: point.x, default=())
    weights = MappingField(Count(), keys=lambda values: ['a', 'b'], fill=lambda values, key: 0, default={})
    extra = Field(default=None)


@ddt.ddt
class ScalarFieldTest(unittest.TestCase):
    """
    Coercion of scalar fields.
    """

    def test_defaults(self):
        record = Labeled(name="n", size=1)
        self.assertEqual(record.shift, 0)
        self.assertEqual(record.prime, 2)
        self.assertFalse(record.flag)
        self.assertEqual(record.kind, 'left')
        self.assertIsNone(record.block)
        self.assertEqual(dict(record.weights), {'a': 0, 'b': 0})

    @ddt.data(
        {'size': -1},
        {'size': True},
        {'shift': 1.5},
        {'flag': 'yes'},
        {'kind': 'middle'},
        {'name': 3},
    )
    def test_bad_values(self, change):
        values = dict({'name': "n", 'size': 1}, **change)
        with pytest.raises(MalformedInputError):
            Labeled(**values)

    def test_prime(self):
        with pytest.raises(NotPrimeError):
            Labeled(name="n", size=1, prime=9)

    def test_rational(self):
        self.assertEqual(Point(x="1/3").x, Fraction(1, 3))
        self.assertEqual(Point(x="1/3").to_json(), {"x": "1/3", "y": "0"})

    def test_missing_and_unknown(self):
        with pytest.raises(MalformedInputError):
            Labeled(size=1)
        with pytest.raises(MalformedInputError):
            Labeled(name="n", size=1, colour="red")


class StructuredFieldTest(unittest.TestCase):
    """
    Matrices, subspaces, lists and mappings.
    """

    def test_matrix_shape(self):
        record = Labeled(name="n", size=2, block=[[1, 0], [0, 1]])
        self.assertEqual(record.block, RationalMatrix.identity(2))
        with pytest.raises(ShapeMismatchError):
            Labeled(name="n", size=2, block=[[1]])

    def test_empty_matrix_takes_its_width(self):
        class Wide(Record):
            rows = Count()
            data = Matrix(shape=lambda values, key: (values['rows'], 3))

        self.assertEqual(Wide(rows=0, data=[]).data.shape, (0, 3))

    def test_map(self):
        record = Labeled(name="n", size=1, action=[[2]])
        self.assertIsInstance(record.action, LinearMap)
        self.assertEqual(record.to_json()['action'], [["2"]])

    def test_ambient(self):
        record = Labeled(name="n", size=2, line=[[2, 2]])
        self.assertEqual(record.line, Subspace(2, [[1, 1]]))
        with pytest.raises(ShapeMismatchError):
            Labeled(name="n", size=2, line=Subspace.full(3))

    def test_sorted_list(self):
        record = Labeled(name="n", size=1, points=[{'x': 2}, Point(x=1)])
        self.assertEqual([point.x for point in record.points], [1, 2])
        with pytest.raises(MalformedInputError):
            Labeled(name="n", size=1, points={'x': 1})

    def test_mapping_keys(self):
        record = Labeled(name="n", size=1, weights={'b': 3})
        self.assertEqual(list(record.weights), ['a', 'b'])
        self.assertEqual(record.weights['b'], 3)
        with pytest.raises(MalformedInputError):
            Labeled(name="n", size=1, weights={'c': 1})
        with pytest.raises(TypeError):
            record.weights['a'] = 5


class RecordTest(unittest.TestCase):
    """
    Immutability, equality and the JSON document form.
    """

    def test_immutable(self):
        point = Point(x=1)
        with pytest.raises(AttributeError):
            point.x = 2
        with pytest.raises(AttributeError):
            point.z = 2

    def test_equality_and_hash(self):
        self.assertEqual(Point(x="2/4"), Point(x="1/2", y=0))
        self.assertEqual(hash(Point(x="2/4")), hash(Point(x="1/2")))
        self.assertNotEqual(Point(x=1), Point(x=2))

    def test_replace(self):
        point = Point(x=1).replace(y=5)
        self.assertEqual((point.x, point.y), (1, 5))

    def test_from_json(self):
        record = Labeled.from_json({"name": "n", "size": 1, "block": [["3"]], "points": [{"x": "1/2"}]})
        self.assertEqual(record.block, RationalMatrix([[3]]))
        self.assertEqual(Labeled.from_json(record.to_json()), record)
        with pytest.raises(MalformedInputError):
            Labeled.from_json({"name": "n", "size": 1, "colour": "red"})
        with pytest.raises(MalformedInputError):
            Labeled.from_json(["not", "an", "object"])

    def test_from_string_accepts_yaml(self):
        point = Point.from_string("x: 1/2\ny: '3'\n")
        self.assertEqual(point, Point(x="1/2", y=3))


class DocumentTest(unittest.TestCase):

    def test_canonical_json(self):
        self.assertEqual(canonical_json({"b": [1], "a": "x"}), '{\n  "a": "x",\n  "b": [\n    1\n  ]\n}')

    def test_load_document(self):
        self.assertEqual(load_document('{"a": ["1/2"]}'), {"a": ["1/2"]})
        with pytest.raises(MalformedInputError):
            load_document('{"a": [')
