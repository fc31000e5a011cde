"""
Fields declare the data of the immutable records used throughout ogus.

A :class:`Record` subclass lists its attributes as :class:`Field` descriptors.
Each field knows how to coerce a Python value (`enforce_type`) and how to
convert to and from the JSON document conventions of the package (`to_json`,
`from_json`). Fields are converted in declaration order; a field may look at
the already-converted values of the fields declared before it, which is how
matrix shapes and ambient dimensions are resolved.
"""
import json
import logging
from types import MappingProxyType

import yaml
from sympy import isprime

from ogus.exceptions import MalformedInputError, NotPrimeError, ShapeMismatchError
from ogus.linalg import LinearMap, RationalMatrix, format_rational, to_rational

log = logging.getLogger(__name__)

__all__ = [
    'Record', 'Field',
    'Count', 'Integer', 'Prime', 'Boolean', 'String', 'Choice', 'Rational',
    'Matrix', 'Map', 'AmbientField', 'RecordField', 'ListField', 'MappingField',
    'canonical_json', 'load_document',
]


class Sentinel:
    """
    Class for implementing sentinel objects (only equal to themselves).
    """

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


UNSET = Sentinel('fields.UNSET')


def canonical_json(value):
    """
    The canonical serialization: sorted keys, two-space indent, no trailing spaces.
    """
    return json.dumps(value, indent=2, sort_keys=True, separators=(',', ': '))


def load_document(text):
    """
    Parse a JSON (or YAML) document.
    """
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise MalformedInputError("Unparseable document: {}".format(exc)) from exc


class Field:
    """
    A typed attribute of a :class:`Record`.

    `default` makes the field optional; a default of ``None`` also lets the
    field hold ``None``.
    """

    def __init__(self, help=None, default=UNSET):  # pylint: disable=redefined-builtin
        self.help = help
        self._default = default
        self.__name__ = None

    @property
    def name(self):
        return self.__name__

    @property
    def has_default(self):
        return self._default is not UNSET

    @property
    def default(self):
        return self._default

    def __get__(self, record, owner):
        if record is None:
            return self
        return record._values[self.__name__]  # pylint: disable=protected-access

    def __set__(self, record, value):
        raise AttributeError("{}.{} is read-only".format(type(record).__name__, self.__name__))

    def __delete__(self, record):
        raise AttributeError("{}.{} is read-only".format(type(record).__name__, self.__name__))

    def __repr__(self):
        return "<{} {!r}>".format(type(self).__name__, self.__name__)

    def _label(self, key=None):
        return self.__name__ if key is None else "{}[{!r}]".format(self.__name__, key)

    def convert(self, value, values, key=None):
        """
        `enforce_type`, letting ``None`` through when the field defaults to ``None``.
        """
        if value is None and self._default is None:
            return None
        return self.enforce_type(value, values, key)

    def enforce_type(self, value, values, key=None):  # pylint: disable=unused-argument
        """
        Coerce `value` to the type this field stores.

        Must accept its own output unchanged.
        """
        return value

    def to_json(self, value):
        return value

    def from_json(self, value, values, key=None):
        return self.convert(value, values, key)


class Count(Field):
    """
    A non-negative integer (a dimension).
    """

    def enforce_type(self, value, values, key=None):
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise MalformedInputError("{} must be a non-negative integer, got {!r}".format(self._label(key), value))
        return value


class Integer(Field):
    def enforce_type(self, value, values, key=None):
        if isinstance(value, bool) or not isinstance(value, int):
            raise MalformedInputError("{} must be an integer, got {!r}".format(self._label(key), value))
        return value


class Prime(Integer):
    def enforce_type(self, value, values, key=None):
        value = super().enforce_type(value, values, key)
        if not isprime(value):
            raise NotPrimeError(value)
        return value


class Boolean(Field):
    def enforce_type(self, value, values, key=None):
        if not isinstance(value, bool):
            raise MalformedInputError("{} must be true or false, got {!r}".format(self._label(key), value))
        return value


class String(Field):
    def enforce_type(self, value, values, key=None):
        if not isinstance(value, str):
            raise MalformedInputError("{} must be a string, got {!r}".format(self._label(key), value))
        return value


class Choice(String):
    """
    A string drawn from a fixed set.
    """

    def __init__(self, choices, **kwargs):
        super().__init__(**kwargs)
        self.choices = tuple(choices)

    def enforce_type(self, value, values, key=None):
        value = super().enforce_type(value, values, key)
        if value not in self.choices:
            raise MalformedInputError("{} must be one of {}, got {!r}".format(self._label(key), self.choices, value))
        return value


class Rational(Field):
    """
    A rational number, serialized as "a/b".
    """

    def enforce_type(self, value, values, key=None):
        return to_rational(value)

    def to_json(self, value):
        return None if value is None else format_rational(value)


class Matrix(Field):
    """
    A :class:`RationalMatrix`.

    `shape`, when given, is called with the converted sibling values (and the
    mapping key for fields inside a :class:`MappingField`) and returns the
    required ``(rows, cols)``; either entry may be ``None`` for "any".
    """

    def __init__(self, shape=None, **kwargs):
        super().__init__(**kwargs)
        self._shape = shape

    def expected_shape(self, values, key=None):
        if self._shape is None:
            return (None, None)
        return self._shape(values, key)

    def _matrix(self, value, values, key):
        rows, cols = self.expected_shape(values, key)
        if isinstance(value, LinearMap):
            value = value.matrix
        if not isinstance(value, RationalMatrix):
            value = RationalMatrix.from_json(value, cols)
        if value.nrows == 0 and cols is not None and value.ncols != cols:
            value = RationalMatrix.zeros(0, cols)
        if (rows is not None and value.nrows != rows) or (cols is not None and value.ncols != cols):
            raise ShapeMismatchError(self._label(key), (rows, cols), value.shape)
        return value

    def enforce_type(self, value, values, key=None):
        return self._matrix(value, values, key)

    def to_json(self, value):
        return None if value is None else value.to_json()


class Map(Matrix):
    """
    A :class:`LinearMap`; `shape` gives the matrix shape ``(codomain, domain)``.
    """

    def enforce_type(self, value, values, key=None):
        return LinearMap(self._matrix(value, values, key))


class AmbientField(Field):
    """
    A value living in Q^n for an `ambient` dimension computed from sibling values.

    `kind` must offer ``from_json(value, ambient_dim)``, ``to_json()`` and an
    ``ambient_dim`` attribute (subspaces and filtrations do).
    """

    def __init__(self, kind, ambient, **kwargs):
        super().__init__(**kwargs)
        self.kind = kind
        self._ambient = ambient

    def enforce_type(self, value, values, key=None):
        ambient = self._ambient(values, key)
        if not isinstance(value, self.kind):
            value = self.kind.from_json(value, ambient)
        if value.ambient_dim != ambient:
            raise ShapeMismatchError(self._label(key), ambient, value.ambient_dim)
        return value

    def to_json(self, value):
        return None if value is None else value.to_json()


class RecordField(Field):
    """
    A nested record.
    """

    def __init__(self, record_class, **kwargs):
        super().__init__(**kwargs)
        self.record_class = record_class

    def enforce_type(self, value, values, key=None):
        if isinstance(value, self.record_class):
            return value
        if isinstance(value, dict):
            return self.record_class.from_json(value)
        raise MalformedInputError("{} must be a {}, got {!r}".format(
            self._label(key), self.record_class.__name__, type(value).__name__,
        ))

    def to_json(self, value):
        return None if value is None else value.to_json()


class ListField(Field):
    """
    A tuple of items of one field type, optionally kept sorted.
    """

    def __init__(self, item, sort_key=None, **kwargs):
        super().__init__(**kwargs)
        self.item = item
        self.sort_key = sort_key

    def _items(self, value, key, convert):
        if not isinstance(value, (list, tuple)):
            raise MalformedInputError("{} must be a list, got {!r}".format(self._label(key), value))
        items = tuple(convert(item, index) for index, item in enumerate(value))
        if self.sort_key is not None:
            items = tuple(sorted(items, key=self.sort_key))
        return items

    def enforce_type(self, value, values, key=None):
        return self._items(value, key, lambda item, index: self.item.convert(item, values, index))

    def from_json(self, value, values, key=None):
        return self._items(value, key, lambda item, index: self.item.from_json(item, values, index))

    def to_json(self, value):
        return [self.item.to_json(item) for item in value]


class MappingField(Field):
    """
    A read-only mapping from string keys to values of one field type, ordered by key.

    `keys`, when given, returns the exact key set required (given sibling
    values); missing keys are filled from `fill` when provided.
    """

    def __init__(self, value_field, keys=None, fill=None, **kwargs):
        super().__init__(**kwargs)
        self.value_field = value_field
        self._keys = keys
        self._fill = fill

    def _mapping(self, value, values, key, convert):
        if not isinstance(value, dict) and not isinstance(value, MappingProxyType):
            raise MalformedInputError("{} must be an object, got {!r}".format(self._label(key), value))
        value = dict(value)
        if self._keys is not None:
            required = set(self._keys(values))
            unknown = set(value) - required
            if unknown:
                raise MalformedInputError("{} has unknown keys {}".format(self._label(key), sorted(unknown)))
            for missing in sorted(required - set(value)):
                if self._fill is None:
                    raise MalformedInputError("{} is missing key {!r}".format(self._label(key), missing))
                value[missing] = self._fill(values, missing)
        for item_key in value:
            if not isinstance(item_key, str):
                raise MalformedInputError("{} keys must be strings, got {!r}".format(self._label(key), item_key))
        return MappingProxyType({
            item_key: convert(value[item_key], values, item_key) for item_key in sorted(value)
        })

    def enforce_type(self, value, values, key=None):
        return self._mapping(value, values, key, self.value_field.convert)

    def from_json(self, value, values, key=None):
        return self._mapping(value, values, key, self.value_field.from_json)

    def to_json(self, value):
        return {item_key: self.value_field.to_json(item) for item_key, item in value.items()}


class RecordMeta(type):
    """
    Names the :class:`Field` attributes of a record class and collects them, in
    declaration order (inherited fields first), into ``cls.fields``.
    """

    def __new__(mcs, name, bases, attrs):
        cls = super().__new__(mcs, name, bases, attrs)
        collected = {}
        for base in reversed(cls.__mro__[1:]):
            collected.update(getattr(base, 'fields', {}))
        for attr_name, value in attrs.items():
            if isinstance(value, Field):
                value.__name__ = attr_name
                collected[attr_name] = value
        cls.fields = collected
        return cls


class Record(metaclass=RecordMeta):
    """
    An immutable value whose data is declared by :class:`Field` attributes.

    Records compare equal when their canonical JSON is equal.
    """

    def __init__(self, **kwargs):
        values = {}
        for name, field in self.fields.items():
            if name in kwargs:
                values[name] = field.convert(kwargs.pop(name), values)
            elif field.has_default:
                values[name] = field.convert(field.default, values)
            else:
                raise MalformedInputError("{} requires {!r}".format(type(self).__name__, name))
        if kwargs:
            raise MalformedInputError("{} got unexpected {}".format(type(self).__name__, sorted(kwargs)))
        object.__setattr__(self, '_values', values)
        self.check()

    def check(self):
        """
        Structural invariants; raise a :class:`MalformedInputError` subclass on violation.
        """

    def __setattr__(self, name, value):
        raise AttributeError("{} is immutable".format(type(self).__name__))

    def __eq__(self, other):
        if type(other) is not type(self):  # pylint: disable=unidiomatic-typecheck
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self):
        return hash(self.to_string())

    def __repr__(self):
        return "{}({})".format(type(self).__name__, ", ".join(
            "{}={!r}".format(name, self._values[name]) for name in self.fields
        ))

    def to_json(self):
        return {name: field.to_json(self._values[name]) for name, field in self.fields.items()}

    @classmethod
    def from_json(cls, doc):
        if not isinstance(doc, dict):
            raise MalformedInputError("{} must be a JSON object, got {!r}".format(cls.__name__, type(doc).__name__))
        unknown = set(doc) - set(cls.fields)
        if unknown:
            raise MalformedInputError("{} has unknown keys {}".format(cls.__name__, sorted(unknown)))
        values = {}
        for name, field in cls.fields.items():
            if name in doc:
                values[name] = field.from_json(doc[name], values)
            elif field.has_default:
                values[name] = field.convert(field.default, values)
            else:
                raise MalformedInputError("{} requires {!r}".format(cls.__name__, name))
        return cls(**values)

    def to_string(self):
        return canonical_json(self.to_json())

    @classmethod
    def from_string(cls, serialized):
        """
        Parse a document; YAML is accepted since it is a superset of JSON.
        """
        return cls.from_json(load_document(serialized))

    def replace(self, **changes):
        values = dict(self._values)
        values.update(changes)
        return type(self)(**values)
