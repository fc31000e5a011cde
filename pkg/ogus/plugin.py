"""
Finding command classes by name.

Three sources are consulted: distributions installed with entry points in
the plugin group, classes registered for the duration of a test, and the
table of classes shipped with this package. The shipped table only answers
for a name nothing else provides, so a source checkout runs without being
installed.
"""
import functools
import importlib
import logging
from contextlib import contextmanager
from importlib.metadata import entry_points
from operator import attrgetter

from ogus.exceptions import AmbiguousPluginError, PluginMissingError

log = logging.getLogger(__name__)

# (group, identifier) -> loaded class
PLUGIN_CACHE = {}

# (group, StaticEntryPoint) pairs made available by Plugin.temporary
_TEMPORARY = []


class StaticEntryPoint:
    """
    An entry point known without package metadata.

    `target` is a "module:attribute" path or the class itself.
    """

    def __init__(self, name, target):
        self.name = name
        self.target = target

    def load(self):
        if not isinstance(self.target, str):
            return self.target
        module_name, _, attribute = self.target.partition(':')
        return getattr(importlib.import_module(module_name), attribute)

    def __repr__(self):
        return "StaticEntryPoint({!r}, {!r})".format(self.name, self.target)


def installed_entry_points(group, name=None):
    try:
        found = entry_points(group=group)
    except TypeError:
        # Python < 3.10 returns a dict of groups
        found = entry_points().get(group, [])
    return [entry_point for entry_point in found if name is None or entry_point.name == name]


def default_select(identifier, candidates):
    """
    Insist on exactly one candidate.
    """
    if not candidates:
        raise PluginMissingError(identifier)
    if len(candidates) > 1:
        raise AmbiguousPluginError(candidates)
    return candidates[0]


class Plugin:
    """
    Base of classes looked up by identifier in the `entry_point` group.

    `builtins` maps identifiers to "module:attribute" paths of the classes
    that ship with the package.
    """
    entry_point = None
    builtins = {}

    @classmethod
    def _loaded(cls, entry_point):
        class_ = entry_point.load()
        class_.plugin_name = entry_point.name
        return class_

    @classmethod
    def _temporary_entry_points(cls, name=None):
        return [entry_point for group, entry_point in _TEMPORARY
                if group == cls.entry_point and (name is None or entry_point.name == name)]

    @classmethod
    def _builtin_entry_points(cls, name=None):
        return [StaticEntryPoint(identifier, path) for identifier, path in sorted(cls.builtins.items())
                if name is None or identifier == name]

    @classmethod
    def candidates(cls, identifier):
        """
        Entry points answering to `identifier`, the shipped table only as a fallback.
        """
        found = installed_entry_points(cls.entry_point, identifier) + cls._temporary_entry_points(identifier)
        return found or cls._builtin_entry_points(identifier)

    @classmethod
    def load_class(cls, identifier, default=None, select=default_select):
        """
        The class registered as `identifier` (case-insensitive).

        `select(identifier, candidates)` chooses among the matching entry
        points; `default` is returned instead of raising
        :class:`PluginMissingError`.
        """
        key = (cls.entry_point, identifier.lower())
        if key in PLUGIN_CACHE:
            return PLUGIN_CACHE[key]
        try:
            chosen = select(key[1], cls.candidates(key[1]))
        except PluginMissingError:
            if default is None:
                raise
            return default
        PLUGIN_CACHE[key] = cls._loaded(chosen)
        return PLUGIN_CACHE[key]

    @classmethod
    def load_classes(cls, fail_silently=True):
        """
        Yield (identifier, class) pairs sorted by identifier.

        Classes that fail to import are logged and skipped unless
        `fail_silently` is false.
        """
        found = installed_entry_points(cls.entry_point) + cls._temporary_entry_points()
        provided = {entry_point.name for entry_point in found}
        found += [entry_point for entry_point in cls._builtin_entry_points() if entry_point.name not in provided]
        for entry_point in sorted(found, key=attrgetter('name')):
            try:
                yield entry_point.name, cls._loaded(entry_point)
            except Exception:  # pylint: disable=broad-except
                if not fail_silently:
                    raise
                log.warning('Cannot load %s %r', cls.__name__, entry_point.name, exc_info=True)

    @classmethod
    @contextmanager
    def temporary(cls, class_, identifier=None):
        """
        Make `class_` loadable as `identifier` inside the block, against an empty cache.
        """
        global PLUGIN_CACHE  # pylint: disable=global-statement
        registration = (cls.entry_point, StaticEntryPoint(identifier or class_.__name__.lower(), class_))
        saved = PLUGIN_CACHE
        _TEMPORARY.append(registration)
        PLUGIN_CACHE = {}
        try:
            yield
        finally:
            _TEMPORARY.remove(registration)
            PLUGIN_CACHE = saved

    @classmethod
    def register_temp_plugin(cls, class_, identifier=None):
        """
        Decorator form of :meth:`temporary`::

            @Command.register_temp_plugin(MyCommand, 'my-command')
            def test_my_command():
                ...
        """
        def decorator(func):
            @functools.wraps(func)
            def wrapper(*args, **kwargs):
                with cls.temporary(class_, identifier):
                    return func(*args, **kwargs)
            return wrapper
        return decorator
