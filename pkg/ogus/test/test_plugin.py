"""
Test ogus/plugin.py
"""
import pytest
from mock import Mock, patch

from ogus import plugin
from ogus.commands import Command, HomCommand, ValidateCommand
from ogus.exceptions import AmbiguousPluginError, PluginMissingError
from ogus.plugin import StaticEntryPoint, default_select


class FirstEcho(Command):
    """Registered twice under one name."""


class SecondEcho(Command):
    """Registered twice under one name."""


class Echo(Command):
    """Registered once."""


@Command.register_temp_plugin(FirstEcho, "echo-twice")
@Command.register_temp_plugin(SecondEcho, "echo-twice")
@Command.register_temp_plugin(Echo, "echo")
def test_duplicate_names():
    assert Command.load_class("echo") is Echo
    assert Command.load_class("echo").plugin_name == "echo"

    expected = (
        "Ambiguous entry points for echo-twice: "
        "ogus.test.test_plugin.FirstEcho, ogus.test.test_plugin.SecondEcho"
    )
    with pytest.raises(AmbiguousPluginError, match=expected):
        Command.load_class("echo-twice")

    def first(identifier, candidates):
        assert identifier == "echo-twice"
        return candidates[0]

    assert Command.load_class("echo-twice", select=first) is FirstEcho


def test_temporary_registration_is_undone():
    with Command.temporary(Echo, "echo"):
        assert "echo" in dict(Command.load_classes())
    assert "echo" not in dict(Command.load_classes())
    with pytest.raises(PluginMissingError):
        Command.load_class("echo")


def test_missing_command():
    assert Command.load_class("no-such-command", default=Echo) is Echo
    with pytest.raises(PluginMissingError, match="no-such-command"):
        Command.load_class("no-such-command")


def test_shipped_commands():
    assert Command.load_class("validate") is ValidateCommand
    assert Command.load_class("HOM") is HomCommand
    names = [name for name, _ in Command.load_classes()]
    assert names == sorted(names)
    assert set(Command.builtins) <= set(names)


def test_shipped_table_is_a_fallback():
    installed = StaticEntryPoint("validate", Echo)
    with patch.object(plugin, 'installed_entry_points', Mock(return_value=[installed])):
        assert Command.candidates("validate") == [installed]
    with patch.object(plugin, 'installed_entry_points', Mock(return_value=[])):
        [shipped] = Command.candidates("validate")
        assert shipped.load() is ValidateCommand


def test_static_entry_point():
    assert StaticEntryPoint("hom", "ogus.commands:HomCommand").load() is HomCommand
    assert StaticEntryPoint("echo", Echo).load() is Echo
    with pytest.raises(AmbiguousPluginError):
        default_select("echo", [StaticEntryPoint("echo", Echo), StaticEntryPoint("echo", FirstEcho)])


@patch.object(Command, '_loaded', Mock(side_effect=Exception))
def test_unloadable_commands_are_skipped():
    assert list(Command.load_classes()) == []


@patch.object(Command, '_loaded', Mock(side_effect=ImportError))
def test_unloadable_commands_raise_when_asked():
    with pytest.raises(ImportError):
        list(Command.load_classes(fail_silently=False))


@Command.register_temp_plugin(Echo, "echo")
def test_loaded_classes_are_cached():
    assert plugin.PLUGIN_CACHE == {}
    Command.load_class("echo")
    Command.load_class("ECHO")
    assert plugin.PLUGIN_CACHE == {('ogus.commands', 'echo'): Echo}
