"""
The ``ogus`` command line: ``ogus <command> [options] FILE...``.

The subcommand comes first; the common options may follow it. The report is
printed as text, or as canonical JSON with ``--json``.
"""
import argparse
import logging
import sys

from ogus import __version__
from ogus.commands import Command, CommandReport, Session
from ogus.exceptions import (
    ExemptPlaceError, ExtensionError, InputFileError, InvalidMorphismError, InvalidObjectError, LevelError,
    MalformedInputError, NotInSubspaceError, NotStableError, OgusError, PluginMissingError, SelectionError,
    SplittingError, UnknownPlaceError, UnsupportedShapeError, UsageError,
)
from ogus.fields import canonical_json

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_UNDETERMINED = 2
EXIT_MALFORMED = 3
EXIT_USAGE = 64
EXIT_NO_INPUT = 66

# Checked in order; subclasses before their bases.
EXIT_CODES = (
    (UsageError, EXIT_USAGE),
    (InputFileError, EXIT_NO_INPUT),
    (MalformedInputError, EXIT_MALFORMED),
    (UnsupportedShapeError, EXIT_MALFORMED),
    (SelectionError, EXIT_MALFORMED),
    (UnknownPlaceError, EXIT_MALFORMED),
    (ExemptPlaceError, EXIT_MALFORMED),
    (InvalidObjectError, EXIT_INVALID),
    (InvalidMorphismError, EXIT_INVALID),
    (LevelError, EXIT_INVALID),
    (SplittingError, EXIT_INVALID),
    (ExtensionError, EXIT_INVALID),
    (NotStableError, EXIT_INVALID),
    (NotInSubspaceError, EXIT_INVALID),
)


def exit_code_for(error):
    for error_class, code in EXIT_CODES:
        if isinstance(error, error_class):
            return code
    return EXIT_INVALID


class ArgumentParser(argparse.ArgumentParser):
    """
    An argument parser that raises :class:`UsageError` instead of exiting.
    """

    def error(self, message):
        raise UsageError(message)


def _add_common_arguments(parser):
    parser.add_argument('--json', action='store_true', help="print the report as canonical JSON")
    parser.add_argument('--seed', type=int, default=None, help="seed of the randomized admissibility search")
    parser.add_argument('--samples', type=int, default=None, help="number of random subspaces to sample")
    parser.add_argument('--output', default=None, help="write the command's result object to this file")
    parser.add_argument('--verbose', action='store_true', help="log debugging information to stderr")


def build_parser(name, command_class):
    parser = ArgumentParser(prog="ogus {}".format(name), description=command_class.help)
    _add_common_arguments(parser)
    command_class.add_arguments(parser)
    return parser


def command_names():
    return [name for name, _ in Command.load_classes()]


def _usage():
    return "usage: ogus <command> [options] FILE...\ncommands: {}".format(", ".join(command_names()))


def _error_report(name, error, session=None):
    verdict = {'kind': 'error', 'error': type(error).__name__, 'message': str(error.message or error)}
    validation = getattr(error, 'validation', None)
    if validation is not None:
        verdict['validation'] = validation.to_json()
    clause = getattr(error, 'clause', None)
    if clause is not None:
        verdict['clause'] = clause
    inputs = session.inputs if session is not None else {}
    return CommandReport(command=name or '', status=exit_code_for(error), inputs=inputs, verdicts=[verdict])


def run(argv):
    """
    Run one command; return ``(exit_code, CommandReport)``.
    """
    if not argv or argv[0].startswith('-'):
        error = UsageError(_usage())
        return error_exit(None, error)
    name, rest = argv[0], argv[1:]
    session = None
    try:
        try:
            command_class = Command.load_class(name)
        except PluginMissingError as exc:
            raise UsageError("Unknown command {!r}\n{}".format(name, _usage())) from exc
        options = build_parser(name, command_class).parse_args(rest)
        session = Session(name, options)
        status = command_class(session).run()
        return status, session.report(status, randomized=command_class.randomized)
    except OgusError as error:
        log.debug('%s failed', name, exc_info=True)
        return error_exit(name, error, session)
    except (ArithmeticError, KeyError, TypeError, ValueError) as error:
        log.debug('%s failed unexpectedly', name, exc_info=True)
        wrapped = MalformedInputError("{}: {}".format(type(error).__name__, error))
        return error_exit(name, wrapped, session)


def error_exit(name, error, session=None):
    report = _error_report(name, error, session)
    return report.status, report


def _wants(argv, flag):
    return flag in argv[1:]


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == '--version':
        print("ogus {}".format(__version__))
        return EXIT_OK
    logging.basicConfig(
        level=logging.DEBUG if _wants(argv, '--verbose') else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )
    code, report = run(argv)
    if _wants(argv, '--json'):
        print(canonical_json(report.to_json()))
    else:
        stream = sys.stdout if code in (EXIT_OK, EXIT_INVALID, EXIT_UNDETERMINED) else sys.stderr
        print(report.render_text(), file=stream)
    return code


if __name__ == '__main__':
    sys.exit(main())
