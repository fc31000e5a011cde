"""
Test the ogus command line.
"""
import json
from collections import Counter

import pytest
from mock import patch

from ogus import __version__
from ogus.cli import EXIT_INVALID, EXIT_MALFORMED, EXIT_NO_INPUT, EXIT_OK, EXIT_USAGE, main
from ogus.commands import Command, ValidateCommand
from ogus.test.tools import data_file


def run_json(capsys, *argv):
    code = main(list(argv) + ['--json'])
    return code, json.loads(capsys.readouterr().out)


def test_version(capsys):
    assert main(['--version']) == EXIT_OK
    assert capsys.readouterr().out.strip() == "ogus {}".format(__version__)


def test_check_admissible(capsys):
    code, report = run_json(capsys, 'check-admissible', data_file('tate.json'))
    assert code == EXIT_OK
    assert [verdict['place'] for verdict in report['verdicts']] == ['v2', 'v3']
    for verdict in report['verdicts']:
        assert verdict['status'] == 'admissible'
        assert verdict['t_h_total'] == -1
        assert verdict['t_n_total'] == -1
    assert report['seed'] is not None


def test_check_admissible_one_place(capsys):
    code, report = run_json(capsys, 'check-admissible', data_file('tate_inverted.json'), '--place', 'v3')
    assert code == EXIT_INVALID
    assert [verdict['status'] for verdict in report['verdicts']] == ['not-admissible']


def test_validate(capsys):
    assert main(['validate', data_file('tate.json')]) == EXIT_OK
    code, report = run_json(capsys, 'validate', data_file('tate_inverted.json'))
    assert code == EXIT_INVALID
    assert report['verdicts'][0]['valid'] is False


def test_validate_a(capsys):
    code, report = run_json(capsys, 'validate-a', data_file('broken_a.json'))
    assert code == EXIT_INVALID
    assert 'cartesian' in report['verdicts'][0]['clauses']
    assert main(['validate-a', data_file('valid_a.json')]) == EXIT_OK


def test_ta_then_sharp(capsys, tmp_path):
    realized = str(tmp_path / 'ta.json')
    assert main(['ta', data_file('motive.json'), '--output', realized]) == EXIT_OK
    capsys.readouterr()
    assert main(['sharp', realized]) == EXIT_OK
    assert "summary: dim = T + LieF + V = 1 + 1 + 1 = 3" in capsys.readouterr().out


def test_hom(capsys):
    code, report = run_json(capsys, 'hom', data_file('tate.json'), data_file('unit.json'))
    assert code == EXIT_OK
    assert report['verdicts'][0]['dim'] == 0


def test_ext1(capsys):
    code, report = run_json(capsys, 'ext1', data_file('map_source.json'), data_file('map_target.json'))
    assert code == EXIT_OK
    assert report['verdicts'][0]['dim'] == 1
    _, report = run_json(capsys, 'ext1', data_file('map_target.json'), data_file('map_source.json'))
    assert report['verdicts'][0]['dim'] == 0


def test_devissage_round_trip(capsys):
    code, report = run_json(capsys, 'devissage', data_file('motive.json'), '--roundtrip')
    assert code == EXIT_OK
    kinds = [verdict['kind'] for verdict in report['verdicts']]
    assert kinds == ['validation', 'roundtrip', 'presentation']
    assert report['verdicts'][1]['identical'] is True


def test_devissage_splitting(capsys, tmp_path):
    splitting = tmp_path / 'splitting.json'
    splitting.write_text(json.dumps({'sigma': [["1"]], 'lift': [["1"]]}))
    code, report = run_json(capsys, 'devissage', data_file('motive.json'), '--splitting', str(splitting))
    assert code == EXIT_OK
    assert report['verdicts'][0] == {'kind': 'gamma', 'gamma': [["1"]]}

    splitting.write_text(json.dumps({'sigma': [["2"]], 'lift': [["1"]]}))
    code, report = run_json(capsys, 'devissage', data_file('motive.json'), '--splitting', str(splitting))
    assert code == EXIT_INVALID
    assert report['verdicts'][0]['error'] == 'SplittingError'


def test_strictness_reports_failures(capsys, tmp_path):
    morphism = tmp_path / 'morphism.json'
    morphism.write_text(json.dumps({
        'source': {'t_dr': 1, 'hodge': [[-1, [["1"]]]]},
        'target': {'t_dr': 1, 'hodge': [[0, [["1"]]]]},
        'matrix': [["1"]],
    }))
    code, report = run_json(capsys, 'strictness', str(morphism))
    assert code == EXIT_OK
    assert report['verdicts'][0]['hodge'] == {'strict': False, 'failures': [0]}


def test_unknown_command(capsys):
    assert main(['frobnicate', data_file('tate.json')]) == EXIT_USAGE
    assert "Unknown command 'frobnicate'" in capsys.readouterr().err


@pytest.mark.parametrize('argv', [[], ['--json'], ['validate'], ['validate', 'a', 'b'], ['hom', '--seed', 'x']])
def test_usage_errors(argv):
    assert main(argv) == EXIT_USAGE


def test_missing_file(capsys, tmp_path):
    assert main(['validate', str(tmp_path / 'absent.json')]) == EXIT_NO_INPUT
    assert 'absent.json' in capsys.readouterr().err


def test_malformed_input(capsys, tmp_path):
    broken = tmp_path / 'broken.json'
    broken.write_text('{"t_dr": 1, "colour": "red"}')
    code, report = run_json(capsys, 'validate', str(broken))
    assert code == EXIT_MALFORMED
    assert report['verdicts'][0]['error'] == 'MalformedInputError'

    broken.write_text('{"t_dr": ')
    assert main(['validate', str(broken)]) == EXIT_MALFORMED


@patch.object(ValidateCommand, 'run', side_effect=ZeroDivisionError('division by zero'))
def test_unexpected_errors_are_malformed(_run, capsys):
    code, report = run_json(capsys, 'validate', data_file('tate.json'))
    assert code == EXIT_MALFORMED
    assert report['verdicts'][0]['error'] == 'MalformedInputError'
    assert 'ZeroDivisionError' in report['verdicts'][0]['message']


def test_output_is_reproducible(capsys):
    outputs = []
    for _ in range(3):
        main(['check-admissible', data_file('tate.json'), '--json'])
        outputs.append(capsys.readouterr().out.encode('utf-8'))
    assert outputs[0] == outputs[1] == outputs[2]


def test_every_operation_has_one_command():
    counts = Counter(operation for _, command in Command.load_classes() for operation in command.operations)
    assert all(count == 1 for count in counts.values()), counts
    assert {
        'structures.validate', 'realization.validate_a', 'filtered.check_admissible', 'structures.hom',
        'realization.hom_a', 'devissage.hom_motives', 'structures.kernel', 'structures.cokernel',
        'diagrams.ext1_basis', 'diagrams.fibre_product_category', 'diagrams.les_check', 'devissage.build_gamma',
        'devissage.assemble', 'devissage.disassemble', 'devissage.fibre_presentation', 'realization.t_a',
        'realization.sharp_s',
    } <= set(counts)
