import json
import math

import numpy as np
import pytest

import main
from models.fourier_models import NodeSet
from strategy.node_sets import good_set_example, motivational_nodes
from utils.io_helper import save_nodes


@pytest.fixture
def nodes_file(tmp_path):
    def write(X, name='nodes.json'):
        path = tmp_path / name
        save_nodes(X, str(path))
        return str(path)
    return write


def _run(capsys, argv):
    code = main.main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith('{') else out)


def test_no_arguments_lists_commands(capsys):
    code, out = _run(capsys, [])
    assert code == main.EXIT_OK
    assert "Available commands:" in out


def test_svd(capsys, nodes_file, antipodal):
    code, out = _run(capsys, ['svd', '--nodes', nodes_file(antipodal), '--m', '4'])
    assert code == 0
    assert out['s'] == 2
    assert out['sigma_1'] == pytest.approx(2.0)
    assert out['condition_number'] == pytest.approx(1.0)


def test_bound_with_oracle(capsys, nodes_file):
    path = nodes_file(motivational_nodes())
    code, out = _run(capsys, ['bound', '--nodes', path, '--m', '400', '--tau', '0.3', '--oracle'])
    assert code == 0
    assert out['method'] == 'Main1'
    assert out['applicable'] is True
    assert len(out['per_node']) == 9
    assert 19 <= out['inaccuracy_factor'] <= 23


def test_bound_sigma1_upper(capsys, nodes_file, antipodal):
    path = nodes_file(antipodal)
    code, out = _run(capsys, ['bound', '--nodes', path, '--m', '4', '--method', 'Sigma1Upper', '--tau', '0.5'])
    assert code == 0
    assert out['value'] == pytest.approx(math.sqrt(12))


def test_bound_auto_tau_sweeps(capsys, nodes_file):
    path = nodes_file(motivational_nodes())
    code, out = _run(capsys, ['bound', '--nodes', path, '--m', '400', '--tau', 'auto'])
    assert code == 0
    assert out['candidates'] > 1


def test_bound_inapplicable_exits_two(capsys, nodes_file):
    path = nodes_file(motivational_nodes())
    code, out = _run(capsys, ['bound', '--nodes', path, '--m', '50', '--tau', '0.5'])
    assert code == main.EXIT_INAPPLICABLE
    assert out['applicable'] is False
    assert out['reason'].startswith("m >= 6s")


def test_sweep_without_admissible_tau_exits_two(capsys, nodes_file):
    path = nodes_file(motivational_nodes())
    code, _ = _run(capsys, ['sweep', '--nodes', path, '--m', '50'])
    assert code == main.EXIT_INAPPLICABLE


def test_clumps_corollary(capsys, nodes_file):
    path = nodes_file(motivational_nodes())
    argv = ['bound', '--nodes', path, '--m', '400', '--method', 'ClumpsCorollary', '--clump-gap', '0.1']
    code, out = _run(capsys, argv)
    assert code == 0
    assert out['delta'] == pytest.approx(1 / 500)
    code, _ = _run(capsys, argv[:-2])
    assert code == main.EXIT_INPUT_ERROR


def test_malformed_node_file(capsys, tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('[0.1, "x"]')
    code, _ = _run(capsys, ['svd', '--nodes', str(path), '--m', '4'])
    assert code == main.EXIT_INPUT_ERROR


def test_coincident_nodes(capsys, tmp_path):
    path = tmp_path / 'dupes.json'
    path.write_text('[0.1, 1.1]')
    code, _ = _run(capsys, ['svd', '--nodes', str(path), '--m', '4'])
    assert code == main.EXIT_INPUT_ERROR


def test_missing_node_file(capsys, tmp_path):
    code, _ = _run(capsys, ['svd', '--nodes', str(tmp_path / 'nope.json'), '--m', '4'])
    assert code == main.EXIT_INPUT_ERROR


def test_unknown_method_is_a_usage_error(nodes_file, antipodal):
    with pytest.raises(SystemExit) as err:
        main.main(['bound', '--nodes', nodes_file(antipodal), '--m', '4', '--method', 'Nope'])
    assert err.value.code == main.EXIT_INPUT_ERROR


def test_sweep_writes_csv(capsys, nodes_file, tmp_path):
    path = nodes_file(motivational_nodes())
    csv = tmp_path / 'sweep.csv'
    code, out = _run(capsys, ['sweep', '--nodes', path, '--m', '400', '--taus', '0.3,0.5', '--csv', str(csv)])
    assert code == 0
    assert out['candidates'] == 2
    assert out['best_tau'] in (0.3, 0.5)
    assert csv.read_text().splitlines()[0] == 'tau,applicable,value'


def test_experiment_writes_results(capsys, tmp_path):
    code, out = _run(capsys, ['experiment', 'colliding', '--output-dir', str(tmp_path)])
    assert code == 0
    assert out['rows'] == 200
    assert (tmp_path / 'colliding.csv').exists()
    assert (tmp_path / 'colliding_summary.json').exists()


def test_interpolant_family(capsys, nodes_file, antipodal):
    code, out = _run(capsys, ['interpolant', '--nodes', nodes_file(antipodal), '--m', '12', '--tau', '0.5'])
    assert code == 0
    assert len(out['polys']) == 2
    assert 0 < out['duality_lower_bound'] <= math.sqrt(12) + 1e-9


def test_interpolant_good_at_a_point(capsys, nodes_file, tmp_path):
    path = nodes_file(good_set_example(1 / 300))
    output = tmp_path / 'good.json'
    argv = ['interpolant', '--nodes', path, '--m', '400', '--tau', '0.2', '--kind', 'good',
            '--point', '0.0', '--output', str(output)]
    code, _ = _run(capsys, argv)
    assert code == 0
    payload = json.loads(output.read_text())
    assert payload['nu'] == 4
    assert payload['poly']['deg'] == 36
    assert payload['sup'] <= payload['certified_sup'] == pytest.approx(4.0)


def test_interpolant_bad_center(capsys, nodes_file, antipodal):
    argv = ['interpolant', '--nodes', nodes_file(antipodal), '--m', '12', '--tau', '0.5',
            '--kind', 'minnorm', '--center', '5']
    code, _ = _run(capsys, argv)
    assert code == main.EXIT_INPUT_ERROR


def test_bound_writes_csv_row(capsys, nodes_file, tmp_path):
    path = nodes_file(motivational_nodes())
    csv = tmp_path / 'bound.csv'
    code, out = _run(capsys, ['bound', '--nodes', path, '--m', '400', '--tau', '0.3', '--csv', str(csv)])
    assert code == 0
    header, row = csv.read_text().splitlines()
    assert header == 'method,m,tau,delta,value,log_value'
    assert row.startswith('Main1,400,')
    assert float(row.split(',')[4]) == pytest.approx(out['value'], rel=1e-11)


def test_underflowed_bound_is_reported(capsys, nodes_file):
    packed = NodeSet.from_values(0.1 + 1e-12 * np.arange(30))
    argv = ['bound', '--nodes', nodes_file(packed), '--m', '180', '--method', 'Thm2Eq4',
            '--tau', '0.5', '--oracle']
    code, out = _run(capsys, argv)
    assert code == 0
    assert out['applicable'] is True
    assert out['underflow'] is True
    assert out['log_value'] < -700
    assert out['log_inaccuracy_factor'] > 0


def test_reference_method_is_selectable(capsys, nodes_file):
    path = nodes_file(motivational_nodes())
    argv = ['bound', '--nodes', path, '--m', '400', '--tau', '0.3', '--method', 'Main1Reference', '--oracle']
    code, out = _run(capsys, argv)
    assert code == 0
    assert out['inaccuracy_factor'] == pytest.approx(21.0038, rel=2e-3)
