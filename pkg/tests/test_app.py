import dataclasses
import glob
import json
import math
import os

import numpy as np
import pytest

from vacuum_friction.app import (
    EXIT_FAILURE, EXIT_INVALID, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE, RunManifest, Table, UsageError, log_grid,
    render_csv, run,
)
from vacuum_friction import app, greens
from vacuum_friction.fluctuation import ChannelBreakdown, FluctuationModel
from vacuum_friction.reflection import RootFindingError, SingularBoundaryError
from vacuum_friction.scenario import GHZ_TO_RAD_S
from vacuum_friction.scenario import parse_scenario, scenario_hash

from .conftest import SCENARIO_DIR, scenario_text

VACUUM = scenario_text(sphere='yig', slab='none')


def test_validate_prints_hash(scenario_file, capsys):
    path = scenario_file(VACUUM)
    assert run(['validate', '-c', path]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith(f'# scenario_hash: {scenario_hash(parse_scenario(VACUUM))}\n')
    assert 'sphere.material = yig' in out


def test_validate_json(scenario_file, capsys):
    path = scenario_file(VACUUM)
    assert run(['validate', '-c', path, '--format', 'json']) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document['scenario_hash'] == scenario_hash(parse_scenario(VACUUM))


@pytest.mark.parametrize('path', sorted(glob.glob(os.path.join(SCENARIO_DIR, '*.cfg'))))
def test_bundled_scenarios_validate(path, capsys):
    assert run(['validate', '-c', path]) == EXIT_OK


def test_usage_errors(scenario_file, tmp_path):
    path = scenario_file(VACUUM)
    assert run(['validate', '-c', str(tmp_path / 'missing.cfg')]) == EXIT_USAGE
    assert run(['validate', '-c', path, '--out', str(tmp_path / 'no' / 'such' / 'dir.csv')]) == EXIT_USAGE
    assert run(['power', '-c', path, '--workers', '0']) == EXIT_USAGE
    assert run(['power', '-c', path, '--tol', '2']) == EXIT_USAGE
    assert run(['teleport', '-c', path]) == EXIT_USAGE
    assert run(['power']) == EXIT_USAGE


def test_help_exits_cleanly(capsys):
    assert run(['--help']) == EXIT_OK
    assert 'spectrum' in capsys.readouterr().out


def test_invalid_scenario(scenario_file):
    path = scenario_file(scenario_text(radius_nm=-5.0, slab='none'))
    assert run(['validate', '-c', path]) == EXIT_INVALID


def test_metal_sphere_outside_dipole_regime(scenario_file):
    path = scenario_file(scenario_text(sphere='al', slab='none', radius_nm=5000.0, rotation_ghz=100.0))
    assert run(['validate', '-c', path]) == EXIT_INVALID


def test_spectrum_needs_a_centre_frequency(scenario_file):
    path = scenario_file(scenario_text(sphere='al', slab='none', rotation_ghz=0))
    assert run(['spectrum', '-c', path, '--workers', '1']) == EXIT_USAGE


def test_ldos_csv(scenario_file, tmp_path):
    path = scenario_file(VACUUM)
    out = tmp_path / 'ldos.csv'
    assert run(['ldos', '-c', path, '--points', '3', '--workers', '1', '--out', str(out)]) == EXIT_OK

    raw = out.read_bytes()
    assert b'\r' not in raw
    lines = raw.decode().splitlines()
    header = [line for line in lines if line.startswith('# ')]
    assert header[0] == f'# scenario_hash: {scenario_hash(parse_scenario(VACUUM))}'
    assert '# converged: true' in header

    body = [line for line in lines if not line.startswith('#')]
    assert body[0] == 'omega_rad_s,g_perp1,g_perp2,g_par,g_g1,g_g2,ldos_e,ldos_h,ldos_total,converged'
    assert len(body) == 4
    cells = body[1].split(',')
    assert float(cells[1]) == pytest.approx(4 / 3, abs=1e-9)
    assert cells[-1] == 'true'


def test_ldos_json(scenario_file, capsys):
    path = scenario_file(VACUUM)
    assert run(['ldos', '-c', path, '--points', '2', '--workers', '1', '--format', 'json']) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document['manifest']['converged'] is True
    assert document['manifest']['subcommand'] == 'ldos'
    assert len(document['rows']) == 2
    assert document['rows'][0][3] == pytest.approx(2 / 3, abs=1e-9)


def test_non_converged_result_is_kept(scenario_file, tmp_path, monkeypatch):
    monkeypatch.setattr(FluctuationModel, 'radiated_power', lambda self: ChannelBreakdown(
        magnetic=1e-15, electric=0.0, total=1e-15, converged=False, omega_max=1e11, evaluations=10))
    out = tmp_path / 'power.csv'
    assert run(['power', '-c', scenario_file(VACUUM), '--out', str(out)]) == EXIT_NOT_CONVERGED
    text = out.read_text()
    assert '# converged: false' in text
    assert text.rstrip().endswith(',false')


def test_numerical_failure_exit_code(scenario_file, monkeypatch):
    def fail(self):
        raise SingularBoundaryError('boundary matrix is singular')

    monkeypatch.setattr(FluctuationModel, 'radiated_power', fail)
    assert run(['power', '-c', scenario_file(VACUUM)]) == EXIT_NOT_CONVERGED


def test_unexpected_failure_exit_code(scenario_file, monkeypatch):
    def fail(self):
        raise RuntimeError('boom')

    monkeypatch.setattr(FluctuationModel, 'radiated_power', fail)
    assert run(['power', '-c', scenario_file(VACUUM)]) == EXIT_FAILURE


def test_log_grid_snaps_anchors():
    grid = log_grid(1.0, 1000.0, 50, anchors=[123.4, 5000.0])
    assert 123.4 in grid
    assert grid[0] == 1.0 and grid[-1] == pytest.approx(1000.0)
    assert np.all(np.diff(grid) > 0)
    with pytest.raises(UsageError):
        log_grid(10.0, 1.0, 5)
    with pytest.raises(UsageError):
        log_grid(1.0, 10.0, 0)


def test_csv_rendering():
    manifest = RunManifest(scenario_hash='abc', subcommand='power', tolerances=dict(rel_tol=1e-4),
                           convergence=[True, False])
    text = render_csv(manifest, Table(columns=['x', 'ok'], rows=[[0.1, True], [2, False]]))
    lines = text.splitlines()
    assert lines[0] == '# scenario_hash: abc'
    assert '# rel_tol: 0.0001' in lines
    assert '# non_converged_rows: 1' in lines
    assert lines[-3:] == ['x,ok', '0.1,true', '2,false']


def _body(path):
    lines = [line for line in path.read_text().splitlines() if not line.startswith('#')]
    return lines[0].split(','), [line.split(',') for line in lines[1:]]


def test_failed_spectrum_point_keeps_the_sweep(scenario_file, tmp_path, monkeypatch):
    exact = FluctuationModel.spectral_sample
    calls = []

    def third_fails(self, omega):
        calls.append(omega)
        if len(calls) == 3:
            raise SingularBoundaryError('boundary matrix is singular')
        return exact(self, omega)

    monkeypatch.setattr(FluctuationModel, 'spectral_sample', third_fails)
    out = tmp_path / 'spectrum.csv'
    assert run(['spectrum', '-c', scenario_file(VACUUM), '--points', '5', '--workers', '1',
                '--out', str(out)]) == EXIT_NOT_CONVERGED

    text = out.read_text()
    assert '# converged: false' in text
    assert '# non_converged_rows: 1' in text
    columns, rows = _body(out)
    assert len(rows) == len(calls)
    failed = rows[2]
    assert float(failed[0]) == pytest.approx(calls[2] / (2 * math.pi))
    assert all(math.isnan(float(cell)) for cell in failed[1:-1])
    assert failed[-1] == 'false'
    assert [row[-1] for row in rows[:2] + rows[3:]] == ['true'] * (len(rows) - 1)


def test_ldos_rows_carry_their_own_convergence(scenario_file, tmp_path, monkeypatch):
    exact = greens.greens_tensor
    first = 0.1 * GHZ_TO_RAD_S

    def first_point_flagged(omega, *args, **kwargs):
        result = exact(omega, *args, **kwargs)
        return dataclasses.replace(result, converged=False) if math.isclose(omega, first) else result

    monkeypatch.setattr(greens, 'greens_tensor', first_point_flagged)
    out = tmp_path / 'ldos.csv'
    assert run(['ldos', '-c', scenario_file(VACUUM), '--points', '2', '--workers', '1',
                '--out', str(out)]) == EXIT_NOT_CONVERGED
    _, rows = _body(out)
    assert [row[-1] for row in rows] == ['false', 'true']
    assert float(rows[1][1]) == pytest.approx(4 / 3, abs=1e-9)


def test_failed_observable_point_is_kept(scenario_file, tmp_path, monkeypatch):
    def fail(scenario, workers=1):
        raise RootFindingError('no bracket for the slab modes')

    monkeypatch.setattr(app, 'observable_point', fail)
    out = tmp_path / 'observables.csv'
    assert run(['observables', '-c', scenario_file(VACUUM), '--workers', '1',
                '--out', str(out)]) == EXIT_NOT_CONVERGED
    columns, rows = _body(out)
    assert columns[-2:] == ['runaway', 'converged']
    assert len(rows) == 1
    assert float(rows[0][1]) == pytest.approx(300.0)
    assert math.isnan(float(rows[0][2]))
    assert rows[0][-2:] == ['false', 'false']
