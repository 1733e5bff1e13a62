import argparse
import dataclasses
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, Iterable, List, Optional, Sequence
import json
import logging
import math
import os
import sys
import time

import numpy as np
from scipy import constants

from .config import Config, LoggingConfig
from .fluctuation import FluctuationModel, enhancement_ratio
from .greens import GreensCalculator
from .logger import setup_logging
from .materials import DIPOLE_SIZE_LIMIT, BranchPointError, DipoleApproximationError
from .observables import NoBalanceError, observable_point
from .quadrature import NonDecayingIntegrandError
from .reflection import RootFindingError, SingularBoundaryError, reflection_for_scenario
from .scenario import GHZ_TO_RAD_S, Scenario, ScenarioError, render_scenario, scenario_hash
from .utils import SentryWrapper, atomic_write, validate_output_path
from .version import VERSION

_logger = logging.getLogger('vacfric.app')

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_NOT_CONVERGED = 4

INVALID_INPUT_ERRORS = (ScenarioError, DipoleApproximationError, BranchPointError, NoBalanceError)
NUMERICAL_ERRORS = (RootFindingError, SingularBoundaryError, NonDecayingIntegrandError)

SPECTRUM_COLUMNS = ['omega_hz', 'gamma_rad_pos', 'gamma_rad_neg', 'photon_rate_density', 'gamma_torque',
                    'power_density', 'converged']
LDOS_COLUMNS = ['omega_rad_s', 'g_perp1', 'g_perp2', 'g_par', 'g_g1', 'g_g2', 'ldos_e', 'ldos_h', 'ldos_total',
                'converged']
OBSERVABLE_COLUMNS = ['d_m', 't0_k', 'omega_b_ratio', 'omega_b_rad_s', 'omega_0_rad_s', 'stopping_time_s', 't_balance_k',
                      'runaway', 'converged']


class UsageError(Exception):
    pass


@dataclasses.dataclass
class RunManifest:
    scenario_hash: str
    subcommand: str
    tolerances: Dict[str, float]
    wall_time_s: float = 0.0
    convergence: List[bool] = dataclasses.field(default_factory=list)
    version: str = VERSION

    @property
    def converged(self) -> bool:
        return all(self.convergence)

    def header_lines(self) -> List[str]:
        lines = [
            f'# scenario_hash: {self.scenario_hash}',
            f'# subcommand: {self.subcommand}',
        ]
        lines += [f'# {key}: {value!r}' for key, value in self.tolerances.items()]
        lines += [
            f'# wall_time_s: {self.wall_time_s!r}',
            f'# converged: {"true" if self.converged else "false"}',
            f'# non_converged_rows: {sum(1 for flag in self.convergence if not flag)}',
            f'# version: {self.version}',
        ]
        return lines

    def as_dict(self) -> Dict:
        return dict(
            scenario_hash=self.scenario_hash,
            subcommand=self.subcommand,
            tolerances=self.tolerances,
            wall_time_s=self.wall_time_s,
            converged=self.converged,
            convergence=self.convergence,
            version=self.version,
        )


@dataclasses.dataclass
class Table:
    columns: List[str]
    rows: List[List] = dataclasses.field(default_factory=list)


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def render_csv(manifest: RunManifest, table: Table) -> str:
    lines = manifest.header_lines()
    lines.append(','.join(table.columns))
    lines += [','.join(_format_cell(v) for v in row) for row in table.rows]
    return '\n'.join(lines) + '\n'


def render_json(manifest: RunManifest, table: Table) -> str:
    rows = [[v if isinstance(v, (bool, str)) else float(v) for v in row] for row in table.rows]
    return json.dumps(dict(manifest=manifest.as_dict(), columns=table.columns, rows=rows), indent=2) + '\n'


def log_grid(lo: float, hi: float, points: int, anchors: Iterable[float] = ()) -> np.ndarray:
    """Log-spaced grid with the grid point nearest to each anchor moved onto it."""
    if points < 1:
        raise UsageError('--points must be >= 1')
    if not 0 < lo < hi:
        raise UsageError(f'frequency range [{lo:g}, {hi:g}] must be positive and increasing')
    grid = np.geomspace(lo, hi, points)
    for anchor in anchors:
        if lo < anchor < hi:
            grid[int(np.argmin(np.abs(np.log(grid / anchor))))] = anchor
    return np.unique(grid)


# Per-process state for sweep workers
_worker_model: Optional[FluctuationModel] = None
_worker_greens: Optional[GreensCalculator] = None


def _init_spectrum_worker(scenario: Scenario):
    global _worker_model
    _worker_model = FluctuationModel(scenario)


def _failed_row(columns: Sequence[str], lead: List, where: str, e: Exception) -> List:
    """Grid coordinates followed by NaN results and a false convergence flag."""
    _logger.error(f'numerical failure at {where}, {type(e).__name__}: {e}')
    row = lead + [math.nan] * (len(columns) - len(lead) - 1) + [False]
    if columns[-2] == 'runaway':
        row[-2] = False
    return row


def _spectrum_row(omega: float) -> List:
    try:
        sample = _worker_model.spectral_sample(omega)
    except NUMERICAL_ERRORS as e:
        return _failed_row(SPECTRUM_COLUMNS, [omega / (2 * math.pi)], f'{omega:.6g} rad/s', e)
    return [sample.omega / (2 * math.pi), sample.gamma_rad, sample.gamma_rad_neg, sample.photon_rate_density,
            sample.gamma_torque, sample.power_density, sample.converged]


def _init_ldos_worker(scenario: Scenario):
    global _worker_greens
    _worker_greens = GreensCalculator.for_scenario(scenario, reflection_for_scenario(scenario))


def _ldos_row(omega: float) -> List:
    try:
        weights = _worker_greens.weights(omega)
        density = _worker_greens.ldos(omega)
    except NUMERICAL_ERRORS as e:
        return _failed_row(LDOS_COLUMNS, [omega], f'{omega:.6g} rad/s', e)
    return [omega, *weights.as_tuple(), density.electric, density.magnetic, density.total,
            _worker_greens.converged_at(omega)]


def _observable_row(scenario: Scenario) -> List:
    d, t0 = scenario.distance_m, scenario.environment_temperature_K
    try:
        point = observable_point(scenario)
    except NUMERICAL_ERRORS as e:
        return _failed_row(OBSERVABLE_COLUMNS, [d, t0], f'd = {d:.6g} m, T0 = {t0:.6g} K', e)
    return [d, t0, point.balance_speed_ratio, point.balance_speed_rad_s, point.drag_only_speed_rad_s,
            point.stopping_time_s, point.balance_temperature_K, point.runaway, point.converged]


def _sweep(task: Callable, items: Sequence, workers: int,
           initializer: Optional[Callable] = None, initargs=()) -> List:
    """Maps `task` over `items` in grid order, in worker processes when workers > 1."""
    if workers <= 1 or len(items) <= 1:
        if initializer is not None:
            initializer(*initargs)
        return [task(item) for item in items]

    with ProcessPoolExecutor(max_workers=min(workers, len(items)), initializer=initializer,
                             initargs=initargs) as executor:
        return list(executor.map(task, items))


class App(object):

    def __init__(self):
        self.sentry = None
        self.config = None
        self.scenario: Optional[Scenario] = None

    def _tolerances(self) -> Dict[str, float]:
        numerics = self.scenario.numerics
        return dict(rel_tol=numerics.rel_tol, abs_tol=numerics.abs_tol, kappa_cutoff=numerics.kappa_cutoff)

    def spectrum(self, args) -> Table:
        scenario = self.scenario
        centre = scenario.rotation_rate_rad_s or scenario.sphere_larmor_rad_s or scenario.slab_larmor_rad_s
        if centre <= 0:
            raise UsageError('spectrum needs a rotating sphere or a biased material to centre the grid on')
        anchors = [scenario.sphere_larmor_rad_s + centre, abs(scenario.sphere_larmor_rad_s - centre),
                   scenario.slab_larmor_rad_s]
        grid = log_grid(args.omega_min_ratio * centre, args.omega_max_ratio * centre, args.points, anchors)

        rows = _sweep(_spectrum_row, list(grid), args.workers, _init_spectrum_worker, (scenario,))
        return Table(
            columns=SPECTRUM_COLUMNS,
            rows=rows,
        )

    def power(self, args) -> Table:
        result = FluctuationModel(self.scenario, workers=args.workers).radiated_power()
        return Table(
            columns=['power_w', 'magnetic_w', 'electric_w', 'omega_max_rad_s', 'evaluations', 'converged'],
            rows=[[result.total, result.magnetic, result.electric, result.omega_max, result.evaluations,
                   result.converged]],
        )

    def torque(self, args) -> Table:
        model = FluctuationModel(self.scenario, workers=args.workers)
        m_z = model.torque_z()
        off_axis = model.torque_xy()
        ratio = enhancement_ratio(self.scenario, args.workers) if self.scenario.interface_kind != 'none' else 1.0
        return Table(
            columns=['m_z', 'm_z_magnetic', 'm_z_electric', 'm_x', 'm_y', 'free_space_enhancement',
                     'omega_max_rad_s', 'converged'],
            rows=[[m_z.total, m_z.magnetic, m_z.electric, off_axis.m_x, off_axis.m_y, ratio, m_z.omega_max,
                   m_z.converged and off_axis.converged]],
        )

    def ldos(self, args) -> Table:
        grid = log_grid(args.omega_min_ghz * GHZ_TO_RAD_S, args.omega_max_ghz * GHZ_TO_RAD_S, args.points)
        rows = _sweep(_ldos_row, list(grid), args.workers, _init_ldos_worker, (self.scenario,))
        return Table(
            columns=LDOS_COLUMNS,
            rows=rows,
        )

    def observables(self, args) -> Table:
        scenario = self.scenario
        distances = scenario.observables.distances_m or (scenario.distance_m,)
        temperatures = scenario.observables.lab_temperatures_k or (scenario.environment_temperature_K,)
        points = [
            dataclasses.replace(scenario, distance_m=d, environment_temperature_K=t0, sphere_temperature_K=t0)
            for d in distances for t0 in temperatures
        ]
        rows = _sweep(_observable_row, points, args.workers)
        return Table(
            columns=OBSERVABLE_COLUMNS,
            rows=rows,
        )

    def validate(self, args) -> str:
        scenario = self.scenario
        if scenario.sphere_material == 'metal':
            # the thermal tail is clamped at the dipole limit during integration; the rotation-driven band is not
            rotation = scenario.rotation_rate_rad_s
            omega = max(10 * rotation, 5 * scenario.slab_larmor_rad_s) + rotation
            size = omega * scenario.sphere_radius_m / constants.c
            if size >= DIPOLE_SIZE_LIMIT:
                raise DipoleApproximationError(
                    f'k0 a = {size:.4g} at {omega:.6g} rad/s leaves the dipole regime (limit {DIPOLE_SIZE_LIMIT})')
        return render_scenario(scenario)

    def _load(self, args):
        if not os.path.isfile(args.config_path):
            raise UsageError(f'config file not found: {args.config_path}')
        if args.out:
            try:
                validate_output_path(args.out)
            except ValueError as e:
                raise UsageError(f'invalid --out path {args.out}: {e}')

        config = Config(args.config_path)
        config.load_from_config_file()
        self.config = config
        self.sentry = SentryWrapper(config=config)
        setup_logging(config.logging, log_path=args.log_path, debug=args.debug)
        _logger.debug(f'vacuum-friction config:\n{config.as_dict()}')

        scenario = config.load_scenario()
        if args.tol is not None:
            if not 0 < args.tol < 1:
                raise UsageError('--tol must lie in (0, 1)')
            scenario = dataclasses.replace(scenario, numerics=dataclasses.replace(scenario.numerics, rel_tol=args.tol))
        self.scenario = scenario

    def _emit(self, args, text: str):
        if args.out:
            atomic_write(args.out, text)
            _logger.info(f'wrote {args.out}')
        else:
            sys.stdout.write(text)
            sys.stdout.flush()

    def start(self, args) -> int:
        setup_logging(LoggingConfig(path=''), log_path=args.log_path, debug=args.debug)
        try:
            self._load(args)
            _logger.info(f'vacuum-friction {VERSION}: {args.subcommand} for scenario {scenario_hash(self.scenario)[:12]}')

            started = time.monotonic()
            if args.subcommand == 'validate':
                rendering = self.validate(args)
                digest = scenario_hash(self.scenario)
                if args.format == 'json':
                    text = json.dumps(dict(scenario_hash=digest, rendering=rendering, version=VERSION), indent=2) + '\n'
                else:
                    text = f'# scenario_hash: {digest}\n{rendering}'
                self._emit(args, text)
                return EXIT_OK

            table = getattr(self, args.subcommand)(args)
            manifest = RunManifest(
                scenario_hash=scenario_hash(self.scenario),
                subcommand=args.subcommand,
                tolerances=self._tolerances(),
                wall_time_s=time.monotonic() - started,
                convergence=[bool(row[-1]) for row in table.rows],
            )
            self._emit(args, render_json(manifest, table) if args.format == 'json' else render_csv(manifest, table))

            if not manifest.converged:
                _logger.warning(f'{args.subcommand}: some results did not converge; output kept with flags')
                return EXIT_NOT_CONVERGED
            return EXIT_OK

        except UsageError as e:
            _logger.error(str(e))
            return EXIT_USAGE
        except INVALID_INPUT_ERRORS as e:
            _logger.error(f'{type(e).__name__}: {e}')
            return EXIT_INVALID
        except NUMERICAL_ERRORS as e:
            _logger.error(f'numerical failure, {type(e).__name__}: {e}')
            return EXIT_NOT_CONVERGED
        except Exception:
            if self.sentry:
                self.sentry.captureException()
            else:
                _logger.exception('')
            return EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '-c', '--config', dest='config_path', required=True,
        help='Path to scenario file (cfg)'
    )
    common.add_argument(
        '--out', dest='out', required=False,
        help='Write results to this file instead of stdout'
    )
    common.add_argument(
        '--format', dest='format', choices=('csv', 'json'), default='csv',
        help='Output format'
    )
    common.add_argument(
        '--tol', dest='tol', type=float, required=False,
        help='Override numerics.rel_tol'
    )
    common.add_argument(
        '--workers', dest='workers', type=int, default=os.cpu_count() or 1,
        help='Worker count for sweeps and frequency integrals'
    )
    common.add_argument(
        '-l', '--log-file', dest='log_path', required=False,
        help='Path to log file'
    )
    common.add_argument(
        '-d', '--debug', dest='debug', required=False,
        action='store_true', default=False,
        help='Enable debug logging'
    )

    parser = argparse.ArgumentParser(prog='vacuum-friction')
    subparsers = parser.add_subparsers(dest='subcommand', required=True)

    spectrum = subparsers.add_parser('spectrum', parents=[common], help='Radiation spectrum on a frequency grid')
    spectrum.add_argument('--points', type=int, default=400)
    spectrum.add_argument('--omega-min-ratio', type=float, default=1e-3, help='Grid start as a multiple of Ω')
    spectrum.add_argument('--omega-max-ratio', type=float, default=1e2, help='Grid end as a multiple of Ω')

    subparsers.add_parser('power', parents=[common], help='Radiated power')
    subparsers.add_parser('torque', parents=[common], help='Vacuum frictional torque')

    ldos = subparsers.add_parser('ldos', parents=[common], help='Green weights and LDOS on a frequency grid')
    ldos.add_argument('--points', type=int, default=200)
    ldos.add_argument('--omega-min-ghz', type=float, default=0.1)
    ldos.add_argument('--omega-max-ghz', type=float, default=100.0)

    subparsers.add_parser('observables', parents=[common], help='Balance speed, stopping time, balance temperature')
    subparsers.add_parser('validate', parents=[common], help='Check a scenario and print its canonical form')
    return parser


def run(argv: Sequence[str]) -> int:
    try:
        args = build_parser().parse_args(list(argv))
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    if args.workers < 1:
        sys.stderr.write('--workers must be >= 1\n')
        return EXIT_USAGE
    return App().start(args)


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
