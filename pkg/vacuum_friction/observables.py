import dataclasses
from typing import Optional
import logging
import math

from scipy import constants

from .fluctuation import FluctuationModel
from .greens import GreensCalculator
from .quadrature import NoSignChangeError, solve_root_bracketed
from .reflection import reflection_for_scenario
from .scenario import Scenario

_logger = logging.getLogger('vacfric.observables')

MAX_BRACKET_EXPANSIONS = 60


class RunawayHeatingError(Exception):
    pass


class NoBalanceError(Exception):
    pass


@dataclasses.dataclass(frozen=True)
class BalanceSpeed:
    omega_b: float
    omega_0: float
    ratio: float
    converged: bool = True


@dataclasses.dataclass(frozen=True)
class ObservablePoint:
    distance_m: float
    balance_speed_ratio: float
    balance_speed_rad_s: float
    drag_only_speed_rad_s: float
    stopping_time_s: float
    balance_temperature_K: float
    runaway: bool = False
    converged: bool = True


def drag_torque(omega: float, pressure: float, temperature: float, gas_mass: float, radius: float,
                drag_constant: float = 1.497) -> float:
    """
    Free-molecular gas drag on a sphere spinning at `omega`:
    (2 a⁴ p / C) sqrt(2π m / k_B T) Ω.
    """
    if pressure == 0:
        return 0.0
    if temperature <= 0:
        raise ValueError(f'gas drag needs a positive gas temperature, got {temperature}')
    return 2 * radius ** 4 * pressure / drag_constant * math.sqrt(
        2 * math.pi * gas_mass / (constants.k * temperature)) * omega


def scenario_drag_torque(scenario: Scenario, omega: Optional[float] = None, pressure: Optional[float] = None) -> float:
    return drag_torque(
        scenario.rotation_rate_rad_s if omega is None else omega,
        scenario.gas_pressure_Pa if pressure is None else pressure,
        scenario.environment_temperature_K,
        scenario.gas_molecular_mass_kg,
        scenario.sphere_radius_m,
        scenario.observables.drag_constant,
    )


def moment_of_inertia(radius: float, density: float) -> float:
    mass = 4 / 3 * math.pi * radius ** 3 * density
    return 0.4 * mass * radius ** 2


class ObservablesCalculator:
    """
    Laboratory observables for one interface set-up. The Green's tensors
    are shared across every rotation rate and sphere temperature visited
    by the root finds.
    """

    def __init__(self, scenario: Scenario, workers: int = 1):
        self.scenario = scenario
        self.workers = workers
        self.greens = GreensCalculator.for_scenario(scenario, reflection_for_scenario(scenario))
        self.converged = True

    def _model(self, scenario: Scenario) -> FluctuationModel:
        return FluctuationModel(scenario, workers=self.workers, greens=self.greens)

    def vacuum_torque(self, omega: float) -> float:
        if omega == 0 and self.scenario.sphere_temperature_K == self.scenario.environment_temperature_K:
            return 0.0
        result = self._model(self.scenario.with_rotation(omega)).torque_z()
        self.converged = self.converged and result.converged
        return result.total

    def balance_speed(self, laser_torque: Optional[float] = None) -> BalanceSpeed:
        scenario = self.scenario
        laser = laser_torque if laser_torque is not None else scenario.observables.laser_torque
        if laser <= 0:
            raise ValueError(f'laser torque must be positive, got {laser}')
        tol = scenario.numerics.rel_tol

        drag_per_rad = scenario_drag_torque(scenario, omega=1.0)

        def imbalance(omega):
            return laser - drag_per_rad * omega - abs(self.vacuum_torque(omega))

        if drag_per_rad > 0:
            omega_0 = laser / drag_per_rad
            hi = omega_0
            if imbalance(hi) >= 0:
                # vacuum torque below the rounding of laser - drag·Ω₀
                _logger.info(f'vacuum friction negligible; balance speed is the drag-only {omega_0:.6g} rad/s')
                return BalanceSpeed(omega_b=omega_0, omega_0=omega_0, ratio=1.0, converged=self.converged)
        else:
            omega_0 = math.inf
            hi = max(scenario.rotation_rate_rad_s, 1.0)
            for _ in range(MAX_BRACKET_EXPANSIONS):
                if imbalance(hi) <= 0:
                    break
                hi *= 2
            else:
                raise NoBalanceError(f'vacuum friction never balances the laser torque below {hi:.6g} rad/s')

        try:
            omega_b = solve_root_bracketed(imbalance, 0.0, hi, tol)
        except NoSignChangeError as e:
            raise NoBalanceError(str(e))

        ratio = omega_b / omega_0 if math.isfinite(omega_0) else math.nan
        _logger.info(f'balance speed {omega_b:.6g} rad/s, drag-only {omega_0:.6g} rad/s, ratio {ratio:.6g}')
        return BalanceSpeed(omega_b=omega_b, omega_0=omega_0, ratio=ratio, converged=self.converged)

    def stopping_time(self) -> float:
        scenario = self.scenario
        omega = scenario.rotation_rate_rad_s
        if omega <= 0:
            raise ValueError('stopping time needs a spinning sphere')

        pressure = scenario.observables.stopping_pressure_pa
        drag = scenario_drag_torque(scenario, pressure=pressure)
        total = drag + abs(self.vacuum_torque(omega))
        inertia = moment_of_inertia(scenario.sphere_radius_m, scenario.sphere_density)
        if total == 0:
            _logger.warning('no torque acts on the sphere; stopping time is infinite')
            return math.inf

        tau = inertia * omega / total
        _logger.info(f'stopping time {tau:.6g} s (drag {drag:.3g}, total {total:.3g} N m)')
        return tau

    def balance_temperature(self) -> float:
        """
        Sphere temperature at which the radiated power equals the work the
        drive does against vacuum friction, for a sphere held at Ω.
        """
        scenario = self.scenario
        t0 = scenario.environment_temperature_K
        omega = scenario.rotation_rate_rad_s
        if omega == 0:
            return t0

        def net_power(t1):
            model = self._model(dataclasses.replace(scenario, sphere_temperature_K=t1))
            power = model.radiated_power()
            torque = model.torque_z()
            self.converged = self.converged and power.converged and torque.converged
            return power.total - abs(torque.total) * omega

        low = net_power(t0)
        if low >= 0:
            return t0
        hi = t0 + scenario.observables.max_temperature_rise_k
        if net_power(hi) < 0:
            raise RunawayHeatingError(f'no balance temperature below {hi:.6g} K')

        t_balance = solve_root_bracketed(net_power, t0, hi, scenario.numerics.rel_tol)
        _logger.info(f'balance temperature {t_balance:.6g} K at T0 = {t0:.6g} K')
        return t_balance


def balance_speed(scenario: Scenario, laser_torque: Optional[float] = None, workers: int = 1) -> BalanceSpeed:
    return ObservablesCalculator(scenario, workers).balance_speed(laser_torque)


def stopping_time(scenario: Scenario, workers: int = 1) -> float:
    return ObservablesCalculator(scenario, workers).stopping_time()


def balance_temperature(scenario: Scenario, workers: int = 1) -> float:
    return ObservablesCalculator(scenario, workers).balance_temperature()


def observable_point(scenario: Scenario, workers: int = 1) -> ObservablePoint:
    calculator = ObservablesCalculator(scenario, workers)
    speed = calculator.balance_speed()
    tau = calculator.stopping_time()
    try:
        t_balance = calculator.balance_temperature()
        runaway = False
    except RunawayHeatingError as e:
        _logger.warning(f'd = {scenario.distance_m:.6g} m: {e}')
        t_balance = math.nan
        runaway = True
    return ObservablePoint(
        distance_m=scenario.distance_m,
        balance_speed_ratio=speed.ratio,
        balance_speed_rad_s=speed.omega_b,
        drag_only_speed_rad_s=speed.omega_0,
        stopping_time_s=tau,
        balance_temperature_K=t_balance,
        runaway=runaway,
        converged=calculator.converged,
    )
