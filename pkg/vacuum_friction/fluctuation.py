import dataclasses
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple
import logging
import math

import numpy as np
from scipy import constants

from .greens import GreensCalculator
from .materials import (
    DIPOLE_SIZE_LIMIT, ELECTRIC, MAGNETIC, PolarizabilityTensor, clausius_mossotti, drude_permittivity,
    metal_sphere_polarizability, sphere_polarizability_gyromagnetic, yig_permeability,
)
from .quadrature import IntegralResult, integrate_finite
from .reflection import ReflectionProvider, reflection_for_scenario
from .scenario import Scenario, omega_n, thermal_occupation

_logger = logging.getLogger('vacfric.fluctuation')

WINDOW_CHANGE_LIMIT = 1e-3
THERMAL_WINDOW = 10.0
# dielectric loss is ramped linearly to zero below this frequency so Im ε stays odd and continuous
DIELECTRIC_LOSS_FLOOR = 2 * math.pi * 1e6
SLOPE_STEP = 1e-6


@dataclasses.dataclass(frozen=True)
class SpectralSample:
    omega: float
    gamma_rad: float
    gamma_rad_neg: float
    gamma_torque: float
    photon_rate_density: float
    power_density: float
    converged: bool = True


@dataclasses.dataclass(frozen=True)
class ChannelBreakdown:
    magnetic: float
    electric: float
    total: float
    converged: bool
    omega_max: float
    evaluations: int = 0


@dataclasses.dataclass(frozen=True)
class OffAxisTorque:
    m_x: float
    m_y: float
    converged: bool
    omega_max: float
    evaluations: int = 0


class SphereResponse:
    """Rest-frame polarizabilities of the sphere, for signed frequencies."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.radius = scenario.sphere_radius_m
        self.material = scenario.sphere_material

    def _yig_dielectric(self, omega: float) -> complex:
        eps = self.scenario.yig.eps_rel
        if omega < DIELECTRIC_LOSS_FLOOR:
            eps = complex(eps.real, eps.imag * omega / DIELECTRIC_LOSS_FLOOR)
        return eps

    def _at_positive(self, omega: float, channel: str) -> PolarizabilityTensor:
        scenario = self.scenario
        if self.material == 'yig':
            if channel == MAGNETIC:
                mu = yig_permeability(omega, scenario.sphere_larmor_rad_s, scenario.omega_m_rad_s,
                                      scenario.sphere_damping)
                return sphere_polarizability_gyromagnetic(omega, self.radius, mu)
            return PolarizabilityTensor.isotropic(clausius_mossotti(self.radius, self._yig_dielectric(omega)), ELECTRIC)

        eps = drude_permittivity(omega, scenario.metal.omega_p, scenario.metal.gamma)
        electric, magnetic = metal_sphere_polarizability(omega, self.radius, eps)
        return magnetic if channel == MAGNETIC else electric

    def polarizability(self, omega: float, channel: str = MAGNETIC) -> PolarizabilityTensor:
        if omega < 0:
            return self._at_positive(-omega, channel).conjugate()
        return self._at_positive(omega, channel)

    def dipole_limit(self) -> float:
        """Largest |ω| the small-sphere metal response is valid at."""
        if self.material == 'yig':
            return math.inf
        return DIPOLE_SIZE_LIMIT * constants.c / self.radius


def _dissipative(alpha: PolarizabilityTensor) -> float:
    return alpha.alpha_perp.imag - alpha.alpha_g.real


def _reactive(alpha: PolarizabilityTensor) -> float:
    return alpha.alpha_perp.real + alpha.alpha_g.imag


class FluctuationModel:
    """
    Spectral densities and frequency integrals for one scenario. Green's
    tensors are cached per frequency, so the power, the torque and the
    spectrum of one model share their expensive part.
    """

    def __init__(self, scenario: Scenario, refl: Optional[ReflectionProvider] = None, workers: int = 1,
                 greens: Optional[GreensCalculator] = None):
        self.scenario = scenario
        if greens is not None:
            # Green's tensors depend on the interface only, not on Ω or T₁
            self.refl = greens.refl
            self.greens = greens
        else:
            self.refl = refl if refl is not None else reflection_for_scenario(scenario)
            self.greens = GreensCalculator.for_scenario(scenario, self.refl)
        self.sphere = SphereResponse(scenario)
        self.workers = max(int(workers), 1)

        self.channels = [MAGNETIC]
        if scenario.numerics.electric_channel:
            self.channels.append(ELECTRIC)

        self.rotation = scenario.rotation_rate_rad_s
        self.t_sphere = scenario.sphere_temperature_K
        self.t_env = scenario.environment_temperature_K

    def _slope_scale(self) -> float:
        return max(self.rotation, self.scenario.sphere_larmor_rad_s, DIELECTRIC_LOSS_FLOOR)

    def _loss_times_occupation(self, x: float, channel: str) -> float:
        """C(x)·n₁(x) with C = Im α⊥ - Re α_g, continued through x = 0."""
        if x == 0:
            h = SLOPE_STEP * self._slope_scale()
            slope = (_dissipative(self.sphere.polarizability(h, channel))
                     - _dissipative(self.sphere.polarizability(-h, channel))) / (2 * h)
            return slope * omega_n(0.0, self.t_sphere)
        return _dissipative(self.sphere.polarizability(x, channel)) * thermal_occupation(x, self.t_sphere)

    def _loss(self, x: float, channel: str) -> float:
        if x == 0:
            return 0.0
        return _dissipative(self.sphere.polarizability(x, channel))

    def _gamma_terms(self, omega: float, channel: str) -> Tuple[float, float]:
        """(rotating-plane term, rotation-axis term) of Γ(ω) for one channel."""
        g = self.greens.tensor(omega, channel).lab
        minus = omega - self.rotation
        n0 = thermal_occupation(omega, self.t_env)

        plane = g[0, 0].imag + g[1, 1].imag + g[0, 1].real - g[1, 0].real
        first = plane * (self._loss_times_occupation(minus, channel) - self._loss(minus, channel) * n0)

        alpha_par = self.sphere.polarizability(omega, channel).alpha_par
        second = g[2, 2].imag * alpha_par.imag * (thermal_occupation(omega, self.t_sphere) - n0)
        return first / math.pi, second / math.pi

    def gamma_rad(self, omega: float, channel: Optional[str] = None) -> float:
        channels = [channel] if channel else self.channels
        return sum(sum(self._gamma_terms(omega, c)) for c in channels)

    def gamma_torque(self, omega: float, channel: Optional[str] = None) -> float:
        channels = [channel] if channel else self.channels
        return sum(self._gamma_terms(omega, c)[0] for c in channels)

    def spectral_sample(self, omega: float) -> SpectralSample:
        if omega <= 0:
            raise ValueError(f'spectral samples are taken at omega > 0, got {omega}')
        pos = self.gamma_rad(omega)
        neg = self.gamma_rad(-omega)
        photons = pos - neg
        return SpectralSample(
            omega=omega,
            gamma_rad=pos,
            gamma_rad_neg=neg,
            gamma_torque=self.gamma_torque(omega),
            photon_rate_density=photons,
            power_density=constants.hbar * omega * photons,
            converged=self.greens.converged_at(omega, self.channels),
        )

    def _power_integrand(self, omega: float) -> np.ndarray:
        values = []
        for channel in (MAGNETIC, ELECTRIC):
            if channel not in self.channels:
                values.append(0.0)
                continue
            values.append(constants.hbar * omega * (self.gamma_rad(omega, channel) - self.gamma_rad(-omega, channel)))
        return np.array(values)

    def _torque_integrand(self, omega: float) -> np.ndarray:
        values = []
        for channel in (MAGNETIC, ELECTRIC):
            if channel not in self.channels:
                values.append(0.0)
                continue
            values.append(-constants.hbar * (self.gamma_torque(omega, channel) + self.gamma_torque(-omega, channel)))
        return np.array(values)

    def _off_axis_integrand(self, omega: float) -> np.ndarray:
        return self._off_axis_density(omega) + self._off_axis_density(-omega)

    def _off_axis_density(self, omega: float) -> np.ndarray:
        g = self.greens.tensor(omega, MAGNETIC).lab
        minus = omega - self.rotation
        alpha = self.sphere.polarizability(omega, MAGNETIC)
        if minus == 0:
            # C is odd and the reactive part even in the rest-frame frequency
            h = SLOPE_STEP * self._slope_scale()
            dissipative = 0.0
            reactive = 0.5 * (_reactive(self.sphere.polarizability(h, MAGNETIC))
                              + _reactive(self.sphere.polarizability(-h, MAGNETIC)))
        else:
            alpha_minus = self.sphere.polarizability(minus, MAGNETIC)
            dissipative = _dissipative(alpha_minus)
            reactive = _reactive(alpha_minus)
        # (2 n₁(ω⁻) + 1) C(ω⁻), finite through ω⁻ = 0
        loss_occupied = 2 * self._loss_times_occupation(minus, MAGNETIC) + self._loss(minus, MAGNETIC)

        n1 = thermal_occupation(omega, self.t_sphere)
        n0 = thermal_occupation(omega, self.t_env)
        xx, xy, xz = g[0]
        yx, yy, yz = g[1]
        zx, zy, zz = g[2]

        m_x = (
            loss_occupied * (2 * zx.imag + 2 * zy.real)
            - 4 * (n1 + 1) * alpha.alpha_par.imag * yz.real
            + (2 * n0 + 1) * (
                reactive * (xz.real - zx.real + yz.imag + zy.imag)
                + dissipative * (-xz.imag - zx.imag + yz.real - zy.real))
            + (n0 + 1) * (
                -2 * alpha.alpha_par.real * (zy.imag + yz.imag)
                + 2 * alpha.alpha_par.imag * (-zy.real + yz.real))
        )
        m_y = (
            loss_occupied * (-2 * zx.real + 2 * zy.imag)
            + 4 * (n1 + 1) * alpha.alpha_par.imag * xz.real
            - (2 * n0 + 1) * (
                reactive * (xz.imag + zx.imag - yz.real + zy.real)
                + dissipative * (xz.real - zx.real + yz.imag + zy.imag))
            - (n0 + 1) * (
                -2 * alpha.alpha_par.real * (zx.imag + xz.imag)
                + 2 * alpha.alpha_par.imag * (-zx.real + xz.real))
        )
        return constants.hbar / (4 * math.pi) * np.array([m_x, m_y])

    def frequency_window(self) -> float:
        scenario = self.scenario
        window = max(10 * self.rotation, 5 * scenario.slab_larmor_rad_s, 5 * scenario.sphere_larmor_rad_s)
        if window == 0:
            window = THERMAL_WINDOW * constants.k * max(self.t_sphere, self.t_env) / constants.hbar
        return min(window, self._window_limit())

    def _window_limit(self) -> float:
        limit = self.sphere.dipole_limit()
        if math.isinf(limit):
            return limit
        return limit * (1 - 1e-9) - self.rotation

    def breakpoints(self, upper: float) -> List[float]:
        scenario = self.scenario
        sphere = scenario.sphere_larmor_rad_s
        slab = scenario.slab_larmor_rad_s
        candidates = [self.rotation, sphere + self.rotation, abs(sphere - self.rotation)]
        if slab > 0:
            candidates += [slab, slab + scenario.omega_m_rad_s / 2]
        return sorted({x for x in candidates if 0 < x < upper})

    def _integrate(self, integrand: Callable[[float], np.ndarray], label: str, size: int = 2):
        numerics = self.scenario.numerics
        window = self.frequency_window()
        limit = self._window_limit()
        if window <= 0:
            # Ω = 0 at T = 0: nothing to integrate
            return np.zeros(size), True, 0.0, 0

        def run(f, lo, hi, points, workers):
            return integrate_finite(f, lo, hi, numerics.rel_tol, numerics.abs_tol,
                                    budget=numerics.max_evaluations, points=points, workers=workers)

        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                return self._windowed(run, integrand, window, limit, pool.map, label)
        return self._windowed(run, integrand, window, limit, 1, label)

    def _windowed(self, run, integrand, window, limit, workers, label):
        numerics = self.scenario.numerics
        total: IntegralResult = run(integrand, 0.0, window, self.breakpoints(window), workers)
        settled = False
        for _ in range(numerics.omega_max_doublings):
            if window >= limit:
                _logger.warning(f'{label}: frequency window clamped at the dipole limit {window:.6g} rad/s')
                settled = True
                break
            upper = min(2 * window, limit)
            segment = run(integrand, window, upper, self.breakpoints(upper), workers)
            total = total + segment
            window = upper
            if np.max(np.abs(segment.value)) <= WINDOW_CHANGE_LIMIT * np.max(np.abs(total.value)):
                settled = True
                break
        else:
            settled = numerics.omega_max_doublings == 0

        if not settled:
            _logger.warning(f'{label}: frequency window did not settle by {window:.6g} rad/s')
        converged = total.converged and settled and self.greens.all_converged
        _logger.debug(f'{label}: {total.evaluations} frequency evaluations up to {window:.6g} rad/s')
        return np.real(total.value), converged, window, total.evaluations

    def radiated_power(self) -> ChannelBreakdown:
        value, converged, window, evaluations = self._integrate(self._power_integrand, 'radiated power')
        result = ChannelBreakdown(
            magnetic=float(value[0]), electric=float(value[1]), total=float(value[0] + value[1]),
            converged=converged, omega_max=window, evaluations=evaluations)
        _logger.info(f'radiated power {result.total:.6g} W (converged={converged})')
        return result

    def torque_z(self) -> ChannelBreakdown:
        value, converged, window, evaluations = self._integrate(self._torque_integrand, 'torque z')
        result = ChannelBreakdown(
            magnetic=float(value[0]), electric=float(value[1]), total=float(value[0] + value[1]),
            converged=converged, omega_max=window, evaluations=evaluations)
        _logger.info(f'torque M_z {result.total:.6g} N m (converged={converged})')
        return result

    def torque_xy(self) -> OffAxisTorque:
        value, converged, window, evaluations = self._integrate(self._off_axis_integrand, 'torque xy')
        result = OffAxisTorque(m_x=float(value[0]), m_y=float(value[1]), converged=converged,
                               omega_max=window, evaluations=evaluations)
        _logger.info(f'torque M_x {result.m_x:.6g}, M_y {result.m_y:.6g} N m')
        return result


def gamma_rad(omega: float, scenario: Scenario) -> float:
    return FluctuationModel(scenario).gamma_rad(omega)


def radiated_power(scenario: Scenario, workers: int = 1) -> ChannelBreakdown:
    return FluctuationModel(scenario, workers=workers).radiated_power()


def torque_z(scenario: Scenario, workers: int = 1) -> ChannelBreakdown:
    return FluctuationModel(scenario, workers=workers).torque_z()


def torque_xy(scenario: Scenario, workers: int = 1) -> OffAxisTorque:
    return FluctuationModel(scenario, workers=workers).torque_xy()


def free_space(scenario: Scenario) -> Scenario:
    return dataclasses.replace(scenario, interface_kind='none', distance_m=math.inf, slab_damping=None)


def enhancement_ratio(scenario: Scenario, workers: int = 1) -> float:
    near = torque_z(scenario, workers).total
    far = torque_z(free_space(scenario), workers).total
    if far == 0:
        return math.inf if near != 0 else 1.0
    return abs(near) / abs(far)
