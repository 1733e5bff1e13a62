from collections import OrderedDict
import dataclasses
from typing import Iterable, Optional, Tuple
import logging
import math
import threading

import numpy as np
from scipy import constants

from .materials import ELECTRIC, MAGNETIC
from .quadrature import DEFAULT_BUDGET, QUARTER_TURNS, integrate_evanescent, integrate_finite, integrate_periodic
from .reflection import LAB_TO_LOCAL, ReflectionMatrix, ReflectionProvider, basis_vectors, normal_component

_logger = logging.getLogger('vacfric.greens')

CHANNELS = (MAGNETIC, ELECTRIC)
DEFAULT_KAPPA_CUTOFF = 20 * math.log(10)

# (|omega|, channel) tensors kept per calculator, least recently used dropped first
DEFAULT_CACHE_ENTRIES = 4096


@dataclasses.dataclass(frozen=True)
class GreensWeights:
    g_perp1: float
    g_perp2: float
    g_par: float
    g_g1: float
    g_g2: float
    orientation: str = 'xy_plane'

    def as_tuple(self) -> Tuple[float, float, float, float, float]:
        return (self.g_perp1, self.g_perp2, self.g_par, self.g_g1, self.g_g2)


@dataclasses.dataclass(frozen=True)
class Ldos:
    electric: float
    magnetic: float
    total: float


@dataclasses.dataclass(frozen=True)
class GreensTensor:
    """Equal-point Green's tensor in the lab frame: reflected part plus i·Im of the vacuum part."""
    omega: float
    channel: str
    lab: np.ndarray
    converged: bool = True
    evaluations: int = 0

    def conjugate(self) -> 'GreensTensor':
        return GreensTensor(-self.omega, self.channel, self.lab.conj(), self.converged, self.evaluations)


def vacuum_density_of_states(omega: float) -> float:
    return omega ** 2 / (math.pi ** 2 * constants.c ** 3)


def _dyadic(r: ReflectionMatrix, s_hat: np.ndarray, p_minus: np.ndarray, p_plus: np.ndarray, channel: str) -> np.ndarray:
    if channel == MAGNETIC:
        return (r.r_pp * np.outer(s_hat, s_hat) - r.r_ps * np.outer(s_hat, p_minus)
                + r.r_ss * np.outer(p_plus, p_minus) - r.r_sp * np.outer(p_plus, s_hat))
    return (r.r_ss * np.outer(s_hat, s_hat) + r.r_sp * np.outer(s_hat, p_minus)
            + r.r_ps * np.outer(p_plus, s_hat) + r.r_pp * np.outer(p_plus, p_minus))


def _reflected_local(omega: float, distance: float, refl: ReflectionProvider, channel: str,
                     tol: float, kappa_cutoff: float, phi_max_points: int, budget: int):
    """
    Reflected equal-point tensor in the interface frame:
    (i k0³/8π²) ∫dφ ∫κ dκ/p D(κ, φ) exp(2i k0 p d), propagating and
    evanescent branches split at κ = 1.
    """
    k0 = omega / constants.c
    phi_converged = [True]

    def angular(kappa):
        if refl.phi_independent:
            r = refl.at(omega, kappa, 1.0, 0.0)
            total = sum(_dyadic(r, *basis_vectors(kappa, c, s), channel) for c, s in QUARTER_TURNS)
            return total * (2 * math.pi / 4)

        def at_phi(c, s):
            return _dyadic(refl.at(omega, kappa, c, s), *basis_vectors(kappa, c, s), channel)

        result = integrate_periodic(at_phi, tol, max_points=phi_max_points)
        if not result.converged:
            phi_converged[0] = False
        return result.value

    def integrand(kappa):
        p = normal_component(kappa)
        return angular(kappa) * (kappa / p * np.exp(2j * k0 * p * distance))

    propagating = integrate_finite(integrand, 0.0, 1.0, tol, endpoint_singularity='upper', budget=budget)
    evanescent = integrate_evanescent(
        integrand, 1.0,
        decay_scale=1 / (2 * k0 * distance),
        tol=tol,
        cutoff=1 + kappa_cutoff / (k0 * distance),
        budget=budget,
    )
    total = propagating + evanescent
    prefactor = 1j * k0 ** 3 / (8 * math.pi ** 2)
    _logger.debug(f'{channel} Green tensor at omega={omega:.6g}: {total.evaluations} kappa evaluations')
    return total.value * prefactor, total.converged and phi_converged[0], total.evaluations


def greens_tensor(omega: float, distance: float, orientation: str, refl: ReflectionProvider,
                  channel: str = MAGNETIC, tol: float = 1e-5, kappa_cutoff: float = DEFAULT_KAPPA_CUTOFF,
                  phi_max_points: int = 512, budget: int = DEFAULT_BUDGET) -> GreensTensor:
    if channel not in CHANNELS:
        raise ValueError(f'unknown channel {channel!r}')
    if omega == 0:
        raise ValueError('Green tensor is undefined at omega = 0')
    if not distance > 0:
        raise ValueError(f'distance must be positive, got {distance}')
    if omega < 0:
        return greens_tensor(-omega, distance, orientation, refl, channel, tol, kappa_cutoff,
                             phi_max_points, budget).conjugate()

    k0 = omega / constants.c
    vacuum = 1j * k0 ** 3 / (6 * math.pi) * np.eye(3)
    if refl.is_vacuum or math.isinf(distance):
        return GreensTensor(omega, channel, vacuum.astype(complex))

    local, converged, evaluations = _reflected_local(
        omega, distance, refl, channel, tol, kappa_cutoff, phi_max_points, budget)
    rotation = LAB_TO_LOCAL[orientation]
    lab = rotation.T @ local @ rotation + vacuum
    return GreensTensor(omega, channel, lab, converged, evaluations)


def weights_from_tensor(tensor: GreensTensor, orientation: str) -> GreensWeights:
    k0 = abs(tensor.omega) / constants.c
    rotation = LAB_TO_LOCAL[orientation]
    g = rotation @ tensor.lab @ rotation.T
    eighth = k0 ** 3 / (8 * math.pi)
    quarter = k0 ** 3 / (4 * math.pi)
    return GreensWeights(
        g_perp1=float(g[0, 0].imag / eighth),
        g_perp2=float(g[1, 1].imag / eighth),
        g_par=float(g[2, 2].imag / quarter),
        g_g1=float((g[0, 1] - g[1, 0]).real / quarter),
        g_g2=float((g[1, 2] - g[2, 1]).real / quarter),
        orientation=orientation,
    )


def greens_weights(omega: float, distance: float, orientation: str, refl: ReflectionProvider,
                   channel: str = MAGNETIC, **kwargs) -> GreensWeights:
    """
    The five real weights (g⊥1, g⊥2, g∥, g_g1, g_g2), normalized so the
    vacuum gives (4/3, 4/3, 2/3, 0, 0). They are read in the interface
    frame, so g∥ always belongs to the interface normal.
    """
    return weights_from_tensor(greens_tensor(omega, distance, orientation, refl, channel, **kwargs), orientation)


def _ldos_from_weights(omega: float, electric: GreensWeights, magnetic: GreensWeights) -> Ldos:
    rho0 = vacuum_density_of_states(omega)
    e = rho0 / 8 * (electric.g_perp1 + electric.g_perp2 + 2 * electric.g_par)
    h = rho0 / 8 * (magnetic.g_perp1 + magnetic.g_perp2 + 2 * magnetic.g_par)
    return Ldos(electric=e, magnetic=h, total=e + h)


def ldos(omega: float, distance: float, orientation: str, refl: ReflectionProvider, **kwargs) -> Ldos:
    return _ldos_from_weights(
        omega,
        greens_weights(omega, distance, orientation, refl, ELECTRIC, **kwargs),
        greens_weights(omega, distance, orientation, refl, MAGNETIC, **kwargs),
    )


class GreensCalculator:
    """
    Memoized Green's tensors for one (interface, distance, orientation).
    Shared by the frequency-integration workers.
    """

    def __init__(self, refl: ReflectionProvider, distance: float, orientation: str,
                 tol: float = 1e-5, kappa_cutoff: float = DEFAULT_KAPPA_CUTOFF,
                 phi_max_points: int = 512, budget: int = DEFAULT_BUDGET,
                 cache_entries: int = DEFAULT_CACHE_ENTRIES):
        if cache_entries < 1:
            raise ValueError(f'cache_entries must be >= 1, got {cache_entries}')
        self.refl = refl
        self.distance = distance
        self.orientation = orientation
        self.tol = tol
        self.kappa_cutoff = kappa_cutoff
        self.phi_max_points = phi_max_points
        self.budget = budget
        self.cache_entries = cache_entries

        self._mutex = threading.RLock()   # OrderedDict is not thread-safe
        self._cache: 'OrderedDict[Tuple[float, str], GreensTensor]' = OrderedDict()
        self.all_converged = True

    @classmethod
    def for_scenario(cls, scenario, refl: ReflectionProvider) -> 'GreensCalculator':
        numerics = scenario.numerics
        return cls(
            refl, scenario.distance_m, scenario.interface_orientation,
            tol=numerics.rel_tol * 0.1,
            kappa_cutoff=numerics.kappa_cutoff,
            phi_max_points=numerics.phi_max_points,
            budget=numerics.max_evaluations,
        )

    def cache_size(self) -> int:
        with self._mutex:
            return len(self._cache)

    def tensor(self, omega: float, channel: str = MAGNETIC) -> GreensTensor:
        key = (abs(omega), channel)
        with self._mutex:
            cached: Optional[GreensTensor] = self._cache.get(key)
            if cached is not None:
                self._cache.move_to_end(key)

        if cached is None:
            cached = greens_tensor(abs(omega), self.distance, self.orientation, self.refl, channel,
                                   self.tol, self.kappa_cutoff, self.phi_max_points, self.budget)
            with self._mutex:
                self._cache[key] = cached
                while len(self._cache) > self.cache_entries:
                    self._cache.popitem(last=False)
                if not cached.converged:
                    self.all_converged = False

        return cached.conjugate() if omega < 0 else cached

    def converged_at(self, omega: float, channels: Iterable[str] = CHANNELS) -> bool:
        """Convergence of the tensors this frequency uses, independent of earlier frequencies."""
        return all(self.tensor(omega, channel).converged for channel in channels)

    def weights(self, omega: float, channel: str = MAGNETIC) -> GreensWeights:
        return weights_from_tensor(self.tensor(omega, channel), self.orientation)

    def ldos(self, omega: float) -> Ldos:
        return _ldos_from_weights(omega, self.weights(omega, ELECTRIC), self.weights(omega, MAGNETIC))
