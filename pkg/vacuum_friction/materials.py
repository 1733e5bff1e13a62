import dataclasses
from typing import Callable, Tuple
import cmath

import numpy as np
from scipy import constants

GYROMAGNETIC_RATIO = 1.760859e11  # rad s^-1 T^-1
DIPOLE_SIZE_LIMIT = 0.1  # k0 a
BRANCH_POINT_GUARD = 1e-12
LARGE_U_SERIES = 10.0
LARGE_U_TERMS = 12

MAGNETIC = 'magnetic'
ELECTRIC = 'electric'


class DipoleApproximationError(ValueError):
    pass


class BranchPointError(ArithmeticError):
    pass


@dataclasses.dataclass(frozen=True)
class GyrotropicPermeability:
    mu_perp: complex
    mu_g: complex
    mu_par: complex

    def tensor(self, axis: np.ndarray) -> np.ndarray:
        """
        3x3 permeability for a bias along the unit vector `axis`:
        μ_⊥(1 - bb) + μ_∥ bb - μ_g [b]_x, which is the usual
        ((μ_⊥, -μ_g, 0), (μ_g, μ_⊥, 0), (0, 0, μ_∥)) form for b = z.
        """
        b = np.asarray(axis, dtype=float)
        bb = np.outer(b, b)
        cross = np.array([
            [0.0, -b[2], b[1]],
            [b[2], 0.0, -b[0]],
            [-b[1], b[0], 0.0],
        ])
        return self.mu_perp * (np.eye(3) - bb) + self.mu_par * bb + self.mu_g * cross

    @classmethod
    def isotropic(cls, mu: complex) -> 'GyrotropicPermeability':
        return cls(mu_perp=mu, mu_g=0j, mu_par=mu)


@dataclasses.dataclass(frozen=True)
class PolarizabilityTensor:
    alpha_perp: complex
    alpha_g: complex
    alpha_par: complex
    channel: str = MAGNETIC

    def conjugate(self) -> 'PolarizabilityTensor':
        return PolarizabilityTensor(
            self.alpha_perp.conjugate(), self.alpha_g.conjugate(), self.alpha_par.conjugate(), self.channel)

    def scaled(self, factor: float) -> 'PolarizabilityTensor':
        return PolarizabilityTensor(
            self.alpha_perp * factor, self.alpha_g * factor, self.alpha_par * factor, self.channel)

    @classmethod
    def isotropic(cls, alpha: complex, channel: str) -> 'PolarizabilityTensor':
        return cls(alpha_perp=alpha, alpha_g=0j, alpha_par=alpha, channel=channel)


@dataclasses.dataclass(frozen=True)
class NonlocalDielectricPair:
    eps_l: complex
    eps_t: complex


def barnett_larmor(rotation_rate: float, bias_field: float, gamma: float = GYROMAGNETIC_RATIO) -> float:
    return rotation_rate + constants.mu_0 * gamma * bias_field


def gilbert_damping(linewidth: float, reference_omega: float, gamma: float = GYROMAGNETIC_RATIO) -> float:
    """Constant Gilbert damping from a field linewidth ΔH at one reference frequency."""
    return constants.mu_0 * gamma * linewidth / (2 * reference_omega)


def yig_permeability(omega: float, omega0: float, omega_m: float, damping: float) -> GyrotropicPermeability:
    """
    Landau-Lifshitz-Gilbert permeability of a magnetized ferrite, written
    out with the α² terms kept.
    """
    w2 = omega * omega
    a2 = damping * damping
    w02 = omega0 * omega0
    denominator = (w02 - w2 * (1 + a2)) ** 2 + 4 * w02 * w2 * a2

    chi_perp = (
        omega0 * omega_m * (w02 - w2) + omega0 * omega_m * w2 * a2
        + 1j * damping * omega * omega_m * (w02 + w2 * (1 + a2))
    ) / denominator
    chi_g = (
        -2 * omega0 * omega_m * w2 * damping
        + 1j * omega * omega_m * (w02 - w2 * (1 + a2))
    ) / denominator

    mu0 = constants.mu_0
    return GyrotropicPermeability(
        mu_perp=mu0 * (1 + chi_perp),
        mu_g=mu0 * chi_g,
        mu_par=complex(mu0),
    )


def sphere_polarizability_gyromagnetic(omega: float, radius: float, mu: GyrotropicPermeability) -> PolarizabilityTensor:
    mu0 = constants.mu_0
    volume = 4 * np.pi * radius ** 3
    dn = (mu.mu_perp + 2 * mu0) ** 2 + mu.mu_g ** 2

    return PolarizabilityTensor(
        alpha_perp=complex(volume * ((mu.mu_perp - mu0) * (mu.mu_perp + 2 * mu0) + mu.mu_g ** 2) / dn),
        alpha_g=complex(volume * 3 * mu0 * mu.mu_g / dn),
        alpha_par=complex(volume * (mu.mu_par - mu0) / (mu.mu_par + 2 * mu0)),
        channel=MAGNETIC,
    )


def effective_rotating_polarizability(
        alpha: Callable[[float], PolarizabilityTensor], omega: float, rotation: float) -> PolarizabilityTensor:
    """
    Lab-frame polarizability of a body spinning at `rotation` about z,
    from its rest-frame response sampled at ω ± Ω.
    """
    if rotation == 0:
        return alpha(omega)

    plus = alpha(omega + rotation)
    minus = alpha(omega - rotation)
    return PolarizabilityTensor(
        alpha_perp=0.5 * (plus.alpha_perp + minus.alpha_perp + 1j * plus.alpha_g - 1j * minus.alpha_g),
        alpha_g=-0.5j * (plus.alpha_perp - minus.alpha_perp + 1j * plus.alpha_g + 1j * minus.alpha_g),
        alpha_par=alpha(omega).alpha_par,
        channel=plus.channel,
    )


def drude_permittivity(omega: float, omega_p: float, gamma: float) -> complex:
    return 1 - omega_p ** 2 / (omega * (omega + 1j * gamma))


def _lindhard_factors(u: complex) -> Tuple[complex, complex]:
    if abs(u) > LARGE_U_SERIES:
        inv2 = 1 / (u * u)
        f_l = 0j
        f_t = 0j
        power = 1.0 + 0j
        for n in range(LARGE_U_TERMS):
            f_t += 3 * power / ((2 * n + 1) * (2 * n + 3))
            power *= inv2
            f_l -= power / (2 * n + 3)
        return f_l, f_t

    if abs(u - 1) < BRANCH_POINT_GUARD or abs(u + 1) < BRANCH_POINT_GUARD:
        raise BranchPointError(f'u = {u} lies on a branch point of the Lindhard logarithm')
    log = cmath.log((u + 1) / (u - 1))
    f_l = 1 - 0.5 * u * log
    f_t = 1.5 * u * u - 0.75 * u * (u * u - 1) * log
    return f_l, f_t


def nonlocal_dielectrics(k: float, omega: float, omega_p: float, gamma: float, v_fermi: float) -> NonlocalDielectricPair:
    """
    Longitudinal and transverse Lindhard-Mermin style permittivities of a
    free-electron metal at wavevector k.
    """
    if k <= 0:
        raise ValueError(f'wavevector must be positive, got {k}')
    if omega <= 0:
        raise ValueError(f'frequency must be positive, got {omega}')

    w = omega + 1j * gamma
    u = w / (k * v_fermi)
    f_l, f_t = _lindhard_factors(u)

    eps_l = 1 + 3 * omega_p ** 2 / (k * v_fermi) ** 2 * w * f_l / (omega + 1j * gamma * f_l)
    eps_t = 1 - omega_p ** 2 / (omega * w) * f_t
    return NonlocalDielectricPair(eps_l=complex(eps_l), eps_t=complex(eps_t))


def clausius_mossotti(radius: float, eps: complex) -> complex:
    return complex(4 * np.pi * radius ** 3 * (eps - 1) / (eps + 2))


def metal_sphere_polarizability(
        omega: float, radius: float, eps: complex) -> Tuple[PolarizabilityTensor, PolarizabilityTensor]:
    """
    Small-sphere (electric, magnetic) polarizabilities. The magnetic part is
    the leading eddy-current term of the first magnetic Mie coefficient.
    """
    size = abs(omega) * radius / constants.c
    if size >= DIPOLE_SIZE_LIMIT:
        raise DipoleApproximationError(f'k0 a = {size:.4g} is outside the dipole regime (< {DIPOLE_SIZE_LIMIT})')

    electric = clausius_mossotti(radius, eps)
    magnetic = complex(4 * np.pi * radius ** 3 * size ** 2 * (eps - 1) / 30)
    return (
        PolarizabilityTensor.isotropic(electric, ELECTRIC),
        PolarizabilityTensor.isotropic(magnetic, MAGNETIC),
    )
