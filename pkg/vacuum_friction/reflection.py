import dataclasses
from typing import List, Optional, Tuple
import cmath
import logging
import math

import numpy as np
from scipy import constants

from .materials import (
    GyrotropicPermeability, drude_permittivity, nonlocal_dielectrics, yig_permeability,
)
from .quadrature import integrate_semi_infinite

_logger = logging.getLogger('vacfric.reflection')

ROOT_RESIDUAL_LIMIT = 1e-8
DEGENERATE_SEPARATION = 1e-8
BOUNDARY_CONDITION_LIMIT = 1e12
NEWTON_STEPS = 20

AXIS_VECTORS = {
    'x': np.array([1.0, 0.0, 0.0]),
    'y': np.array([0.0, 1.0, 0.0]),
    'z': np.array([0.0, 0.0, 1.0]),
}

# Interface frame: z is the outward normal of the slab. For an x-z plane
# interface the local axes (x, y, z) are the lab axes (z, x, y).
LAB_TO_LOCAL = {
    'xy_plane': np.eye(3),
    'xz_plane': np.array([
        [0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
    ]),
}


class RootFindingError(ArithmeticError):
    pass


class SingularBoundaryError(ArithmeticError):
    pass


@dataclasses.dataclass(frozen=True)
class ReflectionMatrix:
    r_ss: complex
    r_sp: complex
    r_ps: complex
    r_pp: complex

    def conjugate(self) -> 'ReflectionMatrix':
        return ReflectionMatrix(
            self.r_ss.conjugate(), self.r_sp.conjugate(), self.r_ps.conjugate(), self.r_pp.conjugate())

    def swapped(self) -> 'ReflectionMatrix':
        """Electric-channel counterpart: s and p exchange roles."""
        return ReflectionMatrix(r_ss=self.r_pp, r_sp=self.r_ps, r_ps=self.r_sp, r_pp=self.r_ss)

    def as_array(self) -> np.ndarray:
        return np.array([[self.r_ss, self.r_sp], [self.r_ps, self.r_pp]])

    @classmethod
    def zero(cls) -> 'ReflectionMatrix':
        return cls(0j, 0j, 0j, 0j)


@dataclasses.dataclass
class SlabModeSet:
    roots: List[complex]
    fields: List[np.ndarray]
    residuals: List[float]
    degenerate: bool = False


def normal_component(kappa: float) -> complex:
    """p = sqrt(1 - κ²) for propagating waves, i sqrt(κ² - 1) for evanescent ones."""
    if kappa <= 1:
        return complex(math.sqrt(1 - kappa * kappa))
    return 1j * math.sqrt(kappa * kappa - 1)


def basis_vectors(kappa: float, c: float, s: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """ŝ, p̂₋ (towards the slab) and p̂₊ (away from it) for k_par = κ(c, s)."""
    p = normal_component(kappa)
    s_hat = np.array([s, -c, 0.0], dtype=complex)
    p_minus = np.array([p * c, p * s, kappa], dtype=complex)
    p_plus = np.array([-p * c, -p * s, kappa], dtype=complex)
    return s_hat, p_minus, p_plus


def _sqrt_upper(z: complex) -> complex:
    w = cmath.sqrt(z)
    if w.imag < 0 or (w.imag == 0 and w.real < 0):
        w = -w
    return w


def fresnel_local(omega: float, kappa: float, eps: complex, mu: complex = 1.0) -> ReflectionMatrix:
    if kappa < 0:
        raise ValueError(f'kappa must be >= 0, got {kappa}')
    p = normal_component(kappa)
    w = _sqrt_upper(eps * mu - kappa * kappa)
    return ReflectionMatrix(
        r_ss=complex((mu * p - w) / (mu * p + w)),
        r_sp=0j,
        r_ps=0j,
        r_pp=complex((eps * p - w) / (eps * p + w)),
    )


def fresnel_nonlocal_scib(omega: float, kappa: float, omega_p: float, gamma: float, v_fermi: float,
                          tol: float = 1e-6) -> ReflectionMatrix:
    """
    Specular-reflection (semi-classical infinite barrier) coefficients of a
    free-electron metal, built from the surface impedances of the bulk
    longitudinal and transverse permittivities.
    """
    if kappa < 0:
        raise ValueError(f'kappa must be >= 0, got {kappa}')
    k0 = omega / constants.c
    p = normal_component(kappa)
    k2 = kappa * kappa

    w_local = _sqrt_upper(drude_permittivity(omega, omega_p, gamma) - k2)
    nonlocal_onset = math.hypot(omega, gamma) / (v_fermi * k0)

    def integrand(q):
        pair = nonlocal_dielectrics(k0 * math.sqrt(q * q + k2), omega, omega_p, gamma, v_fermi)
        transverse = 1 / (pair.eps_t - q * q - k2)
        return np.array([
            transverse,
            (q * q * transverse + k2 / pair.eps_l) / (q * q + k2),
        ])

    scale = max(abs(w_local), 1.0)
    result = integrate_semi_infinite(integrand, 0.0, scale, tol, points=[kappa, abs(w_local), nonlocal_onset])
    if not result.converged:
        _logger.warning(f'SCIB impedance integral not converged at omega={omega:.6g}, kappa={kappa:.6g}')

    z_s, z_p = (2j / math.pi) * result.value
    return ReflectionMatrix(
        r_ss=complex((z_s - 1 / p) / (z_s + 1 / p)),
        r_sp=0j,
        r_ps=0j,
        r_pp=complex((p - z_p) / (p + z_p)),
    )


def _cross_matrix(k: np.ndarray) -> np.ndarray:
    return np.array([
        [0.0, -k[2], k[1]],
        [k[2], 0.0, -k[0]],
        [-k[1], k[0], 0.0],
    ], dtype=complex)


_DK_DQ = _cross_matrix(np.array([0.0, 0.0, 1.0]))


def _maxwell_matrix(kx: float, ky: float, q: complex, eps: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """A(q) acting on (E, h): rows are εE + k×h and k×E - μh."""
    k_cross = _cross_matrix(np.array([kx, ky, q], dtype=complex))
    return np.block([[eps, k_cross], [k_cross, -mu]])


def _relative_residual(a: np.ndarray) -> float:
    singular = np.linalg.svd(a, compute_uv=False)
    return float(singular[-1] / singular[0])


def _berreman_matrix(kx: float, ky: float, eps: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """q ψ = Δ ψ for ψ = (Ex, Ey, hx, hy) in a homogeneous anisotropic medium."""
    delta = np.zeros((4, 4), dtype=complex)
    for j in range(4):
        psi = np.zeros(4, dtype=complex)
        psi[j] = 1.0
        delta[:, j] = _full_field(kx, ky, psi, eps, mu)[1]
    return delta


def _full_field(kx: float, ky: float, psi: np.ndarray, eps: np.ndarray, mu: np.ndarray):
    ex, ey, hx, hy = psi
    ez = (-(kx * hy - ky * hx) - eps[2, 0] * ex - eps[2, 1] * ey) / eps[2, 2]
    hz = ((kx * ey - ky * ex) - mu[2, 0] * hx - mu[2, 1] * hy) / mu[2, 2]
    e = np.array([ex, ey, ez])
    h = np.array([hx, hy, hz])
    mu_h = mu @ h
    eps_e = eps @ e
    q_psi = np.array([
        mu_h[1] + kx * ez,
        ky * ez - mu_h[0],
        kx * hz - eps_e[1],
        ky * hz + eps_e[0],
    ])
    return np.concatenate([e, h]), q_psi


def _refine_root(kx, ky, q, eps, mu):
    for _ in range(NEWTON_STEPS):
        a = _maxwell_matrix(kx, ky, q, eps, mu)
        if _relative_residual(a) <= ROOT_RESIDUAL_LIMIT:
            break
        d_a = np.block([[np.zeros((3, 3)), _DK_DQ], [_DK_DQ, np.zeros((3, 3))]])
        trace = np.trace(np.linalg.solve(a, d_a))
        q = q - 1 / trace
    a = _maxwell_matrix(kx, ky, q, eps, mu)
    residual = _relative_residual(a)
    if residual > ROOT_RESIDUAL_LIMIT:
        raise RootFindingError(f'slab mode root q={q:.6g} left residual {residual:.3g}')
    _, _, vh = np.linalg.svd(a)
    return q, vh[-1].conj(), residual


def slab_modes_gyromagnetic(kappa: float, c: float, s: float, eps: np.ndarray, mu: np.ndarray) -> SlabModeSet:
    """
    The two transmitted modes of a half-space filling z < 0 with relative
    permittivity `eps` and permeability `mu` (3x3, interface frame).

    Roots are the normal wavevector k_z' (units of k0) of waves decaying
    into, or travelling into, the slab.
    """
    kx, ky = kappa * c, kappa * s
    values, vectors = np.linalg.eig(_berreman_matrix(kx, ky, eps, mu))

    # fields vary as exp(i q z); the slab is z < 0
    scale = max(float(np.max(np.abs(values))), 1.0)
    downward = [j for j, q in enumerate(values)
                if q.imag < -1e-12 * scale or (abs(q.imag) <= 1e-12 * scale and q.real < 0)]
    if len(downward) != 2:
        raise RootFindingError(f'expected 2 transmitted modes at kappa={kappa:.6g}, found {len(downward)}')

    roots, fields, residuals = [], [], []
    for j in downward:
        q = complex(values[j])
        field, _ = _full_field(kx, ky, vectors[:, j], eps, mu)
        residual = _relative_residual(_maxwell_matrix(kx, ky, q, eps, mu))
        if residual > ROOT_RESIDUAL_LIMIT:
            q, field, residual = _refine_root(kx, ky, q, eps, mu)
        roots.append(-q)
        fields.append(field / np.linalg.norm(field))
        residuals.append(residual)

    degenerate = abs(roots[0] - roots[1]) < DEGENERATE_SEPARATION * scale
    return SlabModeSet(roots=roots, fields=fields, residuals=residuals, degenerate=degenerate)


def fresnel_gyromagnetic(kappa: float, c: float, s: float, eps: np.ndarray, mu: np.ndarray) -> ReflectionMatrix:
    """Matches tangential E and h across z = 0 for s and p incidence."""
    s_hat, p_minus, p_plus = basis_vectors(kappa, c, s)
    modes = slab_modes_gyromagnetic(kappa, c, s, eps, mu)

    def tangential(field):
        return np.array([field[0], field[1], field[3], field[4]])

    boundary = np.column_stack([
        [s_hat[0], s_hat[1], -p_plus[0], -p_plus[1]],
        [p_plus[0], p_plus[1], s_hat[0], s_hat[1]],
        -tangential(modes.fields[0]),
        -tangential(modes.fields[1]),
    ])
    incident = np.column_stack([
        -np.array([s_hat[0], s_hat[1], -p_minus[0], -p_minus[1]]),
        -np.array([p_minus[0], p_minus[1], s_hat[0], s_hat[1]]),
    ])

    # evanescent p̂ vectors grow like κ; equilibrate before judging conditioning
    rows = np.max(np.abs(boundary), axis=1)
    columns = np.max(np.abs(boundary / rows[:, None]), axis=0)
    scaled = boundary / rows[:, None] / columns[None, :]
    condition = np.linalg.cond(scaled)
    if not np.isfinite(condition) or condition > BOUNDARY_CONDITION_LIMIT:
        raise SingularBoundaryError(f'boundary matrix condition {condition:.3g} at kappa={kappa:.6g}')
    if condition > BOUNDARY_CONDITION_LIMIT * 1e-4:
        _logger.warning(f'ill-conditioned boundary matrix ({condition:.3g}) at kappa={kappa:.6g}')

    amplitudes = np.linalg.solve(scaled, incident / rows[:, None]) / columns[:, None]
    return ReflectionMatrix(
        r_ss=complex(amplitudes[0, 0]),
        r_sp=complex(amplitudes[0, 1]),
        r_ps=complex(amplitudes[1, 0]),
        r_pp=complex(amplitudes[1, 1]),
    )


class ReflectionProvider:
    """
    Reflection of one interface family at (ω, κ, φ). Subclasses implement
    reflect() for ω > 0; negative frequencies follow r(-ω) = r*(ω).
    """

    phi_independent = True

    def reflect(self, omega: float, kappa: float, c: float, s: float) -> ReflectionMatrix:
        raise NotImplementedError

    def at(self, omega: float, kappa: float, c: float, s: float) -> ReflectionMatrix:
        if omega == 0:
            raise ValueError('reflection is undefined at omega = 0')
        if omega < 0:
            return self.reflect(-omega, kappa, c, s).conjugate()
        return self.reflect(omega, kappa, c, s)

    def __call__(self, omega: float, kappa: float, phi: float) -> ReflectionMatrix:
        return self.at(omega, kappa, math.cos(phi), math.sin(phi))

    @property
    def is_vacuum(self) -> bool:
        return False


class NoInterface(ReflectionProvider):

    def reflect(self, omega, kappa, c, s):
        return ReflectionMatrix.zero()

    @property
    def is_vacuum(self) -> bool:
        return True


class LocalMetal(ReflectionProvider):

    def __init__(self, omega_p: float, gamma: float):
        self.omega_p = omega_p
        self.gamma = gamma

    def reflect(self, omega, kappa, c, s):
        return fresnel_local(omega, kappa, drude_permittivity(omega, self.omega_p, self.gamma))


class NonlocalMetal(ReflectionProvider):

    def __init__(self, omega_p: float, gamma: float, v_fermi: float, tol: float = 1e-6):
        self.omega_p = omega_p
        self.gamma = gamma
        self.v_fermi = v_fermi
        self.tol = tol

    def reflect(self, omega, kappa, c, s):
        return fresnel_nonlocal_scib(omega, kappa, self.omega_p, self.gamma, self.v_fermi, self.tol)


class LocalDielectric(ReflectionProvider):

    def __init__(self, eps: complex, mu: complex = 1.0):
        self.eps = eps
        self.mu = mu

    def reflect(self, omega, kappa, c, s):
        return fresnel_local(omega, kappa, self.eps, self.mu)


class GyromagneticSlab(ReflectionProvider):
    """
    Biased ferrite half-space. `bias_axis` is a unit vector in the interface
    frame; the slab is φ-independent only when it lies along the normal.
    """

    def __init__(self, eps: complex, omega0: float, omega_m: float, damping: float, bias_axis: np.ndarray):
        self.eps = eps
        self.omega0 = omega0
        self.omega_m = omega_m
        self.damping = damping
        self.bias_axis = np.asarray(bias_axis, dtype=float)
        self.phi_independent = bool(np.allclose(np.abs(self.bias_axis), [0.0, 0.0, 1.0]))

    def permeability(self, omega: float) -> GyrotropicPermeability:
        return yig_permeability(omega, self.omega0, self.omega_m, self.damping)

    def reflect(self, omega, kappa, c, s):
        mu = self.permeability(omega).tensor(self.bias_axis) / constants.mu_0
        return fresnel_gyromagnetic(kappa, c, s, self.eps * np.eye(3, dtype=complex), mu)


def local_axis(axis: str, orientation: str) -> np.ndarray:
    return LAB_TO_LOCAL[orientation] @ AXIS_VECTORS[axis]


def reflection_for_scenario(scenario, scib_tol: Optional[float] = None) -> ReflectionProvider:
    kind = scenario.interface_kind
    metal = scenario.metal
    if kind == 'none':
        return NoInterface()
    if kind == 'metal_local':
        return LocalMetal(metal.omega_p, metal.gamma)
    if kind == 'metal_nonlocal':
        tol = scib_tol if scib_tol is not None else scenario.numerics.rel_tol * 0.1
        return NonlocalMetal(metal.omega_p, metal.gamma, metal.v_fermi, tol)
    if kind == 'gyromagnetic':
        return GyromagneticSlab(
            eps=scenario.slab_eps_rel,
            omega0=scenario.slab_larmor_rad_s,
            omega_m=scenario.omega_m_rad_s,
            damping=scenario.slab_damping,
            bias_axis=local_axis(scenario.slab_bias_axis, scenario.interface_orientation),
        )
    raise ValueError(f'unknown interface kind {kind!r}')
