import os

import numpy as np
import pytest
from scipy import special

from vacuum_friction.scenario import Scenario, parse_scenario

SCENARIO_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'scenarios')

SLABS = {
    'none': 'interface.kind = none\n',
    'yig': (
        'interface.kind = gyromagnetic\n'
        'interface.orientation = xz_plane\n'
        'interface.bias_oe = 812\n'
        'interface.bias_axis = y\n'
        'yig.slab_eps_rel = 15\n'
    ),
    'yig_normal': (
        'interface.kind = gyromagnetic\n'
        'interface.orientation = xy_plane\n'
        'interface.bias_oe = 812\n'
        'interface.bias_axis = z\n'
        'yig.slab_eps_rel = 15\n'
    ),
    'al': 'interface.kind = metal_nonlocal\n',
    'al_local': 'interface.kind = metal_local\n',
}


def scenario_text(sphere='yig', slab='yig', radius_nm=200.0, distance_nm=500.0, rotation_ghz=1.0,
                  t1=300.0, t0=300.0, pressure_torr=1e-4, rel_tol=1e-3, extra=''):
    lines = [
        f'sphere.material = {"metal" if sphere == "al" else "yig"}',
        f'sphere.radius_nm = {radius_nm!r}',
        f'sphere.rotation_ghz = {rotation_ghz!r}',
        f'sphere.temperature_k = {t1!r}',
        f'environment.t0_k = {t0!r}',
        f'environment.pressure_torr = {pressure_torr!r}',
        f'numerics.rel_tol = {rel_tol!r}',
    ]
    text = '\n'.join(lines) + '\n' + SLABS[slab]
    if slab != 'none':
        text += f'interface.distance_nm = {distance_nm!r}\n'
    if sphere == 'yig' and rotation_ghz == 0 and 'yig.alpha' not in extra:
        text += 'yig.alpha = 1e-4\n'
    return text + extra


def build_scenario(**kwargs) -> Scenario:
    return parse_scenario(scenario_text(**kwargs))


@pytest.fixture
def scenario_builder():
    return build_scenario


@pytest.fixture
def vacuum_yig():
    return build_scenario(sphere='yig', slab='none')


@pytest.fixture
def scenario_file(tmp_path):
    def write(text, name='scenario.cfg'):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def _riccati_psi(z):
    return z * special.spherical_jn(1, z), special.spherical_jn(1, z) + z * special.spherical_jn(1, z, derivative=True)


def mie_b1(size: float, eps: complex) -> complex:
    """First magnetic Mie coefficient for a non-magnetic sphere of size parameter k0·a."""
    m = np.sqrt(complex(eps))
    psi_x, dpsi_x = _riccati_psi(size)
    psi_mx, dpsi_mx = _riccati_psi(m * size)
    h = special.spherical_jn(1, size) + 1j * special.spherical_yn(1, size)
    dh = (special.spherical_jn(1, size, derivative=True) + 1j * special.spherical_yn(1, size, derivative=True))
    xi_x = size * h
    dxi_x = h + size * dh
    return complex((psi_mx * dpsi_x - m * psi_x * dpsi_mx) / (psi_mx * dxi_x - m * xi_x * dpsi_mx))


def mie_magnetic_polarizability(radius: float, size: float, eps: complex) -> complex:
    """4π-normalized magnetic dipole polarizability 6πi b1 / k0³."""
    k0 = size / radius
    return 6j * np.pi * mie_b1(size, eps) / k0 ** 3
