import dataclasses
import math

import numpy as np
import pytest
from scipy import constants

from vacuum_friction.materials import GYROMAGNETIC_RATIO, yig_permeability
from vacuum_friction.reflection import (
    GyromagneticSlab, LocalDielectric, LocalMetal, NoInterface, NonlocalMetal, ReflectionMatrix, fresnel_gyromagnetic,
    fresnel_local, fresnel_nonlocal_scib, local_axis, reflection_for_scenario, slab_modes_gyromagnetic,
)
from vacuum_friction.scenario import OE_TO_A_PER_M

from .conftest import build_scenario

GHZ = 2 * math.pi * 1e9
OMEGA_M = constants.mu_0 * GYROMAGNETIC_RATIO * 1780 * OE_TO_A_PER_M
OMEGA_0 = constants.mu_0 * GYROMAGNETIC_RATIO * 812 * OE_TO_A_PER_M
AL = dict(omega_p=2.24e16, gamma=1.22e14)
Z_AXIS = np.array([0.0, 0.0, 1.0])


def relative_mu(omega, axis, damping=1e-3):
    return yig_permeability(omega, OMEGA_0, OMEGA_M, damping).tensor(axis) / constants.mu_0


def test_normal_incidence_dielectric():
    r = fresnel_local(GHZ, 0.0, 4.0)
    assert r.r_pp == pytest.approx(1 / 3)
    assert r.r_ss == pytest.approx(-1 / 3)
    assert r.r_sp == 0 and r.r_ps == 0


def test_isotropic_reduction_of_anisotropic_solver():
    eps = 4.0 + 0.5j
    for kappa in np.linspace(0.0, 5.0, 50):
        for phi in np.linspace(0.0, 2 * math.pi, 20, endpoint=False):
            aniso = fresnel_gyromagnetic(kappa, math.cos(phi), math.sin(phi), eps * np.eye(3), np.eye(3))
            iso = fresnel_local(GHZ, kappa, eps)
            assert np.allclose(aniso.as_array(), iso.as_array(), atol=1e-8), (kappa, phi)


def test_polar_bias_is_rotationally_symmetric():
    mu = relative_mu(1.2 * OMEGA_0, Z_AXIS)
    eps = 15.0 * np.eye(3)
    for kappa in (0.3, 2.0, 40.0):
        reference = None
        spread = []
        for phi in np.linspace(0.0, 2 * math.pi, 12, endpoint=False):
            modes = slab_modes_gyromagnetic(kappa, math.cos(phi), math.sin(phi), eps, mu)
            roots = np.sort_complex(np.array(modes.roots))
            r = fresnel_gyromagnetic(kappa, math.cos(phi), math.sin(phi), eps, mu).as_array()
            if reference is None:
                reference = (roots, r)
            spread.append(np.max(np.abs(roots - reference[0])))
            assert np.allclose(r, reference[1], atol=1e-8)
        assert max(spread) < 1e-10 * max(1.0, np.max(np.abs(reference[0])))


def test_slab_mode_residuals():
    mu = relative_mu(0.8 * OMEGA_0, np.array([1.0, 0.0, 0.0]))
    for kappa in (0.0, 0.5, 3.0, 100.0):
        modes = slab_modes_gyromagnetic(kappa, math.cos(0.4), math.sin(0.4), 15.0 * np.eye(3), mu)
        assert len(modes.roots) == 2
        assert max(modes.residuals) < 1e-8


def test_field_reversal_flips_cross_polarization():
    eps = 15.0 * np.eye(3)
    for kappa in (0.2, 0.9, 5.0):
        forward = fresnel_gyromagnetic(kappa, 0.6, 0.8, eps, relative_mu(1.1 * OMEGA_0, Z_AXIS))
        reverse = fresnel_gyromagnetic(kappa, 0.6, 0.8, eps, relative_mu(1.1 * OMEGA_0, -Z_AXIS))
        assert reverse.r_ss == pytest.approx(forward.r_ss, abs=1e-9)
        assert reverse.r_pp == pytest.approx(forward.r_pp, abs=1e-9)
        assert reverse.r_sp == pytest.approx(-forward.r_sp, abs=1e-9)
        assert reverse.r_ps == pytest.approx(-forward.r_ps, abs=1e-9)
        assert abs(forward.r_sp) > 1e-6


def test_passive_slab_reflects_at_most_unity():
    eps = 15.0 * np.eye(3)
    mu = relative_mu(0.3 * OMEGA_0, np.array([0.0, 1.0, 0.0]), damping=1e-4)
    for kappa in np.linspace(0.0, 0.99, 12):
        for phi in (0.0, 0.7, 2.1):
            r = fresnel_gyromagnetic(kappa, math.cos(phi), math.sin(phi), eps, mu)
            assert abs(r.r_ss) ** 2 + abs(r.r_ps) ** 2 <= 1 + 1e-6
            assert abs(r.r_sp) ** 2 + abs(r.r_pp) ** 2 <= 1 + 1e-6


def test_nonlocal_tends_to_local_for_slow_electrons():
    local = LocalMetal(**AL)
    slow = NonlocalMetal(v_fermi=2.03e6 * 1e-3, **AL)
    for kappa in (0.0, 0.5, 2.0, 10.0, 100.0, 300.0, 1000.0):
        expected = local.at(GHZ, kappa, 1.0, 0.0)
        actual = slow.at(GHZ, kappa, 1.0, 0.0)
        assert abs(actual.r_ss - expected.r_ss) < 1e-2 * max(abs(expected.r_ss), 1e-3)
        assert abs(actual.r_pp - expected.r_pp) < 1e-2 * max(abs(expected.r_pp), 1e-3)


def test_nonlocal_normal_incidence_degeneracy():
    r = fresnel_nonlocal_scib(GHZ, 1e-4, v_fermi=2.03e6, **AL)
    assert abs(r.r_ss + r.r_pp) < 1e-3


def test_metal_evanescent_s_loss_dominates():
    r = LocalMetal(**AL).at(GHZ, 100.0, 1.0, 0.0)
    assert r.r_ss.imag > 100 * abs(r.r_pp.imag)


def test_negative_frequency_conjugates():
    provider = LocalDielectric(4.0 + 1.0j)
    assert provider.at(-GHZ, 0.5, 1.0, 0.0) == provider.at(GHZ, 0.5, 1.0, 0.0).conjugate()
    with pytest.raises(ValueError):
        provider.at(0.0, 0.5, 1.0, 0.0)


def test_vacuum_provider():
    provider = NoInterface()
    assert provider.is_vacuum
    assert provider(GHZ, 3.0, 0.2) == ReflectionMatrix.zero()


def test_interface_frame_axes():
    assert np.allclose(local_axis('y', 'xz_plane'), [0.0, 0.0, 1.0])
    assert np.allclose(local_axis('z', 'xz_plane'), [0.0, 1.0, 0.0])
    assert np.allclose(local_axis('y', 'xy_plane'), [0.0, 1.0, 0.0])


def test_providers_for_scenarios():
    yig = reflection_for_scenario(build_scenario(slab='yig'))
    assert isinstance(yig, GyromagneticSlab)
    assert yig.phi_independent
    assert yig.omega0 == pytest.approx(OMEGA_0)

    in_plane = reflection_for_scenario(dataclasses.replace(build_scenario(slab='yig'), slab_bias_axis='x'))
    assert not in_plane.phi_independent

    assert isinstance(reflection_for_scenario(build_scenario(slab='al')), NonlocalMetal)
    assert isinstance(reflection_for_scenario(build_scenario(slab='al_local')), LocalMetal)
    assert isinstance(reflection_for_scenario(build_scenario(slab='none')), NoInterface)
