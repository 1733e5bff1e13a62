import dataclasses
import math

import numpy as np
import pytest
from scipy import constants

from vacuum_friction import greens
from vacuum_friction.greens import (
    GreensCalculator, greens_tensor, greens_weights, ldos, vacuum_density_of_states,
)
from vacuum_friction.materials import ELECTRIC, GYROMAGNETIC_RATIO, MAGNETIC
from vacuum_friction.reflection import GyromagneticSlab, LocalDielectric, LocalMetal, NoInterface
from vacuum_friction.scenario import OE_TO_A_PER_M

GHZ = 2 * math.pi * 1e9
AL = LocalMetal(omega_p=2.24e16, gamma=1.22e14)
VACUUM_WEIGHTS = (4 / 3, 4 / 3, 2 / 3, 0.0, 0.0)


def yig_slab():
    omega0 = constants.mu_0 * GYROMAGNETIC_RATIO * 812 * OE_TO_A_PER_M
    omega_m = constants.mu_0 * GYROMAGNETIC_RATIO * 1780 * OE_TO_A_PER_M
    return GyromagneticSlab(15.0, omega0, omega_m, 0.05, np.array([0.0, 0.0, 1.0]))


def test_vacuum_weights():
    for channel in (MAGNETIC, ELECTRIC):
        weights = greens_weights(GHZ, 500e-9, 'xy_plane', NoInterface(), channel)
        assert weights.as_tuple() == pytest.approx(VACUUM_WEIGHTS, abs=1e-9)


def test_transparent_interface_integrates_to_vacuum():
    weights = greens_weights(GHZ, 500e-9, 'xy_plane', LocalDielectric(1.0))
    assert weights.as_tuple() == pytest.approx(VACUUM_WEIGHTS, abs=1e-9)


def test_vacuum_ldos_identity():
    rng = np.random.default_rng(7)
    for _ in range(10):
        omega = 10 ** rng.uniform(8, 14)
        distance = 10 ** rng.uniform(-8, -3)
        density = ldos(omega, distance, 'xy_plane', NoInterface())
        rho0 = vacuum_density_of_states(omega)
        assert abs(density.total / rho0 - 1) < 1e-6
        assert density.electric == pytest.approx(rho0 / 2)


def test_far_interface_approaches_vacuum():
    omega = 2 * math.pi * 1e12
    weights = greens_weights(omega, 0.1, 'xy_plane', AL, tol=1e-6, budget=5_000_000)
    assert weights.as_tuple() == pytest.approx(VACUUM_WEIGHTS, abs=1e-2)


def test_metal_near_field_is_magnetic():
    density = ldos(GHZ, 500e-9, 'xy_plane', AL)
    assert density.magnetic > 1e3 * density.electric


def test_magnetic_ldos_grows_towards_metal():
    values = [ldos(GHZ, d, 'xy_plane', AL).magnetic for d in (10e-6, 3e-6, 1e-6, 0.3e-6, 0.1e-6)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_isotropic_interface_has_no_gyrotropic_weights():
    weights = greens_weights(GHZ, 500e-9, 'xy_plane', AL)
    scale = max(abs(w) for w in weights.as_tuple())
    assert abs(weights.g_g1) < 1e-12 * scale
    assert abs(weights.g_g2) < 1e-12 * scale
    assert weights.g_perp1 == pytest.approx(weights.g_perp2, rel=1e-9)


def test_negative_frequency_is_conjugate():
    positive = greens_tensor(GHZ, 500e-9, 'xy_plane', AL)
    negative = greens_tensor(-GHZ, 500e-9, 'xy_plane', AL)
    assert np.allclose(negative.lab, positive.lab.conj())


def test_orientation_moves_the_normal():
    slab = yig_slab()
    omega = 1.1 * slab.omega0
    flat = greens_tensor(omega, 500e-9, 'xy_plane', slab)
    wall = greens_tensor(omega, 500e-9, 'xz_plane', slab)
    assert wall.lab[1, 1] == pytest.approx(flat.lab[2, 2], rel=1e-9)
    assert wall.lab[2, 2] == pytest.approx(flat.lab[0, 0], rel=1e-9)
    assert greens_weights(omega, 500e-9, 'xz_plane', slab).as_tuple() == pytest.approx(
        greens_weights(omega, 500e-9, 'xy_plane', slab).as_tuple(), rel=1e-9)


def test_biased_slab_has_gyrotropic_weight():
    slab = yig_slab()
    weights = greens_weights(1.1 * slab.omega0, 500e-9, 'xy_plane', slab)
    assert abs(weights.g_g1) > 1e-6 * weights.g_perp1


def test_calculator_memoizes_and_conjugates():
    calculator = GreensCalculator(AL, 500e-9, 'xy_plane')
    first = calculator.tensor(GHZ)
    assert calculator.tensor(GHZ) is first
    assert np.array_equal(calculator.tensor(-GHZ).lab, first.lab.conj())
    assert calculator.all_converged


def test_invalid_arguments():
    with pytest.raises(ValueError):
        greens_tensor(0.0, 500e-9, 'xy_plane', AL)
    with pytest.raises(ValueError):
        greens_tensor(GHZ, 0.0, 'xy_plane', AL)
    with pytest.raises(ValueError):
        greens_tensor(GHZ, 500e-9, 'xy_plane', AL, channel='acoustic')


def test_convergence_is_reported_per_frequency(monkeypatch):
    exact = greens.greens_tensor

    def flagged(omega, *args, **kwargs):
        result = exact(omega, *args, **kwargs)
        return dataclasses.replace(result, converged=False) if omega == GHZ else result

    monkeypatch.setattr(greens, 'greens_tensor', flagged)
    calculator = GreensCalculator(NoInterface(), 500e-9, 'xy_plane')
    calculator.ldos(GHZ)
    calculator.ldos(3 * GHZ)
    assert not calculator.converged_at(GHZ)
    assert not calculator.converged_at(-GHZ)
    assert calculator.converged_at(3 * GHZ)
    assert not calculator.all_converged


def test_calculator_cache_is_bounded():
    calculator = GreensCalculator(NoInterface(), 500e-9, 'xy_plane', cache_entries=2)
    first = calculator.tensor(GHZ)
    evicted = calculator.tensor(2 * GHZ)
    assert calculator.tensor(GHZ) is first
    calculator.tensor(3 * GHZ)
    assert calculator.cache_size() == 2
    assert calculator.tensor(GHZ) is first
    assert calculator.tensor(2 * GHZ) is not evicted
    with pytest.raises(ValueError):
        GreensCalculator(NoInterface(), 500e-9, 'xy_plane', cache_entries=0)
