import dataclasses
from typing import Dict, Optional, Tuple
import hashlib
import logging
import math
import re
from configparser import ConfigParser, Error as ConfigParserError

from scipy import constants

from .materials import GYROMAGNETIC_RATIO, barnett_larmor, gilbert_damping

_logger = logging.getLogger('vacfric.scenario')

OE_TO_A_PER_M = 1e3 / (4 * math.pi)
TORR_TO_PA = 133.322
GHZ_TO_RAD_S = 2 * math.pi * 1e9
AIR_MOLAR_MASS_AMU = 28.966

SPHERE_MATERIALS = ('yig', 'metal')
INTERFACE_KINDS = ('none', 'metal_local', 'metal_nonlocal', 'gyromagnetic')
ORIENTATIONS = ('xy_plane', 'xz_plane')
AXES = ('x', 'y', 'z')

REQUIRED_SECTIONS = ('sphere', 'interface', 'environment', 'numerics')
APP_SECTIONS = ('logging', 'misc')


class ScenarioError(Exception):

    def __init__(self, key: Optional[str], message: str):
        self.key = key
        super().__init__(f'{key}: {message}' if key else message)


class OccupationPoleError(ValueError):
    pass


def oe_to_a_per_m(oe: float) -> float:
    return oe * OE_TO_A_PER_M


def a_per_m_to_oe(a_per_m: float) -> float:
    return a_per_m / OE_TO_A_PER_M


def torr_to_pa(torr: float) -> float:
    return torr * TORR_TO_PA


def pa_to_torr(pa: float) -> float:
    return pa / TORR_TO_PA


def thermal_occupation(omega: float, temperature: float) -> float:
    """
    Bose-Einstein occupation n(ω, T) for signed ω.

    Negative frequencies follow n(-ω) = -1 - n(ω). ω = 0 is the Bose pole
    and raises OccupationPoleError; use omega_n() where ω·n(ω) is wanted.
    """
    if temperature < 0:
        raise ValueError(f'negative temperature {temperature}')
    if omega == 0:
        raise OccupationPoleError('thermal occupation has a pole at omega = 0')
    if omega < 0:
        return -1.0 - thermal_occupation(-omega, temperature)
    if temperature == 0:
        return 0.0

    x = constants.hbar * omega / (constants.k * temperature)
    if x > 700:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def omega_n(omega: float, temperature: float) -> float:
    """ω·n(ω, T), continued through ω = 0 with its limit k_B T / ħ."""
    if omega == 0:
        return constants.k * temperature / constants.hbar
    return omega * thermal_occupation(omega, temperature)


@dataclasses.dataclass(frozen=True)
class YigParams:
    ms_a_m: float = oe_to_a_per_m(1780.0)
    dh_a_m: float = oe_to_a_per_m(45.0)
    gamma: float = GYROMAGNETIC_RATIO
    density: float = 5110.0
    eps_rel: Optional[complex] = None
    slab_eps_rel: Optional[complex] = None


@dataclasses.dataclass(frozen=True)
class MetalParams:
    omega_p: float = 2.24e16
    gamma: float = 1.22e14
    v_fermi: float = 2.03e6
    density: float = 2700.0


@dataclasses.dataclass(frozen=True)
class NumericsConfig:
    DEFAULT_KAPPA_CUTOFF = 20 * math.log(10)

    rel_tol: float = 1e-4
    abs_tol: float = 0.0
    kappa_cutoff: float = DEFAULT_KAPPA_CUTOFF
    max_evaluations: int = 1000000
    omega_max_doublings: int = 16
    phi_max_points: int = 512
    electric_channel: bool = False


@dataclasses.dataclass(frozen=True)
class ObservablesConfig:
    laser_torque: float = 1.568e-21
    drag_constant: float = 1.497
    max_temperature_rise_k: float = 2000.0
    distances_m: Tuple[float, ...] = ()
    lab_temperatures_k: Tuple[float, ...] = ()
    stopping_pressure_pa: Optional[float] = None


@dataclasses.dataclass(frozen=True)
class Scenario:
    sphere_material: str
    sphere_radius_m: float
    rotation_rate_rad_s: float
    sphere_temperature_K: float
    environment_temperature_K: float
    interface_kind: str
    interface_orientation: str
    distance_m: float
    slab_bias_field_A_m: float
    slab_bias_axis: str
    sphere_bias_field_A_m: float
    gas_pressure_Pa: float
    gas_molecular_mass_kg: float
    sphere_damping: Optional[float] = None
    slab_damping: Optional[float] = None
    yig: YigParams = YigParams()
    metal: MetalParams = MetalParams()
    numerics: NumericsConfig = NumericsConfig()
    observables: ObservablesConfig = ObservablesConfig()

    @property
    def sphere_larmor_rad_s(self) -> float:
        if self.sphere_material != 'yig':
            return 0.0
        return barnett_larmor(self.rotation_rate_rad_s, self.sphere_bias_field_A_m, self.yig.gamma)

    @property
    def slab_larmor_rad_s(self) -> float:
        if self.interface_kind != 'gyromagnetic':
            return 0.0
        return barnett_larmor(0.0, self.slab_bias_field_A_m, self.yig.gamma)

    @property
    def omega_m_rad_s(self) -> float:
        return constants.mu_0 * self.yig.gamma * self.yig.ms_a_m

    @property
    def slab_eps_rel(self) -> complex:
        if self.yig.slab_eps_rel is not None:
            return self.yig.slab_eps_rel
        if self.yig.eps_rel is not None:
            return self.yig.eps_rel
        return DEFAULT_YIG_SLAB_EPS

    @property
    def sphere_density(self) -> float:
        return self.yig.density if self.sphere_material == 'yig' else self.metal.density

    def with_rotation(self, rotation_rate_rad_s: float) -> 'Scenario':
        # damping stays fixed: it was derived once from the operating point
        return dataclasses.replace(self, rotation_rate_rad_s=rotation_rate_rad_s)


DEFAULT_YIG_SLAB_EPS = 15.0 + 0.0j


# Keys per section; a tuple lists exclusive unit spellings of the same quantity with their SI factor
_UNIT_KEYS = {
    ('sphere', 'radius'): (('radius_nm', 1e-9), ('radius_m', 1.0)),
    ('sphere', 'rotation'): (('rotation_ghz', GHZ_TO_RAD_S), ('rotation_rad_s', 1.0)),
    ('sphere', 'bias'): (('bias_oe', OE_TO_A_PER_M), ('bias_a_m', 1.0)),
    ('interface', 'distance'): (('distance_nm', 1e-9), ('distance_m', 1.0)),
    ('interface', 'bias'): (('bias_oe', OE_TO_A_PER_M), ('bias_a_m', 1.0)),
    ('environment', 'pressure'): (('pressure_torr', TORR_TO_PA), ('pressure_pa', 1.0)),
    ('environment', 'gas_mass'): (('gas_mass_amu', constants.atomic_mass), ('gas_mass_kg', 1.0)),
    ('yig', 'ms'): (('ms_oe', OE_TO_A_PER_M), ('ms_a_m', 1.0)),
    ('yig', 'dh'): (('dh_oe', OE_TO_A_PER_M), ('dh_a_m', 1.0)),
    ('observables', 'distances'): (('distances_nm', 1e-9), ('distances_m', 1.0)),
    ('observables', 'stopping_pressure'): (('stopping_pressure_torr', TORR_TO_PA), ('stopping_pressure_pa', 1.0)),
}

_PLAIN_KEYS = {
    'sphere': ('material', 'temperature_k'),
    'interface': ('kind', 'orientation', 'bias_axis'),
    'environment': ('t0_k',),
    'numerics': ('rel_tol', 'abs_tol', 'kappa_cutoff', 'max_evaluations', 'omega_max_doublings',
                 'phi_max_points', 'electric_channel'),
    'yig': ('eps_rel', 'slab_eps_rel', 'alpha', 'slab_alpha', 'gamma', 'density'),
    'metal': ('omega_p', 'gamma', 'v_fermi', 'density'),
    'observables': ('laser_torque', 'drag_constant', 'max_temperature_rise_k', 'lab_temperatures_k'),
}


def _known_keys() -> Dict[str, set]:
    known = {section: set(keys) for section, keys in _PLAIN_KEYS.items()}
    for (section, _), spellings in _UNIT_KEYS.items():
        known.setdefault(section, set()).update(key for key, _ in spellings)
    return known


def read_scenario_document(text: str) -> ConfigParser:
    """
    Loads either a flat `section.key = value` document or a native INI one.
    """
    config = ConfigParser(interpolation=None, inline_comment_prefixes=('#',))

    if re.search(r'^\s*\[[^\]]+\]', text, re.MULTILINE):
        try:
            config.read_string(text)
        except ConfigParserError as e:
            raise ScenarioError(None, f'malformed scenario document: {e}')
        return config

    sections: Dict[str, Dict[str, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ScenarioError(None, f'line {lineno}: expected "section.key = value"')
        dotted, value = (part.strip() for part in line.split('=', 1))
        if '.' not in dotted:
            raise ScenarioError(dotted, f'line {lineno}: key must be qualified as section.key')
        section, key = (part.strip().lower() for part in dotted.split('.', 1))
        if key in sections.setdefault(section, {}):
            raise ScenarioError(f'{section}.{key}', f'line {lineno}: duplicate key')
        sections[section][key] = value

    config.read_dict(sections)
    return config


def _get_float(config, section, key, fallback=None, required=False) -> Optional[float]:
    if not config.has_option(section, key):
        if required:
            raise ScenarioError(f'{section}.{key}', 'missing required key')
        return fallback
    raw = config.get(section, key)
    try:
        return float(raw)
    except ValueError:
        raise ScenarioError(f'{section}.{key}', f'not a number: {raw!r}')


def _get_complex(config, section, key) -> Optional[complex]:
    if not config.has_option(section, key):
        return None
    raw = config.get(section, key).replace(' ', '')
    try:
        return complex(raw)
    except ValueError:
        raise ScenarioError(f'{section}.{key}', f'not a complex number: {raw!r}')


def _get_choice(config, section, key, choices, fallback=None) -> str:
    if not config.has_option(section, key):
        if fallback is None:
            raise ScenarioError(f'{section}.{key}', 'missing required key')
        return fallback
    value = config.get(section, key).strip().lower()
    if value not in choices:
        raise ScenarioError(f'{section}.{key}', f'unknown token {value!r}, expected one of {", ".join(choices)}')
    return value


def _get_with_unit(config, section, quantity, fallback=None, required=False) -> Optional[float]:
    spellings = _UNIT_KEYS[(section, quantity)]
    present = [(key, factor) for key, factor in spellings if config.has_option(section, key)]
    if len(present) > 1:
        raise ScenarioError(f'{section}.{present[0][0]}', f'conflicts with {section}.{present[1][0]}')
    if not present:
        if required:
            raise ScenarioError(f'{section}.{spellings[0][0]}', 'missing required key')
        return fallback
    key, factor = present[0]
    return _get_float(config, section, key) * factor


def _get_list_with_unit(config, section, quantity) -> Tuple[float, ...]:
    spellings = _UNIT_KEYS[(section, quantity)]
    present = [(key, factor) for key, factor in spellings if config.has_option(section, key)]
    if len(present) > 1:
        raise ScenarioError(f'{section}.{present[0][0]}', f'conflicts with {section}.{present[1][0]}')
    if not present:
        return ()
    key, factor = present[0]
    return tuple(v * factor for v in _split_floats(config, section, key))


def _split_floats(config, section, key) -> Tuple[float, ...]:
    raw = config.get(section, key)
    try:
        return tuple(float(v) for v in raw.split(',') if v.strip())
    except ValueError:
        raise ScenarioError(f'{section}.{key}', f'not a comma separated list of numbers: {raw!r}')


def _check(condition: bool, key: str, message: str) -> None:
    if not condition:
        raise ScenarioError(key, message)


def scenario_from_config(config: ConfigParser) -> Scenario:
    known = _known_keys()
    for section in config.sections():
        if section in APP_SECTIONS:
            continue
        if section not in known:
            raise ScenarioError(section, 'unknown section')
        for key in config.options(section):
            if key not in known[section]:
                raise ScenarioError(f'{section}.{key}', 'unknown key')
    for section in REQUIRED_SECTIONS:
        if not config.has_section(section):
            raise ScenarioError(section, 'missing required section')

    numerics = NumericsConfig(
        rel_tol=_get_float(config, 'numerics', 'rel_tol', fallback=NumericsConfig.rel_tol),
        abs_tol=_get_float(config, 'numerics', 'abs_tol', fallback=NumericsConfig.abs_tol),
        kappa_cutoff=_get_float(config, 'numerics', 'kappa_cutoff', fallback=NumericsConfig.DEFAULT_KAPPA_CUTOFF),
        max_evaluations=int(_get_float(config, 'numerics', 'max_evaluations', fallback=NumericsConfig.max_evaluations)),
        omega_max_doublings=int(_get_float(config, 'numerics', 'omega_max_doublings', fallback=NumericsConfig.omega_max_doublings)),
        phi_max_points=int(_get_float(config, 'numerics', 'phi_max_points', fallback=NumericsConfig.phi_max_points)),
        electric_channel=_get_bool(config, 'numerics', 'electric_channel', fallback=False),
    )
    _check(0 < numerics.rel_tol < 1, 'numerics.rel_tol', 'must lie in (0, 1)')
    _check(numerics.abs_tol >= 0, 'numerics.abs_tol', 'must be >= 0')
    _check(numerics.kappa_cutoff > 0, 'numerics.kappa_cutoff', 'must be > 0')
    _check(numerics.max_evaluations > 0, 'numerics.max_evaluations', 'must be > 0')
    _check(numerics.omega_max_doublings >= 0, 'numerics.omega_max_doublings', 'must be >= 0')
    _check(numerics.phi_max_points >= 4, 'numerics.phi_max_points', 'must be >= 4')

    yig = YigParams(
        ms_a_m=_get_with_unit(config, 'yig', 'ms', fallback=YigParams.ms_a_m),
        dh_a_m=_get_with_unit(config, 'yig', 'dh', fallback=YigParams.dh_a_m),
        gamma=_get_float(config, 'yig', 'gamma', fallback=GYROMAGNETIC_RATIO),
        density=_get_float(config, 'yig', 'density', fallback=YigParams.density),
        eps_rel=_get_complex(config, 'yig', 'eps_rel'),
        slab_eps_rel=_get_complex(config, 'yig', 'slab_eps_rel'),
    )
    _check(yig.ms_a_m > 0, 'yig.ms_oe', 'must be > 0')
    _check(yig.dh_a_m >= 0, 'yig.dh_oe', 'must be >= 0')
    _check(yig.gamma > 0, 'yig.gamma', 'must be > 0')
    _check(yig.density > 0, 'yig.density', 'must be > 0')

    metal = MetalParams(
        omega_p=_get_float(config, 'metal', 'omega_p', fallback=MetalParams.omega_p),
        gamma=_get_float(config, 'metal', 'gamma', fallback=MetalParams.gamma),
        v_fermi=_get_float(config, 'metal', 'v_fermi', fallback=MetalParams.v_fermi),
        density=_get_float(config, 'metal', 'density', fallback=MetalParams.density),
    )
    _check(metal.omega_p > 0, 'metal.omega_p', 'must be > 0')
    _check(metal.gamma > 0, 'metal.gamma', 'must be > 0')
    _check(metal.v_fermi > 0, 'metal.v_fermi', 'must be > 0')
    _check(metal.density > 0, 'metal.density', 'must be > 0')

    sphere_material = _get_choice(config, 'sphere', 'material', SPHERE_MATERIALS)
    radius = _get_with_unit(config, 'sphere', 'radius', required=True)
    rotation = _get_with_unit(config, 'sphere', 'rotation', required=True)
    sphere_bias = _get_with_unit(config, 'sphere', 'bias', fallback=0.0)
    t0 = _get_float(config, 'environment', 't0_k', required=True)
    t1 = _get_float(config, 'sphere', 'temperature_k', fallback=t0)

    interface_kind = _get_choice(config, 'interface', 'kind', INTERFACE_KINDS)
    orientation = _get_choice(config, 'interface', 'orientation', ORIENTATIONS, fallback='xy_plane')
    distance = _get_with_unit(config, 'interface', 'distance', required=(interface_kind != 'none'), fallback=math.inf)
    slab_bias = _get_with_unit(config, 'interface', 'bias', fallback=0.0)
    slab_bias_axis = _get_choice(config, 'interface', 'bias_axis', AXES, fallback='z')

    pressure = _get_with_unit(config, 'environment', 'pressure', fallback=0.0)
    gas_mass = _get_with_unit(config, 'environment', 'gas_mass', fallback=AIR_MOLAR_MASS_AMU * constants.atomic_mass)

    _check(radius > 0, 'sphere.radius_nm', 'must be > 0')
    _check(rotation >= 0, 'sphere.rotation_ghz', 'must be >= 0')
    _check(sphere_bias >= 0, 'sphere.bias_oe', 'must be >= 0')
    _check(t0 >= 0, 'environment.t0_k', 'must be >= 0')
    _check(t1 >= 0, 'sphere.temperature_k', 'must be >= 0')
    _check(distance > radius, 'interface.distance_nm', 'sphere must lie fully outside the slab (distance > radius)')
    _check(slab_bias >= 0, 'interface.bias_oe', 'must be >= 0')
    _check(pressure >= 0, 'environment.pressure_torr', 'must be >= 0')
    _check(gas_mass > 0, 'environment.gas_mass_amu', 'must be > 0')

    sphere_damping = None
    if sphere_material == 'yig':
        sphere_damping = _get_float(config, 'yig', 'alpha')
        if sphere_damping is None:
            reference = barnett_larmor(rotation, sphere_bias, yig.gamma)
            _check(reference > 0, 'yig.alpha', 'YIG sphere with zero rotation and zero bias needs an explicit damping')
            sphere_damping = gilbert_damping(yig.dh_a_m, reference, yig.gamma)
        _check(sphere_damping >= 0, 'yig.alpha', 'must be >= 0')
        if numerics.electric_channel:
            _check(yig.eps_rel is not None, 'yig.eps_rel', 'required for a YIG sphere when numerics.electric_channel is on')

    slab_damping = None
    if interface_kind == 'gyromagnetic':
        slab_damping = _get_float(config, 'yig', 'slab_alpha')
        if slab_damping is None:
            reference = barnett_larmor(0.0, slab_bias, yig.gamma)
            _check(reference > 0, 'yig.slab_alpha', 'unbiased YIG slab needs an explicit damping')
            slab_damping = gilbert_damping(yig.dh_a_m, reference, yig.gamma)
        _check(slab_damping >= 0, 'yig.slab_alpha', 'must be >= 0')
        if yig.slab_eps_rel is None and yig.eps_rel is None:
            _logger.warning(f'yig.slab_eps_rel not set; using {DEFAULT_YIG_SLAB_EPS.real:g} for the YIG slab')

    observables = ObservablesConfig(
        laser_torque=_get_float(config, 'observables', 'laser_torque', fallback=ObservablesConfig.laser_torque),
        drag_constant=_get_float(config, 'observables', 'drag_constant', fallback=ObservablesConfig.drag_constant),
        max_temperature_rise_k=_get_float(config, 'observables', 'max_temperature_rise_k',
                                          fallback=ObservablesConfig.max_temperature_rise_k),
        distances_m=_get_list_with_unit(config, 'observables', 'distances'),
        lab_temperatures_k=(_split_floats(config, 'observables', 'lab_temperatures_k')
                            if config.has_option('observables', 'lab_temperatures_k') else ()),
        stopping_pressure_pa=_get_with_unit(config, 'observables', 'stopping_pressure'),
    )
    _check(observables.laser_torque > 0, 'observables.laser_torque', 'must be > 0')
    _check(observables.drag_constant > 0, 'observables.drag_constant', 'must be > 0')
    _check(observables.max_temperature_rise_k > 0, 'observables.max_temperature_rise_k', 'must be > 0')
    _check(all(d > radius for d in observables.distances_m), 'observables.distances_nm',
           'every distance must exceed the sphere radius')
    _check(all(t >= 0 for t in observables.lab_temperatures_k), 'observables.lab_temperatures_k', 'must be >= 0')
    _check(observables.stopping_pressure_pa is None or observables.stopping_pressure_pa >= 0,
           'observables.stopping_pressure_torr', 'must be >= 0')

    return Scenario(
        sphere_material=sphere_material,
        sphere_radius_m=radius,
        rotation_rate_rad_s=rotation,
        sphere_temperature_K=t1,
        environment_temperature_K=t0,
        interface_kind=interface_kind,
        interface_orientation=orientation,
        distance_m=distance,
        slab_bias_field_A_m=slab_bias,
        slab_bias_axis=slab_bias_axis,
        sphere_bias_field_A_m=sphere_bias,
        gas_pressure_Pa=pressure,
        gas_molecular_mass_kg=gas_mass,
        sphere_damping=sphere_damping,
        slab_damping=slab_damping,
        yig=yig,
        metal=metal,
        numerics=numerics,
        observables=observables,
    )


def _get_bool(config, section, key, fallback) -> bool:
    try:
        return config.getboolean(section, key, fallback=fallback)
    except ValueError:
        raise ScenarioError(f'{section}.{key}', f'not a boolean: {config.get(section, key)!r}')


def parse_scenario(text: str) -> Scenario:
    return scenario_from_config(read_scenario_document(text))


def render_scenario(scenario: Scenario) -> str:
    """
    Canonical flat rendering in SI spellings. Floats go through repr so
    parse_scenario(render_scenario(s)) == s holds exactly.
    """
    lines = [
        f'sphere.material = {scenario.sphere_material}',
        f'sphere.radius_m = {scenario.sphere_radius_m!r}',
        f'sphere.rotation_rad_s = {scenario.rotation_rate_rad_s!r}',
        f'sphere.temperature_k = {scenario.sphere_temperature_K!r}',
        f'sphere.bias_a_m = {scenario.sphere_bias_field_A_m!r}',
        f'interface.kind = {scenario.interface_kind}',
        f'interface.orientation = {scenario.interface_orientation}',
        f'interface.distance_m = {scenario.distance_m!r}',
        f'interface.bias_a_m = {scenario.slab_bias_field_A_m!r}',
        f'interface.bias_axis = {scenario.slab_bias_axis}',
        f'environment.t0_k = {scenario.environment_temperature_K!r}',
        f'environment.pressure_pa = {scenario.gas_pressure_Pa!r}',
        f'environment.gas_mass_kg = {scenario.gas_molecular_mass_kg!r}',
    ]

    numerics = scenario.numerics
    lines += [
        f'numerics.rel_tol = {numerics.rel_tol!r}',
        f'numerics.abs_tol = {numerics.abs_tol!r}',
        f'numerics.kappa_cutoff = {numerics.kappa_cutoff!r}',
        f'numerics.max_evaluations = {numerics.max_evaluations!r}',
        f'numerics.omega_max_doublings = {numerics.omega_max_doublings!r}',
        f'numerics.phi_max_points = {numerics.phi_max_points!r}',
        f'numerics.electric_channel = {"true" if numerics.electric_channel else "false"}',
    ]

    yig = scenario.yig
    lines += [
        f'yig.ms_a_m = {yig.ms_a_m!r}',
        f'yig.dh_a_m = {yig.dh_a_m!r}',
        f'yig.gamma = {yig.gamma!r}',
        f'yig.density = {yig.density!r}',
    ]
    if yig.eps_rel is not None:
        lines.append(f'yig.eps_rel = {yig.eps_rel!r}')
    if yig.slab_eps_rel is not None:
        lines.append(f'yig.slab_eps_rel = {yig.slab_eps_rel!r}')
    if scenario.sphere_damping is not None:
        lines.append(f'yig.alpha = {scenario.sphere_damping!r}')
    if scenario.slab_damping is not None:
        lines.append(f'yig.slab_alpha = {scenario.slab_damping!r}')

    metal = scenario.metal
    lines += [
        f'metal.omega_p = {metal.omega_p!r}',
        f'metal.gamma = {metal.gamma!r}',
        f'metal.v_fermi = {metal.v_fermi!r}',
        f'metal.density = {metal.density!r}',
    ]

    observables = scenario.observables
    lines += [
        f'observables.laser_torque = {observables.laser_torque!r}',
        f'observables.drag_constant = {observables.drag_constant!r}',
        f'observables.max_temperature_rise_k = {observables.max_temperature_rise_k!r}',
    ]
    if observables.distances_m:
        lines.append(f'observables.distances_m = {", ".join(repr(d) for d in observables.distances_m)}')
    if observables.lab_temperatures_k:
        lines.append(f'observables.lab_temperatures_k = {", ".join(repr(t) for t in observables.lab_temperatures_k)}')
    if observables.stopping_pressure_pa is not None:
        lines.append(f'observables.stopping_pressure_pa = {observables.stopping_pressure_pa!r}')

    return '\n'.join(lines) + '\n'


def scenario_hash(scenario: Scenario) -> str:
    return hashlib.sha256(render_scenario(scenario).encode('utf-8')).hexdigest()
