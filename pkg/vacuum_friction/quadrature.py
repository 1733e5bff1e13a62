import dataclasses
from typing import Callable, Optional, Sequence
import logging
import math

import numpy as np
from scipy import integrate, optimize

_logger = logging.getLogger('vacfric.quadrature')

DEFAULT_BUDGET = 1000000
GK21_NODES = 21
EPSABS_FLOOR = 1e-200
MAX_CUTOFF_EXTENSIONS = 4


class NonDecayingIntegrandError(ValueError):
    pass


class NoSignChangeError(ValueError):
    pass


@dataclasses.dataclass
class IntegralResult:
    value: complex
    error_estimate: float
    evaluations: int
    converged: bool = True

    def __add__(self, other: 'IntegralResult') -> 'IntegralResult':
        return IntegralResult(
            value=self.value + other.value,
            error_estimate=self.error_estimate + other.error_estimate,
            evaluations=self.evaluations + other.evaluations,
            converged=self.converged and other.converged,
        )

    def scaled(self, factor) -> 'IntegralResult':
        return IntegralResult(self.value * factor, self.error_estimate * abs(factor), self.evaluations, self.converged)


def _as_real_stack(f: Callable):
    """quad_vec integrates real vectors; complex (array) integrands are stacked as [re, im]."""
    shape = []

    def g(x):
        v = np.asarray(f(x), dtype=complex)
        if not shape:
            shape.append(v.shape)
        flat = v.ravel()
        return np.concatenate([flat.real, flat.imag])

    def unstack(y):
        y = np.asarray(y)
        half = y.size // 2
        v = y[:half] + 1j * y[half:]
        if shape and shape[0] == ():
            return complex(v[0])
        return v.reshape(shape[0]) if shape else v

    return g, unstack


def _quad(f: Callable, a: float, b: float, tol: float, tol_abs: float = 0.0,
          budget: int = DEFAULT_BUDGET, points: Optional[Sequence[float]] = None, workers=1) -> IntegralResult:
    if a == b:
        return IntegralResult(0j, 0.0, 0, True)

    g, unstack = _as_real_stack(f)
    if points is not None:
        lo, hi = min(a, b), max(a, b)
        points = sorted({p for p in points if lo < p < hi}) or None

    res, err, info = integrate.quad_vec(
        g, a, b,
        epsabs=max(tol_abs, EPSABS_FLOOR),
        epsrel=tol,
        norm='max',
        limit=max(budget // GK21_NODES, 1),
        points=points,
        workers=workers,
        full_output=True,
    )

    result = IntegralResult(
        value=unstack(res),
        error_estimate=float(err),
        evaluations=int(info.neval),
        converged=bool(info.success),
    )
    _logger.debug(f'quad_vec on [{a:.6g}, {b:.6g}]: err={result.error_estimate:.3g} neval={result.evaluations}')
    if not result.converged:
        _logger.warning(f'integral on [{a:.6g}, {b:.6g}] did not converge: {info.message}')
    return result


def integrate_finite(f: Callable, a: float, b: float, tol: float, tol_abs: float = 0.0,
                     endpoint_singularity: Optional[str] = None, budget: int = DEFAULT_BUDGET,
                     points: Optional[Sequence[float]] = None, workers=1) -> IntegralResult:
    """
    ∫_a^b f(x) dx for a < b.

    `endpoint_singularity` ('lower', 'upper' or 'both') switches to a sine
    map that cancels inverse square-root endpoint behaviour such as
    1/sqrt(1 - x²) at x = 1.
    """
    if not a < b:
        raise ValueError(f'integrate_finite requires a < b, got [{a}, {b}]')

    width = b - a
    if endpoint_singularity is None:
        return _quad(f, a, b, tol, tol_abs, budget, points, workers)

    if endpoint_singularity == 'upper':
        def mapped(t):
            return f(a + width * math.sin(t)) * (width * math.cos(t))

        def to_t(x):
            return math.asin((x - a) / width)

        lo, hi = 0.0, math.pi / 2
    elif endpoint_singularity == 'lower':
        def mapped(t):
            return f(a + width * (1 - math.cos(t))) * (width * math.sin(t))

        def to_t(x):
            return math.acos(1 - (x - a) / width)

        lo, hi = 0.0, math.pi / 2
    elif endpoint_singularity == 'both':
        mid = 0.5 * (a + b)
        half = 0.5 * width

        def mapped(t):
            return f(mid + half * math.sin(t)) * (half * math.cos(t))

        def to_t(x):
            return math.asin((x - mid) / half)

        lo, hi = -math.pi / 2, math.pi / 2
    else:
        raise ValueError(f'unknown endpoint_singularity {endpoint_singularity!r}')

    mapped_points = [to_t(p) for p in points if a < p < b] if points else None
    return _quad(mapped, lo, hi, tol, tol_abs, budget, mapped_points, workers)


def integrate_evanescent(f: Callable, a: float, decay_scale: float, tol: float, tol_abs: float = 0.0,
                         cutoff: Optional[float] = None, budget: int = DEFAULT_BUDGET,
                         max_extensions: int = MAX_CUTOFF_EXTENSIONS) -> IntegralResult:
    """
    ∫_a^∞ f(x) dx for an integrand decaying like exp(-(x - a)/decay_scale).

    Integrates on x = a + s(cosh t - 1), which also absorbs an inverse
    square-root singularity at x = a. The cutoff defaults to
    a + 20 ln(10)·s and is doubled while the tail bound |f(X)|·s exceeds
    the tolerance.
    """
    if decay_scale <= 0:
        raise ValueError(f'decay_scale must be positive, got {decay_scale}')
    s = decay_scale
    x_max = cutoff if cutoff is not None else a + 20 * math.log(10) * s

    def mapped(t):
        return f(a + s * (math.cosh(t) - 1)) * (s * math.sinh(t))

    def to_t(x):
        return math.acosh(1 + (x - a) / s)

    t_max = to_t(x_max)
    result = _quad(mapped, 0.0, t_max, tol, tol_abs, budget)

    for extension in range(max_extensions + 1):
        edge = float(np.max(np.abs(f(x_max))))
        tail = edge * s
        if tail <= max(tol * float(np.max(np.abs(result.value))), tol_abs):
            return result

        next_x = a + 2 * (x_max - a)
        beyond = float(np.max(np.abs(f(next_x))))
        if beyond >= edge:
            raise NonDecayingIntegrandError(
                f'integrand does not decay beyond x = {x_max:.6g} (|f| = {edge:.3g} -> {beyond:.3g})')
        if extension == max_extensions:
            break

        _logger.debug(f'extending evanescent cutoff {x_max:.6g} -> {next_x:.6g} (tail bound {tail:.3g})')
        next_t = to_t(next_x)
        result = result + _quad(mapped, t_max, next_t, tol, tol_abs, budget)
        x_max, t_max = next_x, next_t

    _logger.warning(f'evanescent tail bound not met at cutoff {x_max:.6g}')
    result.converged = False
    return result


def integrate_semi_infinite(f: Callable, a: float, scale: float, tol: float, tol_abs: float = 0.0,
                            budget: int = DEFAULT_BUDGET, points: Optional[Sequence[float]] = None) -> IntegralResult:
    """
    ∫_a^∞ f(x) dx for algebraically decaying integrands, mapped onto
    [0, 1) by x = a + scale·t/(1 - t).
    """
    if scale <= 0:
        raise ValueError(f'scale must be positive, got {scale}')

    def mapped(t):
        return f(a + scale * t / (1 - t)) * (scale / (1 - t) ** 2)

    mapped_points = [(p - a) / (p - a + scale) for p in points if p > a] if points else None
    return _quad(mapped, 0.0, 1.0, tol, tol_abs, budget, mapped_points)


# cos/sin on the quarter turns, exact so odd harmonics cancel to zero
QUARTER_TURNS = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))


def integrate_periodic(f: Callable, tol: float, tol_abs: float = 0.0, n_start: int = 8,
                       max_points: int = 512, exact_four_point: bool = False) -> IntegralResult:
    """
    ∫_0^{2π} f(cos φ, sin φ) dφ by the trapezoid rule, doubling the point
    count until two successive estimates agree.

    With `exact_four_point` the integrand is known to be a trigonometric
    polynomial of degree < 4 and the four quarter-turn samples are exact.
    """
    if exact_four_point:
        total = sum(np.asarray(f(c, s), dtype=complex) for c, s in QUARTER_TURNS)
        value = total * (2 * math.pi / 4)
        return IntegralResult(value=value if np.ndim(value) else complex(value), error_estimate=0.0, evaluations=4)

    n = max(n_start, 4)
    total = sum(np.asarray(f(math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)), dtype=complex)
                for k in range(n))
    estimate = total * (2 * math.pi / n)
    evaluations = n

    while 2 * n <= max_points:
        fresh = sum(np.asarray(f(math.cos(math.pi * (2 * k + 1) / n), math.sin(math.pi * (2 * k + 1) / n)), dtype=complex)
                    for k in range(n))
        total = total + fresh
        evaluations += n
        n *= 2
        refined = total * (2 * math.pi / n)
        change = float(np.max(np.abs(refined - estimate)))
        estimate = refined
        if change <= max(tol * float(np.max(np.abs(estimate))), tol_abs):
            return IntegralResult(value=estimate if np.ndim(estimate) else complex(estimate),
                                  error_estimate=change, evaluations=evaluations)

    _logger.warning(f'periodic integral not converged with {n} points')
    return IntegralResult(value=estimate if np.ndim(estimate) else complex(estimate),
                          error_estimate=float('nan'), evaluations=evaluations, converged=False)


def solve_root_bracketed(g: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Brent's method on [lo, hi]; g must change sign (or vanish) on the bracket."""
    g_lo = g(lo)
    if g_lo == 0:
        return lo
    g_hi = g(hi)
    if g_hi == 0:
        return hi
    if np.sign(g_lo) == np.sign(g_hi):
        raise NoSignChangeError(f'no sign change on [{lo:.6g}, {hi:.6g}]: g = {g_lo:.3g}, {g_hi:.3g}')

    xtol = max(tol * 1e-6 * max(abs(lo), abs(hi)), 1e-300)
    root = optimize.brentq(g, lo, hi, xtol=xtol, rtol=max(tol, 4 * np.finfo(float).eps))
    _logger.debug(f'root on [{lo:.6g}, {hi:.6g}] at {root:.12g}')
    return root
