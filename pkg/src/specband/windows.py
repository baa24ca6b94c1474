"""Registry of lag windows ``w`` on [-1, 1]."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import integrate

from .series import ConfigError


@dataclass(frozen=True)
class WindowSpec:
    """A lag window.

    ``closed_l2`` is the exact value of the integral of ``w**2`` over
    [-1, 1]; ``l2_full`` is its quadrature counterpart. ``smooth_at_zero``
    records whether ``(1 - w(u)) / u**2`` has a finite positive limit.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    closed_l2: Fraction
    smooth_at_zero: bool
    differentiable: bool = True
    bounded_by_one: bool = True

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = self.func(np.abs(u))
        return np.where(np.abs(u) <= 1.0, out, 0.0)

    @property
    def l2_full(self) -> float:
        return window_l2(self)


def _parzen(a):
    return np.where(a <= 0.5, 1.0 - 6.0 * a**2 + 6.0 * a**3, 2.0 * (1.0 - a) ** 3)


def _bartlett(a):
    return 1.0 - a


def _tukey_hanning(a):
    return 0.5 * (1.0 + np.cos(np.pi * a))


def _flat_top(a):
    # trapezoid with plateau on |u| <= 1/2
    return np.where(a <= 0.5, 1.0, 2.0 * (1.0 - a))


def _rectangular(a):
    return np.ones_like(a)


_REGISTRY = {
    "parzen": WindowSpec("parzen", _parzen, Fraction(151, 280), smooth_at_zero=True),
    "bartlett": WindowSpec("bartlett", _bartlett, Fraction(2, 3), smooth_at_zero=False),
    "tukey-hanning": WindowSpec("tukey-hanning", _tukey_hanning, Fraction(3, 4), smooth_at_zero=True),
    "flat-top-trapezoid": WindowSpec(
        "flat-top-trapezoid", _flat_top, Fraction(4, 3), smooth_at_zero=False
    ),
    # violates the differentiability requirement; kept for tests only
    "rectangular": WindowSpec(
        "rectangular", _rectangular, Fraction(2), smooth_at_zero=False, differentiable=False
    ),
}

WINDOW_NAMES = tuple(_REGISTRY)
DEFAULT_WINDOW = "parzen"


def window(name: str | WindowSpec) -> WindowSpec:
    if isinstance(name, WindowSpec):
        return name
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ConfigError(
            f"unknown window {name!r}; valid names: {', '.join(WINDOW_NAMES)}"
        ) from None


def window_l2(spec: WindowSpec) -> float:
    """Quadrature of ``w(u)**2`` over [-1, 1] (symmetric, so twice [0, 1])."""
    spec = window(spec)
    val, _ = integrate.quad(
        lambda u: float(spec(u)) ** 2, 0.0, 1.0, points=[0.5], epsabs=1e-13, epsrel=1e-12
    )
    return 2.0 * val
