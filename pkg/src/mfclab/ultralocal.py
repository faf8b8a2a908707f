"""Ultra-local model bookkeeping: sliding-window algebraic estimators of the
lumped unknown term F for derivation orders 1 and 2, plus a windowed
least-squares differentiator for derivative feedback.

The estimators realize, over a window of length tau ending at the current
time, with s the window-local time variable in [0, tau]:

    order 1:  F = -(6/tau^3) * int_0^tau [ (tau - 2s) z  +  alpha s (tau - s) u ] ds
    order 2:  F =  (60/tau^5) * int_0^tau (tau^2 + 6 s^2 - 6 tau s) z ds
              - (30 alpha/tau^5) * int_0^tau (tau - s)^2 s^2 u ds

Both kernels annihilate the window's constant (and, for order 2, linear)
content and cancel the alpha*u contribution exactly in continuous time, so a
constant F is recovered exactly.  The sign of the order-2 z-term is fixed by
the quadratic oracle z = F t^2 / 2  ->  F (the opposite sign returns -F).

Discretization: the integrals are evaluated with composite Simpson weights
(exact through cubics), which keeps the discrete kernel moments of the
constant/linear annihilation identically zero; plain trapezoid would leak an
error proportional to the window's mean level, far above tolerance.  The
whole estimator then collapses to one FIR dot product per call.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, InsufficientSamplesError, WindowNotFullError


@dataclass(frozen=True)
class UltraLocalConfig:
    """Configuration of one ultra-local channel."""

    nu: int            # derivation order, 1 or 2
    alpha: float       # input scaling, units of z^(nu) per unit of u
    tau: float         # estimation window length [s]
    fs: float          # sample frequency [Hz]

    def __post_init__(self):
        if self.nu not in (1, 2):
            raise ConfigError(f"nu must be 1 or 2, got {self.nu}")
        if self.alpha == 0.0:
            raise ConfigError("alpha must be nonzero")
        if self.fs <= 0.0:
            raise ConfigError("fs must be strictly positive")
        if self.tau < 2.0 / self.fs:
            raise ConfigError(
                f"tau={self.tau} s holds fewer than 2 samples at fs={self.fs} Hz")

    @property
    def window_len(self) -> int:
        return math.ceil(self.tau * self.fs)

    @property
    def tau_eff(self) -> float:
        """Time actually spanned by the sample window."""
        return (self.window_len - 1) / self.fs


class SignalWindow:
    """Ring buffer of (z, u) samples for one estimator channel.

    ``push(z)`` appends the newest output sample with a zero placeholder for
    the not-yet-computed input; ``set_latest_u(u)`` fills it in afterwards.
    Both estimator input kernels vanish at the window's leading edge, so the
    placeholder carries zero quadrature weight and the estimate computed
    between push and set_latest_u is exact.
    """

    def __init__(self, cfg: UltraLocalConfig):
        self.cfg = cfg
        n = cfg.window_len
        self._z: deque[float] = deque(maxlen=n)
        self._u: deque[float] = deque(maxlen=n)

    def push(self, z: float) -> None:
        self._z.append(z)
        self._u.append(0.0)

    def set_latest_u(self, u: float) -> None:
        if not self._u:
            raise InsufficientSamplesError("no sample pushed yet")
        self._u[-1] = u

    @property
    def full(self) -> bool:
        return len(self._z) == self.cfg.window_len

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self._z), np.asarray(self._u)

    def reset(self) -> None:
        self._z.clear()
        self._u.clear()


@lru_cache(maxsize=64)
def quadrature_weights(n: int, h: float) -> np.ndarray:
    """Composite Newton-Cotes weights on n equispaced samples of spacing h.

    Simpson 1/3 throughout when the interval count is even; Simpson 3/8 on
    the last three intervals otherwise.  Exact for cubics for n >= 4
    (n == 3 handles quadratics/cubics, n == 2 falls back to trapezoid).
    """
    if n < 2:
        raise ValueError("need at least 2 samples")
    w = np.zeros(n)
    m = n - 1
    if m == 1:
        return np.array([0.5 * h, 0.5 * h])
    if m % 2 == 0:
        head = m
    else:
        head = m - 3
        if head < 0:   # m == 1 handled above; m == 3 -> pure 3/8
            head = 0
    if head > 0:
        w[0] += h / 3.0
        w[head] += h / 3.0
        w[1:head:2] += 4.0 * h / 3.0
        w[2:head:2] += 2.0 * h / 3.0
    if head < m:       # trailing 3/8 block over [head, head+3]
        w[head] += 3.0 * h / 8.0
        w[head + 1] += 9.0 * h / 8.0
        w[head + 2] += 9.0 * h / 8.0
        w[head + 3] += 3.0 * h / 8.0
    return w


@lru_cache(maxsize=64)
def _fir_taps(nu: int, n: int, fs: float, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """FIR taps (a, b) such that F_est = a . z + b . u over the window."""
    h = 1.0 / fs
    tau = (n - 1) * h
    s = np.arange(n) * h
    w = quadrature_weights(n, h)
    if nu == 1:
        kz = (tau - 2.0 * s)
        ku = alpha * s * (tau - s)
        scale = -6.0 / tau**3
        return scale * w * kz, scale * w * ku
    kz = tau * tau + 6.0 * s * s - 6.0 * tau * s
    ku = (tau - s) ** 2 * s * s
    a = (60.0 / tau**5) * w * kz
    b = (-30.0 * alpha / tau**5) * w * ku
    return a, b


def _estimate(window: SignalWindow, cfg: UltraLocalConfig, nu: int) -> float:
    if cfg.nu != nu:
        raise ConfigError(f"config has nu={cfg.nu}, estimator requires nu={nu}")
    if not window.full:
        raise WindowNotFullError(
            f"window holds {len(window._z)}/{cfg.window_len} samples")
    a, b = _fir_taps(nu, cfg.window_len, cfg.fs, cfg.alpha)
    z, u = window.arrays()
    return float(a @ z + b @ u)


def estimate_F_nu1(window: SignalWindow, cfg: UltraLocalConfig) -> float:
    """Estimate F for the first-order ultra-local model dz/dt = F + alpha u."""
    return _estimate(window, cfg, 1)


def estimate_F_nu2(window: SignalWindow, cfg: UltraLocalConfig) -> float:
    """Estimate F for the second-order ultra-local model d2z/dt2 = F + alpha u."""
    return _estimate(window, cfg, 2)


@lru_cache(maxsize=64)
def _slope_weights(n: int, fs: float) -> np.ndarray:
    t = np.arange(n) / fs
    t = t - t.mean()
    return t / float(t @ t)


def derivative_estimate(samples, fs: float, min_samples: int = 5) -> float:
    """Least-squares slope of a first-order fit over the sample window.

    Exact on affine signals; estimates the derivative at the window center,
    i.e. with a group delay of (n-1)/(2 fs) relative to the newest sample.
    """
    z = np.asarray(samples, dtype=float)
    if z.ndim != 1 or len(z) < min_samples:
        raise InsufficientSamplesError(
            f"need at least {min_samples} samples, got {len(z)}")
    return float(_slope_weights(len(z), fs) @ z)


class DerivativeWindow:
    """Fixed-length sample buffer feeding :func:`derivative_estimate`."""

    def __init__(self, n: int, fs: float):
        if n < 2:
            raise ConfigError("derivative window needs at least 2 samples")
        self.n = n
        self.fs = fs
        self._buf: deque[float] = deque(maxlen=n)

    def push(self, z: float) -> None:
        self._buf.append(z)

    @property
    def full(self) -> bool:
        return len(self._buf) == self.n

    def slope(self) -> float:
        return derivative_estimate(np.asarray(self._buf), self.fs,
                                   min_samples=min(self.n, 2))

    def reset(self) -> None:
        self._buf.clear()
