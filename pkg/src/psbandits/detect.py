"""Bernoulli GLR change-point detection.

The detector watches a stream of bounded observations ``x_1, ..., x_n`` in
[0, 1] and asks whether some split ``s`` separates two regimes with
different means.  The test statistic is

    GLR(n) = max_{1 <= s < n}  s * kl(mean(x_1..x_s), mean(x_1..x_n))
                             + (n - s) * kl(mean(x_{s+1}..x_n), mean(x_1..x_n))

where ``kl`` is the Bernoulli Kullback-Leibler divergence.  A change is
declared as soon as GLR(n) exceeds the threshold ``threshold_beta(n, delta)``,
which guarantees a false-alarm probability of at most ``delta`` over an
infinite stationary stream.

Implementation notes
--------------------
The statistic is evaluated through the entropy identity

    s*kl(m1, m0) + (n-s)*kl(m2, m0) = g(n, P_n) - g(s, P_s) - g(n-s, P_n - P_s)

with ``g(c, S) = c*ln(c) - S*ln(S) - (c-S)*ln(c-S)`` and ``P_s`` the prefix
sum of the observations (``0*ln(0) = 0``).  Buffers therefore keep prefix
sums only; a full scan over all splits is a handful of vectorised array
operations.  When every observation is exactly 0 or 1 the arguments of
``g`` are small integers, and each buffer caches a table of ``z*ln(z)``
values so that a scan costs no logarithms at all.

Buffers are single-owner objects: distinct instances share no mutable
state, so one detector per arm can be used from concurrent episodes.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import InsufficientDataError


def binary_kl(x: float, y: float) -> float:
    """KL divergence between Bernoulli(x) and Bernoulli(y).

    Uses the conventions 0*ln(0) = 0 and kl(x, y) = +inf when y lies on
    the boundary {0, 1} while x differs from it.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"y must lie in [0, 1], got {y}")
    if x == y:
        return 0.0
    if y <= 0.0 or y >= 1.0:
        return math.inf
    a = x * math.log(x / y) if x > 0.0 else 0.0
    b = (1.0 - x) * math.log((1.0 - x) / (1.0 - y)) if x < 1.0 else 0.0
    return a + b


def threshold_beta(n, delta):
    """Detection threshold beta(n, delta) for the GLR test.

    beta(n, delta) = 2*Q(ln(3*n*sqrt(n)/delta) / 2) + 6*ln(1 + ln(n))
    with Q(x) = x + 4*ln(1 + x + sqrt(2*x)).  Accepts a scalar or an
    array of sample counts ``n >= 2``; ``delta`` must lie in (0, 1).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if isinstance(n, (int, float)):
        if n < 2:
            raise ValueError("n must be at least 2")
        x = (math.log(3.0 / delta) + 1.5 * math.log(n)) / 2.0
        q = x + 4.0 * math.log1p(x + math.sqrt(2.0 * x))
        return 2.0 * q + 6.0 * math.log1p(math.log(n))
    n_arr = np.asarray(n, dtype=float)
    if np.any(n_arr < 2):
        raise ValueError("n must be at least 2")
    x = (np.log(3.0 / delta) + 1.5 * np.log(n_arr)) / 2.0
    q = x + 4.0 * np.log1p(x + np.sqrt(2.0 * x))
    return 2.0 * q + 6.0 * np.log1p(np.log(n_arr))


@dataclass(frozen=True)
class GlrConfig:
    """Detector settings: false-alarm level and check cadence."""

    delta: float = 0.05
    check_every: int = 1
    min_samples: int = 2

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.check_every < 1:
            raise ValueError("check_every must be a positive integer")
        if self.min_samples < 2:
            raise ValueError("min_samples must be at least 2")


def _xlogx_table(limit: int) -> np.ndarray:
    """Table of z*ln(z) for integer z in [0, limit], with 0*ln(0) = 0."""
    z = np.arange(limit + 1, dtype=float)
    out = np.zeros(limit + 1)
    np.multiply(z[1:], np.log(z[1:]), out=out[1:])
    return out


def _entropy_g(c: np.ndarray, s: np.ndarray) -> np.ndarray:
    """g(c, s) = c*ln(c) - s*ln(s) - (c-s)*ln(c-s) for float arguments."""
    s = np.clip(s, 0.0, c)
    r = c - s
    out = c * np.log(c)
    out -= np.where(s > 0.0, s * np.log(np.where(s > 0.0, s, 1.0)), 0.0)
    out -= np.where(r > 0.0, r * np.log(np.where(r > 0.0, r, 1.0)), 0.0)
    return out


class GlrBuffer:
    """Growable observation buffer with O(1) pushes and O(n) GLR scans.

    Only prefix sums are retained.  ``reset`` drops the data but keeps
    the allocated storage (and the cached integer log table), since the
    usual lifecycle is push/scan/reset many times over.
    """

    def __init__(self):
        self._prefix = np.zeros(64)
        self._n = 0
        self._binary = True
        self._xlogx = _xlogx_table(64)

    @property
    def count(self) -> int:
        return self._n

    @property
    def prefix_sums(self) -> np.ndarray:
        """Copy of the prefix-sum array [0, x_1, x_1+x_2, ...]."""
        return self._prefix[: self._n + 1].copy()

    def push(self, x: float) -> None:
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"observations must lie in [0, 1], got {x}")
        n = self._n
        if n + 1 >= self._prefix.size:
            grown = np.zeros(2 * self._prefix.size)
            grown[: n + 1] = self._prefix[: n + 1]
            self._prefix = grown
            self._xlogx = _xlogx_table(grown.size)
        self._prefix[n + 1] = self._prefix[n] + x
        self._n = n + 1
        if x != 0.0 and x != 1.0:
            self._binary = False

    def reset(self) -> None:
        self._n = 0
        self._binary = True

    def _scan(self) -> np.ndarray:
        """Statistic value at every split s = 1..n-1 (clipped at 0)."""
        n = self._n
        p = self._prefix
        if self._binary:
            xl = self._xlogx
            pn = int(p[n])
            ps = np.rint(p[1:n]).astype(np.int64)
            s = np.arange(1, n)
            total = xl[n] - xl[pn] - xl[n - pn]
            pre = xl[s] - xl[ps] - xl[s - ps]
            suf = xl[n - s] - xl[pn - ps] - xl[(n - pn) - (s - ps)]
        else:
            pn = p[n]
            ps = p[1:n]
            s = np.arange(1, n, dtype=float)
            total = _entropy_g(np.float64(n), np.float64(pn))
            pre = _entropy_g(s, ps)
            suf = _entropy_g(n - s, pn - ps)
        return np.maximum(total - pre - suf, 0.0)


def glr_statistic(buf: GlrBuffer) -> tuple[float, int]:
    """Maximal GLR statistic and its split point.

    Returns ``(value, split)`` where ``split`` is the smallest maximiser
    in [1, n-1].  Raises InsufficientDataError with fewer than two
    observations.
    """
    if buf.count < 2:
        raise InsufficientDataError(
            f"GLR statistic needs at least 2 observations, buffer holds {buf.count}"
        )
    stats = buf._scan()
    split = int(np.argmax(stats))
    return float(stats[split]), split + 1


def glr_test(buf: GlrBuffer, cfg: GlrConfig) -> bool:
    """True when the buffer's statistic crosses threshold_beta.

    Always False below ``cfg.min_samples`` observations.
    """
    n = buf.count
    if n < cfg.min_samples:
        return False
    value, _ = glr_statistic(buf)
    return value >= threshold_beta(n, cfg.delta)


def first_detection_time(values, delta: float, min_samples: int = 2,
                         check_every: int = 1) -> int | None:
    """First n at which a stream would trigger the GLR test, else None.

    Equivalent to pushing ``values`` one by one into a fresh GlrBuffer
    and testing at every n with ``n % check_every == 0``, but runs the
    whole scan with vectorised prefix sums.  Returns the 1-based sample
    count at detection.
    """
    xs = np.asarray(values, dtype=float)
    if xs.ndim != 1:
        raise ValueError("values must be a one-dimensional sequence")
    if xs.size and (xs.min() < 0.0 or xs.max() > 1.0):
        raise ValueError("observations must lie in [0, 1]")
    total = xs.size
    if total < max(2, min_samples):
        return None

    prefix = np.concatenate(([0.0], np.cumsum(xs)))
    binary = bool(np.all((xs == 0.0) | (xs == 1.0)))
    if binary:
        xl = _xlogx_table(total)
        ip = np.rint(prefix).astype(np.int64)

    ns = np.arange(max(2, min_samples), total + 1)
    ns = ns[ns % check_every == 0]
    if ns.size == 0:
        return None
    betas = threshold_beta(ns, delta)

    for n, beta in zip(ns, betas):
        s = np.arange(1, n)
        if binary:
            pn = ip[n]
            ps = ip[1:n]
            g_tot = xl[n] - xl[pn] - xl[n - pn]
            g_pre = xl[s] - xl[ps] - xl[s - ps]
            g_suf = xl[n - s] - xl[pn - ps] - xl[(n - pn) - (s - ps)]
        else:
            pn = prefix[n]
            ps = prefix[1:n]
            sf = s.astype(float)
            g_tot = _entropy_g(np.float64(n), np.float64(pn))
            g_pre = _entropy_g(sf, ps)
            g_suf = _entropy_g(n - sf, pn - ps)
        if np.max(g_tot - g_pre - g_suf) >= beta:
            return int(n)
    return None
