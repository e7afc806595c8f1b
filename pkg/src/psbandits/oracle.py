"""Super arms, the m-set sum reward, and exact oracles.

A super arm is a sorted tuple of ``m`` distinct base-arm indices.  The
reward of playing ``S`` under mean vector ``mu`` is ``sum(mu[k] for k in S)``,
which is monotone in ``mu``, 1-Lipschitz per coordinate, and
``sqrt(m)``-Lipschitz in Euclidean norm.  For this reward the exact
oracle is simply the m largest coordinates.
"""

from dataclasses import dataclass
from itertools import combinations
import math

import numpy as np

from .errors import CapacityError, DegenerateGapsError

SuperArm = tuple[int, ...]

ENUMERATION_CAP = 100_000

# guard for strict comparisons between float sums that are mathematically equal
_GAP_EPS = 1e-12


def _check_mu(mu) -> np.ndarray:
    arr = np.asarray(mu, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("mu must be a non-empty one-dimensional vector")
    return arr


def reward(super_arm, mu) -> float:
    """Sum of the means of the chosen base arms."""
    arr = _check_mu(mu)
    idx = list(super_arm)
    if len(set(idx)) != len(idx):
        raise ValueError(f"super arm has repeated indices: {tuple(super_arm)}")
    if idx and (min(idx) < 0 or max(idx) >= arr.size):
        raise ValueError(f"super arm indices out of range for {arr.size} arms")
    return float(arr[idx].sum())


def project(super_arm, mu) -> np.ndarray:
    """Vector equal to mu on the chosen arms and 0 elsewhere."""
    arr = _check_mu(mu)
    out = np.zeros_like(arr)
    idx = list(super_arm)
    out[idx] = arr[idx]
    return out


def top_m(mu, m: int) -> SuperArm:
    """Exact oracle: indices of the m largest means, ties to the lowest index."""
    arr = _check_mu(mu)
    if not 1 <= m <= arr.size:
        raise ValueError(f"m must lie in [1, {arr.size}], got {m}")
    # stable sort on the negated means keeps lower indices first on ties
    order = np.argsort(-arr, kind="stable")
    return tuple(sorted(int(k) for k in order[:m]))


def enumerate_superarms(K: int, m: int, cap: int = ENUMERATION_CAP) -> list[SuperArm]:
    """All size-m subsets of range(K) in lexicographic order.

    Raises CapacityError when C(K, m) exceeds ``cap``.
    """
    if K < 1 or not 1 <= m <= K:
        raise ValueError(f"need 1 <= m <= K, got K={K}, m={m}")
    size = math.comb(K, m)
    if size > cap:
        raise CapacityError(
            f"C({K}, {m}) = {size} super arms exceeds the cap of {cap}"
        )
    return list(combinations(range(K), m))


@dataclass(frozen=True)
class MSetReward:
    """The m-set sum reward with an approximation target alpha.

    ``lipschitz`` is the Euclidean Lipschitz constant sqrt(m), the
    tightest one for a sum over m coordinates.
    """

    m: int
    alpha: float = 1.0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")

    @property
    def lipschitz(self) -> float:
        return math.sqrt(self.m)

    def value(self, super_arm, mu) -> float:
        return reward(super_arm, mu)

    def best(self, mu) -> float:
        return reward(top_m(mu, self.m), mu)


def suboptimality_gaps(table, segment: int, m: int,
                       alpha: float = 1.0) -> tuple[float, float]:
    """Smallest and largest gap to the alpha-optimal frontier in a segment.

    A super arm is bad when its reward falls strictly below
    ``alpha * max_S reward(S)``.  Returns ``(delta_min, delta_max)``, the
    distances from that target to the best and worst bad super arm.
    Raises DegenerateGapsError when no super arm is bad (for instance
    alpha = 1 with all means equal) and CapacityError when C(K, m) is too
    large to enumerate.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    mu = np.asarray(table.means[segment], dtype=float)
    arms = enumerate_superarms(mu.size, m)
    values = np.array([float(mu[list(s)].sum()) for s in arms])
    target = alpha * values.max()
    bad = values[values < target - _GAP_EPS]
    if bad.size == 0:
        raise DegenerateGapsError(
            f"segment {segment}: every size-{m} super arm reaches "
            f"alpha * optimal = {target:.6g}; gaps are undefined"
        )
    return float(target - bad.max()), float(target - bad.min())
