"""Closed-form guarantees: detection delay, regret bounds, tuned parameters.

All quantities use natural logarithms.  Change points follow the
convention of env: ``nu_i`` is the last step of segment ``i``, with
``nu_0 = 0`` and ``nu_N = T``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .detect import threshold_beta
from .errors import InvalidConfigurationError
from .oracle import suboptimality_gaps


def delay_bound_d(K: int, p: float, delta: float, T: int,
                  delta_change: float) -> int:
    """High-probability detection delay after a change of size delta_change.

    d = ceil( (4*K / (p * delta_change^2)) * beta(T, delta) + K/p )

    for a detector run at level delta with forced exploration rate p over
    K arms.
    """
    if K < 1:
        raise ValueError(f"need K >= 1, got {K}")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if not 0.0 < delta_change <= 1.0:
        raise ValueError(f"delta_change must lie in (0, 1], got {delta_change}")
    if T < 2:
        raise ValueError(f"need T >= 2, got {T}")
    beta = threshold_beta(T, delta)
    return math.ceil(4.0 * K / (p * delta_change ** 2) * beta + K / p)


@dataclass(frozen=True)
class GapCheckRecord:
    """One change point's spacing requirement."""

    index: int            # i in 1..N-1
    change_point: int     # nu_i
    delta_change: float   # largest per-arm mean shift at nu_i
    delay: int            # d_i
    spacing: int          # nu_i - nu_{i-1}
    required: int         # 2 * max(d_i, d_{i-1})
    satisfied: bool


@dataclass(frozen=True)
class GapCheckReport:
    records: tuple[GapCheckRecord, ...]
    final_spacing: int      # nu_N - nu_{N-1}
    final_required: int     # 2 * d_{N-1}
    satisfied: bool


def check_gap_assumption(table, p: float, delta: float) -> GapCheckReport:
    """Verify that segments are long enough for reliable detection.

    Requires nu_i - nu_{i-1} >= 2 * max(d_i, d_{i-1}) for every change
    point (with d_0 = 0) and nu_N - nu_{N-1} >= 2 * d_{N-1} for the last
    segment.  A stationary table passes vacuously.
    """
    T = table.horizon
    K = table.num_arms
    nus = (0,) + table.change_points + (T,)
    shifts = [
        float(np.max(np.abs(table.means[i + 1] - table.means[i])))
        for i in range(table.num_segments - 1)
    ]
    delays = [0] + [delay_bound_d(K, p, delta, T, s) for s in shifts]

    records = []
    for i in range(1, len(nus) - 1):
        spacing = nus[i] - nus[i - 1]
        required = 2 * max(delays[i], delays[i - 1])
        records.append(GapCheckRecord(
            index=i,
            change_point=nus[i],
            delta_change=shifts[i - 1],
            delay=delays[i],
            spacing=spacing,
            required=required,
            satisfied=spacing >= required,
        ))

    final_spacing = nus[-1] - nus[-2]
    final_required = 2 * delays[-1]
    ok = all(r.satisfied for r in records) and final_spacing >= final_required
    return GapCheckReport(tuple(records), final_spacing, final_required, ok)


@dataclass(frozen=True)
class BoundBreakdown:
    """Additive pieces of the regret upper bound."""

    ucb_term: float          # within-segment cost of optimism
    uniform_term: float      # forced-exploration cost p * T * worst gap
    delay_term: float        # regret paid while changes go undetected
    false_alarm_term: float  # union-bound slack 3 * N * T * K * delta * worst gap

    @property
    def total(self) -> float:
        return (self.ucb_term + self.uniform_term
                + self.delay_term + self.false_alarm_term)


def regret_upper_bound(table, m: int, alpha: float, p: float, delta: float,
                       L: float | None = None) -> BoundBreakdown:
    """Regret guarantee for the detect-and-restart policy on this table.

    Sums per-segment optimism costs

        C_i = (6 * L^2 * K^2 * ln T / dmin_i^2 + pi^2/6 + K) * dmax_i

    plus dmax * p * T for forced exploration, sum_i dmax_{i+1} * d_i for
    detection delays, and 3 * N * T * dmax * K * delta for false alarms.
    ``L`` defaults to sqrt(m).
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if L is None:
        L = math.sqrt(m)
    T = table.horizon
    K = table.num_arms
    N = table.num_segments
    log_t = math.log(T)

    gaps = [suboptimality_gaps(table, i, m, alpha) for i in range(N)]
    dmax_global = max(g[1] for g in gaps)

    ucb = sum(
        (6.0 * L * L * K * K * log_t / (dmin * dmin) + math.pi ** 2 / 6.0 + K) * dmax
        for dmin, dmax in gaps
    )
    uniform = dmax_global * T * p

    shifts = [
        float(np.max(np.abs(table.means[i + 1] - table.means[i])))
        for i in range(N - 1)
    ]
    delay = sum(
        gaps[i + 1][1] * delay_bound_d(K, p, delta, T, shifts[i])
        for i in range(N - 1)
    )
    false_alarm = 3.0 * N * T * dmax_global * K * delta
    return BoundBreakdown(ucb, uniform, delay, false_alarm)


def tuned_params(T: int, K: int, N: int | None = None) -> tuple[float, float]:
    """Horizon-tuned (delta, p): delta = 1/T and
    p = sqrt(N*K*ln(T)/T) when N is known, else sqrt(K*ln(T)/T),
    capped at 1."""
    if T < 2 or K < 1:
        raise ValueError(f"need T >= 2 and K >= 1, got T={T}, K={K}")
    if N is not None and N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    scale = K if N is None else N * K
    p = min(1.0, math.sqrt(scale * math.log(T) / T))
    return 1.0 / T, p


# minimax constants: M1 bounds the admissible horizon from below and M2
# scales the lower bound itself
LOWER_M1 = 1.0 / math.log(4.0 / 3.0)
LOWER_M2 = 1.0 / (24.0 * math.sqrt(math.log(4.0 / 3.0)))


def minimax_lower_bound(N: int, K: int, T: int) -> float:
    """Worst-case regret floor M2 * sqrt(N*K*T) for any policy.

    Valid when K >= 3 and T >= M1 * N * (K-1)^2 / K; raises
    InvalidConfigurationError outside that regime.
    """
    if K < 3:
        raise InvalidConfigurationError(f"the bound needs K >= 3 arms, got {K}")
    if N < 1:
        raise InvalidConfigurationError(f"need N >= 1, got {N}")
    t_min = LOWER_M1 * N * (K - 1) ** 2 / K
    if T < t_min:
        raise InvalidConfigurationError(
            f"horizon {T} below the admissible minimum {t_min:.1f} "
            f"for N={N}, K={K}"
        )
    return LOWER_M2 * math.sqrt(N * K * T)
