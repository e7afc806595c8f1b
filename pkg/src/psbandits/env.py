"""Piecewise-stationary Bernoulli environments.

An environment is a segment table (per-segment mean vectors over K arms
and a horizon T) plus a seed.  Time steps are 1-based; segment ``i``
starts at ``starts[i]`` and the change point ``nu_i`` is the LAST step of
segment ``i``, so segment ``i+1`` begins at ``nu_i + 1``.

Rewards are Bernoulli with the segment means.  Sampling is counter-based:
the rewards of step ``t`` are drawn from a Philox generator keyed by
``(seed, t)``, so reward(seed, t, k) never depends on the order in which
steps are sampled, and a materialised RewardStream row equals a direct
``sample_rewards`` call for the same step.
"""

from dataclasses import dataclass, field
import io
import math
import re

import numpy as np

from .errors import InvalidConfigurationError, SegmentTableParseError
from .oracle import top_m

_HEADER_RE = re.compile(r"^K=(\d+),T=(\d+)$")


@dataclass(frozen=True)
class SegmentTable:
    """Piecewise-constant mean table: segment start times and mean rows."""

    starts: tuple[int, ...]
    means: np.ndarray
    horizon: int

    def __post_init__(self):
        means = np.array(self.means, dtype=float)
        if means.ndim != 2:
            raise InvalidConfigurationError("means must be a (segments, arms) matrix")
        means.flags.writeable = False
        object.__setattr__(self, "means", means)
        starts = tuple(int(s) for s in self.starts)
        object.__setattr__(self, "starts", starts)
        n, k = means.shape
        if n < 1 or k < 1:
            raise InvalidConfigurationError("need at least one segment and one arm")
        if len(starts) != n:
            raise InvalidConfigurationError(
                f"{len(starts)} start times for {n} mean rows"
            )
        if starts[0] != 1:
            raise InvalidConfigurationError(
                f"first segment must start at step 1, got {starts[0]}"
            )
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise InvalidConfigurationError("start times must be strictly increasing")
        if starts[-1] > self.horizon:
            raise InvalidConfigurationError(
                f"last segment starts at {starts[-1]} beyond horizon {self.horizon}"
            )
        if means.min() < 0.0 or means.max() > 1.0:
            raise InvalidConfigurationError("means must lie in [0, 1]")
        for i in range(n - 1):
            if np.array_equal(means[i], means[i + 1]):
                raise InvalidConfigurationError(
                    f"segments {i} and {i + 1} have identical means; merge them"
                )

    @property
    def num_arms(self) -> int:
        return self.means.shape[1]

    @property
    def num_segments(self) -> int:
        return self.means.shape[0]

    @property
    def change_points(self) -> tuple[int, ...]:
        """nu_1..nu_{N-1}: the last step of each segment but the final one."""
        return tuple(s - 1 for s in self.starts[1:])

    def segment_of(self, t: int) -> int:
        """Index of the segment containing step t (1-based t)."""
        if not 1 <= t <= self.horizon:
            raise ValueError(f"t must lie in [1, {self.horizon}], got {t}")
        return int(np.searchsorted(self.starts, t, side="right")) - 1

    def segment_index(self, ts: np.ndarray) -> np.ndarray:
        """Vectorised segment_of over an array of steps."""
        return np.searchsorted(self.starts, ts, side="right") - 1

    def means_at(self, t: int) -> np.ndarray:
        return self.means[self.segment_of(t)]


@dataclass(frozen=True)
class Environment:
    table: SegmentTable
    seed: int = 0

    @property
    def num_arms(self) -> int:
        return self.table.num_arms

    @property
    def horizon(self) -> int:
        return self.table.horizon


def _philox_for_step(seed: int, t: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), t]))


def sample_rewards(env: Environment, t: int, rng: np.random.Generator | None = None,
                   seed: int | None = None) -> np.ndarray:
    """Bernoulli reward vector for every base arm at step t.

    With ``rng`` given, draws from it (caller manages reproducibility).
    Otherwise uses the counter-based generator keyed by (seed, t), with
    ``seed`` defaulting to ``env.seed``; this matches RewardStream.
    """
    mu = env.table.means_at(t)
    if rng is None:
        rng = _philox_for_step(env.seed if seed is None else seed, t)
    return (rng.random(mu.size) < mu).astype(np.int8)


class RewardStream:
    """Materialised reward matrix for one episode.

    Row ``t`` (1-based) equals ``sample_rewards(env, t, seed=seed)``: the
    matrix is generated one counter-keyed row at a time, so two streams
    built from the same (env, seed) are identical regardless of access
    pattern.
    """

    def __init__(self, env: Environment, seed: int | None = None):
        self.env = env
        self.seed = env.seed if seed is None else seed
        table = env.table
        t_axis = np.arange(1, table.horizon + 1)
        mu = table.means[table.segment_index(t_axis)]
        rewards = np.empty((table.horizon, table.num_arms), dtype=np.int8)
        key = self.seed & (2**64 - 1)
        for t in t_axis:
            gen = np.random.Generator(np.random.Philox(key=[key, t]))
            rewards[t - 1] = gen.random(table.num_arms) < mu[t - 1]
        rewards.flags.writeable = False
        self.rewards = rewards

    def at(self, t: int) -> np.ndarray:
        """Reward vector of step t (1-based)."""
        if not 1 <= t <= self.env.horizon:
            raise ValueError(f"t must lie in [1, {self.env.horizon}], got {t}")
        return self.rewards[t - 1]


def build_synthetic(T: int = 5000, K: int = 6, m: int = 2, N: int = 5,
                    seed: int = 0) -> Environment:
    """Benchmark environment with N equal segments and hand-set changes.

    Segment lengths are floor(T/N), the last segment absorbing the
    remainder.  Exactly one arm moves at each boundary: the first two
    changes each collapse the currently best arm by 0.6 (stale empirical
    means then point at a bad arm, which is what a restart policy is
    for), and later changes nudge a non-optimal arm by 0.05 so the
    optimal super arm stays put.  With the defaults (T=5000, K=6, m=2,
    N=5) the change points are 1000, 2000, 3000, 4000, the optimal pair
    changes at the first two boundaries only, and all means stay in
    [0.05, 0.8].
    """
    if K < 1 or m < 1 or m > K:
        raise InvalidConfigurationError(f"need 1 <= m <= K, got K={K}, m={m}")
    if N < 1 or T < 1 or N > T:
        raise InvalidConfigurationError(f"need 1 <= N <= T, got N={N}, T={T}")

    length = T // N
    starts = tuple(1 + i * length for i in range(N))

    if K == 1:
        rows = [[0.8] if i % 2 == 0 else [0.2] for i in range(N)]
        table = SegmentTable(starts, np.array(rows), T)
        return Environment(table, seed)

    rows = [np.linspace(0.8, 0.2, K)]
    changed_arm = -1
    for boundary in range(1, N):
        row = rows[-1].copy()
        if boundary in (1, 2):
            arm = int(np.argmax(row))
            value = max(round(row[arm] - 0.6, 10), 0.05)
        else:
            current = set(top_m(row, m))
            pool = [a for a in range(K) if a not in current]
            if len(pool) > 1 and changed_arm in pool:
                pool.remove(changed_arm)
            if not pool:
                pool = list(range(K))
            arm = pool[(boundary - 3) % len(pool)]
            step = -0.05 if row[arm] >= 0.5 else 0.05
            value = round(row[arm] + step, 10)
        row[arm] = value
        changed_arm = arm
        rows.append(row)

    table = SegmentTable(starts, np.array(rows), T)
    return Environment(table, seed)


# constants of the minimax construction: M1 scales the smallest admissible
# horizon, and the perturbation uses the same ln(4/3) base
_LN_4_3 = math.log(4.0 / 3.0)
HARD_M1 = 1.0 / _LN_4_3


def hard_instance_epsilon(K: int, T: int) -> float:
    """Perturbation size (K-1) / (4*sqrt(T*K*ln(4/3)))."""
    return (K - 1) / (4.0 * math.sqrt(T * K * _LN_4_3))


def build_hard_instance(K: int, T: int, N: int, seed: int = 0) -> Environment:
    """Worst-case instance matching the minimax lower bound (m = 1).

    All arms sit at 1/2 except one arm at 1/2 + epsilon; the favoured arm
    is redrawn uniformly among the other K-1 arms at each of the N-1
    changes.  The first N-1 segments have length ceil(T/N) and the last
    takes the remainder.  Requires K >= 3 and T >= M1 * N * (K-1)^2 / K.
    """
    if K < 3:
        raise InvalidConfigurationError(f"need K >= 3 arms, got {K}")
    if N < 1:
        raise InvalidConfigurationError(f"need N >= 1 segments, got {N}")
    t_min = HARD_M1 * N * (K - 1) ** 2 / K
    if T < t_min:
        raise InvalidConfigurationError(
            f"horizon {T} below the admissible minimum {t_min:.1f} "
            f"for N={N}, K={K}"
        )
    length = math.ceil(T / N)
    if (N - 1) * length >= T:
        raise InvalidConfigurationError(
            f"N={N} segments of length ceil(T/N)={length} leave no room "
            f"for the last segment within T={T}"
        )
    eps = hard_instance_epsilon(K, T)

    rng = np.random.default_rng(seed)
    favoured = [int(rng.integers(K))]
    for _ in range(N - 1):
        j = int(rng.integers(K - 1))
        favoured.append(j if j < favoured[-1] else j + 1)

    rows = np.full((N, K), 0.5)
    rows[np.arange(N), favoured] = 0.5 + eps
    starts = tuple(1 + i * length for i in range(N))
    table = SegmentTable(starts, rows, T)
    return Environment(table, seed)


@dataclass(frozen=True)
class ChangePointReport:
    """Ground truth about an environment's changes, for oracles and checks."""

    change_points: tuple[int, ...]
    gaps: tuple[float, ...]
    optimal_super_arm_changes: tuple[int, ...] = field(default=())


def change_point_report(env: Environment, m: int) -> ChangePointReport:
    """Change points, largest per-arm mean shifts, and the subset of
    change points where the optimal super arm actually moves."""
    table = env.table
    gaps = tuple(
        float(np.max(np.abs(table.means[i + 1] - table.means[i])))
        for i in range(table.num_segments - 1)
    )
    optimal = [top_m(row, m) for row in table.means]
    moved = tuple(
        nu for nu, a, b in zip(table.change_points, optimal, optimal[1:]) if a != b
    )
    return ChangePointReport(table.change_points, gaps, moved)


def load_segment_table(source) -> SegmentTable:
    """Parse a segment-table document.

    Format: optional '#' comment lines and blank lines anywhere; the
    first content line is the header ``K=<int>,T=<int>``; each following
    content line is ``start,mu_1,...,mu_K``.  Raises
    SegmentTableParseError with the offending line number.
    """
    if isinstance(source, str):
        lines = io.StringIO(source)
    else:
        lines = source

    header = None
    starts: list[int] = []
    rows: list[list[float]] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            match = _HEADER_RE.match(line)
            if not match:
                raise SegmentTableParseError(
                    f"expected header 'K=<int>,T=<int>', got {line!r}", lineno
                )
            header = (int(match.group(1)), int(match.group(2)))
            continue
        K = header[0]
        fields = line.split(",")
        if len(fields) != K + 1:
            raise SegmentTableParseError(
                f"expected {K + 1} comma-separated fields (start plus {K} means), "
                f"got {len(fields)}", lineno
            )
        try:
            start = int(fields[0])
            mus = [float(f) for f in fields[1:]]
        except ValueError as exc:
            raise SegmentTableParseError(str(exc), lineno) from None
        if not starts and start != 1:
            raise SegmentTableParseError(
                f"first segment must start at step 1, got {start}", lineno
            )
        if starts and start <= starts[-1]:
            raise SegmentTableParseError(
                f"segment start {start} not after previous start {starts[-1]}",
                lineno,
            )
        if any(not 0.0 <= v <= 1.0 for v in mus):
            raise SegmentTableParseError("means must lie in [0, 1]", lineno)
        starts.append(start)
        rows.append(mus)

    if header is None:
        raise SegmentTableParseError("document has no header line")
    if not rows:
        raise SegmentTableParseError("document has no segment rows")
    try:
        return SegmentTable(tuple(starts), np.array(rows), header[1])
    except InvalidConfigurationError as exc:
        raise SegmentTableParseError(str(exc)) from None


def dump_segment_table(table: SegmentTable) -> str:
    """Serialise a table to the text format; round-trips exactly."""
    out = [f"K={table.num_arms},T={table.horizon}"]
    for start, row in zip(table.starts, table.means):
        out.append(",".join([str(start)] + [repr(float(v)) for v in row]))
    return "\n".join(out) + "\n"
