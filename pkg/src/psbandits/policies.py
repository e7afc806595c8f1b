"""Semi-bandit policies over m-sets.

Seven policy kinds share one interface: ``select(t)`` proposes a super
arm for 1-based step ``t``, and ``update(t, super_arm, rewards)`` feeds
back one reward per played base arm and returns any detection or restart
events.  Policies never see the environment; the harness mediates.

Kinds
-----
``cucb``         combinatorial UCB, no adaptation to changes
``glr_cucb``     CUCB + per-arm GLR detectors, global restart on detection
``lr_glr_cucb``  same detectors, but only the arms that fired are reset
``oracle_cucb``  CUCB restarted at externally supplied change points
``cts``          combinatorial Thompson sampling with Beta(1, 1) priors
``ducb``         discounted UCB over whole super arms
``mucb``         windowed two-half test over super arms, global restart

The GLR variants devote a deterministic fraction ``p`` of steps to forced
exploration so that every arm keeps feeding its detector: with
``M = floor(K/p)``, step ``t`` is forced to arm ``(t mod M) - 1`` whenever
``1 <= t mod M <= K``.
"""

from collections import deque
from dataclasses import dataclass
import math

import numpy as np

from .detect import GlrBuffer, GlrConfig, glr_test
from .oracle import enumerate_superarms

POLICY_KINDS = (
    "glr_cucb", "lr_glr_cucb", "cucb", "cts", "ducb", "mucb", "oracle_cucb",
)


@dataclass(frozen=True)
class PolicyParams:
    """Parameter bag; each kind reads the fields it needs.

    p / delta / check_every / min_samples drive the GLR variants,
    gamma / xi the discounted UCB, w / b / gamma_m the windowed test
    (gamma_m = 0 disables its forced exploration), and restart_times
    the oracle restarts.
    """

    kind: str
    p: float | None = None
    delta: float | None = None
    check_every: int = 1
    min_samples: int = 2
    gamma: float | None = None
    xi: float = 0.5
    w: int | None = None
    b: float | None = None
    gamma_m: float = 0.0
    restart_times: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}; "
                             f"expected one of {POLICY_KINDS}")
        if self.p is not None and not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        if self.delta is not None and not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.check_every < 1:
            raise ValueError("check_every must be a positive integer")
        if self.min_samples < 2:
            raise ValueError("min_samples must be at least 2")
        if self.gamma is not None and not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.xi <= 0.0:
            raise ValueError(f"xi must be positive, got {self.xi}")
        if self.w is not None and (self.w < 2 or self.w % 2):
            raise ValueError(f"w must be an even integer >= 2, got {self.w}")
        if self.b is not None and self.b <= 0.0:
            raise ValueError(f"b must be positive, got {self.b}")
        if not 0.0 <= self.gamma_m <= 1.0:
            raise ValueError(f"gamma_m must lie in [0, 1], got {self.gamma_m}")
        times = tuple(int(t) for t in self.restart_times)
        if any(t < 1 for t in times):
            raise ValueError("restart_times must be positive steps")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("restart_times must be strictly increasing")
        object.__setattr__(self, "restart_times", times)


def default_params(kind: str, T: int, K: int, m: int,
                   N: int | None = None) -> PolicyParams:
    """Benchmark defaults for each kind at horizon T.

    GLR variants: delta = 20/T and p = 0.05 * sqrt((N-1) * ln(T) / T)
    when the number of segments N >= 2 is known, else the horizon-tuned
    p = sqrt(K * ln(T) / T).  DUCB: gamma = 1 - sqrt(1/T)/4, xi = 1/2.
    MUCB: w = 150, b = sqrt(w/2 * ln(2*F*T^2)) over F = C(K, m) super
    arms, gamma_m = 0.05 * sqrt((N-1) * F * (2b + 3*sqrt(w)) / (2T)).
    """
    if T < 2:
        raise ValueError(f"need T >= 2, got {T}")
    log_t = math.log(T)
    if kind in ("glr_cucb", "lr_glr_cucb"):
        if N is not None and N >= 2:
            p = 0.05 * math.sqrt((N - 1) * log_t / T)
        else:
            p = math.sqrt(K * log_t / T)
        return PolicyParams(kind, p=min(1.0, p), delta=20.0 / T)
    if kind == "ducb":
        return PolicyParams(kind, gamma=1.0 - math.sqrt(1.0 / T) / 4.0, xi=0.5)
    if kind == "mucb":
        w = 150
        F = math.comb(K, m)
        b = math.sqrt(w / 2.0 * math.log(2.0 * F * T * T))
        if N is not None and N >= 2:
            gamma_m = 0.05 * math.sqrt((N - 1) * F * (2.0 * b + 3.0 * math.sqrt(w))
                                       / (2.0 * T))
        else:
            gamma_m = 0.0
        return PolicyParams(kind, w=w, b=b, gamma_m=min(1.0, gamma_m))
    if kind in ("cucb", "cts", "oracle_cucb"):
        return PolicyParams(kind)
    raise ValueError(f"unknown policy kind {kind!r}")


def ucb_index(mean: float, pulls: int, t: int) -> float:
    """Optimistic index mean + sqrt(3 * ln(t) / (2 * pulls)).

    Unplayed arms (pulls = 0) get +inf so they are tried first.  The
    index is deliberately not capped at 1.
    """
    if pulls < 0:
        raise ValueError(f"pulls must be non-negative, got {pulls}")
    if t < 1:
        raise ValueError(f"t must be a positive step, got {t}")
    if pulls == 0:
        return math.inf
    return mean + math.sqrt(3.0 * math.log(t) / (2.0 * pulls))


def forced_arm(t: int, K: int, p: float) -> int | None:
    """Deterministic forced-exploration schedule.

    With M = floor(K/p), returns arm (t mod M) - 1 when the residue lies
    in {1, ..., K}, else None.  Over any window of M steps each arm is
    forced exactly once, so the forced fraction is K/M ~ p.
    """
    if K < 1:
        raise ValueError(f"need K >= 1, got {K}")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if t < 1:
        raise ValueError(f"t must be a positive step, got {t}")
    # the small epsilon keeps exact ratios like 6/0.3 from flooring to 19
    M = math.floor(K / p + 1e-9)
    r = t % M
    if 1 <= r <= K:
        return r - 1
    return None


@dataclass(frozen=True)
class PolicyEvent:
    """Detection or restart emitted by update().

    ``arms`` holds the base arms whose detectors fired (empty for
    super-arm level detections and scheduled restarts).  A detection at
    step t always precedes the restart it causes at the same step.
    """

    time: int
    kind: str  # 'detection' | 'global_restart' | 'local_restart'
    arms: tuple[int, ...] = ()


def _check_feedback(m: int, super_arm, rewards) -> list[float]:
    if len(super_arm) != m or len(rewards) != m:
        raise ValueError(
            f"expected a size-{m} super arm with one reward per arm, got "
            f"{len(super_arm)} arms and {len(rewards)} rewards"
        )
    xs = [float(x) for x in rewards]
    if any(not 0.0 <= x <= 1.0 for x in xs):
        raise ValueError("rewards must lie in [0, 1]")
    return xs


class CombUcb:
    """CUCB over base arms, optionally with change detection.

    Covers the kinds cucb (no adaptation), glr_cucb (global restart when
    any per-arm GLR detector fires), lr_glr_cucb (only fired arms are
    reset), and oracle_cucb (global restarts at given steps).
    """

    def __init__(self, K: int, m: int, params: PolicyParams, seed: int = 0):
        if not 1 <= m <= K:
            raise ValueError(f"need 1 <= m <= K, got K={K}, m={m}")
        self.K = K
        self.m = m
        self.params = params
        self._restart_mode = {"glr_cucb": "global", "lr_glr_cucb": "local"}.get(
            params.kind)
        if self._restart_mode is not None:
            if params.p is None or params.delta is None:
                raise ValueError(f"{params.kind} needs both p and delta")
            self._cfg = GlrConfig(params.delta, params.check_every,
                                  params.min_samples)
            self._buffers = [GlrBuffer() for _ in range(K)]
        else:
            self._cfg = None
            self._buffers = None
        self._restart_times = frozenset(params.restart_times)
        self.counts = np.zeros(K, dtype=np.int64)
        self.sums = np.zeros(K)

    def indices(self, t: int) -> np.ndarray:
        """Vector of ucb_index values for every base arm."""
        with np.errstate(divide="ignore", invalid="ignore"):
            radius = np.sqrt(1.5 * np.log(t) / self.counts)
            means = self.sums / self.counts
        return np.where(self.counts > 0, means + radius, np.inf)

    def select(self, t: int) -> tuple[int, ...]:
        idx = self.indices(t)
        order = np.argsort(-idx, kind="stable")  # ties to the lowest arm
        forced = None
        if self._restart_mode is not None:
            forced = forced_arm(t, self.K, self.params.p)
        if forced is None:
            pick = [int(a) for a in order[: self.m]]
        else:
            pick = [forced]
            pick += [int(a) for a in order if int(a) != forced][: self.m - 1]
        return tuple(sorted(pick))

    def _reset_all(self) -> None:
        self.counts[:] = 0
        self.sums[:] = 0.0
        if self._buffers is not None:
            for buf in self._buffers:
                buf.reset()

    def update(self, t: int, super_arm, rewards) -> list[PolicyEvent]:
        xs = _check_feedback(self.m, super_arm, rewards)
        events: list[PolicyEvent] = []
        fired: list[int] = []
        for k, x in zip(super_arm, xs):
            self.counts[k] += 1
            self.sums[k] += x
            if self._buffers is not None:
                buf = self._buffers[k]
                buf.push(x)
                if buf.count % self._cfg.check_every == 0 and glr_test(buf, self._cfg):
                    fired.append(k)
        if fired:
            events.append(PolicyEvent(t, "detection", tuple(fired)))
            if self._restart_mode == "global":
                self._reset_all()
                events.append(PolicyEvent(t, "global_restart", tuple(fired)))
            else:
                for k in fired:
                    self.counts[k] = 0
                    self.sums[k] = 0.0
                    self._buffers[k].reset()
                events.append(PolicyEvent(t, "local_restart", tuple(fired)))
        if t in self._restart_times:
            self._reset_all()
            events.append(PolicyEvent(t, "global_restart"))
        return events


class CombThompson:
    """Thompson sampling with independent Beta(1, 1) posteriors per arm."""

    def __init__(self, K: int, m: int, params: PolicyParams, seed: int = 0):
        if not 1 <= m <= K:
            raise ValueError(f"need 1 <= m <= K, got K={K}, m={m}")
        self.K = K
        self.m = m
        self.params = params
        self._rng = np.random.default_rng(np.random.SeedSequence(seed))
        self.successes = np.zeros(K)
        self.failures = np.zeros(K)

    def select(self, t: int) -> tuple[int, ...]:
        theta = self._rng.beta(1.0 + self.successes, 1.0 + self.failures)
        order = np.argsort(-theta, kind="stable")
        return tuple(sorted(int(a) for a in order[: self.m]))

    def update(self, t: int, super_arm, rewards) -> list[PolicyEvent]:
        xs = _check_feedback(self.m, super_arm, rewards)
        for k, x in zip(super_arm, xs):
            if x not in (0.0, 1.0):
                # binarise bounded rewards with an auxiliary coin flip
                x = 1.0 if self._rng.random() < x else 0.0
            self.successes[k] += x
            self.failures[k] += 1.0 - x
        return []


class DiscountedSuperArmUcb:
    """Discounted UCB treating each super arm as one atomic arm.

    Statistics decay by gamma every step; the exploration bonus is
    2 * m * sqrt(xi * ln(n_gamma) / N_gamma(a)) to cover rewards in
    [0, m].
    """

    def __init__(self, K: int, m: int, params: PolicyParams, seed: int = 0):
        if params.gamma is None:
            raise ValueError("ducb needs a discount factor gamma")
        self.K = K
        self.m = m
        self.params = params
        self.arms = enumerate_superarms(K, m)
        self._index_of = {a: i for i, a in enumerate(self.arms)}
        self._n = np.zeros(len(self.arms))
        self._s = np.zeros(len(self.arms))

    def select(self, t: int) -> tuple[int, ...]:
        n_total = self._n.sum()
        log_term = max(math.log(n_total), 0.0) if n_total > 0 else 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            radius = 2.0 * self.m * np.sqrt(self.params.xi * log_term / self._n)
            means = self._s / self._n
        idx = np.where(self._n > 0, means + radius, np.inf)
        return self.arms[int(np.argmax(idx))]

    def update(self, t: int, super_arm, rewards) -> list[PolicyEvent]:
        xs = _check_feedback(self.m, super_arm, rewards)
        key = tuple(sorted(int(k) for k in super_arm))
        i = self._index_of[key]
        self._n *= self.params.gamma
        self._s *= self.params.gamma
        self._n[i] += 1.0
        self._s[i] += sum(xs)
        return []


class WindowedSuperArmUcb:
    """UCB1 over super arms with a sliding-window two-half change test.

    Rewards are normalised by m into [0, 1].  Once a super arm has a full
    window of w observations, |sum of the newer half - sum of the older
    half| > b triggers a global restart.  Forced exploration cycles
    through all super arms at rate gamma_m (0 disables it).
    """

    def __init__(self, K: int, m: int, params: PolicyParams, seed: int = 0):
        if params.w is None or params.b is None:
            raise ValueError("mucb needs a window size w and a threshold b")
        self.K = K
        self.m = m
        self.params = params
        self.arms = enumerate_superarms(K, m)
        self._index_of = {a: i for i, a in enumerate(self.arms)}
        F = len(self.arms)
        self._cycle = math.ceil(F / params.gamma_m) if params.gamma_m > 0 else 0
        self._windows = [deque(maxlen=params.w) for _ in range(F)]
        self._counts = np.zeros(F, dtype=np.int64)
        self._sums = np.zeros(F)
        self._tau = 0  # step of the last restart

    def select(self, t: int) -> tuple[int, ...]:
        rel = t - self._tau
        if self._cycle:
            slot = rel % self._cycle
            if 1 <= slot <= len(self.arms):
                return self.arms[slot - 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            radius = np.sqrt(2.0 * math.log(max(rel, 1)) / self._counts)
            means = self._sums / self._counts
        idx = np.where(self._counts > 0, means + radius, np.inf)
        return self.arms[int(np.argmax(idx))]

    def update(self, t: int, super_arm, rewards) -> list[PolicyEvent]:
        xs = _check_feedback(self.m, super_arm, rewards)
        key = tuple(sorted(int(k) for k in super_arm))
        i = self._index_of[key]
        x = sum(xs) / self.m
        self._counts[i] += 1
        self._sums[i] += x
        window = self._windows[i]
        window.append(x)
        w = self.params.w
        if len(window) == w:
            arr = list(window)
            drift = abs(sum(arr[w // 2:]) - sum(arr[: w // 2]))
            if drift > self.params.b:
                for win in self._windows:
                    win.clear()
                self._counts[:] = 0
                self._sums[:] = 0.0
                self._tau = t
                return [PolicyEvent(t, "detection"),
                        PolicyEvent(t, "global_restart")]
        return []


_POLICY_CLASSES = {
    "cucb": CombUcb,
    "glr_cucb": CombUcb,
    "lr_glr_cucb": CombUcb,
    "oracle_cucb": CombUcb,
    "cts": CombThompson,
    "ducb": DiscountedSuperArmUcb,
    "mucb": WindowedSuperArmUcb,
}


def make_policy(params: PolicyParams, K: int, m: int, seed: int = 0):
    """Instantiate the policy class for params.kind."""
    cls = _POLICY_CLASSES[params.kind]
    return cls(K, m, params, seed)
