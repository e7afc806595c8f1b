"""Monte Carlo experiment harness.

Runs policies against piecewise-stationary environments, accumulates
pseudo-regret against the true means, aggregates over replications, and
serialises results as CSV and standalone SVG plots.

Replication ``r`` of policy ``label`` uses an episode seed derived by
hashing ``(base_seed, label, r)`` with SHA-256, so every (policy,
replication) pair gets an independent reward stream and results never
depend on the order in which episodes run.
"""

from dataclasses import dataclass, field, replace
import hashlib
import io
from xml.sax.saxutils import escape

import numpy as np

from .env import Environment, RewardStream, change_point_report
from .oracle import top_m
from .policies import PolicyEvent, PolicyParams, default_params, make_policy


def episode_seed(base_seed: int, label: str, replication: int) -> int:
    """Stable 63-bit seed for one (policy label, replication) episode."""
    digest = hashlib.sha256(
        f"{base_seed}|{label}|{replication}".encode()
    ).digest()
    return int.from_bytes(digest[:8], "big") & (2**63 - 1)


@dataclass(frozen=True)
class RunTrace:
    """One episode: per-step cumulative pseudo-regret plus emitted events."""

    label: str
    seed: int
    cumulative_regret: np.ndarray
    events: tuple[PolicyEvent, ...]
    actions: tuple[tuple[int, ...], ...] | None = None

    @property
    def final_regret(self) -> float:
        return float(self.cumulative_regret[-1])


def run_episode(env: Environment, m: int, params,
                alpha: float = 1.0, seed: int = 0, label: str | None = None,
                record_actions: bool = False) -> RunTrace:
    """Play one policy over the full horizon and trace its regret.

    ``params`` is normally a PolicyParams, but any object with select()
    and update() is accepted as a ready-made policy.  Per-step
    pseudo-regret is alpha * reward(top_m(mu_t), mu_t) -
    reward(S_t, mu_t), evaluated on the true means, so an exact oracle
    replay accrues zero under alpha = 1.  An oracle_cucb without explicit
    restart_times is given the steps where the optimal m-set moves.
    """
    table = env.table
    T, K = table.horizon, table.num_arms
    stream = RewardStream(env, seed)
    if isinstance(params, PolicyParams):
        if params.kind == "oracle_cucb" and not params.restart_times:
            report = change_point_report(env, m)
            params = replace(params,
                             restart_times=report.optimal_super_arm_changes)
        policy = make_policy(params, K, m, seed)
        label = label or params.kind
    else:
        policy = params
        label = label or type(policy).__name__

    seg_of = table.segment_index(np.arange(1, T + 1))
    seg_best = np.array([
        alpha * float(table.means[i][list(top_m(table.means[i], m))].sum())
        for i in range(table.num_segments)
    ])

    regret = np.empty(T)
    events: list[PolicyEvent] = []
    actions: list[tuple[int, ...]] = []
    total = 0.0
    for t in range(1, T + 1):
        chosen = policy.select(t)
        seg = seg_of[t - 1]
        total += seg_best[seg] - float(table.means[seg][list(chosen)].sum())
        regret[t - 1] = total
        events.extend(policy.update(t, chosen, stream.at(t)[list(chosen)]))
        if record_actions:
            actions.append(chosen)

    return RunTrace(
        label=label,
        seed=seed,
        cumulative_regret=regret,
        events=tuple(events),
        actions=tuple(actions) if record_actions else None,
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """A batch of policies to compare on one environment."""

    env: Environment
    m: int
    policies: tuple[tuple[str, PolicyParams], ...]
    replications: int = 100
    base_seed: int = 0
    alpha: float = 1.0

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("need at least one replication")
        if not self.policies:
            raise ValueError("need at least one policy")
        labels = [lbl for lbl, _ in self.policies]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate policy labels in {labels}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")


@dataclass(frozen=True)
class Aggregate:
    """Per-step mean and standard deviation of cumulative regret."""

    labels: tuple[str, ...]
    mean: np.ndarray  # (policies, T)
    std: np.ndarray   # (policies, T)
    replications: int = 0
    events: dict[str, tuple[tuple[PolicyEvent, ...], ...]] = field(
        default_factory=dict, compare=False)

    @property
    def horizon(self) -> int:
        return self.mean.shape[1]

    def final(self, label: str) -> tuple[float, float]:
        i = self.labels.index(label)
        return float(self.mean[i, -1]), float(self.std[i, -1])


def run_experiment(cfg: ExperimentConfig) -> Aggregate:
    """Run every (policy, replication) episode and aggregate regret."""
    T = cfg.env.horizon
    means = np.empty((len(cfg.policies), T))
    stds = np.empty((len(cfg.policies), T))
    all_events: dict[str, tuple[tuple[PolicyEvent, ...], ...]] = {}

    for row, (label, params) in enumerate(cfg.policies):
        curves = np.empty((cfg.replications, T))
        ev: list[tuple[PolicyEvent, ...]] = []
        for r in range(cfg.replications):
            trace = run_episode(
                cfg.env, cfg.m, params, alpha=cfg.alpha,
                seed=episode_seed(cfg.base_seed, label, r), label=label,
            )
            curves[r] = trace.cumulative_regret
            ev.append(trace.events)
        means[row] = curves.mean(axis=0)
        stds[row] = curves.std(axis=0)
        all_events[label] = tuple(ev)

    return Aggregate(
        labels=tuple(lbl for lbl, _ in cfg.policies),
        mean=means,
        std=stds,
        replications=cfg.replications,
        events=all_events,
    )


def default_policy_suite(T: int, K: int, m: int,
                         N: int | None = None) -> tuple[tuple[str, PolicyParams], ...]:
    """All seven kinds with their benchmark defaults, labelled by kind."""
    from .policies import POLICY_KINDS

    return tuple((kind, default_params(kind, T, K, m, N)) for kind in POLICY_KINDS)


# ---------------------------------------------------------------------------
# serialisation


def export_csv(agg: Aggregate) -> str:
    """Serialise an aggregate to CSV.

    Header ``t,<label>_mean,<label>_std,...``; one row per step with
    full-precision floats, so identical aggregates serialise to
    identical bytes.
    """
    cols = []
    for label in agg.labels:
        cols.append(f"{label}_mean")
        cols.append(f"{label}_std")
    out = io.StringIO()
    out.write("t," + ",".join(cols) + "\n")
    for t in range(agg.horizon):
        row = [str(t + 1)]
        for i in range(len(agg.labels)):
            row.append(repr(float(agg.mean[i, t])))
            row.append(repr(float(agg.std[i, t])))
        out.write(",".join(row) + "\n")
    return out.getvalue()


def parse_csv(text: str) -> Aggregate:
    """Inverse of export_csv (events and replication count are not stored)."""
    lines = [ln for ln in text.strip().splitlines() if ln]
    header = lines[0].split(",")
    if header[0] != "t" or len(header) < 3 or (len(header) - 1) % 2:
        raise ValueError("expected header 't,<label>_mean,<label>_std,...'")
    labels = []
    for i in range(1, len(header), 2):
        if not header[i].endswith("_mean") or not header[i + 1].endswith("_std"):
            raise ValueError(f"malformed column pair {header[i]!r}, {header[i + 1]!r}")
        if header[i][: -len("_mean")] != header[i + 1][: -len("_std")]:
            raise ValueError(f"mismatched label pair {header[i]!r}, {header[i + 1]!r}")
        labels.append(header[i][: -len("_mean")])

    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValueError("row width does not match the header")
    if not np.array_equal(data[:, 0], np.arange(1, data.shape[0] + 1)):
        raise ValueError("first column must count steps 1..T")
    mean = data[:, 1::2].T.copy()
    std = data[:, 2::2].T.copy()
    return Aggregate(tuple(labels), mean, std)


# ---------------------------------------------------------------------------
# plotting

_PALETTE = (
    "#4477aa", "#ee6677", "#228833", "#ccbb44",
    "#66ccee", "#aa3377", "#bbbbbb", "#222222",
)


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** np.floor(np.log10(raw))
    step = float(min(s * mag for s in (1, 2, 5, 10) if s * mag >= raw))
    first = np.ceil(lo / step) * step
    return [float(v) for v in np.arange(first, hi + step / 2, step)]


def emit_svg(agg: Aggregate, width: int = 800, height: int = 500,
             title: str = "cumulative regret", show_band: bool = False) -> str:
    """Standalone SVG plot of mean regret curves (optionally +/- one std).

    Pure string construction: deterministic output, no plotting
    dependencies.
    """
    ml, mr, mt, mb = 70, 180, 40, 50
    pw, ph = width - ml - mr, height - mt - mb
    T = agg.horizon
    top = float((agg.mean + (agg.std if show_band else 0.0)).max())
    top = max(top, 1e-9)

    def sx(t):
        return ml + pw * (t - 1) / max(T - 1, 1)

    def sy(v):
        return mt + ph * (1.0 - v / top)

    # subsample long curves; plotting more points than pixels is waste
    steps = np.unique(np.linspace(1, T, min(T, 2 * pw)).astype(int))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{ml + pw / 2:.1f}" y="{mt - 15}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{escape(title)}</text>',
    ]

    axis = 'stroke="#333" stroke-width="1"'
    parts.append(f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" {axis}/>')
    parts.append(f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" {axis}/>')
    label_style = 'font-family="sans-serif" font-size="11" fill="#333"'
    for v in _ticks(0.0, top):
        if v > top:
            continue
        y = sy(v)
        parts.append(f'<line x1="{ml - 4}" y1="{y:.1f}" x2="{ml}" y2="{y:.1f}" {axis}/>')
        parts.append(f'<text x="{ml - 8}" y="{y + 4:.1f}" text-anchor="end" '
                     f'{label_style}>{v:g}</text>')
    for v in _ticks(1.0, float(T)):
        if v > T:
            continue
        x = sx(v)
        parts.append(f'<line x1="{x:.1f}" y1="{mt + ph}" x2="{x:.1f}" '
                     f'y2="{mt + ph + 4}" {axis}/>')
        parts.append(f'<text x="{x:.1f}" y="{mt + ph + 16}" text-anchor="middle" '
                     f'{label_style}>{v:g}</text>')
    parts.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 12}" '
                 f'text-anchor="middle" {label_style}>t</text>')

    for i, label in enumerate(agg.labels):
        colour = _PALETTE[i % len(_PALETTE)]
        if show_band:
            upper = [(sx(t), sy(min(agg.mean[i, t - 1] + agg.std[i, t - 1], top)))
                     for t in steps]
            lower = [(sx(t), sy(max(agg.mean[i, t - 1] - agg.std[i, t - 1], 0.0)))
                     for t in reversed(steps)]
            pts = " ".join(f"{x:.1f},{y:.1f}" for x, y in upper + lower)
            parts.append(f'<polygon points="{pts}" fill="{colour}" '
                         f'fill-opacity="0.15" stroke="none"/>')
        pts = " ".join(f"{sx(t):.1f},{sy(agg.mean[i, t - 1]):.1f}" for t in steps)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" '
                     f'stroke-width="1.5"/>')
        ly = mt + 14 + 18 * i
        lx = ml + pw + 12
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
                     f'stroke="{colour}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 28}" y="{ly}" {label_style}>'
                     f'{escape(label)}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
