"""The adversarial environment behind the minimax floor.

Every arm pays ~1/2; each segment secretly favours one arm by a hair.
The separation is calibrated so that finding the favourite costs about
as much as ignoring it, which is what makes the instance hard.
"""

import numpy as np

from psbandits import (
    ExperimentConfig,
    build_hard_instance,
    default_params,
    hard_instance_epsilon,
    minimax_lower_bound,
    run_experiment,
)

K, T, N = 6, 3000, 3

eps = hard_instance_epsilon(K, T)
print(f"favoured-arm edge: epsilon = {eps:.5f} (barely above 1/2)")

env = build_hard_instance(K=K, T=T, N=N, seed=2)
print(f"\nsegment layout (starts {env.table.starts}):")
for i, row in enumerate(env.table.means):
    favoured = int(np.argmax(row))
    print(f"  segment {i}: favoured arm {favoured}, means "
          f"{np.round(row, 5).tolist()}")

floor = minimax_lower_bound(N, K, T)
print(f"\nminimax floor for (N={N}, K={K}, T={T}): {floor:.1f}")

REPS = 5
policies = tuple(
    (kind, default_params(kind, T, K, 1, N)) for kind in ("cucb", "glr_cucb")
)
print(f"\nrunning {', '.join(k for k, _ in policies)} x {REPS} replications ...")
agg = run_experiment(ExperimentConfig(env, 1, policies,
                                      replications=REPS, base_seed=2))
for label in agg.labels:
    mean, std = agg.final(label)
    print(f"  {label:<10} final regret {mean:7.1f} +- {std:.1f} "
          f"(floor {floor:.1f})")

print("\nboth sit above the floor: with edges this small, no amount of "
      "cleverness identifies the favourite quickly enough to dodge it.")
