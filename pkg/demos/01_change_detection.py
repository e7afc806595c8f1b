"""Watch the split-statistic detector catch a mean shift in a Bernoulli stream.

The stream sits at 0.25 for 400 steps, then jumps to 0.75.  We feed it to
the detector one observation at a time and print the statistic against its
confidence threshold as the evidence accumulates.
"""

import numpy as np

from psbandits import (
    GlrBuffer,
    delay_bound_d,
    glr_statistic,
    threshold_beta,
)

CHANGE_AT = 400
HORIZON = 800
DELTA = 0.01

rng = np.random.default_rng(7)
stream = np.concatenate([
    (rng.random(CHANGE_AT) < 0.25).astype(float),
    (rng.random(HORIZON - CHANGE_AT) < 0.75).astype(float),
])

print(f"stream: Bernoulli(0.25) for {CHANGE_AT} steps, then Bernoulli(0.75)")
print(f"detector confidence delta = {DELTA}\n")

buf = GlrBuffer()
detected = None
checkpoints = {100, 300, 410, 420, 430, 440, 450}
print(f"{'n':>5} {'statistic':>12} {'threshold':>12}")
for t, x in enumerate(stream, 1):
    buf.push(x)
    if buf.count < 2:
        continue
    value, split = glr_statistic(buf)
    beta = threshold_beta(buf.count, DELTA)
    if t in checkpoints:
        print(f"{t:>5} {value:>12.3f} {beta:>12.3f}")
    if detected is None and value >= beta:
        detected = t
        print(f"{t:>5} {value:>12.3f} {beta:>12.3f}   <- fires, "
              f"split estimate s={split}")
        break

if detected is None:
    print("\nno detection (unexpected at this separation)")
else:
    bound = delay_bound_d(K=1, p=1.0, delta=DELTA, T=HORIZON, delta_change=0.5)
    print(f"\nchange at t={CHANGE_AT}, detected at t={detected} "
          f"(delay {detected - CHANGE_AT})")
    print(f"worst-case delay bound for this setting: {bound} steps")
    print("the detector is tuned for reliability, so typical delays sit "
          "well below the bound")
