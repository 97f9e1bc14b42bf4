"""Gaussian process beliefs 101.

Build a belief over a small grid, feed it measurements of different quality,
and watch the posterior mean, the total variance, and the information
quantities respond.
"""

import numpy as np

from infopath import (
    GaussianProcessBelief,
    SquaredExponential,
    conditional_entropy,
    mutual_information_exact,
    mutual_information_trace,
)

grid = [(float(x), float(y)) for y in range(5) for x in range(5)]
kernel = SquaredExponential(signal_variance=1.0, lengthscale=1.5)
belief = GaussianProcessBelief(prior_mean=0.5, kernel=kernel, query_set=grid)

print("prior total variance:", belief.trace_of_variance())
print("prior entropy:       ", conditional_entropy(belief.posterior()))

# A noisy reading near the centre, then an exact one in the corner. Beliefs
# are snapshots: each add returns a new object and the old one is untouched.
noisy = belief.add_measurement((2.0, 2.0), 0.9, noise_variance=0.25)
exact = noisy.add_measurement((0.0, 0.0), 0.1, noise_variance=1e-9)

for name, b in [("prior", belief), ("noisy@centre", noisy), ("+exact@corner", exact)]:
    print(f"{name:>14}: trace={b.trace_of_variance():7.3f} "
          f"mean@centre={b.query_mean[12]:.3f} mean@corner={b.query_mean[0]:.3f}")

# Information gained by each update, in both the exact (log-determinant) and
# the cheap (total-variance) form used by the planner.
for name, before, after in [("noisy reading", belief, noisy), ("exact reading", noisy, exact)]:
    exact_mi = mutual_information_exact(before.posterior().covariance,
                                        after.posterior().covariance)
    trace_mi = mutual_information_trace(before.posterior().covariance,
                                        after.posterior().covariance)
    print(f"{name}: exact MI={exact_mi:.3f}  trace MI={trace_mi:.3f}")

# The posterior mean as a map: the corner is pinned low, the centre pulled up.
mean = exact.query_mean.reshape(5, 5)
print("\nposterior mean:")
for row in mean:
    print("  " + " ".join(f"{v:.2f}" for v in row))
