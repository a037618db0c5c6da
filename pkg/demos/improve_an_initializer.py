"""Any screener's output can be improved without losing sparsity.

Both iteration variants never increase the residual sum of squares when
started from a coefficient vector within the sparsity budget, so feeding
them the least-squares estimate of a classical screener (marginal
correlation, its iterated variant, forward stepwise) can only improve
the fit.  A better-fitting subset of the same size is also more likely
to contain every relevant variable.
"""

import numpy as np

from subsetscreen import (
    IterationOptions,
    forward_stepwise,
    isis,
    rss,
    run,
    sis,
    standardize,
)

rng = np.random.default_rng(1022)

n, p, d, M, rho = 40, 60, 8, 10, 0.3
shared = rng.standard_normal(n)
X = np.sqrt(rho) * shared[:, None] + np.sqrt(1 - rho) * rng.standard_normal((n, p))
beta = np.zeros(p)
beta[:d] = 2.0
y = X @ beta + rng.standard_normal(n)
prob = standardize(X, y)
truth = set(range(d))

print(f"instance: n={n}, p={p}, {d} true variables, correlation {rho}, budget M={M}\n")
header = f"{'initializer':<18}{'rss before':>12}{'rss after':>12}{'iters':>7}  covers truth?"
print(header)
print("-" * len(header))

initializers = {
    "marginal (sis)": sis(prob, M),
    "iterated (isis)": isis(prob, M),
    "stepwise (fs)": forward_stepwise(prob, M).coef_at(M),
}
for name, init in initializers.items():
    before = rss(prob, init)
    improved = run(prob, init, M, IterationOptions("foss"))
    covered_before = truth <= set(init.active.tolist())
    covered_after = truth <= set(improved.coef.active.tolist())
    print(
        f"{name:<18}{before:>12.2f}{improved.final_rss:>12.2f}"
        f"{improved.iterations:>7}  {covered_before} -> {covered_after}"
    )

print("\nboth variants land in the same place here, but the refit variant")
print("gets there in a handful of iterations:")
init = sis(prob, M)
plain = run(prob, init, M, IterationOptions("oss"))
refit = run(prob, init, M, IterationOptions("foss"))
print(f"  plain thresholded: {plain.iterations:>4} iterations, objective {plain.final_rss:.2f}")
print(f"  with refits:       {refit.iterations:>4} iterations, objective {refit.final_rss:.2f}")
