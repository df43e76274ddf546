"""Fit a GP at two lengthscales and look at the posterior and the evidence."""
import numpy as np

from balancedbo import gp
from balancedbo.gp import ObservationLog
from balancedbo.kernels import KernelSpec

rng = np.random.default_rng(0)
X = rng.random((12, 1))
y = np.sin(6 * X[:, 0]) + 0.05 * rng.standard_normal(12)
log = ObservationLog(1, 0.05, X, y)
grid = np.linspace(0, 1, 5).reshape(-1, 1)

for theta in (0.05, 0.3):
    spec = KernelSpec("matern", theta, 1)
    model = gp.fit(log, spec, standardize=True)
    mu, var = model.predict(grid)
    print(f"theta={theta}: log evidence {gp.log_marginal_likelihood(log, spec, standardize=True):.2f}")
    for x, m, v in zip(grid[:, 0], mu, var):
        print(f"   x={x:.2f}  mean={m:+.3f}  sd={np.sqrt(v):.3f}")
