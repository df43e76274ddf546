"""Random RKHS test functions and CSV lookup tables."""
import numpy as np

from balancedbo import benchmarks as bm
from balancedbo.baselines import estimate_theta_star
from balancedbo.kernels import KernelSpec

f = bm.sample_rkhs_function(KernelSpec("matern", 0.2, 1), norm_budget=2.0, basis_count=50, seed=3)
print("RKHS norm", bm.rkhs_norm(f), "max", f.known_max)
print("theta_hat from the top 1% of samples:", estimate_theta_star(f, seed=0))

table = bm.load_tabular(bm.FIXTURE)
print(f"{table.name}: {len(table)} rows, d={table.d}, best y {table.known_max:.3f}")
obj = table.objective(noise=0.0)
print("first row value:", obj(table.X[0]), "==", table.y[0])
