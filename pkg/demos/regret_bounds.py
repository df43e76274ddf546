"""How the confidence radius and suspected regret bound react to the lengthscale."""
from balancedbo import bounds
from balancedbo.bounds import BoundConfig
from balancedbo.candidates import q
from balancedbo.kernels import KernelSpec

cfg = BoundConfig(KernelSpec("matern", 1.0, 2), N=1.0, delta=0.1, sigma_n=0.01)
print("  theta   gamma_100   beta_100   R(100)")
for i in range(5):
    theta = q(i, 1.0, 2)
    g = bounds.mig_bound(cfg.kernel.with_theta(theta), 100)
    print(f"{theta:7.3f} {g:11.1f} {bounds.beta(cfg, theta, 100):10.2f} "
          f"{bounds.suspected_regret_bound(cfg, theta, 100):8.1f}")
# the balancer compares these curves at each candidate's next play count
curve, clamped = bounds.regret_curve(cfg, q(2, 1.0, 2), 10)
print("clamped increments in the first 10 plays of q(2):", clamped)
