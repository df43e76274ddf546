"""LB, A-GP-UCB and MLE on the 1-D toy with a narrow hidden peak (a few seeds)."""
from balancedbo import harness

cfg = harness.ExperimentConfig(objective="toy_1d", methods=["LB", "AGPUCB", "MLE"], T=60,
                               seeds=[0, 1, 2], initial_design=3)
traces, summary = harness.run_experiment(cfg)
for row in summary.rows:
    print(f"{row['method']:7s} cumulative {row['cum_regret_mean']:7.2f}  best {row['best_regret_mean']:.4f}")
for rows in [harness.lengthscale_histogram([t for t in traces if t.method == m]) for m in cfg.methods]:
    print(rows[0][0], "modal lengthscale", round(harness.modal_lengthscale(rows, rows[0][0]), 4))
