# %% [markdown]
# # Ablation over solver variants
#
# Same data and seed, one component removed at a time. This mirrors what
# `mcgc ablate` writes to ablation.csv.

# %%
import numpy as np

from mcgc import SbmConfig, SolverConfig, generate_sbm, run_pipeline

variants = ["full", "shared_neighbors", "no_contrastive", "no_filter", "single_view(0)", "single_view(1)"]
scores = {v: [] for v in variants}
for seed in range(5):
    ds = generate_sbm(SbmConfig(seed=seed))
    for v in variants:
        report, _, _ = run_pipeline(ds, SolverConfig(alpha=1.0, seed=seed, variant=v))
        scores[v].append(report["metrics"]["acc"])

# %%
print(f"{'variant':18s} median ACC   per seed")
for v, accs in scores.items():
    print(f"{v:18s} {np.median(accs):.3f}        {np.round(accs, 3).tolist()}")
