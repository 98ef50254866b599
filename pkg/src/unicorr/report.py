"""CSV and figure output for oracle runs."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

FIELDS = ("inequality", "algebra", "source_valid", "quasi_valid", "agree")


def write_csv(rows, path):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=FIELDS)
        w.writeheader()
        for r in rows:
            w.writerow({k: r[k] for k in FIELDS})
    return path


def plot_oracle(rows, path, n_ineq, algebras):
    """Grid of inequalities by algebras: valid, refuted or disagreement."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.colors import ListedColormap

    col = {a: i for i, a in enumerate(algebras)}
    grid = np.zeros((n_ineq, len(algebras)))
    for r in rows:
        v = 2 if not r["agree"] else (1 if r["source_valid"] else 0)
        grid[r["inequality"], col[r["algebra"]]] = v
    fig, ax = plt.subplots(figsize=(max(6, len(algebras) * 0.09), max(3, n_ineq * 0.18)))
    ax.imshow(grid, aspect="auto", interpolation="nearest",
              cmap=ListedColormap(["#d9d9d9", "#4c72b0", "#c44e52"]), vmin=0, vmax=2)
    ax.set_xlabel("pool algebra")
    ax.set_ylabel("inequality")
    ax.set_title("validity (blue valid, grey refuted, red disagreement)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_validity_rates(rows, path, n_ineq):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    counts = np.zeros(n_ineq)
    totals = np.zeros(n_ineq)
    for r in rows:
        totals[r["inequality"]] += 1
        counts[r["inequality"]] += bool(r["source_valid"])
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.bar(np.arange(n_ineq), counts / np.maximum(totals, 1), color="#4c72b0")
    ax.set_xlabel("inequality")
    ax.set_ylabel("fraction of pool where valid")
    ax.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def write_oracle_report(rows, out_dir, n_ineq, algebras):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return [write_csv(rows, out / "oracle.csv"),
            plot_oracle(rows, out / "oracle_grid.png", n_ineq, algebras),
            plot_validity_rates(rows, out / "validity_rates.png", n_ineq)]
