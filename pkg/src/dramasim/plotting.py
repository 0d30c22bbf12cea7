"""Figures for GA traces and profile-count sweeps."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}
# fixed metadata keeps re-rendered figures byte-stable
PNG_METADATA = {"Software": None}


def _figure(width=5.0, ratio=0.62):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(width, width * ratio))
    return fig, ax


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=PNG_METADATA)
    plt.close(fig)
    return path


def plot_trace(trace, path: Path, title: str | None = None) -> Path:
    """Best and mean fitness per generation of one GA run."""
    gens = [r.generation for r in trace.records]
    with plt.rc_context(STYLE):
        fig, ax = _figure()
        ax.plot(gens, [r.best_fitness for r in trace.records], marker="o", ms=3, label="best")
        ax.plot(gens, [r.mean_fitness for r in trace.records], ls="--", label="population mean")
        ax.set_xlabel("generation")
        ax.set_ylabel("fitness")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_evolution(result, path: Path) -> Path:
    """Best fitness per generation for each profile count (first repetition
    drawn solid, the mean over repetitions dashed)."""
    groups = result.by_profiles()
    with plt.rc_context(STYLE):
        fig, ax = _figure(6.0)
        colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
        for i, (p, runs) in enumerate(sorted(groups.items())):
            if not runs:
                continue
            color = colors[i % len(colors)]
            first = runs[0].best_per_generation
            ax.plot(range(len(first)), first, color=color, label=f"P{p}")
            width = min(len(r.best_per_generation) for r in runs)
            mean = [sum(r.best_per_generation[g] for r in runs) / len(runs) for g in range(width)]
            ax.plot(range(width), mean, color=color, ls="--", lw=0.8)
        ax.set_xlabel("generation")
        ax.set_ylabel("best fitness")
        ax.set_title(f"{result.config.scene}: evolution of the best individual")
        ax.legend(frameon=False, ncol=5)
        return _save(fig, path)


def plot_best_boxplot(result, path: Path) -> Path:
    """Distribution of final best fitness per profile count."""
    groups = sorted((p, [r.best_fitness for r in runs]) for p, runs in result.by_profiles().items() if runs)
    with plt.rc_context(STYLE):
        fig, ax = _figure()
        ax.boxplot([v for _, v in groups])
        ax.set_xticks(range(1, len(groups) + 1), [f"P{p}" for p, _ in groups])
        ax.set_xlabel("profiles")
        ax.set_ylabel("best fitness at end of run")
        ax.set_title(result.config.scene)
        return _save(fig, path)
