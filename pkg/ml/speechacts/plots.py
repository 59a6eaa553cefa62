"""
Figures
=======
Speech act distribution per topic / topic type, and F1 heatmaps of
evaluation tables.
"""

from pathlib import Path
from typing import Dict

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import seaborn as sns

from .config import (
    FIGURE_SIZE_DISTRIBUTION, FIGURE_SIZE_HEATMAP, PLOT_DPI, get_visualization_filename,
)
from .corpus import Corpus, SpeechAct, class_distribution_table
from .evaluation import EvalReport, results_table


def plot_class_distribution(corpus: Corpus, output_dir) -> Path:
    """Stacked speech act fractions per topic (left) and per topic type (right)"""

    fig, axes = plt.subplots(1, 2, figsize=FIGURE_SIZE_DISTRIBUTION)
    colors = sns.color_palette('Set2', len(SpeechAct))

    for ax, by, title in ((axes[0], 'topic', 'Speech Acts by Topic'),
                          (axes[1], 'topic_type', 'Speech Acts by Topic Type')):
        table = class_distribution_table(corpus, by=by)
        table.plot(kind='bar', stacked=True, ax=ax, color=colors, legend=False, width=0.8)
        ax.set_title(title, fontsize=14, fontweight='bold')
        ax.set_xlabel('')
        ax.set_ylabel('Fraction of tweets', fontsize=12)
        ax.set_ylim(0, 1)
        ax.tick_params(axis='x', rotation=45)
        ax.grid(True, alpha=0.3, axis='y')

    handles, labels = axes[0].get_legend_handles_labels()
    fig.legend(handles, labels, loc='center right', fontsize=11)
    plt.tight_layout(rect=(0, 0, 0.88, 1))

    path = Path(output_dir) / get_visualization_filename('class_distribution')
    path.parent.mkdir(parents=True, exist_ok=True)
    plt.savefig(path, dpi=PLOT_DPI, bbox_inches='tight')
    plt.close(fig)
    return path


def plot_f1_heatmap(reports: Dict[str, EvalReport], output_dir, name: str = 'f1_heatmap',
                    title: str = 'Weighted and per-class F1') -> Path:
    """Heatmap of a results table (rows = configurations, columns = As..Avg)"""

    table = results_table(reports)

    fig, ax = plt.subplots(figsize=FIGURE_SIZE_HEATMAP)
    sns.heatmap(table, annot=True, fmt='.2f', cmap='RdYlGn', vmin=0, vmax=1,
                cbar_kws={'label': 'F1'}, ax=ax)
    ax.set_title(title, fontsize=14, fontweight='bold', pad=20)
    ax.set_xlabel('Speech act', fontsize=12)
    ax.set_ylabel('')

    plt.tight_layout()

    path = Path(output_dir) / get_visualization_filename(name)
    path.parent.mkdir(parents=True, exist_ok=True)
    plt.savefig(path, dpi=PLOT_DPI, bbox_inches='tight')
    plt.close(fig)
    return path
