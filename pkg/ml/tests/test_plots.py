import numpy as np

from speechacts.evaluation import EvalReport
from speechacts.plots import plot_class_distribution, plot_f1_heatmap

PNG_SIGNATURE = b'\x89PNG\r\n\x1a\n'


def test_class_distribution_figure(synthetic_corpus, tmp_path):
    path = plot_class_distribution(synthetic_corpus, tmp_path / 'figures')

    assert path.name == 'class_distribution.png'
    assert path.read_bytes().startswith(PNG_SIGNATURE)


def test_f1_heatmap_figure(tmp_path):
    reports = {
        'BL': EvalReport.from_confusion(np.pad(np.array([[6]]), ((0, 5), (0, 5))) + np.eye(6, dtype=int)),
        'LR': EvalReport.from_confusion(np.diag([5, 4, 3, 2, 1, 6])),
    }
    path = plot_f1_heatmap(reports, tmp_path, name='table')

    assert path == tmp_path / 'table.png'
    assert path.read_bytes().startswith(PNG_SIGNATURE)
