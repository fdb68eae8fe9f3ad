import numpy as np

from selinv import plotting
from selinv.pattern import SparsityPattern, symbolic_fill_in


def test_pattern_codes():
    a = SparsityPattern(3, [(2, 1), (3, 1)])
    codes = plotting.pattern_codes(a, symbolic_fill_in(a))
    assert codes[1, 0] == 1 and codes[2, 1] == 2
    assert np.isnan(codes[0, 2])
    assert codes[0, 0] == 1


def test_figures_are_written(tmp_path):
    a = SparsityPattern(4, [(4, 1), (3, 1)])
    plotting.plot_pattern(a, symbolic_fill_in(a), tmp_path / "p.png")
    plotting.plot_fillin_histogram({0: 1, 3: 5}, tmp_path / "h.png", max_fill=3)
    rows = [[0, 1.0, 1.0, 1.0, 1.0, 1.0, 5], [1, 0.0, 1e-3, 0.0, 0.0, 0.0, 5]]
    plotting.plot_convergence(rows, tmp_path / "c.png")
    eye = np.eye(6)
    plotting.plot_secondary(eye, eye, eye, eye, 2, tmp_path / "s.png")
    for name in ("p", "h", "c", "s"):
        assert (tmp_path / f"{name}.png").read_bytes()[:4] == b"\x89PNG"
