import math
from pathlib import Path

import numpy as np
import pytest

import tracelab as tl

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


def test_exponents():
    e = tl.exponents(3, 2.0, 12.0)
    assert e["p_star"] == pytest.approx(6.0)
    assert e["r"] == pytest.approx(12.0 - e["beta"])
    assert e["max_residual"] <= 1e-12
    assert "r" not in tl.exponents(3, 2.0, math.inf)
    with pytest.raises(tl.DomainError):
        tl.exponents(3, 2.0, 4.0)


def test_grid_and_norms():
    g = tl.BoundaryGrid(1, 1.0, 0.25)
    assert g.node_count == 9
    assert g.points().shape == (9, 1)
    assert tl.lp_norm(g, np.full(9, 2.0), 1.0) == pytest.approx(4.0)
    f = np.where(g.points()[:, 0] >= 0, 1.0, 0.0)
    assert tl.gagliardo_seminorm(g, f, 0.5, 2.0) > 0
    with pytest.raises(ValueError):
        tl.lp_norm(g, np.zeros(4), 2.0)


def test_maximal_and_poisson():
    g = tl.BoundaryGrid(1, 3.0, 0.05)
    f = tl.sample("gaussian", g, width=0.3)
    M = tl.maximal_function(g, f)
    assert np.all(M >= np.abs(f))
    v = tl.poisson_extend(g, f, tl.geometric_levels(0.0125, 1.5, 2.0))
    assert v.shape[1] == g.node_count
    assert np.max(np.abs(v) - M) <= 1e-2
    assert set(tl.corpus(g)) >= {"gaussian", "indicator", "cone"}


def test_truncation_and_staircase():
    g = tl.BoundaryGrid(1, 2.0, 0.05)
    f = tl.sample("indicator", g, width=0.5)
    out = tl.truncation_extend(g, f, 1.5, 8.0, tl.truncation_levels(0.05, 1.25, 2.0))
    assert out["support_ok"]
    assert out["multiplicative_margin"] >= 0
    assert out["u"].shape == out["v"].shape
    b = tl.staircase_bounds(tl.BoundaryGrid(1, 4.0, 0.02), tl.sample("indicator", tl.BoundaryGrid(1, 4.0, 0.02), width=1.0), math.inf)
    assert b["layer_value_error"] == 0.0
    assert b["sup_u"] <= b["sup_f"]


def test_celliptic():
    assert tl.is_c_elliptic("gradient")
    assert not tl.is_c_elliptic("cauchy_riemann")
    assert tl.kernel_dimensions("symmetric_gradient") == [2, 3, 3, 3]


def test_run_experiment(tmp_path):
    r = tl.run_experiment("exponents", str(CONFIGS / "exponents.ini"), str(tmp_path))
    assert r["exit_status"] == 0
    assert (tmp_path / "exponents.csv").exists()
    assert "exponents" in tl.experiments()
