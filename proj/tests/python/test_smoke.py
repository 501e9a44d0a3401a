import json

import numpy as np
import pytest

import ihox


def test_ladder_commutator():
    a, ad = ihox.ladder_matrices(ihox.PhysicalParams(n_trunc=16))
    comm = a @ ad - ad @ a
    assert np.allclose(comm[:15, :15], np.eye(15), atol=1e-12)


def test_similarity_sign_is_negative():
    p = ihox.PhysicalParams(n_trunc=64)
    res = ihox.resolve_similarity_sign(p, ihox.build_inverted_dyson(p), 16)
    assert res["sigma"] == -1
    assert res["residual"] < 1e-8


def test_transformed_ladder_closed_form():
    p = ihox.PhysicalParams(n_trunc=64)
    A, Abar = ihox.transformed_ladder(p, ihox.build_inverted_dyson(p))
    a, ad = ihox.ladder_matrices(p)
    assert np.abs((A - (a + 1j * ad))[:16, :16]).max() < 1e-10
    assert np.abs((Abar - (ad + 1j * a) / 2)[:16, :16]).max() < 1e-10


def test_disentangle_theta_zero_limit():
    d = ihox.disentangle(0.5, 0.25, 0.25)
    assert np.isfinite(d.v_zero)
    assert d.consistency_residual() < 1e-10


def test_invalid_params_raise():
    with pytest.raises(ihox.ConfigError):
        ihox.PhysicalParams(hbar=-1.0)


def test_evolution_closed_form_matches_direct():
    p = ihox.PhysicalParams(n_trunc=64)
    d = ihox.build_inverted_dyson(p)
    closed = ihox.evolve_closed_form(p, d, 0.5, 0.5)
    direct = ihox.evolve_direct(p, d, 0.5, 0.5, 16)
    assert np.abs(closed[:16] - direct[:16]).max() < 1e-6


def test_trajectory_uncertainty():
    rows = ihox.trajectory(n_trunc=64, times=[0.0, 0.5, 1.0])
    assert len(rows) == 3
    for r in rows:
        assert abs(r["product"] - 0.5) < 1e-8
        assert abs(r["X_matrix"] - r["X_closed"]) < 1e-6


def test_divergence_rows():
    rows = ihox.demo_divergence()
    assert len(rows) == 5
    assert abs(rows[-1][2] - 1.0) < 1e-8


def test_verify_report_schema():
    rep = json.loads(ihox.verify(n_trunc=32, sub_block=8))
    assert set(rep) == {"config", "sigma", "metric", "checks", "pass"}
    assert rep["sigma"] == -1
    assert rep["metric"] == "rho_rho_dag"
    for c in rep["checks"]:
        assert set(c) == {"name", "paper_ref", "residual", "tol", "pass"}
