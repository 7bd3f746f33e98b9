"""Tests for lambda*(k), the parity certificate and the k sweep."""

import os

import numpy as np
import pandas as pd
import pytest

from odp.annulus2d.branch import trace_branch
from odp.annulus2d.field import make_annulus_grid
from odp.bifurcate.lambda_star import (
    BifurcationCertificate,
    find_lambda_star,
    parity_certificate,
    parity_diagnostics,
)
from odp.bifurcate.sweep import SWEEP_COLUMNS, sweep
from odp.core.errors import BracketError, DegenerateEndpointError
from odp.exterior.window import Window
from odp.radial.solver import ProfileCache

from conftest import SMALL_N_R


def _certificate(**overrides):
    data = dict(
        k=0.05,
        d=2,
        p=3.0,
        group="dihedral:2",
        lambda_star=0.8,
        kernel_degree=2,
        kernel_mult=1,
        sigma1_below=-0.01,
        sigma1_above=0.01,
        index_below=1,
        index_above=0,
        window=(0.7, 0.9),
        h_at_star=1e-12,
        delta=2e-4,
        n_r=2000,
        du_at_1=1.2,
        h_below={2: -0.01, 4: 1.5},
        h_above={2: 0.01, 4: 1.5},
    )
    data.update(overrides)
    return BifurcationCertificate(**data)


def test_parity_certificate_passes_odd_crossing():
    cert = _certificate()
    assert cert.index_drop == 1
    assert parity_diagnostics(cert) == []
    assert parity_certificate(cert)


def test_parity_certificate_rejects_even_drop():
    cert = _certificate(index_below=2, index_above=0)
    problems = parity_diagnostics(cert)
    assert any("even" in p for p in problems)
    assert not parity_certificate(cert)


def test_parity_certificate_degenerate_endpoint():
    """A second mode at zero at an endpoint fails and names the mode."""
    cert = _certificate(h_below={2: -0.01, 4: 1e-9}, h_above={2: 0.01, 4: 1.5})
    assert not parity_certificate(cert)
    with pytest.raises(DegenerateEndpointError) as info:
        parity_certificate(cert, strict=True)
    assert info.value.degree == 4


def test_parity_certificate_extra_crossing():
    cert = _certificate(h_below={2: -0.01, 4: -0.5}, h_above={2: 0.01, 4: 0.5}, index_below=2, index_above=0)
    problems = parity_diagnostics(cert)
    assert any("also cross" in p for p in problems)


def test_certificate_dict_round_trip():
    cert = _certificate(margin=0.3)
    data = cert.to_dict()
    assert data["window"] == [0.7, 0.9]
    assert data["h_below"] == {"2": -0.01, "4": 1.5}
    assert BifurcationCertificate.from_dict(data) == cert


def test_certificate_from_dict_defaults_reselected():
    data = _certificate().to_dict()
    del data["reselected"]
    assert BifurcationCertificate.from_dict(data).reselected is False


def test_find_lambda_star_rejects_empty_window(params_base, dihedral2):
    with pytest.raises(BracketError, match="empty"):
        find_lambda_star(params_base, dihedral2, (1.0, 0.5))


def test_find_lambda_star_no_sign_change(params_base, dihedral2, profile_cache):
    """A window on one side of the crossing carries the h scan in the error."""
    with pytest.raises(BracketError) as info:
        find_lambda_star(params_base, dihedral2, (0.999, 1.0), cache=profile_cache, check_margin=False, reselect=False)
    assert info.value.scan is not None
    assert "h_2" in info.value.scan.columns


def test_sweep_empty_list(params_base, dihedral2):
    table = sweep([], dihedral2, params_base)
    assert list(table.columns) == SWEEP_COLUMNS
    assert table.empty


def test_find_lambda_star_reselection_reports_sphere_scan(params_base, dihedral2, profile_cache):
    """Below Lambda0 the rescan around the window finds no margin and says so."""
    with pytest.raises(BracketError, match="reselection") as info:
        find_lambda_star(params_base, dihedral2, (0.999, 1.0), cache=profile_cache)
    assert list(info.value.scan.columns) == ["lambda", "margin", "h"]
    assert not info.value.scan.empty


def test_sweep_isolates_failing_k(params_base, dihedral2):
    """An invalid k leaves its own error row; the other k is still solved and reports its own failure."""
    window = Window(0.999, 1.0, None, 0.9995, pd.DataFrame())
    table = sweep([0.2, 5.0], dihedral2, params_base, window=window, n_r=SMALL_N_R, n_jobs=1)
    assert list(table["k"]) == [0.2, 5.0]
    assert table["lambda_star"].isna().all()
    errors = dict(zip(table["k"], table["error"]))
    assert errors[5.0].startswith("ConfigurationError")
    assert errors[0.2].startswith("BracketError")


@pytest.mark.skipif(not os.getenv("ODP_SLOW_TESTS"), reason="ODP_SLOW_TESTS not set, skipping window and certificate run")
def test_certificate_from_limit_window(params_base, dihedral2):
    """Window from the limit problem, then an odd crossing at small k."""
    from odp.exterior.window import select_window

    window = select_window(params_base, dihedral2, settings={"n_scan": 40}, n=4000)
    assert window.Lambda0 < window.lambda0 < window.Lambda_star < window.lambda1
    cache = ProfileCache(params_base.with_k(0.05), n=1000)
    cert = find_lambda_star(cache.params_base, dihedral2, window.as_tuple(), cache=cache)
    assert cert.window[0] < cert.lambda_star < cert.window[1]
    assert abs(cert.h_at_star) < 1e-8
    assert np.sign(cert.sigma1_below) != np.sign(cert.sigma1_above)
    assert parity_certificate(cert)

    grid = make_annulus_grid(0.05, 2, 1000, 32, radial=cache.grid)
    branch = trace_branch(cache, grid, [1e-3, 2e-3, 4e-3], cert.lambda_star, n_modes=3)
    assert (branch["F_residual"] < 1e-8).all()
    gaps = np.abs(branch["lambda"].to_numpy() - cert.lambda_star)
    assert np.all(np.diff(gaps) >= 0)
    assert branch.attrs["rate"] > 0.5
