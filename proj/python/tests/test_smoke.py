"""Smoke tests for the Python bindings."""

import math

import numpy as np
import pytest

import adaptkde as ak


def test_theoretical_rate_closed_forms():
    assert ak.theoretical_rate("density", [2.0], p=2.0)["n_exponent"] == pytest.approx(-0.4)
    assert ak.theoretical_rate("derivative", [2.0], m=[1], p=2.0)["n_exponent"] == pytest.approx(-0.2)
    assert ak.theoretical_rate("sobolev_deconv_B", [2.0, 2.0], p=2.0)["n_exponent"] == pytest.approx(-2.0 / 9.0)


def test_dyadic_grid_sorted_by_volume():
    grid = ak.dyadic_grid(10000, 1)
    vols = [math.prod(h) for h in grid]
    assert vols == sorted(vols, reverse=True)
    assert all(0 < v <= 1 for v in vols)


def test_sampling_and_kde_mass():
    f = ak.DensitySpec.gaussian_mixture([(1.0, [0.0], [1.0])])
    g = ak.NoiseSpec.gaussian(1, 1.0)
    first, second = ak.sample_contaminated(f, g, alpha=0.0, n=2000, seed=5)
    assert first.shape == (1000, 1) and second.shape == (1000, 1)

    K = ak.ProductKernel.order_s(1, "gaussian", 2)
    out = ak.kde(second, K, h=[0.25], half_width=8.0, points=513)
    dx = out["grid"]["spacing"][0]
    assert out["values"].sum() * dx == pytest.approx(1.0, abs=1e-2)


def test_select_pipeline_density():
    f = ak.DensitySpec.gaussian_mixture([(1.0, [0.0], [1.0])])
    g = ak.NoiseSpec.gaussian(1, 1.0)
    first, second = ak.sample_contaminated(f, g, alpha=0.0, n=800, seed=3)
    K = ak.ProductKernel.order_s(1, "gaussian", 2)
    out = ak.select(first, second, K, problem="density", p=2.0,
                    c_scale=0.2, points=513)
    hs = [row["h"] for row in out["table"]]
    assert out["chosen"] in hs
    assert sum(row["chosen"] for row in out["table"]) == 1
    assert all(row["R_hat"] >= 0.0 for row in out["table"])
    dx = out["grid"]["spacing"][0]
    assert out["estimate"].sum() * dx == pytest.approx(1.0, abs=2e-2)


def test_select_is_deterministic():
    f = ak.DensitySpec.bessel_k(1.25)
    g = ak.NoiseSpec.laplace(1, 1.0)
    first, second = ak.sample_contaminated(f, g, alpha=1.0, n=400, seed=9)
    K = ak.ProductKernel.band_limited(1)
    a = ak.select(first, second, K, problem="deconvolution", noise=g,
                  alpha=1.0, c_scale=0.2, points=257)
    b = ak.select(first, second, K, problem="deconvolution", noise=g,
                  alpha=1.0, c_scale=0.2, points=257)
    assert a["chosen"] == b["chosen"]
    np.testing.assert_array_equal(a["estimate"], b["estimate"])


def test_class_checks():
    x = np.linspace(-8.0, 8.0, 2049)
    phi = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    nik = ak.nikolskii_check(phi, 8.0, beta=[2.0], L=1.0, p=2.0, k=[3])
    assert nik["passes"]
    sob = ak.sobolev_check(phi, 8.0, beta1=1.0, L=1.0)
    assert sob["passes"]
    assert sob["integral_value"] == pytest.approx(1.5 * math.sqrt(math.pi) / (2.0 * math.pi), abs=1e-2)


def test_errors_are_python_exceptions():
    with pytest.raises(ValueError):
        ak.DensitySpec.bessel_k(0.5)
    with pytest.raises(ak.EmptyGrid):
        ak.dyadic_grid(3, 1)
