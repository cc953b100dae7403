import math

import numpy as np
import pytest
from scipy import stats

from pmlkit import (
    ClosedFormModel,
    DensityModel,
    GridSpec,
    discretize_poisson_binomial,
    integrability_probe,
    mixture_limit_check,
    pml,
    pml_closed_form,
    pml_density,
    posterior,
    to_density_model,
)
from pmlkit.errors import (
    CapabilityError,
    ParameterError,
    UndefinedOutcomeError,
    ValidationError,
)


def test_additive_gaussian_closed_form_values():
    m = ClosedFormModel("additive_gaussian", {"sigma_x": 1.0, "sigma_n": 1.0})
    assert pml_closed_form(m, 0.0).nats == pytest.approx(0.5 * math.log(2), abs=1e-15)
    m2 = ClosedFormModel("additive_gaussian", {"sigma_x": 1.0, "sigma_n": 3.0})
    assert pml_closed_form(m2, 0.0).nats == pytest.approx(0.5 * math.log(10 / 9), abs=1e-15)


def test_additive_gaussian_leakage_vanishes_with_noise():
    values = [
        pml_closed_form(
            ClosedFormModel("additive_gaussian", {"sigma_x": 1.0, "sigma_n": sn}), 1.0
        ).nats
        for sn in (1.0, 3.0, 10.0, 100.0)
    ]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-3


def test_closed_forms_even_in_y():
    add = ClosedFormModel("additive_gaussian", {"sigma_x": 2.0, "sigma_n": 0.5})
    biv = ClosedFormModel("bivariate_gaussian", {"sigma_x": 1.0, "sigma_y": 2.0, "rho": -0.5})
    mix = ClosedFormModel("gaussian_mixture", {"sigma": 0.7})
    for y in (0.3, 1.0, 2.5):
        assert pml_closed_form(add, y).nats == pml_closed_form(add, -y).nats
        assert pml_closed_form(biv, y).nats == pml_closed_form(biv, -y).nats
        assert pml_closed_form(mix, 0.5 + y).nats == pml_closed_form(mix, 0.5 - y).nats


def test_closed_forms_nonnegative():
    for rho in (-0.9, -0.5, 0.0, 0.5, 0.9):
        m = ClosedFormModel("bivariate_gaussian", {"sigma_x": 1.0, "sigma_y": 1.0, "rho": rho})
        for y in np.linspace(-3, 3, 13):
            assert pml_closed_form(m, float(y)).nats >= 0.0


def test_bivariate_rho_zero_is_exactly_zero():
    m = ClosedFormModel("bivariate_gaussian", {"sigma_x": 1.0, "sigma_y": 1.0, "rho": 0.0})
    for y in (-2.0, 0.0, 3.5):
        assert pml_closed_form(m, y).nats == 0.0


def test_mixture_midpoint_and_limit():
    for sigma in (0.5, 1.0, 2.0):
        m = ClosedFormModel("gaussian_mixture", {"sigma": sigma})
        assert pml_closed_form(m, 0.5).nats == 0.0
    assert mixture_limit_check(1.0, 51.0) < 1e-6
    assert mixture_limit_check(1.0, 0.5) == pytest.approx(math.log(2))
    gaps = [mixture_limit_check(1.0, y) for y in (0.6, 1.0, 3.0, 10.0)]
    assert all(b <= a for a, b in zip(gaps, gaps[1:]))


def test_poisson_binomial_closed_form_value():
    m = ClosedFormModel("poisson_binomial", {"lam": 2.0, "p": 0.5})
    assert pml_closed_form(m, 3).nats == pytest.approx(math.log(6 * math.e / 8), abs=1e-12)
    assert pml_closed_form(m, 0).nats == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValidationError):
        pml_closed_form(m, 2.5)


def test_geometric_binary_closed_form_values():
    m = ClosedFormModel("geometric_binary", {"p": 0.3, "q": 0.5})
    assert pml_closed_form(m, 0).nats == pytest.approx(math.log(0.65 / 0.3), abs=1e-15)
    assert pml_closed_form(m, 1).nats == pytest.approx(math.log(0.65 / 0.5), abs=1e-15)


def test_parameter_validation():
    with pytest.raises(ParameterError):
        ClosedFormModel("additive_gaussian", {"sigma_x": 0.0, "sigma_n": 1.0})
    with pytest.raises(ParameterError):
        ClosedFormModel("bivariate_gaussian", {"sigma_x": 1.0, "sigma_y": 1.0, "rho": 1.0})
    with pytest.raises(ParameterError):
        ClosedFormModel("poisson_binomial", {"lam": 3.0, "p": 0.5})  # lam (1-p) > 1
    with pytest.raises(ParameterError):
        ClosedFormModel("gaussian_noise", {"sigma": 1.0})
    with pytest.raises(ParameterError):
        ClosedFormModel("gaussian_mixture", {"sigma": 1.0, "extra": 2.0})


@pytest.mark.parametrize("sx,sn", [(1.0, 1.0), (1.0, 3.0), (2.0, 0.5)])
def test_grid_matches_additive_closed_form(sx, sn):
    m = ClosedFormModel("additive_gaussian", {"sigma_x": sx, "sigma_n": sn})
    density = to_density_model(m)
    for y in (-3.0, -1.0, 0.0, 1.0, 3.0):
        result = pml_density(density, y)
        assert abs(result.value.nats - pml_closed_form(m, y).nats) <= 1e-4
        assert result.grid == GridSpec()


def test_grid_numeric_marginal_fallback():
    m = ClosedFormModel("additive_gaussian", {"sigma_x": 1.0, "sigma_n": 1.0})
    with_analytic = to_density_model(m)
    numeric = DensityModel(
        x_domain=with_analytic.x_domain,
        prior_density=with_analytic.prior_density,
        conditional_density=with_analytic.conditional_density,
    )
    got = pml_density(numeric, 0.5).value.nats
    assert got == pytest.approx(pml_closed_form(m, 0.5).nats, abs=1e-4)


def test_density_independence_gives_zero():
    model = DensityModel(
        x_domain=(-8.0, 8.0),
        prior_density=lambda x: stats.norm.pdf(x),
        conditional_density=lambda y, x: np.full_like(x, stats.norm.pdf(y)),
        marginal_density=lambda y: float(stats.norm.pdf(y)),
    )
    assert pml_density(model, 0.7).value.nats == 0.0


def test_density_zero_marginal_rejected():
    model = DensityModel(
        x_domain=(0.0, 1.0),
        prior_density=lambda x: np.ones_like(x),
        conditional_density=lambda y, x: np.where((0 <= y) & (y <= 1), 1.0, 0.0) * np.ones_like(x),
        marginal_density=lambda y: 1.0 if 0 <= y <= 1 else 0.0,
    )
    with pytest.raises(UndefinedOutcomeError):
        pml_density(model, 5.0)


def test_grid_spec_validation():
    with pytest.raises(ValidationError):
        GridSpec(points=512)
    with pytest.raises(ValidationError):
        GridSpec(quantile_clip=0.7)


def test_density_model_requires_normalized_prior():
    with pytest.raises(ValidationError):
        DensityModel(
            x_domain=(-1.0, 1.0),
            prior_density=lambda x: stats.norm.pdf(x),  # misses ~32% of the mass
            conditional_density=lambda y, x: stats.norm.pdf(y - x),
        )


def test_integrability_probe_additive_gaussian():
    m = ClosedFormModel("additive_gaussian", {"sigma_x": 1.0, "sigma_n": 1.0})
    probe = integrability_probe(m, [10**3, 10**4, 10**5], seed=42)
    assert probe.diverges
    assert probe.strictly_increasing
    assert probe.eventually_increasing


def test_integrability_probe_bivariate_control():
    m = ClosedFormModel("bivariate_gaussian", {"sigma_x": 1.0, "sigma_y": 1.0, "rho": 0.0})
    probe = integrability_probe(m, [10**3, 10**4, 10**5], seed=42)
    assert not probe.diverges
    assert all(abs(e - 1.0) <= 1e-12 for e in probe.estimates)
    correlated = ClosedFormModel("bivariate_gaussian", {"sigma_x": 1.0, "sigma_y": 1.0, "rho": 0.5})
    assert integrability_probe(correlated, [10, 20, 30]).diverges


def test_integrability_probe_guards():
    pois = ClosedFormModel("poisson_binomial", {"lam": 2.0, "p": 0.5})
    with pytest.raises(CapabilityError):
        integrability_probe(pois, [10, 20, 30])
    m = ClosedFormModel("additive_gaussian", {"sigma_x": 1.0, "sigma_n": 1.0})
    with pytest.raises(ValidationError):
        integrability_probe(m, [10, 20])
    with pytest.raises(ValidationError):
        integrability_probe(m, [30, 20, 10])


def test_discretized_poisson_binomial_posterior_is_binomial():
    model = discretize_poisson_binomial(2.0, 0.5, 10)
    post = posterior(model, 4)
    xs = np.arange(post.alphabet.size)
    np.testing.assert_allclose(post.probs, stats.binom.pmf(xs, 4, 0.5), atol=1e-10)


def test_discretized_poisson_binomial_y_zero():
    model = discretize_poisson_binomial(2.0, 0.5, 10)
    post = posterior(model, 0)
    assert post.probs[0] == pytest.approx(1.0, abs=1e-12)
    assert pml(model, 0).nats == pytest.approx(1.0, abs=1e-10)  # lam * p


def test_discretized_poisson_binomial_matches_closed_form():
    model = discretize_poisson_binomial(2.0, 0.5, 10)
    closed = ClosedFormModel("poisson_binomial", {"lam": 2.0, "p": 0.5})
    for y in range(11):
        assert pml(model, y).nats == pytest.approx(
            pml_closed_form(closed, y).nats, abs=1e-8
        )


def test_discretize_rejects_coarse_tail():
    with pytest.raises(ValidationError):
        discretize_poisson_binomial(2.0, 0.5, 10, tail=1e-6)


def test_grid_check_unsupported_for_integer_family():
    with pytest.raises(CapabilityError):
        to_density_model(ClosedFormModel("poisson_binomial", {"lam": 2.0, "p": 0.5}))
