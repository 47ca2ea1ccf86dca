"""
Tests de la structure WKBJ: exposant ω et développement de l'intégrale de queue
"""

import pytest

from modules.tumour_model import ModelParameters, DomainError
from modules.asymptotics import wkbj_exponents, predicted_log_derivative, tail_integral


def test_reference_exponent(ref1_params):
    exponents = wkbj_exponents(ref1_params)
    assert exponents["omega"] == pytest.approx(-2.0 / 3.0)
    assert len(exponents["modes"]) == 3


def test_exponent_depends_on_viscosity_ratio():
    params = ModelParameters(lambda_c=2.0, mu_c=1.0, mu_hat_c=4.0)
    assert wkbj_exponents(params)["omega"] == pytest.approx(-0.75)


def test_predicted_log_derivative(ref1_params):
    assert predicted_log_derivative(ref1_params, 10.0) == pytest.approx(-2.0 - 2.0 / 30.0)


def test_tail_integral_expansion_accuracy():
    result = tail_integral(10.0, 2.5, 1.0, n_terms=4)
    assert result.rel_err < 1e-5
    assert result.rel_err > 1e-7
    assert result.expansion < 0.0 and result.quadrature < 0.0
    assert result.expansion == pytest.approx(result.quadrature, rel=1e-5)


def test_tail_integral_improves_with_terms():
    errors = [tail_integral(10.0, 2.5, 1.0, n_terms=m).rel_err for m in (1, 2, 3, 4)]
    assert all(a > b for a, b in zip(errors, errors[1:]))


def test_tail_integral_error_decreases_as_bound_doubles(ref1_params):
    # η=2ω pour REF1, erreur résiduelle O(X⁻⁴) pour quatre termes
    eta = 2.0 * wkbj_exponents(ref1_params)["omega"]
    errors = [tail_integral(X, eta, ref1_params.kappa, n_terms=4).rel_err for X in (5.0, 10.0, 20.0, 40.0)]
    assert all(a > b for a, b in zip(errors, errors[1:]))
    assert all(a / b > 8.0 for a, b in zip(errors, errors[1:]))

def test_tail_integral_exact_for_integer_exponent():
    # η=2: la série s'arrête après trois termes
    result = tail_integral(3.0, 2.0, 0.5, n_terms=4)
    assert result.rel_err <= 1e-10


@pytest.mark.parametrize("X,eta,kappa,n_terms", [
    (0.0, 1.0, 1.0, 2),
    (1.0, 1.0, 1.0, 0),
    (1.0, 1.0, 1.0, 5),
    (1.0, 1.0, -1.0, 2),
])
def test_tail_integral_domain(X, eta, kappa, n_terms):
    with pytest.raises(DomainError):
        tail_integral(X, eta, kappa, n_terms)
