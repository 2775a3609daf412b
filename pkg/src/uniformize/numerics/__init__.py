"""Floating-point verification: path continuation, jets, monodromy and q-series oracles."""
from .paths import (
    PathSpec,
    PsiState,
    based_loop,
    circle_loop,
    elliptic_order_check,
    integrate_psi,
    monodromy,
    singular_points,
)
from .jets import JetValue, PsiForm, connection_form, connection_jets, differential_form, jet_forms, tau_and_jets
from .qseries import (
    CHAZY_CONSTANT,
    QSeriesOracle,
    chazy_residual,
    e2_coefficients,
    gamma_e2,
    gauto_residual,
    lambda_coefficients,
    lambda_connection_jets,
    lambda_differential_jets,
    lambda_periodicity_residual,
    qseries_eval,
    sample_taus,
    scaled_jets,
)

__all__ = [
    "PathSpec", "PsiState", "based_loop", "circle_loop", "elliptic_order_check", "integrate_psi",
    "monodromy", "singular_points", "JetValue", "PsiForm", "connection_form", "connection_jets",
    "differential_form", "jet_forms", "tau_and_jets", "CHAZY_CONSTANT", "QSeriesOracle",
    "chazy_residual", "e2_coefficients", "gamma_e2", "gauto_residual", "lambda_coefficients",
    "lambda_connection_jets", "lambda_differential_jets", "lambda_periodicity_residual",
    "qseries_eval", "sample_taus", "scaled_jets",
]
