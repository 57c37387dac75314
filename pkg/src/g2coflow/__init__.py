"""G2-structure calculus and Laplacian coflows on contact Calabi-Yau 7-manifolds."""

from .exterior import KForm, Metric, Vector, hodge_star, inner, interior, wedge
from .g2 import (
    G2Structure,
    TorsionForms,
    ccy_structure,
    extract_torsion,
    full_torsion,
    hodge_laplacian_psi,
    j_operator,
    metric_from_phi,
    standard_phi,
)
from .ode import (
    AnsatzParams,
    AnsatzState,
    blowup_time,
    classify_regime,
    classify_singularity,
    closed_form_A0,
    integrate,
    lambda_t,
)
from .scalars import SymScalar, sym

__version__ = "0.1.0"

__all__ = [
    "KForm", "Metric", "Vector", "hodge_star", "inner", "interior", "wedge",
    "G2Structure", "TorsionForms", "ccy_structure", "extract_torsion",
    "full_torsion", "hodge_laplacian_psi", "j_operator", "metric_from_phi",
    "standard_phi",
    "AnsatzParams", "AnsatzState", "blowup_time", "classify_regime",
    "classify_singularity", "closed_form_A0", "integrate", "lambda_t",
    "SymScalar", "sym",
]
