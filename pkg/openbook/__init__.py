import jax

jax.config.update("jax_enable_x64", True)

from .brieskorn import alpha_k, binding_normal_basis, poly_f, r_action, so_n_action, theta  # noqa: E402
from .cotangent import (  # noqa: E402
    beta_k,
    dehn_twist,
    dehn_twist_inverse,
    left_dehn_twist,
    normalize_torus_point,
    phi_k_glue,
    psi_k,
    psi_k_inverse,
)
from .datastructures import AmbientPoint, CotangentPoint, TorusModel, TorusPoint  # noqa: E402
from .exceptions import OpenBookException  # noqa: E402
from .forms import (  # noqa: E402
    ConstraintManifold,
    DifferentialForm,
    SmoothMap,
    contact_volume,
    exterior_derivative,
    nondegeneracy,
    pullback,
    tangent_basis,
    wedge_eval,
)
from .pages import (  # noqa: E402
    F_cap,
    G_cap,
    c_map,
    c_map_inverse,
    g_radius,
    phi_embed,
    s_rescale,
    s_rescale_inverse,
    verify_supporting,
)
from .params import BrieskornParams, RunConfig  # noqa: E402
from .profile import (  # noqa: E402
    TwistProfile,
    f_k_eval,
    f_k_integral,
    h_aux,
    h_inverse,
    h_k_eval,
    monotone_invert,
)
from .report import CheckReport, CheckResult  # noqa: E402
from .suite import known_checks, run_cell  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "AmbientPoint",
    "BrieskornParams",
    "CheckReport",
    "CheckResult",
    "ConstraintManifold",
    "CotangentPoint",
    "DifferentialForm",
    "F_cap",
    "G_cap",
    "OpenBookException",
    "RunConfig",
    "SmoothMap",
    "TorusModel",
    "TorusPoint",
    "TwistProfile",
    "alpha_k",
    "beta_k",
    "binding_normal_basis",
    "c_map",
    "c_map_inverse",
    "contact_volume",
    "dehn_twist",
    "dehn_twist_inverse",
    "exterior_derivative",
    "f_k_eval",
    "f_k_integral",
    "g_radius",
    "h_aux",
    "h_inverse",
    "h_k_eval",
    "known_checks",
    "left_dehn_twist",
    "monotone_invert",
    "nondegeneracy",
    "normalize_torus_point",
    "phi_embed",
    "phi_k_glue",
    "poly_f",
    "psi_k",
    "psi_k_inverse",
    "pullback",
    "r_action",
    "run_cell",
    "s_rescale",
    "s_rescale_inverse",
    "so_n_action",
    "tangent_basis",
    "theta",
    "verify_supporting",
    "wedge_eval",
]
