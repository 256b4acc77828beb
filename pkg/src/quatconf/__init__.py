"""Quaternionic conformal maps, their factorizations, and numerical checks."""

from .cfun import (
    CPolynomial,
    Divisor,
    INFINITY,
    RationalMap,
    is_infinity,
    r_degree,
    r_derive,
    r_eval,
    r_from_divisor,
    r_order_at,
)
from .errors import (
    ConsistencyError,
    ConstructionError,
    DegreeMismatchError,
    DomainError,
    HypothesisError,
    InconclusiveFitError,
    NonConformalError,
    QuatconfError,
    SingularPointError,
)
from .forms import OneFormValue, TwoFormValue, metric_pair, n_part, star, wedge_pair
from .minimal import (
    BranchZeroReport,
    MinimalPair,
    MinimalReport,
    branch_zero_report,
    build_minimal_pair,
    minimal_diagnostics,
    mu_at,
)
from .quat import (
    I,
    J,
    K,
    ONE,
    Quaternion,
    ZERO,
    q_conj,
    q_inner,
    q_inv,
    q_mul,
    q_norm,
    q_rotation_taking,
)
from .schwarz import (
    BallMobius,
    BoundReport,
    PickReport,
    apply_mobius,
    bound_constants,
    disk_mobius,
    disk_mobius_inverse,
    mobius_ball_check,
    pick_check,
    poincare_ratio,
)
from .sphere import (
    ClassifyResult,
    SphereMap,
    classify,
    from_lambda_pair,
    sphere_degree,
    stereo,
    stereo_forward,
    stereo_inverse,
)
from .superconf import (
    FactoredMap,
    PsiSection,
    build_psi,
    build_superconformal,
    build_twistor,
    divisor_of_factored,
    superconformal_from_divisor,
)
from .surface import (
    CurvatureSample,
    PlanarDomain,
    SurfaceMap,
    conformal_residual_at,
    curvature_at,
    curvature_sign,
    graph_map,
    inverse_stereo_surface,
    jet_at,
    vanish_order_fit,
    wintgen_slack_at,
)

__version__ = "0.1.0"
