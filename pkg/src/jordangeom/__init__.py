"""Jordan-product information geometry on finite-dimensional matrix algebras."""

from jordangeom.algebra import (
    AlgebraElement,
    AlgebraShape,
    adjoint,
    identity,
    is_positive,
    is_self_adjoint,
    jordan_product,
    jordan_triple,
    lie_product,
    multiply,
    operator_norm,
)
from jordangeom.channels import KrausMap, apply, check_monotonicity, dual_apply
from jordangeom.functionals import (
    Functional,
    SupportDecomposition,
    ac_dimension,
    block_decompose,
    evaluate,
    in_gelfand_ideal,
    is_absolutely_continuous,
    is_faithful,
    is_nplf,
    support_projection,
)
from jordangeom.metric import (
    LiftedElement,
    TangentFunctional,
    distribution_dim,
    eta_from_element,
    inner_product,
    jordan_lift,
    jordan_tensor,
    triple_tensor,
)
from jordangeom.models import (
    MetricMatrix,
    ParametricModel,
    check_j_regular,
    is_locally_identifiable,
    make_bloch_model,
    make_classical_model,
    make_rank_one_unitary_model,
    metric_tensor,
    tangent,
)

__version__ = "0.1.0"
