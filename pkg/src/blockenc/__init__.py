"""Classical simulator and resource estimator for block-encoding algorithms.

Matrices are stored explicitly, every encoding carries its subnormalization,
accumulated error and resource ledger, and each pipeline checks itself
against dense linear-algebra oracles.
"""

__version__ = "0.1.0"

from .core import (
    BlockEncoding,
    ComplexMatrix,
    ResourceCost,
    amplify,
    apply_to_state,
    encode_diagonal,
    encode_projector,
    exact_encoding,
    extract_block,
    identity_encoding,
    linear_combination,
    product,
    scale_down,
    tensor_product,
    unitary_dilation,
)
from .polytransform import (
    ChebyshevPolynomial,
    apply_polynomial,
    chebyshev_fit,
    exp_decay_poly,
    hermitian_part,
    jacobi_anger_poly,
    negative_power,
    positive_power,
    step_degree_estimate,
)
from .stateprep import (
    TensorSumSpec,
    build_covariance,
    encode_from_columns,
    encode_gram,
    prepare_dense_state,
    prepare_tensor_sum,
)
from .algorithms import (
    FitProblem,
    ODESystemSpec,
    PowerMethodConfig,
    data_fit,
    fit_problem,
    ground_excited_energies,
    ground_state_ite,
    linear_solve,
    pca_gradient_descent,
    pca_power_top_r,
    predict,
    simulate_direct,
    simulate_via_linear_solve,
)
from .costmodel import CostFormula, REGISTRY, evaluate, render_table
from .oracles import LoggedOracles
