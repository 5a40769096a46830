"""Interpretability-aware least-squares SVM regression.

Submodules:
  expr     arithmetic expression language for generators and basis terms
  data     benchmark dataset generation, normalization, CSV IO
  kernel   kernel functions, Gram matrices, centering matrix
  interp   interpretation models, interpretation distance, PSO fitting
  svm      LSSVM / ILSSVM training and prediction
  metrics  MSE, Pearson correlation, summaries
  tuning   k-fold CV, Nelder-Mead, hyperparameter search
  bounds   equilibrium error-bound calculator
  cli      config-driven experiment runner
"""

from .bounds import BoundInputs, sample_error_bound, solve_theta_star, total_equilibrium_bound
from .data import (
    BUILTIN_BASES,
    BUILTIN_SPECS,
    Dataset,
    DatasetSpec,
    NoiseRule,
    NormParams,
    apply_norm,
    builtin_spec,
    generate_dataset,
    invert_norm,
    normalize_minmax,
    read_csv,
    write_csv,
)
from .expr import ExprAst, ExprEvalError, ExprSyntaxError, eval_expr, free_vars, parse_expr, to_str
from .interp import (
    InterpModel,
    PsoParams,
    interp_predict,
    interpretation_distance,
    mean_error,
    pso_fit_interp,
)
from .kernel import KernelSpec, centering_matrix, gram, kernel_eval
from .metrics import MetricSummary, mse, ppcc, summarize
from .svm import (
    HyperParams,
    SingularSystemError,
    TrainedModel,
    assemble_kkt,
    load_model,
    predict,
    primal_objective,
    save_model,
    train_ilssvm,
    train_lssvm,
)
from .tuning import (
    EvalReport,
    FoldPlan,
    SearchSpace,
    SimplexParams,
    Weights,
    cross_validate,
    kfold_split,
    nelder_mead,
    tune_hyperparams,
)

__version__ = "0.1.0"
