//! Log-power scaling models: fitting, diagnostics, validation.

pub mod diagnostics;
pub mod fit;
pub mod validate;

pub use crate::stats::correlation::{pearson, spearman};
pub use diagnostics::{diagnostics, Diagnostics};
pub use fit::{
    fit_log_power, fit_robust_log_power, fit_with, predict, FitOptions, FitResult, SpaceLabel,
};
pub use validate::{
    default_model_grid, default_test_sets, evaluate_grid, evaluate_nrmse, filter_by_size,
    metric_series, nrmse, EvalSpace, ModelEval, ModelSpec, SizeRange, TestSet,
};
