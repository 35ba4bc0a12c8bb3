//! Statistics: compensated sums, distributions, correlation, Welch test, bins.

pub mod bins;
pub mod correlation;
pub mod dist;
pub mod summation;
pub mod welch;

pub use bins::{bin_by, log_ratio_summary, welch_matrix, Bin, BinSummary, RatioSpace, WelchCell};
pub use correlation::{pearson, spearman};
pub use dist::{inverse_normal_cdf, normal_cdf, student_t_cdf};
pub use welch::{welch_t_test, WelchResult};
