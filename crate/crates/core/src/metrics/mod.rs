//! Group statistics for reports: one-way ANOVA, 2-D kernel density and
//! box-plot summaries per n-back level.

mod anova;
mod kde;
mod summary;

pub use anova::{anova_by_level, f_survival, one_way_anova, AnovaResult};
pub use kde::{kde_2d, render_kde_csv, KdeGrid, DEFAULT_GRID, GRID_PAD_BANDWIDTHS, MIN_BANDWIDTH};
pub use summary::{box_stats, group_summary, quantile, BoxStats, GroupSummary};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("need at least {need} {what}, got {got}")]
    TooFew { what: &'static str, need: usize, got: usize },
    #[error("non-finite value in input")]
    NonFinite,
    #[error("F is undefined: within-group variance is zero")]
    UndefinedF,
}
