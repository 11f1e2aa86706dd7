//! Comparison estimators: plug-in block entropy, increasing-window
//! Lempel–Ziv match lengths and PPM with interpolated smoothing. The naive
//! CTW estimator lives in [`crate::ctw::ctw_entropy_estimate`].

mod lz;
mod plugin;
mod ppm;

pub use lz::{lz_estimate, lz_estimate_with, lz_start_index, match_lengths, MatchSearch};
pub use plugin::{block_distribution, plugin_estimate, BlockDistribution};
pub use ppm::{ppm_estimate, ppm_log_loss};
