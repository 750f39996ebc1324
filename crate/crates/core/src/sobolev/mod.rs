//! Whitney-type extension of first-order Sobolev functions from a raster
//! domain, with Orlicz and weighted norm instrumentation.
//!
//! Outside `Omega`, `Lambda u` on a Whitney cube `S` is the mean of `u` over
//! the matched inside cube, blended by a C¹ partition of unity on the
//! dilated cubes and cut off smoothly between distance `W` and `2W`.

mod experiment;
mod operator;
mod weight;
mod whitney;

pub use experiment::{boundedness_experiment, default_corpus, BoundednessReport, RatioRow, TestFunction, GROWTH_LIMIT};
pub use operator::{extend, ExtensionMeta, ExtensionOperator, ExtensionResult, ExtensionSetup, DILATION};
pub use weight::{check_a1_weight, g_reduction, sample_cubes, weighted_l1, weighted_norm, CubeSample, Weight};
pub use whitney::{default_collar_width, whitney_decompose, Cube, WhitneyDecomposition};

#[cfg(test)]
mod tests;
