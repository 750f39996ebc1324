//! Numerical toolkit for generalized Orlicz (Musielak-Orlicz) growth
//! functions on planar raster domains.
//!
//! The crate is generic over the scalar type (`f32` or `f64`, see
//! [`Real`]); the `*F64` aliases at the root cover the common case.

pub mod conditions;
pub mod domain;
pub mod error;
pub mod extension;
pub mod expr;
pub mod extended;
pub mod geometry;
pub mod phi;
pub mod pipeline;
pub mod report;
pub mod scalar;
pub mod sobolev;

pub use domain::{Curve, RasterDomain};
pub use error::{Error, Result};
pub use extended::Extended;
pub use geometry::Point;
pub use phi::{GridFunction, PhiFunction};
pub use report::{Condition, ConditionReport, Witness};
pub use scalar::Real;

pub type PointF64 = Point<f64>;
pub type RasterDomainF64 = RasterDomain<f64>;
pub type CurveF64 = Curve<f64>;
pub type ConditionReportF64 = ConditionReport<f64>;
pub type PhiFunctionF64 = PhiFunction<f64>;
pub type GridFunctionF64 = GridFunction<f64>;
