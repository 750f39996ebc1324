//! Planar domains on uniform rasters and their geometric checks.

mod checks;
pub mod edt;
mod path;
mod radius;
mod raster;
pub mod shapes;

pub use checks::{check_eps_delta, check_quasi_convex, eps_delta_curve, sample_pairs};
pub use path::{intrinsic_path, polyline_length, Curve};
pub use radius::domain_radius;
pub use raster::RasterDomain;

pub(crate) use path::{endpoint_cells, grid_astar, pull_string};
pub(crate) use raster::convex_hull;
