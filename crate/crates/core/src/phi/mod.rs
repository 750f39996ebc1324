//! Weak Phi-functions: pointwise values, left-inverses, modulars and
//! Luxemburg norms on raster domains.

mod field;
mod function;
mod grid;
mod norms;
mod profile;
mod spec;

pub use field::{CellField, Field};
pub use function::{eval_phi, left_inverse, Family, GrowthFunction, LocalPhi, PhiFlags, PhiFunction, Region};
pub use grid::{GridFunction, MultiIndex};
pub use norms::{check_equivalence, luxemburg_norm, modular, sobolev_norm, sobolev_terms};
pub(crate) use norms::luxemburg_local;
pub use profile::{bisect_inverse, Profile, ProfileFn, BRACKET_CAP};
pub use spec::{DeclaredConstants, PhiSpec};

