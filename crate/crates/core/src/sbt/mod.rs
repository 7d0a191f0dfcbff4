//! Slender body evaluation: velocity, pressure, gradients, the centerline
//! formula and force-density norms.

pub mod centerline;
pub mod eval;
pub mod force;
pub mod norms;
pub mod quad;

pub use centerline::{centerline_velocity, l_coefficient, LForm};
pub use eval::{sbt_eval_checked, sbt_field, sbt_pressure, sbt_surface_velocity, sbt_velocity, FieldValue, SectionEvaluator, SourceNodes};
pub use force::ForceDensity;
pub use norms::{decay_norms, DecayNorms};
pub use quad::QuadratureSpec;
