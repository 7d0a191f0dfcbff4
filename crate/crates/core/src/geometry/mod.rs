//! Fiber geometry: centerline, Bishop frame, radius profile, stretch map and
//! the assembled slender body.

pub mod body;
pub mod centerline;
pub mod frame;
pub mod radius;
pub mod spec;
pub mod stretch;

pub use body::SlenderBody;
pub use centerline::{Centerline, CenterlineKind, Mat3, Vec3};
pub use frame::{Frame, FrameField};
pub use radius::{validate_admissible_radius, AdmissibilityReport, RadiusProfile};
pub use spec::GeometrySpec;
pub use stretch::{validate_stretch, StretchMap, StretchReport};
