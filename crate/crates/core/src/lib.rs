//! Cut loci on cylinders of revolution with warped-product metrics
//! dt^2 + m(t)^2 dtheta^2.
//!
//! The crate models surfaces through their warping function m (built-in
//! families or parsed expressions), integrates geodesics with event
//! detection, evaluates the singular half-period integral phi(nu) by
//! double-exponential quadrature, constructs exact cut loci for surfaces
//! whose hypotheses it can certify, and cross-checks everything against
//! closed forms and a brute-force geodesic-fan oracle.

pub mod cutlocus;
pub mod error;
pub mod expr;
pub mod geodesic;
pub mod halfperiod;
pub mod jet;
pub mod lambda;
pub mod oracle;
pub mod quad;
pub mod roots;
pub mod surface;
pub mod verify;

pub use cutlocus::{CutLocusShape, CutLocusVariant, HypothesisReport};
pub use error::{Error, Result};
pub use expr::Expression;
pub use geodesic::{GeodesicTrace, StepControl};
pub use halfperiod::HalfPeriodProfile;
pub use jet::Jet2;
pub use lambda::LambdaParams;
pub use oracle::{FanSearchResult, OracleConfig, VerificationReport};
pub use surface::{NeckHeight, SurfaceDescriptor, SurfaceModel, SurfacePoint, WarpSpec};
pub use verify::{CriterionResult, VerifyConfig};
