//! Invariants and spectral quantities of generalized irrational rotation
//! algebras `A_{θ,γ}`, generated by `x = u·γ(v)^{1/2}` and `v` inside the
//! rotation algebra with `vu = e^{2πiθ} uv`.

pub mod angle;
pub mod commutant;
pub mod error;
pub mod gamma;
pub mod ktheory;
pub mod mathieu;
pub mod ncpoly;
pub mod orbit;
pub mod quad;
pub mod rieffel;
pub mod spectral;
pub mod theta;

pub use angle::{AngleZT, GenericAngle};
pub use error::{Error, Result};
pub use theta::{Rational, Theta};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
