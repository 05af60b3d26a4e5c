pub mod error;
pub mod expr;
pub mod grid;
pub mod kinematics;
pub mod metric_classes;
pub mod real;
pub mod special;
pub mod surface;
pub mod tensor3;

pub use error::{Error, Result};
pub use real::{Dual, Real};
pub use tensor3::{Mat3, Ten3, Vec3};
