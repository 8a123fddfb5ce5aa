pub mod ansatz;
pub mod cluster;
pub mod config;
pub mod error;
pub mod fd;
pub mod fit;
pub mod kinematics;
pub mod residual;
pub mod runner;
pub mod special;
pub mod tolerances;
pub mod vec3;

pub use error::{Error, Result};
