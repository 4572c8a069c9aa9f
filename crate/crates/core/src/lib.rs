pub mod basepredict;
pub mod conformal;
pub mod distance;
pub mod error;
pub mod harness;
pub mod ipm;
pub mod lp;
pub mod metrics;
pub mod transport;
pub mod uncertain;

pub use error::{CiiError, Result};
