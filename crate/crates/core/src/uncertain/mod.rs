//! Uncertain numbers: scalars, intervals, step CDFs and probability boxes,
//! plus the area metric used as the conformal score.
//!
//! Every distribution is held as a right-continuous [`StepCdf`], so all
//! integrals below (area metric, breadth) are exact sums over a merged
//! breakpoint grid.

mod cdf;
mod pbox;
pub mod record;

pub use cdf::{empirical_cdf, StepCdf, DEFAULT_DISCRETISATION, LEVEL_TOL};
pub use pbox::{area_metric, breadth, envelope, range_interval, to_pbox, Interval, PBox, UncertainNumber};
pub use record::{read_records, write_records, PBoxRecord};

pub(crate) use cdf::merged_grid;
