//! Dynamic classifier and ensemble selection for imbalanced multi-class
//! problems: CART pools built with bagging plus resampling, fourteen
//! selection schemes, and the metrics and tests used to compare them.

pub mod cart;
pub mod data;
pub mod dynsel;
pub mod error;
pub mod eval;
pub mod pool;
pub mod resample;
pub mod util;

pub use cart::{DecisionTree, TreeConfig};
pub use data::Dataset;
pub use error::{Error, Result};
pub use resample::ResampleVariant;
