//! Trainable message-passing graph classifiers with explicit
//! backpropagation, plus the experiment machinery around them: attribute
//! schemes, Weisfeiler-Lehman refinement, Adam, grid search, capacity
//! analysis, and result emission.

pub mod adam;
pub mod attrs;
pub mod experiments;
pub mod gin;
pub mod train;
pub mod wl;

pub use attrs::{assign_attributes, AttributeScheme, SchemeKind};
pub use gin::{GinDims, GinNetwork};
pub use train::{train, TrainConfig, TrainResult};
pub use wl::wl_refinement;
