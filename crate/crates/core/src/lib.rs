//! Skeleton-based topological shape representation.
//!
//! The pipeline turns a binary silhouette into a pruned medial axis, reduces
//! the skeleton graph to a depth-one tree of root-to-endpoint paths, and
//! describes each path by a 50-sample radius profile, normalized mass and
//! length, and its alignment with a spine-like axis. Shapes are compared by
//! elastic subsequence matching over those per-endpoint features, and sets of
//! same-class shapes can be folded into a single generalized prototype that
//! is projected back onto instances to explain what is present, missing or
//! extra.

pub mod apply;
pub mod error;
pub mod generalize;
pub mod harness;
pub mod metric;
pub mod osb;
mod par;
pub mod raster;
pub mod render;
pub mod rts;
pub mod skeltree;

pub use error::{Error, Result};
