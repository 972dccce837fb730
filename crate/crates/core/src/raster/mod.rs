//! Silhouette ingestion, chamfer distance transform and medial-axis
//! extraction with spur pruning.

mod distance;
mod shape;
mod skeleton;

pub use distance::{distance_transform, DistanceField, AXIAL, DIAGONAL};
pub use shape::{load_silhouette, BinaryShape, LoadOptions, Pixel};
pub use skeleton::{extract_skeleton, prune_skeleton, Skeleton, DEFAULT_PRUNE_SIGNIFICANCE};
