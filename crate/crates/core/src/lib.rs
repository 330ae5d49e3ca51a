//! Consensus fusion of multiple human image segmentations.
//!
//! Human segmentations are turned into categorical per-pixel feature
//! vectors, pixels with low expert agreement are masked to background, and
//! the remaining vectors are grouped with K-Modes clustering. The cluster of
//! each pixel becomes its consensus region.
//!
//! ```
//! use segfuse_core::{fuse, FusionOptions, LabelMap, SegmentationGroup};
//!
//! let a = LabelMap::new(4, 1, vec![1, 1, 2, 2]).unwrap();
//! let b = LabelMap::new(4, 1, vec![1, 1, 1, 2]).unwrap();
//! let group = SegmentationGroup::uniform("img", vec![a, b]).unwrap();
//! let consensus = fuse(&group, &FusionOptions::default().with_k(2)).unwrap();
//! assert_eq!(consensus.labels(), &[1, 1, 2, 2]);
//! ```
//!
//! The [`metrics`] module provides the usual region benchmarks (GCE, VOI,
//! PRI, BDE, covering) and [`bench`] runs them over a whole dataset.

pub mod bench;
pub mod error;
pub mod fusion;
pub mod io;
pub mod kmodes;
pub mod metrics;
pub mod synth;
pub mod types;

pub use error::{Error, Result, SegParseError};
pub use fusion::{
    assign_global_ids, binarize_confidence_map, build_feature_vectors, compute_confidence_map, fuse, fuse_detailed,
    mask_feature_maps, select_cluster_count, FusionOptions, FusionOutcome, InitMethod,
};
pub use kmodes::InitStrategy;
pub use types::{
    normalize_labels, region_count, CategoricalVector, ClusterModel, ConfidenceMap, FeatureMap, FeatureVectorSet,
    ImageMetrics, Label, LabelMap, Mask, MetricReport, SegmentationGroup, BACKGROUND,
};
