//! Domain model shared by the fusion pipeline, the clustering engine, the
//! metrics and the dataset readers.
//!
//! Every map is stored row-major. Label `0` is the background sentinel
//! throughout the crate; annotated regions use labels `>= 1`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Region label of a single pixel. `0` is background.
pub type Label = u32;

/// Background label shared by every map type.
pub const BACKGROUND: Label = 0;

/// A single segmentation: a `width x height` grid of region labels.
///
/// Region identity is label equality, not spatial connectivity, so one label
/// may cover several disconnected components.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<Label>,
}

impl LabelMap {
    pub fn new(width: usize, height: usize, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::BadLength { width, height, actual: labels.len() });
        }
        Ok(LabelMap { width, height, labels })
    }

    pub fn filled(width: usize, height: usize, label: Label) -> Self {
        LabelMap { width, height, labels: vec![label; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<Label> {
        self.labels
    }

    pub fn get(&self, row: usize, col: usize) -> Label {
        self.labels[row * self.width + col]
    }

    pub fn same_shape(&self, other: &LabelMap) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_shape(&self, other: &LabelMap) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(self.width, self.height, other.width, other.height))
        }
    }

    /// Relabels non-zero regions to `1..=J` in order of first occurrence
    /// (row-major). Background stays `0`.
    pub fn normalized(&self) -> LabelMap {
        let mut remap: HashMap<Label, Label> = HashMap::new();
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if l == BACKGROUND {
                    return BACKGROUND;
                }
                let next = remap.len() as Label + 1;
                *remap.entry(l).or_insert(next)
            })
            .collect();
        LabelMap { width: self.width, height: self.height, labels }
    }

    /// Number of distinct non-background labels.
    pub fn region_count(&self) -> usize {
        let mut seen: Vec<Label> = self.labels.iter().copied().filter(|&l| l != BACKGROUND).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    pub fn has_background(&self) -> bool {
        self.labels.contains(&BACKGROUND)
    }

    /// True when both maps induce the same partition of the pixel grid,
    /// regardless of how the regions are named.
    pub fn partition_eq(&self, other: &LabelMap) -> bool {
        if !self.same_shape(other) {
            return false;
        }
        let mut fwd: HashMap<Label, Label> = HashMap::new();
        let mut bwd: HashMap<Label, Label> = HashMap::new();
        self.labels
            .iter()
            .zip(&other.labels)
            .all(|(&a, &b)| *fwd.entry(a).or_insert(b) == b && *bwd.entry(b).or_insert(a) == a)
    }
}

/// Free-function form of [`LabelMap::normalized`].
pub fn normalize_labels(map: &LabelMap) -> LabelMap {
    map.normalized()
}

/// Free-function form of [`LabelMap::region_count`].
pub fn region_count(map: &LabelMap) -> usize {
    map.region_count()
}

/// The `L` human segmentations of one image together with one expert
/// confidence per segmentation.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationGroup {
    image_id: String,
    members: Vec<LabelMap>,
    confidences: Vec<f64>,
}

impl SegmentationGroup {
    pub fn new(image_id: impl Into<String>, members: Vec<LabelMap>, confidences: Vec<f64>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyGroup)?;
        if confidences.len() != members.len() {
            return Err(Error::ConfidenceCount(confidences.len(), members.len()));
        }
        for m in &members[1..] {
            first.check_shape(m)?;
        }
        if let Some(&p) = confidences.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::ConfidenceRange(p));
        }
        Ok(SegmentationGroup { image_id: image_id.into(), members, confidences })
    }

    /// Group with every confidence set to `1.0`.
    pub fn uniform(image_id: impl Into<String>, members: Vec<LabelMap>) -> Result<Self> {
        let n = members.len();
        Self::new(image_id, members, vec![1.0; n])
    }

    pub fn image_id(&self) -> &str {
        &self.image_id
    }

    pub fn members(&self) -> &[LabelMap] {
        &self.members
    }

    pub fn confidences(&self) -> &[f64] {
        &self.confidences
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn width(&self) -> usize {
        self.members[0].width()
    }

    pub fn height(&self) -> usize {
        self.members[0].height()
    }

    /// Group without member `index`, or `None` when that would leave it empty.
    pub fn without(&self, index: usize) -> Option<SegmentationGroup> {
        if self.members.len() < 2 || index >= self.members.len() {
            return None;
        }
        let mut members = self.members.clone();
        let mut confidences = self.confidences.clone();
        members.remove(index);
        confidences.remove(index);
        Some(SegmentationGroup { image_id: self.image_id.clone(), members, confidences })
    }
}

/// One segmentation re-expressed with globally unique region IDs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<Label>,
}

/// Per-pixel confidence in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

/// Boolean per-pixel mask; `true` marks a significant pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub values: Vec<bool>,
}

impl Mask {
    pub fn count_true(&self) -> usize {
        self.values.iter().filter(|&&v| v).count()
    }
}

/// A categorical vector: one global region ID per segmentation.
pub type CategoricalVector = Vec<Label>;

/// Deduplicated per-pixel feature vectors with their multiplicities.
///
/// `vectors` is sorted lexicographically, so indices are a deterministic
/// function of the content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVectorSet {
    pub arity: usize,
    pub vectors: Vec<CategoricalVector>,
    pub counts: Vec<u64>,
    pub origin_index: Vec<usize>,
}

impl FeatureVectorSet {
    pub fn distinct(&self) -> usize {
        self.vectors.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Builds a set from arbitrary per-pixel rows.
    pub fn from_rows(arity: usize, rows: &[CategoricalVector]) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != arity) {
            return Err(Error::ArityMismatch(arity, bad.len()));
        }
        let mut vectors: Vec<CategoricalVector> = rows.to_vec();
        vectors.sort_unstable();
        vectors.dedup();
        let index: HashMap<&[Label], usize> = vectors.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
        let mut counts = vec![0u64; vectors.len()];
        let origin_index = rows
            .iter()
            .map(|r| {
                let i = index[r.as_slice()];
                counts[i] += 1;
                i
            })
            .collect();
        Ok(FeatureVectorSet { arity, vectors, counts, origin_index })
    }

    /// Subset restricted to the given distinct-vector indices (in the given
    /// order). `origin_index` of the result is empty.
    pub fn select(&self, indices: &[usize]) -> FeatureVectorSet {
        FeatureVectorSet {
            arity: self.arity,
            vectors: indices.iter().map(|&i| self.vectors[i].clone()).collect(),
            counts: indices.iter().map(|&i| self.counts[i]).collect(),
            origin_index: Vec::new(),
        }
    }
}

/// Result of K-Modes clustering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterModel {
    pub modes: Vec<CategoricalVector>,
    /// Cluster index per distinct vector.
    pub assignment: Vec<usize>,
    pub iterations: usize,
    /// Multiplicity-weighted total simple-matching dissimilarity.
    pub cost: u64,
    /// Cost after every assignment step, starting with the initial one.
    pub cost_trace: Vec<u64>,
}

impl ClusterModel {
    pub fn k(&self) -> usize {
        self.modes.len()
    }
}

/// Region benchmark scores for one image.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ImageMetrics {
    pub gce: f64,
    pub voi: f64,
    pub pri: f64,
    pub bde: f64,
    pub covering: f64,
}

impl ImageMetrics {
    pub fn mean<'a>(items: impl IntoIterator<Item = &'a ImageMetrics>) -> ImageMetrics {
        let mut acc = ImageMetrics::default();
        let mut n = 0usize;
        for m in items {
            acc.gce += m.gce;
            acc.voi += m.voi;
            acc.pri += m.pri;
            acc.bde += m.bde;
            acc.covering += m.covering;
            n += 1;
        }
        if n > 0 {
            let d = n as f64;
            acc.gce /= d;
            acc.voi /= d;
            acc.pri /= d;
            acc.bde /= d;
            acc.covering /= d;
        }
        acc
    }
}

/// Per-image scores plus their dataset mean (images in fixed order).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricReport {
    pub images: Vec<(String, ImageMetrics)>,
    pub mean: ImageMetrics,
}

impl MetricReport {
    pub fn from_images(images: Vec<(String, ImageMetrics)>) -> Self {
        let mean = ImageMetrics::mean(images.iter().map(|(_, m)| m));
        MetricReport { images, mean }
    }
}
