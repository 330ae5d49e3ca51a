//! Consensus fusion of a segmentation group.
//!
//! Pipeline: global region IDs -> feature maps -> confidence map -> mask ->
//! deduplicated feature vectors -> K selection -> K-Modes -> consensus map.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmodes::{self, InitStrategy};
use crate::types::{
    CategoricalVector, ClusterModel, ConfidenceMap, FeatureMap, FeatureVectorSet, Label, LabelMap, Mask,
    SegmentationGroup, BACKGROUND,
};

pub const DEFAULT_THRESHOLD: f64 = 0.75;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMethod {
    VectorDensity,
    AttributeDensity,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionOptions {
    pub confidence_threshold: f64,
    pub init_method: InitMethod,
    pub max_iterations: usize,
    pub seed: u64,
    pub k_override: Option<usize>,
}

impl Default for FusionOptions {
    fn default() -> Self {
        FusionOptions {
            confidence_threshold: DEFAULT_THRESHOLD,
            init_method: InitMethod::VectorDensity,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            seed: 0,
            k_override: None,
        }
    }
}

impl FusionOptions {
    pub fn with_init(mut self, init: InitMethod) -> Self {
        self.init_method = init;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k_override = Some(k);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.confidence_threshold > 0.0 && self.confidence_threshold <= 1.0) {
            return Err(Error::ThresholdRange(self.confidence_threshold));
        }
        if self.k_override == Some(0) {
            return Err(Error::ZeroClusters);
        }
        Ok(())
    }

    fn strategy(&self) -> InitStrategy {
        match self.init_method {
            InitMethod::VectorDensity => InitStrategy::VectorDensity,
            InitMethod::AttributeDensity => InitStrategy::AttributeDensity,
            InitMethod::Random => InitStrategy::Random { seed: self.seed },
        }
    }
}

/// Offsets each member's labels so that ID ranges never collide: member 1
/// keeps `1..=J_1`, member 2 gets `J_1+1..=J_1+J_2`, and so on. Background
/// stays `0`. Members are expected to be normalized.
pub fn assign_global_ids(group: &SegmentationGroup) -> Vec<FeatureMap> {
    let mut offset: Label = 0;
    group
        .members()
        .iter()
        .map(|m| {
            let values = m.labels().iter().map(|&l| if l == BACKGROUND { BACKGROUND } else { l + offset }).collect();
            offset += m.labels().iter().copied().max().unwrap_or(0);
            FeatureMap { width: m.width(), height: m.height(), values }
        })
        .collect()
}

/// `C = (1/L) * sum_i B_i * p_i` where `B_i` is 1 on member `i`'s
/// non-background pixels.
pub fn compute_confidence_map(group: &SegmentationGroup) -> ConfidenceMap {
    let n = group.width() * group.height();
    let mut sum = vec![0.0f64; n];
    for (m, &p) in group.members().iter().zip(group.confidences()) {
        for (s, &l) in sum.iter_mut().zip(m.labels()) {
            if l != BACKGROUND {
                *s += p;
            }
        }
    }
    let l = group.len() as f64;
    ConfidenceMap {
        width: group.width(),
        height: group.height(),
        values: sum.into_iter().map(|s| (s / l).clamp(0.0, 1.0)).collect(),
    }
}

/// `true` where `C >= threshold`.
pub fn binarize_confidence_map(c: &ConfidenceMap, threshold: f64) -> Result<Mask> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::ThresholdRange(threshold));
    }
    Ok(Mask { width: c.width, height: c.height, values: c.values.iter().map(|&v| v >= threshold).collect() })
}

/// Sends every pixel outside `mask` to background in every map.
pub fn mask_feature_maps(maps: &[FeatureMap], mask: &Mask) -> Result<Vec<FeatureMap>> {
    maps.iter()
        .map(|f| {
            if f.width != mask.width || f.height != mask.height {
                return Err(Error::DimensionMismatch(f.width, f.height, mask.width, mask.height));
            }
            let values =
                f.values.iter().zip(&mask.values).map(|(&v, &keep)| if keep { v } else { BACKGROUND }).collect();
            Ok(FeatureMap { width: f.width, height: f.height, values })
        })
        .collect()
}

/// Stacks the maps into one length-`L` vector per pixel and deduplicates.
pub fn build_feature_vectors(maps: &[FeatureMap]) -> Result<FeatureVectorSet> {
    let first = maps.first().ok_or(Error::EmptyGroup)?;
    for f in &maps[1..] {
        if f.width != first.width || f.height != first.height {
            return Err(Error::DimensionMismatch(first.width, first.height, f.width, f.height));
        }
    }
    let rows: Vec<CategoricalVector> =
        (0..first.values.len()).map(|p| maps.iter().map(|f| f.values[p]).collect()).collect();
    FeatureVectorSet::from_rows(maps.len(), &rows)
}

/// Mean region count over members, rounded half up, at least 1.
pub fn select_cluster_count(group: &SegmentationGroup) -> usize {
    let total: usize = group.members().iter().map(LabelMap::region_count).sum();
    let l = group.len();
    ((2 * total + l) / (2 * l)).max(1)
}

/// Everything produced by one fusion run.
#[derive(Debug, Clone)]
pub struct FusionOutcome {
    pub consensus: LabelMap,
    /// Cluster count asked for (selected or overridden).
    pub k_requested: usize,
    /// Cluster count actually used after clamping.
    pub k_used: usize,
    /// Distinct feature vectors taking part in clustering.
    pub foreground_vectors: usize,
    pub masked_pixels: usize,
    /// `None` when every pixel was masked out.
    pub model: Option<ClusterModel>,
    pub warnings: Vec<String>,
}

impl FusionOutcome {
    pub fn iterations(&self) -> usize {
        self.model.as_ref().map_or(0, |m| m.iterations)
    }

    pub fn cost(&self) -> u64 {
        self.model.as_ref().map_or(0, |m| m.cost)
    }
}

/// Members sorted by content so that the result does not depend on the
/// order in which annotators were listed.
fn canonical_order(group: &SegmentationGroup) -> Result<SegmentationGroup> {
    let mut idx: Vec<usize> = (0..group.len()).collect();
    let normalized: Vec<LabelMap> = group.members().iter().map(LabelMap::normalized).collect();
    idx.sort_by(|&a, &b| {
        normalized[a]
            .labels()
            .cmp(normalized[b].labels())
            .then_with(|| group.confidences()[a].total_cmp(&group.confidences()[b]))
    });
    SegmentationGroup::new(
        group.image_id(),
        idx.iter().map(|&i| normalized[i].clone()).collect(),
        idx.iter().map(|&i| group.confidences()[i]).collect(),
    )
}

/// Runs the full pipeline and returns the consensus segmentation.
pub fn fuse(group: &SegmentationGroup, options: &FusionOptions) -> Result<LabelMap> {
    fuse_detailed(group, options).map(|o| o.consensus)
}

/// Like [`fuse`] but also reports K, the cluster model and warnings.
pub fn fuse_detailed(group: &SegmentationGroup, options: &FusionOptions) -> Result<FusionOutcome> {
    options.validate()?;
    let group = canonical_order(group)?;

    let features = assign_global_ids(&group);
    let confidence = compute_confidence_map(&group);
    let mask = binarize_confidence_map(&confidence, options.confidence_threshold)?;
    let masked = mask_feature_maps(&features, &mask)?;
    let set = build_feature_vectors(&masked)?;

    // All-background vectors are decided already and bypass clustering.
    let foreground: Vec<usize> =
        (0..set.distinct()).filter(|&i| set.vectors[i].iter().any(|&a| a != BACKGROUND)).collect();
    let k_requested = options.k_override.unwrap_or_else(|| select_cluster_count(&group));
    let mut warnings = Vec::new();
    let k_used = k_requested.min(foreground.len());
    if k_used < k_requested {
        let msg = format!(
            "requested {k_requested} clusters but only {} distinct foreground vectors exist; using {k_used}",
            foreground.len()
        );
        log::warn!("{}: {msg}", group.image_id());
        warnings.push(msg);
    }

    let mut cluster_of = vec![None; set.distinct()];
    let model = if k_used > 0 {
        let fg = set.select(&foreground);
        let model = kmodes::cluster(&fg, k_used, options.strategy(), options.max_iterations)?;
        for (pos, &i) in foreground.iter().enumerate() {
            cluster_of[i] = Some(model.assignment[pos]);
        }
        Some(model)
    } else {
        None
    };

    let labels = set.origin_index.iter().map(|&i| cluster_of[i].map_or(BACKGROUND, |c| c as Label + 1)).collect();
    let consensus = LabelMap::new(group.width(), group.height(), labels)?.normalized();

    Ok(FusionOutcome {
        consensus,
        k_requested,
        k_used,
        foreground_vectors: foreground.len(),
        masked_pixels: mask.values.len() - mask.count_true(),
        model,
        warnings,
    })
}
