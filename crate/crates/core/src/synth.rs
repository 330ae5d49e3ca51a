//! Synthetic annotator groups for demos and tests.
//!
//! A scene is a Voronoi partition of random sites. Each simulated annotator
//! sees the sites displaced by a few pixels, merges some regions into their
//! nearest neighbour and may leave regions unannotated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::types::{Label, LabelMap, SegmentationGroup, BACKGROUND};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
    pub regions: usize,
    pub annotators: usize,
    /// Maximum site displacement per annotator, in pixels.
    pub jitter: f64,
    /// Probability that an annotator merges a region into its neighbour.
    pub merge_prob: f64,
    /// Probability that an annotator leaves a region unannotated.
    pub skip_prob: f64,
    pub seed: u64,
}

impl Default for SceneParams {
    fn default() -> Self {
        SceneParams {
            width: 96,
            height: 64,
            regions: 8,
            annotators: 5,
            jitter: 3.0,
            merge_prob: 0.15,
            skip_prob: 0.0,
            seed: 1,
        }
    }
}

fn voronoi(width: usize, height: usize, sites: &[(f64, f64)]) -> Vec<usize> {
    (0..width * height)
        .map(|p| {
            let (x, y) = ((p % width) as f64, (p / width) as f64);
            sites
                .iter()
                .enumerate()
                .map(|(i, &(sx, sy))| (i, (x - sx).powi(2) + (y - sy).powi(2)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(i, _)| i)
                .unwrap_or(0)
        })
        .collect()
}

fn nearest_other(sites: &[(f64, f64)], i: usize) -> usize {
    (0..sites.len())
        .filter(|&j| j != i)
        .min_by(|&a, &b| {
            let d = |j: usize| (sites[j].0 - sites[i].0).powi(2) + (sites[j].1 - sites[i].1).powi(2);
            d(a).total_cmp(&d(b))
        })
        .unwrap_or(i)
}

fn sites(params: &SceneParams, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    (0..params.regions.max(1))
        .map(|_| (rng.random_range(0.0..params.width as f64), rng.random_range(0.0..params.height as f64)))
        .collect()
}

/// The noise-free scene partition.
pub fn ground_truth(params: &SceneParams) -> LabelMap {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let s = sites(params, &mut rng);
    let labels = voronoi(params.width, params.height, &s).into_iter().map(|i| i as Label + 1).collect();
    LabelMap::new(params.width, params.height, labels).expect("sized buffer").normalized()
}

/// Simulated human segmentations of the scene, all with confidence 1.
pub fn annotator_group(params: &SceneParams) -> Result<SegmentationGroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let base = sites(params, &mut rng);
    let members = (0..params.annotators.max(1))
        .map(|_| {
            let moved: Vec<(f64, f64)> = base
                .iter()
                .map(|&(x, y)| {
                    let j = params.jitter.max(0.0);
                    if j == 0.0 {
                        (x, y)
                    } else {
                        (x + rng.random_range(-j..=j), y + rng.random_range(-j..=j))
                    }
                })
                .collect();
            let owner: Vec<Label> = (0..moved.len())
                .map(|i| {
                    if rng.random_bool(params.skip_prob.clamp(0.0, 1.0)) {
                        BACKGROUND
                    } else if rng.random_bool(params.merge_prob.clamp(0.0, 1.0)) {
                        nearest_other(&moved, i) as Label + 1
                    } else {
                        i as Label + 1
                    }
                })
                .collect();
            let labels = voronoi(params.width, params.height, &moved).into_iter().map(|i| owner[i]).collect();
            LabelMap::new(params.width, params.height, labels).expect("sized buffer").normalized()
        })
        .collect();
    SegmentationGroup::uniform(format!("synthetic-{}", params.seed), members)
}
