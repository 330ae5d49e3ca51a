//! Browser bindings for the interactive demo in `www/`.
//!
//! The page generates a synthetic annotator group, lets the user change
//! per-annotator confidences, the mask threshold, the initialization and K,
//! and shows the consensus with its region benchmark scores.

use segfuse_core::io::render_rgb;
use segfuse_core::metrics::evaluate;
use segfuse_core::synth::{annotator_group, ground_truth, SceneParams};
use segfuse_core::{
    binarize_confidence_map, compute_confidence_map, fuse_detailed, FusionOptions, InitMethod, LabelMap,
    SegmentationGroup,
};
use wasm_bindgen::prelude::*;

fn rgba(map: &LabelMap, seed: u64) -> Vec<u8> {
    render_rgb(map, seed).chunks_exact(3).flat_map(|c| [c[0], c[1], c[2], 255]).collect()
}

fn js_err(e: segfuse_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Outcome of one fusion run, with the consensus scored against every
/// annotator.
#[wasm_bindgen]
pub struct FuseResult {
    rgba: Vec<u8>,
    k_requested: usize,
    k_used: usize,
    regions: usize,
    iterations: usize,
    cost: u64,
    masked_pixels: usize,
    gce: f64,
    voi: f64,
    pri: f64,
    bde: f64,
    covering: f64,
    truth_pri: f64,
    truth_voi: f64,
}

#[wasm_bindgen]
impl FuseResult {
    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn k_requested(&self) -> usize {
        self.k_requested
    }
    #[wasm_bindgen(getter)]
    pub fn k_used(&self) -> usize {
        self.k_used
    }
    #[wasm_bindgen(getter)]
    pub fn regions(&self) -> usize {
        self.regions
    }
    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }
    #[wasm_bindgen(getter)]
    pub fn cost(&self) -> f64 {
        self.cost as f64
    }
    #[wasm_bindgen(getter)]
    pub fn masked_pixels(&self) -> usize {
        self.masked_pixels
    }
    #[wasm_bindgen(getter)]
    pub fn gce(&self) -> f64 {
        self.gce
    }
    #[wasm_bindgen(getter)]
    pub fn voi(&self) -> f64 {
        self.voi
    }
    #[wasm_bindgen(getter)]
    pub fn pri(&self) -> f64 {
        self.pri
    }
    #[wasm_bindgen(getter)]
    pub fn bde(&self) -> f64 {
        self.bde
    }
    #[wasm_bindgen(getter)]
    pub fn covering(&self) -> f64 {
        self.covering
    }
    /// PRI against the noise-free scene.
    #[wasm_bindgen(getter)]
    pub fn truth_pri(&self) -> f64 {
        self.truth_pri
    }
    /// VOI against the noise-free scene.
    #[wasm_bindgen(getter)]
    pub fn truth_voi(&self) -> f64 {
        self.truth_voi
    }
}

/// A synthetic scene plus its simulated annotators.
#[wasm_bindgen]
pub struct Demo {
    params: SceneParams,
    truth: LabelMap,
    members: Vec<LabelMap>,
    confidences: Vec<f64>,
}

#[wasm_bindgen]
impl Demo {
    #[allow(clippy::too_many_arguments)]
    #[wasm_bindgen(constructor)]
    pub fn new(
        width: usize,
        height: usize,
        regions: usize,
        annotators: usize,
        jitter: f64,
        merge_prob: f64,
        skip_prob: f64,
        seed: u64,
    ) -> Result<Demo, JsError> {
        let params = SceneParams { width, height, regions, annotators, jitter, merge_prob, skip_prob, seed };
        let group = annotator_group(&params).map_err(js_err)?;
        let members = group.members().to_vec();
        let confidences = vec![1.0; members.len()];
        Ok(Demo { params, truth: ground_truth(&params), members, confidences })
    }

    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.params.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.params.height
    }

    #[wasm_bindgen(getter)]
    pub fn annotators(&self) -> usize {
        self.members.len()
    }

    pub fn member_rgba(&self, index: usize) -> Vec<u8> {
        self.members.get(index).map(|m| rgba(m, 17 + index as u64)).unwrap_or_default()
    }

    pub fn member_regions(&self, index: usize) -> usize {
        self.members.get(index).map_or(0, LabelMap::region_count)
    }

    pub fn truth_rgba(&self) -> Vec<u8> {
        rgba(&self.truth, 5)
    }

    pub fn set_confidence(&mut self, index: usize, confidence: f64) {
        if let Some(c) = self.confidences.get_mut(index) {
            *c = confidence.clamp(0.0, 1.0);
        }
    }

    fn group(&self) -> Result<SegmentationGroup, JsError> {
        SegmentationGroup::new("demo", self.members.clone(), self.confidences.clone()).map_err(js_err)
    }

    /// Grey-level confidence map; pixels below `threshold` are tinted red.
    pub fn confidence_rgba(&self, threshold: f64) -> Result<Vec<u8>, JsError> {
        let c = compute_confidence_map(&self.group()?);
        let mask = binarize_confidence_map(&c, threshold).map_err(js_err)?;
        Ok(c.values
            .iter()
            .zip(&mask.values)
            .flat_map(|(&v, &keep)| {
                let g = (v * 255.0).round() as u8;
                if keep {
                    [g, g, g, 255]
                } else {
                    [g.max(120), g / 3, g / 3, 255]
                }
            })
            .collect())
    }

    /// Fuses the annotators. `init` is `"vec"`, `"attr"` or `"random"`;
    /// `k == 0` selects K from the mean region count.
    pub fn fuse(&self, threshold: f64, init: &str, k: usize, seed: u64) -> Result<FuseResult, JsError> {
        let init_method = match init {
            "vec" => InitMethod::VectorDensity,
            "attr" => InitMethod::AttributeDensity,
            "random" => InitMethod::Random,
            other => return Err(JsError::new(&format!("unknown init `{other}`"))),
        };
        let options = FusionOptions {
            confidence_threshold: threshold,
            init_method,
            seed,
            k_override: (k > 0).then_some(k),
            ..FusionOptions::default()
        };
        let group = self.group()?;
        let out = fuse_detailed(&group, &options).map_err(js_err)?;
        let m = evaluate(&out.consensus, group.members()).map_err(js_err)?;
        let t = evaluate(&out.consensus, std::slice::from_ref(&self.truth)).map_err(js_err)?;
        Ok(FuseResult {
            rgba: rgba(&out.consensus, 5),
            k_requested: out.k_requested,
            k_used: out.k_used,
            regions: out.consensus.region_count(),
            iterations: out.iterations(),
            cost: out.cost(),
            masked_pixels: out.masked_pixels,
            gce: m.gce,
            voi: m.voi,
            pri: m.pri,
            bde: m.bde,
            covering: m.covering,
            truth_pri: t.pri,
            truth_voi: t.voi,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_round_trip() {
        let mut d = Demo::new(40, 30, 6, 4, 2.0, 0.2, 0.0, 3).unwrap();
        assert_eq!(d.member_rgba(0).len(), 40 * 30 * 4);
        d.set_confidence(1, 0.3);
        let c = d.confidence_rgba(0.75).unwrap();
        assert_eq!(c.len(), 40 * 30 * 4);
        let r = d.fuse(0.75, "vec", 0, 0).unwrap();
        assert_eq!(r.rgba().len(), 40 * 30 * 4);
        assert!(r.regions() >= 1 && r.regions() <= r.k_used());
        assert!((0.0..=1.0).contains(&r.pri()));
        let a = d.fuse(0.75, "attr", 3, 0).unwrap();
        assert_eq!(a.k_requested(), 3);
    }
}
