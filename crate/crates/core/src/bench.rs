//! Dataset-level benchmark: fuse every image group, score the consensus
//! against the human references and collect region-count distributions.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::{fuse_detailed, FusionOptions, InitMethod};
use crate::io::{dataset, raster};
use crate::metrics::{evaluate, human_consistency};
use crate::types::{ImageMetrics, LabelMap, MetricReport, SegmentationGroup};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub dataset_root: PathBuf,
    pub output_dir: Option<PathBuf>,
    pub fusion: FusionOptions,
    /// Score each member against the fusion of the others instead of
    /// scoring the full fusion against every member.
    pub leave_one_out: bool,
    /// Restrict to these image ids; empty means all.
    pub images: Vec<String>,
    pub jobs: usize,
}

impl BenchConfig {
    pub fn new(dataset_root: impl Into<PathBuf>) -> Self {
        BenchConfig {
            dataset_root: dataset_root.into(),
            output_dir: None,
            fusion: FusionOptions::default(),
            leave_one_out: false,
            images: Vec::new(),
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.fusion.validate()
    }
}

/// One line of the machine-readable output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub image_id: String,
    pub members: usize,
    pub member_regions: Vec<usize>,
    pub k_requested: usize,
    pub k_used: usize,
    pub consensus_regions: usize,
    pub iterations: usize,
    pub cost: u64,
    pub gce: f64,
    pub voi: f64,
    pub pri: f64,
    pub bde: f64,
    pub covering: f64,
    pub elapsed_ms: f64,
}

impl ImageRecord {
    pub fn metrics(&self) -> ImageMetrics {
        ImageMetrics { gce: self.gce, voi: self.voi, pri: self.pri, bde: self.bde, covering: self.covering }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchFailure {
    pub image_id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub init: InitMethod,
    pub records: Vec<ImageRecord>,
    pub failures: Vec<BenchFailure>,
    pub mean: ImageMetrics,
}

fn histogram(values: impl Iterator<Item = usize>) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

fn mean_of(values: impl Iterator<Item = usize>) -> f64 {
    let (s, n) = values.fold((0usize, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        s as f64 / n as f64
    }
}

impl BenchReport {
    /// Region counts of every human segmentation, pooled over images.
    pub fn original_histogram(&self) -> BTreeMap<usize, usize> {
        histogram(self.records.iter().flat_map(|r| r.member_regions.iter().copied()))
    }

    pub fn consensus_histogram(&self) -> BTreeMap<usize, usize> {
        histogram(self.records.iter().map(|r| r.consensus_regions))
    }

    pub fn mean_original_regions(&self) -> f64 {
        mean_of(self.records.iter().flat_map(|r| r.member_regions.iter().copied()))
    }

    pub fn mean_consensus_regions(&self) -> f64 {
        mean_of(self.records.iter().map(|r| r.consensus_regions))
    }

    pub fn mean_selected_k(&self) -> f64 {
        mean_of(self.records.iter().map(|r| r.k_requested))
    }

    /// Column text: `regions original consensus`, one row per count.
    pub fn histogram_text(&self) -> String {
        let orig = self.original_histogram();
        let cons = self.consensus_histogram();
        let max = orig.keys().chain(cons.keys()).copied().max().unwrap_or(0);
        let mut out = String::from("# regions original consensus\n");
        for k in 0..=max {
            let _ = writeln!(out, "{k} {} {}", orig.get(&k).unwrap_or(&0), cons.get(&k).unwrap_or(&0));
        }
        out
    }

    /// JSON lines, one record per image, in image-id order.
    pub fn records_jsonl(&self) -> String {
        self.records.iter().map(|r| serde_json::to_string(r).expect("plain data") + "\n").collect()
    }

    pub fn summary_table(&self) -> String {
        let m = &self.mean;
        let name = match self.init {
            InitMethod::VectorDensity => "vec",
            InitMethod::AttributeDensity => "attr",
            InitMethod::Random => "random",
        };
        let mut out = String::new();
        let _ = writeln!(out, "images {}  failures {}", self.records.len(), self.failures.len());
        let _ = writeln!(out, "{:<8} {:>8} {:>8} {:>8} {:>8}", "model", "GCE", "VOI", "PRI", "BDE");
        let _ = writeln!(out, "{:<8} {:>8.4} {:>8.4} {:>8.4} {:>8.4}", name, m.gce, m.voi, m.pri, m.bde);
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<8} {:>8} {:>8} {:>8}", "model", "COV", "PRI", "VOI");
        let _ = writeln!(out, "{:<8} {:>8.4} {:>8.4} {:>8.4}", name, m.covering, m.pri, m.voi);
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "mean regions: original {:.3}  consensus {:.3}  selected K {:.3}",
            self.mean_original_regions(),
            self.mean_consensus_regions(),
            self.mean_selected_k()
        );
        out
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("records.jsonl"), self.records_jsonl())?;
        fs::write(dir.join("summary.txt"), self.summary_table())?;
        fs::write(dir.join("region_histogram.txt"), self.histogram_text())?;
        let failures: String =
            self.failures.iter().map(|f| serde_json::to_string(f).expect("plain data") + "\n").collect();
        fs::write(dir.join("failures.jsonl"), failures)?;
        Ok(())
    }
}

/// Fuses one group and scores it. Returns the record and the consensus.
pub fn evaluate_group(
    group: &SegmentationGroup,
    options: &FusionOptions,
    leave_one_out: bool,
) -> Result<(ImageRecord, LabelMap)> {
    let started = Instant::now();
    let outcome = fuse_detailed(group, options)?;
    let metrics = if leave_one_out {
        if group.len() < 2 {
            return Err(Error::LeaveOneOutTooFew(group.len()));
        }
        let folds = (0..group.len())
            .map(|i| {
                let rest = group.without(i).expect("at least two members");
                let held_out = &group.members()[i];
                evaluate(&fuse_detailed(&rest, options)?.consensus, std::slice::from_ref(held_out))
            })
            .collect::<Result<Vec<_>>>()?;
        ImageMetrics::mean(&folds)
    } else {
        evaluate(&outcome.consensus, group.members())?
    };
    let record = ImageRecord {
        image_id: group.image_id().to_string(),
        members: group.len(),
        member_regions: group.members().iter().map(LabelMap::region_count).collect(),
        k_requested: outcome.k_requested,
        k_used: outcome.k_used,
        consensus_regions: outcome.consensus.region_count(),
        iterations: outcome.iterations(),
        cost: outcome.cost(),
        gce: metrics.gce,
        voi: metrics.voi,
        pri: metrics.pri,
        bde: metrics.bde,
        covering: metrics.covering,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    Ok((record, outcome.consensus))
}

fn selected_images(root: &Path, filter: &[String]) -> Result<Vec<String>> {
    let all = dataset::list_images(root)?;
    if filter.is_empty() {
        return Ok(all);
    }
    Ok(all.into_iter().filter(|id| filter.contains(id)).collect())
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// Runs the benchmark over every selected image. Per-image failures are
/// collected instead of aborting the run.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let ids = selected_images(&config.dataset_root, &config.images)?;
    let results: Vec<(String, Result<(ImageRecord, LabelMap)>)> = pool(config.jobs)?.install(|| {
        ids.par_iter()
            .map(|id| {
                let r = dataset::load_group(&config.dataset_root, id)
                    .and_then(|g| evaluate_group(&g, &config.fusion, config.leave_one_out));
                if let Ok((rec, _)) = &r {
                    log::info!("{id}: K {} -> {} regions, PRI {:.4}", rec.k_used, rec.consensus_regions, rec.pri);
                }
                (id.clone(), r)
            })
            .collect()
    });

    let mut records = Vec::new();
    let mut failures = Vec::new();
    let consensus_dir = config.output_dir.as_ref().map(|d| d.join("consensus"));
    if let Some(dir) = &consensus_dir {
        fs::create_dir_all(dir)?;
    }
    for (id, r) in results {
        match r {
            Ok((record, consensus)) => {
                if let Some(dir) = &consensus_dir {
                    let depth = raster::LabelDepth::fitting(&consensus)?;
                    fs::write(dir.join(format!("{id}.png")), raster::write_label_image(&consensus, depth)?)?;
                }
                records.push(record);
            }
            Err(e) => {
                log::error!("{id}: {e}");
                failures.push(BenchFailure { image_id: id, error: e.to_string() });
            }
        }
    }
    let mean = ImageMetrics::mean(records.iter().map(ImageRecord::metrics).collect::<Vec<_>>().iter());
    let report = BenchReport { init: config.fusion.init_method, records, failures, mean };
    if let Some(dir) = &config.output_dir {
        report.write_to(dir)?;
    }
    Ok(report)
}

/// Mean human-vs-human scores over the dataset: every member is scored
/// against the remaining members of its image.
pub fn human_baseline(dataset_root: &Path, images: &[String], jobs: usize) -> Result<MetricReport> {
    let ids = selected_images(dataset_root, images)?;
    let scores: Vec<Result<(String, ImageMetrics)>> = pool(jobs)?.install(|| {
        ids.par_iter()
            .map(|id| {
                let g = dataset::load_group(dataset_root, id)?;
                Ok((id.clone(), human_consistency(g.members())?))
            })
            .collect()
    });
    Ok(MetricReport::from_images(scores.into_iter().collect::<Result<Vec<_>>>()?))
}
