use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use segfuse_core::bench::{self, BenchConfig};
use segfuse_core::io::{self, dataset, LabelDepth};
use segfuse_core::metrics::evaluate;
use segfuse_core::synth::{self, SceneParams};
use segfuse_core::{fuse_detailed, FusionOptions, ImageMetrics, InitMethod, LabelMap};

#[derive(Parser)]
#[command(name = "segfuse", version, about = "Consensus fusion of human image segmentations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fuse one group directory into a consensus segmentation.
    Fuse {
        group: PathBuf,
        #[command(flatten)]
        fusion: FusionArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Also write the consensus as a `.seg` file.
        #[arg(long)]
        seg: bool,
    },
    /// Score a candidate segmentation (or a directory of them) against references.
    Eval {
        /// Candidate `.seg`/`.png` file, or a directory of `<image_id>.{png,seg}` files.
        candidate: PathBuf,
        /// Group directory for a single candidate, or dataset root for a directory.
        refs: PathBuf,
        /// Write line-delimited JSON records here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fuse and score every image of a dataset.
    Bench {
        dataset: PathBuf,
        #[command(flatten)]
        fusion: FusionArgs,
        #[arg(long)]
        leave_one_out: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Comma-separated image ids to restrict to.
        #[arg(long, value_delimiter = ',')]
        images: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean human-vs-human scores of a dataset.
    Human {
        dataset: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_delimiter = ',')]
        images: Vec<String>,
    },
    /// Regroup the BSDS300 `human/<user>/<image>.seg` tree into per-image directories.
    ImportBsds300 { human_dir: PathBuf, out: PathBuf },
    /// Write a synthetic dataset of simulated annotator groups.
    Synth {
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        images: usize,
        #[arg(long, default_value_t = 5)]
        annotators: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    Vec,
    Attr,
    Random,
}

#[derive(Args)]
struct FusionArgs {
    #[arg(long, value_enum, default_value = "vec")]
    init: Init,
    #[arg(long, default_value_t = segfuse_core::fusion::DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Override the cluster count (default: mean member region count).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = segfuse_core::fusion::DEFAULT_MAX_ITERATIONS)]
    max_iters: usize,
    /// Seed for `--init random`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl FusionArgs {
    fn options(&self) -> FusionOptions {
        FusionOptions {
            confidence_threshold: self.threshold,
            init_method: match self.init {
                Init::Vec => InitMethod::VectorDensity,
                Init::Attr => InitMethod::AttributeDensity,
                Init::Random => InitMethod::Random,
            },
            max_iterations: self.max_iters,
            seed: self.seed,
            k_override: self.k,
        }
    }
}

fn dir_name(path: &Path) -> String {
    path.canonicalize()
        .ok()
        .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "consensus".to_string())
}

fn cmd_fuse(group_dir: &Path, options: &FusionOptions, out: &Path, write_seg: bool) -> Result<()> {
    let id = dir_name(group_dir);
    let group = dataset::load_group_dir(group_dir, &id)?;
    let started = Instant::now();
    let outcome = fuse_detailed(&group, options)?;
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    fs::create_dir_all(out)?;
    let consensus = &outcome.consensus;
    let depth = LabelDepth::fitting(consensus)?;
    fs::write(out.join(format!("{id}.png")), io::write_label_image(consensus, depth)?)?;
    fs::write(out.join(format!("{id}_color.png")), io::write_color_image(consensus, 0)?)?;
    let mut warnings = outcome.warnings.clone();
    if write_seg {
        if consensus.has_background() {
            warnings.push("consensus contains background pixels; .seg output skipped".into());
        } else {
            fs::write(out.join(format!("{id}.seg")), io::write_seg(consensus, &[("image".into(), id.clone())])?)?;
        }
    }
    let mut manifest = String::new();
    let _ = writeln!(manifest, "image {id}");
    let _ = writeln!(manifest, "members {}", group.len());
    let _ = writeln!(manifest, "init {:?}", options.init_method);
    let _ = writeln!(manifest, "threshold {}", options.confidence_threshold);
    let _ = writeln!(manifest, "k_requested {}", outcome.k_requested);
    let _ = writeln!(manifest, "k_used {}", outcome.k_used);
    let _ = writeln!(manifest, "foreground_vectors {}", outcome.foreground_vectors);
    let _ = writeln!(manifest, "masked_pixels {}", outcome.masked_pixels);
    let _ = writeln!(manifest, "consensus_regions {}", consensus.region_count());
    let _ = writeln!(manifest, "iterations {}", outcome.iterations());
    let _ = writeln!(manifest, "cost {}", outcome.cost());
    let _ = writeln!(manifest, "elapsed_ms {:.3}", elapsed_ms);
    for w in &warnings {
        let _ = writeln!(manifest, "warning {w}");
    }
    fs::write(out.join(format!("{id}.manifest.txt")), &manifest)?;
    print!("{manifest}");
    Ok(())
}

#[derive(serde::Serialize)]
struct EvalRecord<'a> {
    image_id: &'a str,
    #[serde(flatten)]
    metrics: ImageMetrics,
}

fn find_candidate(dir: &Path, id: &str) -> Option<PathBuf> {
    ["png", "seg"].iter().map(|ext| dir.join(format!("{id}.{ext}"))).find(|p| p.is_file())
}

fn cmd_eval(candidate: &Path, refs: &Path, out: Option<&Path>) -> Result<()> {
    if !refs.is_dir() {
        bail!("reference directory {} does not exist", refs.display());
    }
    let mut rows: Vec<(String, ImageMetrics)> = Vec::new();
    if candidate.is_dir() {
        for id in dataset::list_images(refs)? {
            let Some(path) = find_candidate(candidate, &id) else {
                bail!("no candidate for image {id} in {}", candidate.display());
            };
            let group = dataset::load_group(refs, &id)?;
            let cand = dataset::read_segmentation(&path)?;
            rows.push((id, evaluate(&cand, group.members())?));
        }
    } else {
        let cand: LabelMap = dataset::read_segmentation(candidate)?;
        let id = candidate.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let group = dataset::load_group_dir(refs, &id)?;
        rows.push((id, evaluate(&cand, group.members())?));
    }
    if rows.is_empty() {
        bail!("no images found under {}", refs.display());
    }
    println!("{:<16} {:>8} {:>8} {:>8} {:>8} {:>8}", "image", "GCE", "VOI", "PRI", "BDE", "COV");
    for (id, m) in &rows {
        println!("{:<16} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}", id, m.gce, m.voi, m.pri, m.bde, m.covering);
    }
    let mean = ImageMetrics::mean(rows.iter().map(|(_, m)| m));
    println!(
        "{:<16} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
        "mean", mean.gce, mean.voi, mean.pri, mean.bde, mean.covering
    );
    if let Some(out) = out {
        let text: String = rows
            .iter()
            .map(|(id, m)| serde_json::to_string(&EvalRecord { image_id: id, metrics: *m }).expect("plain data") + "\n")
            .collect();
        fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

fn cmd_synth(out: &Path, images: usize, annotators: usize, seed: u64) -> Result<()> {
    for i in 0..images {
        let params = SceneParams { annotators, seed: seed.wrapping_add(i as u64), ..SceneParams::default() };
        let group = synth::annotator_group(&params)?;
        let dir = out.join(format!("synth{i:03}"));
        fs::create_dir_all(&dir)?;
        for (j, m) in group.members().iter().enumerate() {
            fs::write(dir.join(format!("annotator{j}.png")), io::write_label_image(m, LabelDepth::fitting(m)?)?)?;
        }
    }
    println!("wrote {images} synthetic groups to {}", out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Fuse { group, fusion, out, seg } => cmd_fuse(&group, &fusion.options(), &out, seg)?,
        Command::Eval { candidate, refs, out } => cmd_eval(&candidate, &refs, out.as_deref())?,
        Command::Bench { dataset, fusion, leave_one_out, jobs, images, out } => {
            let config = BenchConfig {
                dataset_root: dataset,
                output_dir: out,
                fusion: fusion.options(),
                leave_one_out,
                images,
                jobs,
            };
            let report = bench::run_bench(&config)?;
            print!("{}", report.summary_table());
            for f in &report.failures {
                eprintln!("failed {}: {}", f.image_id, f.error);
            }
            return Ok(report.failures.is_empty() && !report.records.is_empty());
        }
        Command::Human { dataset, jobs, images } => {
            let report = bench::human_baseline(&dataset, &images, jobs)?;
            let m = report.mean;
            println!("images {}", report.images.len());
            println!("{:>8} {:>8} {:>8} {:>8} {:>8}", "GCE", "VOI", "PRI", "BDE", "COV");
            println!("{:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}", m.gce, m.voi, m.pri, m.bde, m.covering);
        }
        Command::ImportBsds300 { human_dir, out } => {
            let n = dataset::import_bsds300(&human_dir, &out)?;
            println!("copied {n} segmentations into {}", out.display());
        }
        Command::Synth { out, images, annotators, seed } => cmd_synth(&out, images, annotators, seed)?,
    }
    Ok(true)
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
