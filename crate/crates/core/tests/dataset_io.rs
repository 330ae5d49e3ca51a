mod common;

use std::fs;
use std::path::Path;

use proptest::prelude::*;
use segfuse_core::bench::{run_bench, BenchConfig};
use segfuse_core::io::{self, dataset, LabelDepth};
use segfuse_core::synth::{annotator_group, SceneParams};
use segfuse_core::{Error, InitMethod, LabelMap};

fn write_seg(dir: &Path, name: &str, map: &LabelMap) {
    fs::write(dir.join(name), io::write_seg(map, &[]).unwrap()).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn seg_round_trip_is_partition_identity(m in (1usize..=12, 1usize..=12).prop_flat_map(|(w, h)| {
        prop::collection::vec(1u32..=9, w * h).prop_map(move |v| LabelMap::new(w, h, v).unwrap())
    })) {
        let bytes = io::write_seg(&m, &[]).unwrap();
        let back = io::parse_seg(&bytes).unwrap();
        prop_assert!(back.partition_eq(&m));
        // writing the parsed map again reproduces the same file
        prop_assert_eq!(io::write_seg(&back, &[]).unwrap(), bytes);
    }

    #[test]
    fn png_round_trip(m in (1usize..=12, 1usize..=12).prop_flat_map(|(w, h)| {
        prop::collection::vec(0u32..=1000, w * h).prop_map(move |v| LabelMap::new(w, h, v).unwrap())
    })) {
        let depth = LabelDepth::fitting(&m).unwrap();
        prop_assert_eq!(io::read_label_image(&io::write_label_image(&m, depth).unwrap()).unwrap(), m);
    }
}

#[test]
fn group_without_sidecar_defaults_to_full_confidence() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("img");
    fs::create_dir(&dir).unwrap();
    let mut rng = common::rng(1);
    // created out of order on purpose
    for name in ["e.seg", "b.seg", "d.seg", "a.seg", "c.seg"] {
        write_seg(&dir, name, &common::random_blocky_map(&mut rng, 6, 4, 3));
    }
    let g = dataset::load_group(tmp.path(), "img").unwrap();
    assert_eq!(g.len(), 5);
    assert_eq!(g.confidences(), &[1.0; 5]);
    let expected = io::parse_seg(&fs::read(dir.join("a.seg")).unwrap()).unwrap().normalized();
    assert_eq!(g.members()[0], expected);
}

#[test]
fn sidecar_sets_confidence() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("img");
    fs::create_dir(&dir).unwrap();
    let m = LabelMap::new(2, 2, vec![1, 1, 2, 2]).unwrap();
    write_seg(&dir, "u1.seg", &m);
    write_seg(&dir, "u2.seg", &m);
    fs::write(dir.join("u3.png"), io::write_label_image(&m, LabelDepth::Eight).unwrap()).unwrap();
    fs::write(dir.join(dataset::SIDECAR_NAME), "# expert scores\nu2.seg 0.5\n").unwrap();
    let g = dataset::load_group(tmp.path(), "img").unwrap();
    assert_eq!(g.confidences(), &[1.0, 0.5, 1.0]);

    fs::write(dir.join(dataset::SIDECAR_NAME), "u9.seg 0.5\n").unwrap();
    assert!(matches!(dataset::load_group(tmp.path(), "img"), Err(Error::Sidecar { .. })));
    fs::write(dir.join(dataset::SIDECAR_NAME), "u1.seg 1.2\n").unwrap();
    assert!(matches!(dataset::load_group(tmp.path(), "img"), Err(Error::ConfidenceRange(_))));
}

#[test]
fn mixed_orientation_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("img");
    fs::create_dir(&dir).unwrap();
    write_seg(&dir, "a.seg", &LabelMap::filled(481, 321, 1));
    write_seg(&dir, "b.seg", &LabelMap::filled(321, 481, 1));
    let err = dataset::load_group(tmp.path(), "img").unwrap_err();
    assert!(matches!(err, Error::File { ref source, .. } if matches!(**source, Error::DimensionMismatch(..))), "{err}");
}

#[test]
fn empty_directory_has_no_members() {
    let tmp = tempfile::tempdir().unwrap();
    fs::create_dir(tmp.path().join("img")).unwrap();
    assert!(matches!(dataset::load_group(tmp.path(), "img"), Err(Error::NoMembers(_))));
    assert!(dataset::list_images(tmp.path()).unwrap().is_empty());
}

#[test]
fn bsds300_layout_import() {
    let tmp = tempfile::tempdir().unwrap();
    let human = tmp.path().join("human");
    let m = LabelMap::new(3, 1, vec![1, 2, 2]).unwrap();
    for user in ["1102", "1105"] {
        let d = human.join(user);
        fs::create_dir_all(&d).unwrap();
        write_seg(&d, "2092.seg", &m);
        write_seg(&d, "8049.seg", &m);
    }
    let out = tmp.path().join("groups");
    assert_eq!(dataset::import_bsds300(&human, &out).unwrap(), 4);
    assert_eq!(dataset::list_images(&out).unwrap(), vec!["2092", "8049"]);
    let g = dataset::load_group(&out, "2092").unwrap();
    assert_eq!(g.len(), 2);
}

fn synthetic_dataset(root: &Path, images: u64) {
    for seed in 0..images {
        let g = annotator_group(&SceneParams { seed, width: 48, height: 32, ..Default::default() }).unwrap();
        let dir = root.join(format!("img{seed:02}"));
        fs::create_dir_all(&dir).unwrap();
        for (i, m) in g.members().iter().enumerate() {
            write_seg(&dir, &format!("u{i}.seg"), m);
        }
    }
}

#[test]
fn bench_is_deterministic_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    synthetic_dataset(tmp.path(), 6);
    let mut cfg = BenchConfig::new(tmp.path());
    let one = run_bench(&cfg).unwrap();
    cfg.jobs = 4;
    let four = run_bench(&cfg).unwrap();
    let strip = |r: &segfuse_core::bench::BenchReport| {
        r.records
            .iter()
            .map(|x| {
                let mut x = x.clone();
                x.elapsed_ms = 0.0;
                x
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&one), strip(&four));
    assert_eq!(one.mean, four.mean);
    assert_eq!(one.records.len(), 6);
    assert!(one.failures.is_empty());
}

#[test]
fn bench_writes_outputs_and_records_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synthetic_dataset(&data, 3);
    let bad = data.join("zz_broken");
    fs::create_dir_all(&bad).unwrap();
    fs::write(bad.join("u0.seg"), "width 2\nheight 2\nsegments 1\ndata\n").unwrap();

    let out = tmp.path().join("out");
    let mut cfg = BenchConfig::new(&data);
    cfg.output_dir = Some(out.clone());
    cfg.fusion.init_method = InitMethod::AttributeDensity;
    let report = run_bench(&cfg).unwrap();
    assert_eq!(report.records.len(), 3);
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].image_id, "zz_broken");
    for f in ["records.jsonl", "summary.txt", "region_histogram.txt", "failures.jsonl", "consensus/img00.png"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let lines = fs::read_to_string(out.join("records.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 3);
    let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(first["image_id"], "img00");
    for key in ["gce", "voi", "pri", "bde", "covering", "k_requested", "consensus_regions"] {
        assert!(first.get(key).is_some(), "{key}");
    }
}

#[test]
fn leave_one_out_protocol() {
    let tmp = tempfile::tempdir().unwrap();
    synthetic_dataset(tmp.path(), 2);
    let mut cfg = BenchConfig::new(tmp.path());
    cfg.leave_one_out = true;
    let loo = run_bench(&cfg).unwrap();
    cfg.leave_one_out = false;
    let full = run_bench(&cfg).unwrap();
    assert_eq!(loo.records.len(), 2);
    // scoring against references that were not fused in is harder
    assert!(loo.mean.pri <= full.mean.pri + 1e-9);
}
