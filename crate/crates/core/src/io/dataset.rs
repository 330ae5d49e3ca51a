//! Dataset directories: one subdirectory per image holding that image's
//! human segmentations (`.seg` or label `.png`), plus an optional
//! `confidences.txt` sidecar of `filename confidence` lines.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::types::{LabelMap, SegmentationGroup};

use super::{raster, seg};

pub const SIDECAR_NAME: &str = "confidences.txt";

fn is_member(path: &Path) -> bool {
    path.is_file() && matches!(path.extension().and_then(|e| e.to_str()), Some("seg" | "png"))
}

/// Reads one segmentation, picking the decoder from the extension.
pub fn read_segmentation(path: &Path) -> Result<LabelMap> {
    let bytes = fs::read(path).map_err(|e| Error::at(path, e.into()))?;
    let parsed = match path.extension().and_then(|e| e.to_str()) {
        Some("seg") => seg::parse_seg(&bytes),
        Some("png") => raster::read_label_image(&bytes),
        _ => Err(Error::UnsupportedRaster("expected a .seg or .png file".into())),
    };
    parsed.map_err(|e| Error::at(path, e))
}

/// Member files of a group directory in lexicographic filename order.
pub fn member_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::at(dir, e.into()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| is_member(p))
        .collect();
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

/// Parses a confidence sidecar into `(filename, confidence)` pairs.
pub fn parse_sidecar(text: &str, path: &Path) -> Result<Vec<(String, f64)>> {
    let err = |line: usize, message: String| Error::Sidecar {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, value) = line
            .rsplit_once(char::is_whitespace)
            .ok_or_else(|| err(no + 1, "expected `filename confidence`".into()))?;
        let p: f64 = value.trim().parse().map_err(|_| err(no + 1, format!("`{value}` is not a number")))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ConfidenceRange(p));
        }
        out.push((name.trim().to_string(), p));
    }
    Ok(out)
}

/// Loads a group directory directly.
pub fn load_group_dir(dir: &Path, image_id: &str) -> Result<SegmentationGroup> {
    let files = member_files(dir)?;
    if files.is_empty() {
        return Err(Error::NoMembers(dir.to_path_buf()));
    }
    let names: Vec<String> = files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    let mut confidences = vec![1.0; files.len()];
    let sidecar = dir.join(SIDECAR_NAME);
    if sidecar.is_file() {
        let text = fs::read_to_string(&sidecar).map_err(|e| Error::at(&sidecar, e.into()))?;
        for (name, p) in parse_sidecar(&text, &sidecar)? {
            let idx = names.iter().position(|n| *n == name).ok_or_else(|| Error::Sidecar {
                path: sidecar.clone(),
                message: format!("references missing member file `{name}`"),
            })?;
            confidences[idx] = p;
        }
    }
    let members = files.iter().map(|p| read_segmentation(p).map(|m| m.normalized())).collect::<Result<Vec<_>>>()?;
    SegmentationGroup::new(image_id, members, confidences).map_err(|e| Error::at(dir, e))
}

/// Loads `dataset_root/image_id`.
pub fn load_group(dataset_root: &Path, image_id: &str) -> Result<SegmentationGroup> {
    load_group_dir(&dataset_root.join(image_id), image_id)
}

/// Image ids (subdirectories with at least one member file), sorted.
pub fn list_images(dataset_root: &Path) -> Result<Vec<String>> {
    let mut ids = Vec::new();
    for entry in fs::read_dir(dataset_root).map_err(|e| Error::at(dataset_root, e.into()))? {
        let path = entry?.path();
        if path.is_dir() && !member_files(&path)?.is_empty() {
            ids.push(path.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    ids.sort();
    Ok(ids)
}

/// Regroups the BSDS300 distribution layout (`<human>/<user>/<image>.seg`)
/// into one directory per image (`<out>/<image>/<user>.seg`). Returns the
/// number of files copied.
pub fn import_bsds300(human_dir: &Path, out_root: &Path) -> Result<usize> {
    let mut copied = 0;
    let mut users: Vec<PathBuf> = fs::read_dir(human_dir)
        .map_err(|e| Error::at(human_dir, e.into()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    users.sort();
    for user in users {
        let uid = user.file_name().unwrap().to_string_lossy().into_owned();
        for file in member_files(&user)? {
            if file.extension().and_then(|e| e.to_str()) != Some("seg") {
                continue;
            }
            let iid = file.file_stem().unwrap().to_string_lossy().into_owned();
            let dir = out_root.join(&iid);
            fs::create_dir_all(&dir)?;
            fs::copy(&file, dir.join(format!("{uid}.seg"))).map_err(|e| Error::at(&file, e.into()))?;
            copied += 1;
        }
    }
    Ok(copied)
}
