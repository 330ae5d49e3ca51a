//! BSDS `.seg` run-length segmentation files.
//!
//! ```text
//! format ascii cr
//! width 481
//! height 321
//! segments 12
//! data
//! 0 0 0 480
//! ...
//! ```
//!
//! Each data line `s r c1 c2` paints the 0-based label `s` on row `r`,
//! columns `c1..=c2`. Labels are shifted by +1 on read (0 is reserved for
//! background) and by -1 on write.

use std::fmt::Write as _;

use crate::error::{Error, Result, SegParseError};
use crate::types::{Label, LabelMap, BACKGROUND};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegFileHeader {
    pub format: String,
    pub width: usize,
    pub height: usize,
    pub segments: usize,
    /// Every other header entry, in file order.
    pub extras: Vec<(String, String)>,
}

impl SegFileHeader {
    pub fn extra(&self, key: &str) -> Option<&str> {
        self.extras.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn positive(value: Option<&String>, key: &'static str, line: usize) -> Result<usize, SegParseError> {
    value
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .ok_or(SegParseError::MissingHeader { key, line })
}

/// Parses a `.seg` file into its header and label map.
pub fn parse_seg_file(bytes: &[u8]) -> Result<(SegFileHeader, LabelMap), SegParseError> {
    let text = String::from_utf8_lossy(bytes);
    let mut lines = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).enumerate().map(|(i, l)| (i + 1, l));

    let mut fields: Vec<(String, String)> = Vec::new();
    let mut data_line = None;
    let mut last_line = 0;
    for (no, line) in lines.by_ref() {
        last_line = no;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "data" {
            data_line = Some(no);
            break;
        }
        let mut parts = line.splitn(2, char::is_whitespace);
        let key = parts.next().unwrap_or_default();
        if !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(SegParseError::BadHeaderLine { line: no });
        }
        fields.push((key.to_string(), parts.next().unwrap_or("").trim().to_string()));
    }

    let header_end = data_line.unwrap_or(last_line);
    let get = |k: &str| fields.iter().find(|(key, _)| key == k).map(|(_, v)| v);
    let width = positive(get("width"), "width", header_end)?;
    let height = positive(get("height"), "height", header_end)?;
    let segments = positive(get("segments"), "segments", header_end)?;
    let format = get("format").cloned().unwrap_or_else(|| "ascii cr".to_string());
    let extras = fields
        .iter()
        .filter(|(k, _)| !matches!(k.as_str(), "format" | "width" | "height" | "segments"))
        .cloned()
        .collect();

    let mut labels: Vec<Option<Label>> = vec![None; width * height];
    for (no, line) in lines {
        last_line = no;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| SegParseError::BadRun { line: no })?;
        let &[s, r, c1, c2] = nums.as_slice() else {
            return Err(SegParseError::BadRun { line: no });
        };
        if c1 > c2 {
            return Err(SegParseError::BadRun { line: no });
        }
        if r >= height || c2 >= width {
            return Err(SegParseError::OutOfBounds { line: no, width, height });
        }
        let label = Label::try_from(s).ok().and_then(|s| s.checked_add(1)).ok_or(SegParseError::BadRun { line: no })?;
        for c in c1..=c2 {
            let cell = &mut labels[r * width + c];
            if cell.is_some() {
                return Err(SegParseError::Overlap { line: no, row: r, col: c });
            }
            *cell = Some(label);
        }
    }

    let missing = labels.iter().filter(|l| l.is_none()).count();
    if missing > 0 {
        let first = labels.iter().position(Option::is_none).expect("missing > 0");
        return Err(SegParseError::Uncovered {
            line: last_line,
            count: missing,
            row: first / width,
            col: first % width,
        });
    }
    let map = LabelMap::new(width, height, labels.into_iter().map(|l| l.expect("covered")).collect())
        .expect("buffer sized from header");
    Ok((SegFileHeader { format, width, height, segments, extras }, map))
}

/// Parses a `.seg` file into a label map (labels `>= 1`).
pub fn parse_seg(bytes: &[u8]) -> Result<LabelMap> {
    Ok(parse_seg_file(bytes)?.1)
}

/// Serializes `map` as a `.seg` file with maximal row-major runs. Header
/// extras (date, image, user, flags) are written back in BSDS order.
pub fn write_seg(map: &LabelMap, extras: &[(String, String)]) -> Result<Vec<u8>> {
    if map.has_background() {
        return Err(Error::BackgroundInSeg);
    }
    let map = map.normalized();
    let (w, h) = (map.width(), map.height());
    let mut out = String::new();
    let lead = ["date", "image", "user"];
    out.push_str("format ascii cr\n");
    for (k, v) in extras.iter().filter(|(k, _)| lead.contains(&k.as_str())) {
        let _ = writeln!(out, "{k} {v}");
    }
    let _ = writeln!(out, "width {w}\nheight {h}\nsegments {}", map.region_count());
    for (k, v) in extras.iter().filter(|(k, _)| {
        !lead.contains(&k.as_str()) && !matches!(k.as_str(), "format" | "width" | "height" | "segments")
    }) {
        let _ = writeln!(out, "{k} {v}");
    }
    out.push_str("data\n");
    for r in 0..h {
        let row = &map.labels()[r * w..(r + 1) * w];
        let mut start = 0;
        for c in 1..=w {
            if c == w || row[c] != row[start] {
                debug_assert_ne!(row[start], BACKGROUND);
                let _ = writeln!(out, "{} {} {} {}", row[start] - 1, r, start, c - 1);
                start = c;
            }
        }
    }
    Ok(out.into_bytes())
}
