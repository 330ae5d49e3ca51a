#![allow(dead_code)]

//! Test-only oracles, written independently of the library code paths.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segfuse_core::{Label, LabelMap};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random map with labels drawn from `1..=max_label`.
pub fn random_map(rng: &mut ChaCha8Rng, width: usize, height: usize, max_label: Label) -> LabelMap {
    let labels = (0..width * height).map(|_| rng.random_range(1..=max_label)).collect();
    LabelMap::new(width, height, labels).unwrap()
}

/// Random map made of a few axis-aligned blocks, closer to a real segmentation.
pub fn random_blocky_map(rng: &mut ChaCha8Rng, width: usize, height: usize, max_label: Label) -> LabelMap {
    let bx = rng.random_range(1..=width.max(1));
    let by = rng.random_range(1..=height.max(1));
    let cells: Vec<Label> =
        (0..(width / bx + 1) * (height / by + 1)).map(|_| rng.random_range(1..=max_label)).collect();
    let stride = width / bx + 1;
    let labels = (0..width * height).map(|p| cells[(p / width) / by * stride + (p % width) / bx]).collect();
    LabelMap::new(width, height, labels).unwrap()
}

/// PRI by enumerating every pixel pair, as an exact rational.
pub fn brute_pri(s: &LabelMap, refs: &[LabelMap]) -> Ratio<u128> {
    let n = s.len();
    let mut sum = Ratio::from_integer(0u128);
    let mut pairs = 0u128;
    for i in 0..n {
        for j in i + 1..n {
            pairs += 1;
            let c = s.labels()[i] == s.labels()[j];
            let together = refs.iter().filter(|r| r.labels()[i] == r.labels()[j]).count() as u128;
            let p = Ratio::new(together, refs.len() as u128);
            sum += if c { p } else { Ratio::from_integer(1) - p };
        }
    }
    if pairs == 0 {
        return Ratio::from_integer(1);
    }
    sum / Ratio::from_integer(pairs)
}

fn d(a: &[Label], b: &[Label]) -> usize {
    (0..a.len()).filter(|&j| a[j] != b[j]).count()
}

#[derive(Clone, Copy)]
pub enum OracleInit {
    VectorDensity,
    AttributeDensity,
}

/// K-Modes over the expanded per-pixel multiset (every pixel weight 1),
/// with the same deterministic tie rules stated on vector content.
pub struct PixelKModes {
    pub assignment: Vec<usize>,
    pub modes: Vec<Vec<Label>>,
    pub cost: u64,
}

fn count_equal(pixels: &[Vec<Label>], v: &[Label]) -> u64 {
    pixels.iter().filter(|p| p.as_slice() == v).count() as u64
}

fn distinct_contents(pixels: &[Vec<Label>]) -> Vec<Vec<Label>> {
    let mut out: Vec<Vec<Label>> = Vec::new();
    for p in pixels {
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    out.sort();
    out
}

fn oracle_init(pixels: &[Vec<Label>], k: usize, init: OracleInit) -> Vec<Vec<Label>> {
    let contents = distinct_contents(pixels);
    match init {
        OracleInit::VectorDensity => {
            let mut ranked: Vec<(u64, Vec<Label>)> =
                contents.iter().map(|c| (count_equal(pixels, c), c.clone())).collect();
            ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            ranked.into_iter().take(k).map(|r| r.1).collect()
        }
        OracleInit::AttributeDensity => {
            let dens = |x: &[Label]| -> u64 {
                (0..x.len()).map(|j| pixels.iter().filter(|p| p[j] == x[j]).count() as u64).sum()
            };
            let mut chosen: Vec<Vec<Label>> = Vec::new();
            while chosen.len() < k {
                let mut best: Option<(u64, Vec<Label>)> = None;
                for c in &contents {
                    if chosen.contains(c) {
                        continue;
                    }
                    let score = if chosen.is_empty() {
                        dens(c)
                    } else {
                        dens(c) * chosen.iter().map(|m| d(c, m) as u64).min().unwrap()
                    };
                    // strictly greater keeps the lexicographically first on ties
                    if best.as_ref().is_none_or(|b| score > b.0) {
                        best = Some((score, c.clone()));
                    }
                }
                chosen.push(best.unwrap().1);
            }
            chosen
        }
    }
}

fn oracle_mode(pixels: &[Vec<Label>], members: &[usize]) -> Vec<Label> {
    let arity = pixels[members[0]].len();
    (0..arity)
        .map(|j| {
            let mut values: Vec<Label> = members.iter().map(|&i| pixels[i][j]).collect();
            values.sort();
            values.dedup();
            // ascending values, strict > keeps the smallest on ties
            let mut best = (0usize, values[0]);
            for v in values {
                let c = members.iter().filter(|&&i| pixels[i][j] == v).count();
                if c > best.0 {
                    best = (c, v);
                }
            }
            best.1
        })
        .collect()
}

fn oracle_assign(pixels: &[Vec<Label>], modes: &[Vec<Label>]) -> Vec<usize> {
    pixels
        .iter()
        .map(|p| {
            let mut best = 0;
            for c in 1..modes.len() {
                if d(p, &modes[c]) < d(p, &modes[best]) {
                    best = c;
                }
            }
            best
        })
        .collect()
}

pub fn pixel_kmodes(pixels: &[Vec<Label>], k: usize, init: OracleInit, max_iterations: usize) -> PixelKModes {
    let mut modes = oracle_init(pixels, k, init);
    let mut assignment = oracle_assign(pixels, &modes);
    let mut it = 0;
    while it < max_iterations {
        it += 1;
        for (c, mode) in modes.iter_mut().enumerate() {
            let members: Vec<usize> = (0..pixels.len()).filter(|&i| assignment[i] == c).collect();
            if !members.is_empty() {
                *mode = oracle_mode(pixels, &members);
            }
        }
        for c in 0..k {
            if assignment.contains(&c) {
                continue;
            }
            let contents = distinct_contents(pixels);
            let mut best: Option<(u64, Vec<Label>)> = None;
            for content in &contents {
                let score: u64 = (0..pixels.len())
                    .filter(|&i| pixels[i] == *content)
                    .map(|i| d(&pixels[i], &modes[assignment[i]]) as u64)
                    .sum();
                if score > 0 && best.as_ref().is_none_or(|b| score > b.0) {
                    best = Some((score, content.clone()));
                }
            }
            if let Some((_, content)) = best {
                for i in 0..pixels.len() {
                    if pixels[i] == content {
                        assignment[i] = c;
                    }
                }
                modes[c] = content;
            }
        }
        let next = oracle_assign(pixels, &modes);
        if next == assignment {
            break;
        }
        assignment = next;
    }
    let cost = pixels.iter().zip(&assignment).map(|(p, &a)| d(p, &modes[a]) as u64).sum();
    PixelKModes { assignment, modes, cost }
}
