//! Boundary maps, exact Euclidean distance transform and the Boundary
//! Displacement Error.

use crate::error::Result;
use crate::types::LabelMap;

/// Per-pixel boundary flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<bool>,
}

impl BoundaryMap {
    pub fn count(&self) -> usize {
        self.values.iter().filter(|&&b| b).count()
    }
}

/// Marks every pixel with a 4-neighbor of a different label. Both sides of
/// a label change are marked; the image border is not a boundary.
pub fn boundary_map(s: &LabelMap) -> BoundaryMap {
    let (w, h) = (s.width(), s.height());
    let l = s.labels();
    let mut values = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let p = y * w + x;
            if x + 1 < w && l[p] != l[p + 1] {
                values[p] = true;
                values[p + 1] = true;
            }
            if y + 1 < h && l[p] != l[p + w] {
                values[p] = true;
                values[p + w] = true;
            }
        }
    }
    BoundaryMap { width: w, height: h, values }
}

/// One pixel per label change: the pixel left of (or above) the change is
/// marked. Used by [`bde`] so that a boundary shifted by `t` pixels is
/// displaced by exactly `t`.
pub fn crack_boundary_map(s: &LabelMap) -> BoundaryMap {
    let (w, h) = (s.width(), s.height());
    let l = s.labels();
    let values = (0..w * h)
        .map(|p| {
            let (x, y) = (p % w, p / w);
            (x + 1 < w && l[p] != l[p + 1]) || (y + 1 < h && l[p] != l[p + w])
        })
        .collect();
    BoundaryMap { width: w, height: h, values }
}

const FAR: f64 = 1e20;

// Felzenszwalb & Huttenlocher lower envelope of parabolas, in place.
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    if n == 0 {
        return;
    }
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let fq = f[q] + (q * q) as f64;
        loop {
            let p = v[k];
            let s = (fq - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] {
                if k == 0 {
                    v[0] = q;
                    z[0] = f64::NEG_INFINITY;
                    z[1] = f64::INFINITY;
                    break;
                }
                k -= 1;
                continue;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
}

/// Exact squared Euclidean distance from every pixel to the nearest `true`
/// pixel. Pixels with no feature anywhere get a very large value.
pub fn squared_distance_transform(features: &BoundaryMap) -> Vec<f64> {
    let (w, h) = (features.width, features.height);
    let mut grid: Vec<f64> = features.values.iter().map(|&b| if b { 0.0 } else { FAR }).collect();
    let m = w.max(h);
    let mut f = vec![0.0; m];
    let mut out = vec![0.0; m];
    let mut v = vec![0usize; m];
    let mut z = vec![0.0; m + 1];
    for x in 0..w {
        for y in 0..h {
            f[y] = grid[y * w + x];
        }
        edt_1d(&f[..h], &mut out[..h], &mut v, &mut z);
        for y in 0..h {
            grid[y * w + x] = out[y];
        }
    }
    for y in 0..h {
        let row = &mut grid[y * w..(y + 1) * w];
        f[..w].copy_from_slice(row);
        edt_1d(&f[..w], &mut out[..w], &mut v, &mut z);
        row.copy_from_slice(&out[..w]);
    }
    grid
}

fn mean_displacement(from: &BoundaryMap, to_dt: &[f64]) -> f64 {
    let (sum, n) =
        from.values.iter().zip(to_dt).filter(|(&b, _)| b).fold((0.0, 0usize), |(s, n), (_, &d)| (s + d.sqrt(), n + 1));
    sum / n as f64
}

/// Boundary Displacement Error: the mean of the two directed average
/// distances from one segmentation's boundary pixels to the other's.
/// Zero when either side has no boundary.
pub fn bde(s1: &LabelMap, s2: &LabelMap) -> Result<f64> {
    s1.check_shape(s2)?;
    let b1 = crack_boundary_map(s1);
    let b2 = crack_boundary_map(s2);
    if b1.count() == 0 || b2.count() == 0 {
        return Ok(0.0);
    }
    let d12 = mean_displacement(&b1, &squared_distance_transform(&b2));
    let d21 = mean_displacement(&b2, &squared_distance_transform(&b1));
    Ok((d12 + d21) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Label;

    fn map(w: usize, labels: &[Label]) -> LabelMap {
        LabelMap::new(w, labels.len() / w, labels.to_vec()).unwrap()
    }

    #[test]
    fn boundary_map_examples() {
        assert_eq!(boundary_map(&map(3, &[5; 6])).count(), 0);
        assert_eq!(boundary_map(&map(4, &[1, 1, 2, 2])).values, vec![false, true, true, false]);
        assert_eq!(boundary_map(&map(2, &[1, 2, 2, 1])).values, vec![true; 4]);
    }

    #[test]
    fn distance_transform_matches_brute_force() {
        let w = 7;
        let h = 5;
        let feats: Vec<bool> = (0..w * h).map(|i| i % 11 == 3 || i == 20).collect();
        let dt = squared_distance_transform(&BoundaryMap { width: w, height: h, values: feats.clone() });
        for (p, &got) in dt.iter().enumerate() {
            let (px, py) = ((p % w) as i64, (p / w) as i64);
            let best = (0..w * h)
                .filter(|&q| feats[q])
                .map(|q| {
                    let (qx, qy) = ((q % w) as i64, (q / w) as i64);
                    ((px - qx).pow(2) + (py - qy).pow(2)) as f64
                })
                .fold(f64::INFINITY, f64::min);
            assert_eq!(got, best, "pixel {p}");
        }
    }

    #[test]
    fn bde_examples() {
        let s = map(3, &[1, 1, 2, 3, 3, 2]);
        assert_eq!(bde(&s, &s).unwrap(), 0.0);
        assert_eq!(bde(&map(2, &[1; 4]), &map(2, &[4; 4])).unwrap(), 0.0);
        assert_eq!(bde(&map(4, &[1, 1, 2, 2]), &map(4, &[1, 1, 1, 2])).unwrap(), 1.0);
    }

    #[test]
    fn bde_shifted_vertical_edge() {
        let edge = |c: usize| {
            let l: Vec<Label> = (0..10 * 6).map(|p| if p % 10 < c { 1 } else { 2 }).collect();
            map(10, &l)
        };
        for t in 1..4 {
            assert!((bde(&edge(3), &edge(3 + t)).unwrap() - t as f64).abs() < 1e-12);
        }
    }
}
