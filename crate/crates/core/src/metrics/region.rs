//! Region-overlap metrics computed from contingency tables.

use crate::error::{Error, Result};
use crate::types::LabelMap;

use super::contingency::ContingencyTable;

fn refinement_error(t: &ContingencyTable) -> f64 {
    t.cells
        .iter()
        .map(|&(i, _, c)| {
            let r = t.row_sums[i];
            (c * (r - c)) as f64 / r as f64
        })
        .sum()
}

/// Global Consistency Error.
///
/// `(1/n) * min(sum_p E(S1, S2, p), sum_p E(S2, S1, p))` with the local
/// refinement error `E(A, B, p) = |R(A, p) \ R(B, p)| / |R(A, p)|`.
pub fn gce(s1: &LabelMap, s2: &LabelMap) -> Result<f64> {
    let t = ContingencyTable::new(s1, s2)?;
    Ok(gce_from_table(&t))
}

pub fn gce_from_table(t: &ContingencyTable) -> f64 {
    if t.total == 0 {
        return 0.0;
    }
    let fwd = refinement_error(t);
    let bwd = refinement_error(&t.transposed());
    fwd.min(bwd) / t.total as f64
}

/// Variation of information `H(S1) + H(S2) - 2 I(S1; S2)` in bits.
pub fn voi(s1: &LabelMap, s2: &LabelMap) -> Result<f64> {
    let t = ContingencyTable::new(s1, s2)?;
    Ok(voi_from_table(&t))
}

// sum of c * log2(c); 0 log 0 = 0
fn xlogx(counts: impl Iterator<Item = u64>) -> f64 {
    counts.filter(|&c| c > 0).map(|c| c as f64 * (c as f64).log2()).sum()
}

pub fn voi_from_table(t: &ContingencyTable) -> f64 {
    if t.total == 0 {
        return 0.0;
    }
    // VOI = (2 sum n_ij log n_ij - sum a_i log a_i - sum b_j log b_j) / -n
    let n = t.total as f64;
    let joint = xlogx(t.cells.iter().map(|c| c.2));
    let rows = xlogx(t.row_sums.iter().copied());
    let cols = xlogx(t.col_sums.iter().copied());
    ((rows + cols - 2.0 * joint) / n).max(0.0)
}

fn pairs(c: u64) -> u128 {
    let c = c as u128;
    c * c.saturating_sub(1) / 2
}

/// Exact Probabilistic Rand Index as `(agreeing pair count summed over refs,
/// total pair count times ref count)`.
pub fn pri_counts(s: &LabelMap, refs: &[LabelMap]) -> Result<(u128, u128)> {
    if refs.is_empty() {
        return Err(Error::EmptyReferences);
    }
    let mut agree = 0u128;
    let total = pairs(s.len() as u64);
    for r in refs {
        let t = ContingencyTable::new(s, r)?;
        let both: u128 = t.cells.iter().map(|c| pairs(c.2)).sum();
        let in_s: u128 = t.row_sums.iter().map(|&c| pairs(c)).sum();
        let in_r: u128 = t.col_sums.iter().map(|&c| pairs(c)).sum();
        // apart in both = total - in_s - in_r + both
        agree += total + 2 * both - in_s - in_r;
    }
    Ok((agree, total * refs.len() as u128))
}

/// Probabilistic Rand Index of `s` against the reference set.
pub fn pri(s: &LabelMap, refs: &[LabelMap]) -> Result<f64> {
    let (agree, total) = pri_counts(s, refs)?;
    if total == 0 {
        return Ok(1.0);
    }
    Ok(agree as f64 / total as f64)
}

/// Segmentation covering of each reference by `s`, averaged over refs.
pub fn covering(s: &LabelMap, refs: &[LabelMap]) -> Result<f64> {
    if refs.is_empty() {
        return Err(Error::EmptyReferences);
    }
    let mut acc = 0.0;
    for g in refs {
        // rows: regions of g, cols: regions of s
        let t = ContingencyTable::new(g, s)?;
        let mut best = vec![0.0f64; t.rows()];
        for &(i, j, c) in &t.cells {
            let union = t.row_sums[i] + t.col_sums[j] - c;
            let iou = c as f64 / union as f64;
            if iou > best[i] {
                best[i] = iou;
            }
        }
        let covered: f64 = t.row_sums.iter().zip(&best).map(|(&size, &b)| size as f64 * b).sum();
        acc += covered / t.total.max(1) as f64;
    }
    Ok(acc / refs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Label;

    fn row(labels: &[Label]) -> LabelMap {
        LabelMap::new(labels.len(), 1, labels.to_vec()).unwrap()
    }

    #[test]
    fn gce_examples() {
        let s = row(&[1, 1, 2, 3, 3]);
        assert_eq!(gce(&s, &s).unwrap(), 0.0);
        assert_eq!(gce(&row(&[1, 1, 2, 2]), &row(&[1, 1, 1, 2])).unwrap(), 0.25);
        // strict refinement
        assert_eq!(gce(&row(&[1, 1, 1, 1, 2, 2]), &row(&[1, 1, 3, 3, 2, 2])).unwrap(), 0.0);
    }

    #[test]
    fn voi_examples() {
        let s = row(&[1, 2, 2, 3]);
        assert_eq!(voi(&s, &s).unwrap(), 0.0);
        assert!((voi(&row(&[1, 1, 2, 2]), &row(&[1, 2, 1, 2])).unwrap() - 2.0).abs() < 1e-12);
        // one split of a two-pixel region: H(S2|S1) = 0.5 bit
        assert!((voi(&row(&[1, 1, 2, 2]), &row(&[1, 1, 2, 3])).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pri_examples() {
        let s = row(&[1, 1, 2, 2]);
        assert_eq!(pri(&s, std::slice::from_ref(&s)).unwrap(), 1.0);
        assert_eq!(pri_counts(&s, &[row(&[1, 1, 1, 1])]).unwrap(), (2, 6));
        assert!(matches!(pri(&s, &[]), Err(Error::EmptyReferences)));
    }

    #[test]
    fn covering_examples() {
        let s = row(&[1, 1, 2, 2]);
        assert_eq!(covering(&s, std::slice::from_ref(&s)).unwrap(), 1.0);
        assert_eq!(covering(&row(&[1, 1, 1, 1]), std::slice::from_ref(&s)).unwrap(), 0.5);
        assert_eq!(covering(&row(&[7, 7, 3, 3]), &[row(&[2, 2, 9, 9])]).unwrap(), 1.0);
        assert!(covering(&s, &[]).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = row(&[1, 2]);
        let b = row(&[1, 2, 3]);
        assert!(gce(&a, &b).is_err());
        assert!(voi(&a, &b).is_err());
        assert!(pri(&a, std::slice::from_ref(&b)).is_err());
        assert!(covering(&a, &[b]).is_err());
    }
}
