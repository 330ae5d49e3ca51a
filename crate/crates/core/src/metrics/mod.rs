//! Region benchmarks: GCE, VOI, PRI, BDE and segmentation covering.
//!
//! Partition metrics run on contingency tables, never on pixel pairs.
//! Background (label 0) is treated as an ordinary region here.

mod boundary;
mod contingency;
mod region;

pub use boundary::{bde, boundary_map, crack_boundary_map, squared_distance_transform, BoundaryMap};
pub use contingency::{contingency, ContingencyTable};
pub use region::{covering, gce, gce_from_table, pri, pri_counts, voi, voi_from_table};

use crate::error::{Error, Result};
use crate::types::{ImageMetrics, LabelMap};

/// Scores `candidate` against every reference. GCE, VOI and BDE are
/// averaged over the references; PRI and covering use the whole set.
pub fn evaluate(candidate: &LabelMap, refs: &[LabelMap]) -> Result<ImageMetrics> {
    if refs.is_empty() {
        return Err(Error::EmptyReferences);
    }
    let n = refs.len() as f64;
    let mut out = ImageMetrics::default();
    for r in refs {
        let t = ContingencyTable::new(candidate, r)?;
        out.gce += gce_from_table(&t);
        out.voi += voi_from_table(&t);
        out.bde += bde(candidate, r)?;
    }
    out.gce /= n;
    out.voi /= n;
    out.bde /= n;
    out.pri = pri(candidate, refs)?;
    out.covering = covering(candidate, refs)?;
    Ok(out)
}

/// Mean over members of each member scored against all the others: the
/// human-consistency baseline of a group.
pub fn human_consistency(members: &[LabelMap]) -> Result<ImageMetrics> {
    if members.len() < 2 {
        return Err(Error::LeaveOneOutTooFew(members.len()));
    }
    let scores = (0..members.len())
        .map(|i| {
            let others: Vec<LabelMap> =
                members.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, m)| m.clone()).collect();
            evaluate(&members[i], &others)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ImageMetrics::mean(&scores))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_identity() {
        let s = LabelMap::new(3, 2, vec![1, 1, 2, 3, 3, 2]).unwrap();
        let m = evaluate(&s, std::slice::from_ref(&s)).unwrap();
        assert_eq!(m, ImageMetrics { gce: 0.0, voi: 0.0, pri: 1.0, bde: 0.0, covering: 1.0 });
    }

    #[test]
    fn human_consistency_needs_two() {
        let s = LabelMap::filled(2, 2, 1);
        assert!(human_consistency(std::slice::from_ref(&s)).is_err());
        assert_eq!(human_consistency(&[s.clone(), s]).unwrap().pri, 1.0);
    }
}
