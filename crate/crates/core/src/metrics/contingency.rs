use std::collections::HashMap;

use crate::error::Result;
use crate::types::{Label, LabelMap};

/// Sparse contingency table between two segmentations of the same grid.
///
/// Regions are indexed densely in order of first occurrence; only non-zero
/// cells are stored, sorted by `(row, col)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    /// `(row, col, count)` with `count > 0`.
    pub cells: Vec<(usize, usize, u64)>,
    pub total: u64,
}

fn dense_index(labels: &[Label]) -> (Vec<usize>, usize) {
    let mut map: HashMap<Label, usize> = HashMap::new();
    let idx = labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect();
    (idx, map.len())
}

impl ContingencyTable {
    pub fn new(s1: &LabelMap, s2: &LabelMap) -> Result<Self> {
        s1.check_shape(s2)?;
        let (a, rows) = dense_index(s1.labels());
        let (b, cols) = dense_index(s2.labels());
        let mut row_sums = vec![0u64; rows];
        let mut col_sums = vec![0u64; cols];
        let mut map: HashMap<(usize, usize), u64> = HashMap::new();
        for (&i, &j) in a.iter().zip(&b) {
            row_sums[i] += 1;
            col_sums[j] += 1;
            *map.entry((i, j)).or_insert(0) += 1;
        }
        let mut cells: Vec<(usize, usize, u64)> = map.into_iter().map(|((i, j), c)| (i, j, c)).collect();
        cells.sort_unstable();
        Ok(ContingencyTable { row_sums, col_sums, cells, total: s1.len() as u64 })
    }

    pub fn rows(&self) -> usize {
        self.row_sums.len()
    }

    pub fn cols(&self) -> usize {
        self.col_sums.len()
    }

    pub fn transposed(&self) -> ContingencyTable {
        let mut cells: Vec<_> = self.cells.iter().map(|&(i, j, c)| (j, i, c)).collect();
        cells.sort_unstable();
        ContingencyTable { row_sums: self.col_sums.clone(), col_sums: self.row_sums.clone(), cells, total: self.total }
    }
}

/// Free-function form of [`ContingencyTable::new`].
pub fn contingency(s1: &LabelMap, s2: &LabelMap) -> Result<ContingencyTable> {
    ContingencyTable::new(s1, s2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(labels: &[Label]) -> LabelMap {
        LabelMap::new(labels.len(), 1, labels.to_vec()).unwrap()
    }

    #[test]
    fn identical_maps_give_permutation_table() {
        let s = row(&[4, 4, 1, 2, 2, 2]);
        let t = contingency(&s, &s).unwrap();
        assert_eq!(t.cells, vec![(0, 0, 2), (1, 1, 1), (2, 2, 3)]);
    }

    #[test]
    fn independent_halvings() {
        let t = contingency(&row(&[1, 1, 2, 2]), &row(&[1, 2, 1, 2])).unwrap();
        assert_eq!(t.cells, vec![(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)]);
        assert_eq!(t.total, 4);
    }

    #[test]
    fn single_region_column() {
        let t = contingency(&row(&[1, 2, 2, 3, 3, 3]), &row(&[7; 6])).unwrap();
        assert_eq!(t.cols(), 1);
        assert_eq!(t.cells, vec![(0, 0, 1), (1, 0, 2), (2, 0, 3)]);
        assert_eq!(t.row_sums, vec![1, 2, 3]);
        assert_eq!(t.col_sums, vec![6]);
    }

    #[test]
    fn shape_mismatch() {
        assert!(contingency(&row(&[1, 2]), &row(&[1, 2, 3])).is_err());
    }
}
