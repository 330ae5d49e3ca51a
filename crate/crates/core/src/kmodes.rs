//! Batch K-Modes clustering over multiplicity-weighted categorical vectors.
//!
//! Every tie is broken deterministically:
//! * assignment goes to the lowest cluster index among equally close modes,
//! * a per-attribute mode tie goes to the smallest value,
//! * initialization rankings and empty-cluster repair prefer the
//!   lexicographically smaller vector.

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{CategoricalVector, ClusterModel, FeatureVectorSet, Label};

/// How the initial modes are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// The `k` most numerous distinct vectors.
    VectorDensity,
    /// Cao et al.'s density-times-distance selection.
    AttributeDensity,
    /// `k` distinct vectors drawn uniformly with a seeded generator.
    Random { seed: u64 },
}

/// Simple-matching dissimilarity: the number of positions where the vectors
/// differ.
pub fn dissimilarity(x: &[Label], y: &[Label]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::ArityMismatch(x.len(), y.len()));
    }
    Ok(mismatches(x, y))
}

#[inline]
fn mismatches(x: &[Label], y: &[Label]) -> usize {
    x.iter().zip(y).filter(|(a, b)| a != b).count()
}

/// Weighted per-attribute mode of `vectors[members]`.
pub fn mode_of(vectors: &[CategoricalVector], counts: &[u64], members: &[usize]) -> Result<CategoricalVector> {
    let first = *members.first().ok_or(Error::EmptySubset)?;
    let arity = vectors[first].len();
    if let Some(&bad) = members.iter().find(|&&i| vectors[i].len() != arity) {
        return Err(Error::ArityMismatch(arity, vectors[bad].len()));
    }
    let mut tally: HashMap<Label, u64> = HashMap::new();
    let mode = (0..arity)
        .map(|j| {
            tally.clear();
            for &i in members {
                *tally.entry(vectors[i][j]).or_insert(0) += counts[i];
            }
            tally
                .iter()
                .max_by(|(va, wa), (vb, wb)| wa.cmp(wb).then_with(|| vb.cmp(va)))
                .map(|(&v, _)| v)
                .expect("non-empty subset")
        })
        .collect();
    Ok(mode)
}

fn check_k(set: &FeatureVectorSet, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::ZeroClusters);
    }
    if k > set.distinct() {
        return Err(Error::TooManyClusters { k, available: set.distinct() });
    }
    Ok(())
}

/// Initial modes: the `k` distinct vectors with the largest multiplicity.
pub fn init_vector_density(set: &FeatureVectorSet, k: usize) -> Result<Vec<CategoricalVector>> {
    check_k(set, k)?;
    let mut order: Vec<usize> = (0..set.distinct()).collect();
    order.sort_by(|&a, &b| set.counts[b].cmp(&set.counts[a]).then_with(|| set.vectors[a].cmp(&set.vectors[b])));
    Ok(order[..k].iter().map(|&i| set.vectors[i].clone()).collect())
}

/// Initial modes by attribute density (Cao, Liang & Bai 2009).
///
/// `density(x)` is the average over attributes of the fraction of pixels
/// sharing `x`'s value. The first mode maximizes density; each further mode
/// maximizes `density(x) * min_c d(x, c)` over the chosen modes `c`. Scores
/// are compared as exact integers (the common `1 / (n L)` factor dropped).
pub fn init_attribute_density(set: &FeatureVectorSet, k: usize) -> Result<Vec<CategoricalVector>> {
    check_k(set, k)?;
    let freq: Vec<HashMap<Label, u64>> = (0..set.arity)
        .map(|j| {
            let mut f = HashMap::new();
            for (v, &c) in set.vectors.iter().zip(&set.counts) {
                *f.entry(v[j]).or_insert(0) += c;
            }
            f
        })
        .collect();
    let density: Vec<u64> = set.vectors.iter().map(|v| v.iter().enumerate().map(|(j, a)| freq[j][a]).sum()).collect();

    let better = |score: &[u64], a: usize, b: usize| -> Ordering {
        score[a].cmp(&score[b]).then_with(|| set.vectors[b].cmp(&set.vectors[a]))
    };

    let n = set.distinct();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let first = (0..n).max_by(|&a, &b| better(&density, a, b)).expect("non-empty set");
    chosen.push(first);

    // min distance from every vector to the chosen modes so far
    let mut nearest: Vec<u64> = set.vectors.iter().map(|v| mismatches(v, &set.vectors[first]) as u64).collect();
    let mut score = vec![0u64; n];
    while chosen.len() < k {
        for i in 0..n {
            score[i] = density[i] * nearest[i];
        }
        let next = (0..n)
            .filter(|i| !chosen.contains(i))
            .max_by(|&a, &b| better(&score, a, b))
            .expect("k <= distinct vectors");
        chosen.push(next);
        for (d, v) in nearest.iter_mut().zip(&set.vectors) {
            *d = (*d).min(mismatches(v, &set.vectors[next]) as u64);
        }
    }
    Ok(chosen.into_iter().map(|i| set.vectors[i].clone()).collect())
}

/// Initial modes drawn uniformly without replacement.
pub fn init_random(set: &FeatureVectorSet, k: usize, seed: u64) -> Result<Vec<CategoricalVector>> {
    check_k(set, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, set.distinct(), k);
    Ok(picks.into_iter().map(|i| set.vectors[i].clone()).collect())
}

pub fn initial_modes(set: &FeatureVectorSet, k: usize, init: InitStrategy) -> Result<Vec<CategoricalVector>> {
    match init {
        InitStrategy::VectorDensity => init_vector_density(set, k),
        InitStrategy::AttributeDensity => init_attribute_density(set, k),
        InitStrategy::Random { seed } => init_random(set, k, seed),
    }
}

fn nearest_mode(v: &[Label], modes: &[CategoricalVector]) -> (usize, usize) {
    let mut best = (0, usize::MAX);
    for (c, m) in modes.iter().enumerate() {
        let d = mismatches(v, m);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn assign_step(set: &FeatureVectorSet, modes: &[CategoricalVector]) -> (Vec<usize>, u64) {
    let mut cost = 0u64;
    let assignment = set
        .vectors
        .iter()
        .zip(&set.counts)
        .map(|(v, &c)| {
            let (idx, d) = nearest_mode(v, modes);
            cost += c * d as u64;
            idx
        })
        .collect();
    (assignment, cost)
}

/// Recomputes every mode from its members. An empty cluster seizes the
/// distinct vector with the largest `count * d(vector, its mode)`; the seized
/// vector becomes the new mode and moves to that cluster.
fn update_step(set: &FeatureVectorSet, assignment: &mut [usize], modes: &mut [CategoricalVector]) {
    let k = modes.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &c) in assignment.iter().enumerate() {
        members[c].push(i);
    }
    for (c, m) in members.iter().enumerate() {
        if !m.is_empty() {
            modes[c] = mode_of(&set.vectors, &set.counts, m).expect("non-empty cluster");
        }
    }
    for c in 0..k {
        if !members[c].is_empty() {
            continue;
        }
        let candidate = (0..set.distinct())
            .map(|i| (i, set.counts[i] * mismatches(&set.vectors[i], &modes[assignment[i]]) as u64))
            .filter(|&(_, s)| s > 0)
            .max_by(|&(a, sa), &(b, sb)| sa.cmp(&sb).then_with(|| set.vectors[b].cmp(&set.vectors[a])));
        if let Some((i, _)) = candidate {
            let from = assignment[i];
            members[from].retain(|&x| x != i);
            members[c].push(i);
            assignment[i] = c;
            modes[c] = set.vectors[i].clone();
        }
    }
}

/// Weighted cost of `assignment` under `modes`.
pub fn weighted_cost(set: &FeatureVectorSet, modes: &[CategoricalVector], assignment: &[usize]) -> u64 {
    set.vectors.iter().zip(&set.counts).zip(assignment).map(|((v, &c), &a)| c * mismatches(v, &modes[a]) as u64).sum()
}

/// Runs batch K-Modes until the assignment reaches a fixed point or
/// `max_iterations` update rounds have run.
pub fn cluster(set: &FeatureVectorSet, k: usize, init: InitStrategy, max_iterations: usize) -> Result<ClusterModel> {
    let modes = initial_modes(set, k, init)?;
    cluster_from(set, modes, max_iterations)
}

/// Same as [`cluster`] but starting from explicit modes.
pub fn cluster_from(
    set: &FeatureVectorSet,
    mut modes: Vec<CategoricalVector>,
    max_iterations: usize,
) -> Result<ClusterModel> {
    if modes.is_empty() {
        return Err(Error::ZeroClusters);
    }
    if let Some(bad) = modes.iter().find(|m| m.len() != set.arity) {
        return Err(Error::ArityMismatch(set.arity, bad.len()));
    }
    let (mut assignment, cost) = assign_step(set, &modes);
    let mut cost_trace = vec![cost];
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        update_step(set, &mut assignment, &mut modes);
        let (next, cost) = assign_step(set, &modes);
        cost_trace.push(cost);
        if next == assignment {
            break;
        }
        assignment = next;
    }
    let cost = weighted_cost(set, &modes, &assignment);
    Ok(ClusterModel { modes, assignment, iterations, cost, cost_trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(entries: &[(&[Label], u64)]) -> FeatureVectorSet {
        let mut rows = Vec::new();
        for (v, c) in entries {
            for _ in 0..*c {
                rows.push(v.to_vec());
            }
        }
        FeatureVectorSet::from_rows(entries[0].0.len(), &rows).unwrap()
    }

    #[test]
    fn dissimilarity_examples() {
        assert_eq!(dissimilarity(&[1, 2, 3], &[1, 2, 3]).unwrap(), 0);
        assert_eq!(dissimilarity(&[1, 2, 3], &[1, 5, 3]).unwrap(), 1);
        assert_eq!(dissimilarity(&[1, 2], &[3, 4]).unwrap(), 2);
        assert!(matches!(dissimilarity(&[1], &[1, 2]), Err(Error::ArityMismatch(1, 2))));
    }

    #[test]
    fn mode_of_examples() {
        let v = vec![vec![1, 3], vec![2, 3]];
        assert_eq!(mode_of(&v, &[2, 1], &[0, 1]).unwrap(), vec![1, 3]);
        assert_eq!(mode_of(&v, &[1, 1], &[0, 1]).unwrap(), vec![1, 3]);
        assert_eq!(mode_of(&[vec![7, 9]], &[5], &[0]).unwrap(), vec![7, 9]);
        assert!(matches!(mode_of(&v, &[1, 1], &[]), Err(Error::EmptySubset)));
    }

    #[test]
    fn vector_density_examples() {
        let s = set(&[(&[1, 3], 3), (&[1, 4], 1)]);
        assert_eq!(init_vector_density(&s, 1).unwrap(), vec![vec![1, 3]]);
        let s = set(&[(&[5, 6], 1), (&[2, 4], 2), (&[1, 3], 2)]);
        assert_eq!(init_vector_density(&s, 2).unwrap(), vec![vec![1, 3], vec![2, 4]]);
        let mut all = init_vector_density(&s, 3).unwrap();
        all.sort();
        assert_eq!(all, s.vectors);
        assert!(matches!(init_vector_density(&s, 4), Err(Error::TooManyClusters { k: 4, available: 3 })));
    }

    #[test]
    fn attribute_density_examples() {
        let s = set(&[(&[1, 3], 3), (&[1, 4], 1)]);
        assert_eq!(init_attribute_density(&s, 1).unwrap(), vec![vec![1, 3]]);
        let s = set(&[(&[1, 3], 2), (&[2, 4], 2)]);
        assert_eq!(init_attribute_density(&s, 2).unwrap(), vec![vec![1, 3], vec![2, 4]]);
        let s = set(&[(&[4, 4], 7)]);
        assert_eq!(init_attribute_density(&s, 1).unwrap(), vec![vec![4, 4]]);
        assert!(init_attribute_density(&s, 2).is_err());
    }

    #[test]
    fn attribute_density_prefers_distant_dense_vectors() {
        // (1,3)x4 first; (1,4)x3 has density 7+3=10 but distance 1,
        // (2,5)x2 has density 2+2=4 at distance 2 -> scores 10 vs 8.
        let s = set(&[(&[1, 3], 4), (&[1, 4], 3), (&[2, 5], 2)]);
        assert_eq!(init_attribute_density(&s, 2).unwrap(), vec![vec![1, 3], vec![1, 4]]);
        // with more weight on (2,5) the distant candidate wins
        let s = set(&[(&[1, 3], 4), (&[1, 4], 1), (&[2, 5], 3)]);
        assert_eq!(init_attribute_density(&s, 2).unwrap(), vec![vec![1, 3], vec![2, 5]]);
    }

    #[test]
    fn random_init_is_seeded() {
        let s = set(&[(&[1], 1), (&[2], 1), (&[3], 1), (&[4], 1), (&[5], 1)]);
        let a = init_random(&s, 3, 42).unwrap();
        assert_eq!(a, init_random(&s, 3, 42).unwrap());
        let mut d = a.clone();
        d.sort();
        d.dedup();
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn cluster_manual_trace() {
        let s = set(&[(&[1, 3], 2), (&[2, 3], 1), (&[2, 4], 1)]);
        let m = cluster(&s, 2, InitStrategy::VectorDensity, 100).unwrap();
        assert_eq!(m.modes, vec![vec![1, 3], vec![2, 3]]);
        // vectors sorted: (1,3), (2,3), (2,4)
        assert_eq!(m.assignment, vec![0, 1, 1]);
        assert_eq!(m.cost, 1);
        assert_eq!(m.iterations, 1);
    }

    #[test]
    fn cluster_k_equals_distinct_is_exact() {
        let s = set(&[(&[1, 3], 2), (&[2, 3], 1), (&[2, 4], 5)]);
        let m = cluster(&s, 3, InitStrategy::AttributeDensity, 100).unwrap();
        assert_eq!(m.cost, 0);
        let mut a = m.assignment.clone();
        a.sort();
        assert_eq!(a, vec![0, 1, 2]);
    }

    #[test]
    fn cluster_single_cluster_uses_global_mode() {
        let s = set(&[(&[1, 3], 2), (&[2, 3], 1), (&[2, 4], 2)]);
        let m = cluster(&s, 1, InitStrategy::VectorDensity, 100).unwrap();
        // attr0: 1 -> 2, 2 -> 3; attr1: 3 -> 3, 4 -> 2
        assert_eq!(m.modes, vec![vec![2, 3]]);
        assert_eq!(m.cost, 4);
    }

    #[test]
    fn empty_cluster_is_repaired() {
        // Two identical initial modes force cluster 1 to start empty.
        let s = set(&[(&[1, 1], 3), (&[2, 2], 2), (&[3, 3], 1)]);
        let m = cluster_from(&s, vec![vec![1, 1], vec![1, 1]], 100).unwrap();
        assert_eq!(m.modes[1], vec![2, 2]);
        assert!(m.assignment.contains(&1));
        assert_eq!(m.cost, weighted_cost(&s, &m.modes, &m.assignment));
    }

    #[test]
    fn cluster_rejects_bad_k() {
        let s = set(&[(&[1], 1)]);
        assert!(matches!(cluster(&s, 0, InitStrategy::VectorDensity, 10), Err(Error::ZeroClusters)));
        assert!(matches!(cluster(&s, 2, InitStrategy::VectorDensity, 10), Err(Error::TooManyClusters { .. })));
    }
}
