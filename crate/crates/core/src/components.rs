//! Connected components of the `r`-ball graph, and label comparisons.
//!
//! This is the exact combinatorial answer the spectral pipeline must agree
//! with. It is deliberately computed with a disjoint-set forest, independently
//! of the linear algebra.

use petgraph::unionfind::UnionFind;

use crate::geometry::DistanceMatrix;

/// Component labels of the graph joining `i` and `j` when
/// `0 < dist[i][j] <= r`. Component ids are assigned in order of each
/// component's smallest member, so point 0 is always in component 0.
pub fn connected_components_oracle(dist: &DistanceMatrix, r: f64) -> Vec<usize> {
    let n = dist.len();
    let mut uf = UnionFind::<usize>::new(n);
    for i in 0..n {
        for j in 0..i {
            let d = dist.get(i, j);
            if d > 0.0 && d <= r {
                uf.union(i, j);
            }
        }
    }
    canonical_labels(&uf.into_labeling())
}

/// Renumbers arbitrary labels so that ids appear in order of first occurrence.
pub fn canonical_labels<T: Eq + std::hash::Hash + Copy>(labels: &[T]) -> Vec<usize> {
    let mut ids = std::collections::HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(*l).or_insert(next)
        })
        .collect()
}

/// Number of distinct labels.
pub fn count_classes(labels: &[usize]) -> usize {
    canonical_labels(labels)
        .into_iter()
        .max()
        .map_or(0, |m| m + 1)
}

/// True when the two labelings induce the same partition.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && canonical_labels(a) == canonical_labels(b)
}

/// Fraction of points on which `predicted` agrees with `truth` under the best
/// one-to-one matching of label classes.
///
/// Exhaustive over matchings for up to eight classes, greedy beyond that.
pub fn best_match_accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(
        predicted.len(),
        truth.len(),
        "label vectors differ in length"
    );
    if predicted.is_empty() {
        return 1.0;
    }
    let p = canonical_labels(predicted);
    let t = canonical_labels(truth);
    let kp = p.iter().max().unwrap() + 1;
    let kt = t.iter().max().unwrap() + 1;
    let m = kp.max(kt);
    let mut confusion = vec![vec![0usize; m]; m];
    for (&a, &b) in p.iter().zip(&t) {
        confusion[a][b] += 1;
    }
    let matched = if m <= 8 {
        let mut perm: Vec<usize> = (0..m).collect();
        let mut best = 0;
        permute(&mut perm, 0, &confusion, &mut best);
        best
    } else {
        greedy_matching(&confusion)
    };
    matched as f64 / predicted.len() as f64
}

fn permute(perm: &mut [usize], k: usize, confusion: &[Vec<usize>], best: &mut usize) {
    if k == perm.len() {
        let score = perm.iter().enumerate().map(|(i, &j)| confusion[i][j]).sum();
        *best = (*best).max(score);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, confusion, best);
        perm.swap(k, i);
    }
}

fn greedy_matching(confusion: &[Vec<usize>]) -> usize {
    let m = confusion.len();
    let mut cells: Vec<(usize, usize, usize)> = (0..m)
        .flat_map(|i| (0..m).map(move |j| (confusion[i][j], i, j)))
        .collect();
    cells.sort_unstable_by(|a, b| b.cmp(a));
    let (mut used_row, mut used_col) = (vec![false; m], vec![false; m]);
    let mut total = 0;
    for (count, i, j) in cells {
        if !used_row[i] && !used_col[j] {
            used_row[i] = true;
            used_col[j] = true;
            total += count;
        }
    }
    total
}
