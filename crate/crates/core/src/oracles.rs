//! Brute-force references.
//!
//! Everything here is deliberately written from the literal definitions —
//! quadratic distance counts, factorial median enumeration, subset dynamic
//! programming — and is used by the test suites to pin down the fast paths.
//! Budgets guard against accidentally exponential calls.

use crate::dist;
use crate::error::{Error, Result};
use crate::perm::{Instance, Metric, Permutation, WeightVector};
use crate::solvers::MajorityTournament;

/// Size limits for the exponential-time oracles.
#[derive(Copy, Clone, Debug)]
pub struct OracleBudget {
    /// Maximum `n` for factorial median enumeration.
    pub max_n_median: usize,
    /// Maximum vertex count for the exact feedback arc/vertex set searches.
    pub max_vertices: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_n_median: 8,
            max_vertices: 14,
        }
    }
}

pub fn naive_hamming(p: &Permutation, q: &Permutation) -> u64 {
    let mut d = 0;
    for i in 0..p.n() {
        if p.at(i) != q.at(i) {
            d += 1;
        }
    }
    d
}

pub fn naive_footrule(p: &Permutation, q: &Permutation) -> u64 {
    let mut d = 0;
    for i in 0..p.n() {
        d += p.at(i).abs_diff(q.at(i)) as u64;
    }
    d
}

pub fn naive_kendall(p: &Permutation, q: &Permutation) -> u64 {
    let n = p.n();
    let mut d = 0;
    for a in 0..n {
        for b in (a + 1)..n {
            let in_p = p.pos(a) < p.pos(b);
            let in_q = q.pos(a) < q.pos(b);
            if in_p != in_q {
                d += 1;
            }
        }
    }
    d
}

pub fn naive_kendall_weighted(p: &Permutation, q: &Permutation, w: &WeightVector) -> f64 {
    let n = p.n();
    let mut d = 0.0;
    for a in 0..n {
        for b in (a + 1)..n {
            let in_p = p.pos(a) < p.pos(b);
            let in_q = q.pos(a) < q.pos(b);
            if in_p != in_q {
                d += w.pair(a, b);
            }
        }
    }
    d
}

/// Quadratic LCS table; move distance is `n - LCS`.
pub fn naive_ulam_move(p: &Permutation, q: &Permutation) -> u64 {
    let n = p.n();
    let mut dp = vec![vec![0u64; n + 1]; n + 1];
    for i in 1..=n {
        for j in 1..=n {
            dp[i][j] = if p.at(i - 1) == q.at(j - 1) {
                dp[i - 1][j - 1] + 1
            } else {
                dp[i - 1][j].max(dp[i][j - 1])
            };
        }
    }
    n as u64 - dp[n][n]
}

/// Quadratic maximum-weight common subsequence; weighted move distance is the
/// total weight minus it.
pub fn naive_ulam_move_weighted(p: &Permutation, q: &Permutation, w: &WeightVector) -> f64 {
    let n = p.n();
    let mut dp = vec![vec![0f64; n + 1]; n + 1];
    for i in 1..=n {
        for j in 1..=n {
            dp[i][j] = if p.at(i - 1) == q.at(j - 1) {
                dp[i - 1][j - 1] + w.of(p.at(i - 1))
            } else {
                dp[i - 1][j].max(dp[i][j - 1])
            };
        }
    }
    w.total() - dp[n][n]
}

/// Naive counterpart of [`dist::distance`] (Ulam in indel units).
pub fn naive_distance(
    metric: Metric,
    p: &Permutation,
    q: &Permutation,
    weights: Option<&WeightVector>,
) -> Result<f64> {
    let w = if metric.is_weighted() {
        Some(weights.ok_or(Error::MissingWeights {
            metric: metric.name(),
        })?)
    } else {
        None
    };
    Ok(match metric {
        Metric::Hamming => naive_hamming(p, q) as f64,
        Metric::WeightedHamming => {
            let w = w.unwrap();
            let mut d = 0.0;
            for i in 0..p.n() {
                if p.at(i) != q.at(i) {
                    d += w.pair(p.at(i), q.at(i));
                }
            }
            d
        }
        Metric::Footrule => naive_footrule(p, q) as f64,
        Metric::Kendall => naive_kendall(p, q) as f64,
        Metric::WeightedKendall => naive_kendall_weighted(p, q, w.unwrap()),
        Metric::Ulam => 2.0 * naive_ulam_move(p, q) as f64,
        Metric::WeightedUlam => 2.0 * naive_ulam_move_weighted(p, q, w.unwrap()),
    })
}

/// Positions matched by the canonical longest common subsequence of `a` and
/// `b`: among all optimal backtraces, the one that prefers matching the
/// earliest positions of `a`.  Returned pairs `(i, j)` satisfy
/// `a[i] == b[j]` and are strictly increasing in both coordinates.
pub fn canonical_lcs_pairs(a: &[usize], b: &[usize]) -> Vec<(usize, usize)> {
    let (la, lb) = (a.len(), b.len());
    // suffix table: len[i][j] = LCS length of a[i..] vs b[j..]
    let mut len = vec![vec![0usize; lb + 1]; la + 1];
    for i in (0..la).rev() {
        for j in (0..lb).rev() {
            len[i][j] = if a[i] == b[j] {
                len[i + 1][j + 1] + 1
            } else {
                len[i + 1][j].max(len[i][j + 1])
            };
        }
    }
    let mut pairs = Vec::with_capacity(len[0][0]);
    let (mut i, mut j) = (0, 0);
    while i < la && j < lb {
        if a[i] == b[j] {
            pairs.push((i, j));
            i += 1;
            j += 1;
        } else if len[i][j + 1] == len[i][j] {
            // dropping b[j] preserves the optimum and keeps a[i] available
            j += 1;
        } else {
            i += 1;
        }
    }
    pairs
}

/// Visit all permutations of `n` in lexicographic order of one-line notation.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&Permutation)) {
    let mut forward: Vec<usize> = (0..n).collect();
    loop {
        f(&Permutation::from_forward(forward.clone()).expect("valid by construction"));
        // next lexicographic arrangement
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| forward[i] < forward[i + 1]) else {
            return;
        };
        let j = (i + 1..n).rev().find(|&j| forward[j] > forward[i]).unwrap();
        forward.swap(i, j);
        forward[i + 1..].reverse();
    }
}

/// Exact 1-median by factorial enumeration.  Ties in cost resolve to the
/// lexicographically smallest permutation.  Returns the median and its
/// average cost.
pub fn exact_median(
    inst: &Instance,
    metric: Metric,
    budget: &OracleBudget,
) -> Result<(Permutation, f64)> {
    let n = inst.n();
    if n > budget.max_n_median {
        return Err(Error::BudgetExceeded {
            what: "median enumeration n",
            value: n,
            limit: budget.max_n_median,
        });
    }
    let mut best: Option<(Permutation, f64)> = None;
    let mut err = None;
    for_each_permutation(n, |x| {
        if err.is_some() {
            return;
        }
        match dist::total_cost(metric, x, inst) {
            Ok(total) => {
                // strict improvement only: lexicographic enumeration order
                // makes the first optimum the lexicographically smallest
                if best.as_ref().is_none_or(|(_, b)| total < *b) {
                    best = Some((x.clone(), total));
                }
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let (x, total) = best.expect("n >= 1 enumerates at least one permutation");
    Ok((x, total / inst.m() as f64))
}

fn check_vertices(t: &MajorityTournament, budget: &OracleBudget) -> Result<usize> {
    let n = t.n();
    if n > budget.max_vertices {
        return Err(Error::BudgetExceeded {
            what: "tournament vertices",
            value: n,
            limit: budget.max_vertices,
        });
    }
    Ok(n)
}

/// Exact minimum-weight feedback arc set of a tournament, by Held-Karp
/// subset DP over linear orders.  Returns the optimal weight of violated
/// edges and an order achieving it.
pub fn exact_feedback_arc_set(
    t: &MajorityTournament,
    budget: &OracleBudget,
) -> Result<(f64, Vec<usize>)> {
    let n = check_vertices(t, budget)?;
    let full = 1usize << n;
    let mut dp = vec![f64::INFINITY; full];
    let mut take = vec![usize::MAX; full];
    dp[0] = 0.0;
    for mask in 0..full {
        if dp[mask].is_infinite() {
            continue;
        }
        for v in 0..n {
            if mask & (1 << v) != 0 {
                continue;
            }
            // appending v after the prefix `mask` violates every edge u -> v
            // from a vertex u that is still unplaced
            let mut penalty = 0.0;
            for u in 0..n {
                if u != v && mask & (1 << u) == 0 && t.beats(u, v) {
                    penalty += t.edge_weight(u, v);
                }
            }
            let next = mask | (1 << v);
            let cand = dp[mask] + penalty;
            if cand < dp[next] {
                dp[next] = cand;
                take[next] = v;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = full - 1;
    while mask != 0 {
        let v = take[mask];
        order.push(v);
        mask &= !(1 << v);
    }
    order.reverse();
    Ok((dp[full - 1], order))
}

/// Exact minimum-weight feedback vertex set of a tournament by subset
/// enumeration.  Ties resolve to fewer vertices, then to the smaller vertex
/// set in mask order.  Returns the optimal weight and the removed set.
pub fn exact_feedback_vertex_set(
    t: &MajorityTournament,
    budget: &OracleBudget,
) -> Result<(f64, Vec<usize>)> {
    let n = check_vertices(t, budget)?;
    let full = 1usize << n;
    let mut best_w = f64::INFINITY;
    let mut best_mask = full - 1;
    for mask in 0..full {
        let mut wsum = 0.0;
        for v in 0..n {
            if mask & (1 << v) != 0 {
                wsum += t.vertex_weight(v);
            }
        }
        let better = wsum < best_w
            || (wsum == best_w
                && (mask.count_ones() < best_mask.count_ones()
                    || (mask.count_ones() == best_mask.count_ones() && mask < best_mask)));
        if better && t.is_acyclic_without(mask) {
            best_w = wsum;
            best_mask = mask;
        }
    }
    let removed = (0..n).filter(|v| best_mask & (1 << v) != 0).collect();
    Ok((best_w, removed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_one_based(v).unwrap()
    }

    #[test]
    fn exact_median_of_duplicates_is_the_duplicate() {
        let inst =
            Instance::unweighted(vec![p(&[2, 3, 1]), p(&[2, 3, 1]), p(&[2, 3, 1])]).unwrap();
        for metric in [Metric::Hamming, Metric::Footrule, Metric::Kendall, Metric::Ulam] {
            let (x, c) = exact_median(&inst, metric, &OracleBudget::default()).unwrap();
            assert_eq!(x, p(&[2, 3, 1]));
            assert_eq!(c, 0.0);
        }
    }

    #[test]
    fn exact_median_prefers_lexicographically_smallest_tie() {
        // identity and reverse: every permutation on the "geodesic" ties
        // under Kendall; the lexicographically smallest is the identity.
        let inst = Instance::unweighted(vec![p(&[1, 2, 3]), p(&[3, 2, 1])]).unwrap();
        let (x, c) = exact_median(&inst, Metric::Kendall, &OracleBudget::default()).unwrap();
        assert_eq!(x, p(&[1, 2, 3]));
        assert_eq!(c, 1.5);
    }

    #[test]
    fn budget_is_enforced() {
        let inst = Instance::unweighted(vec![Permutation::identity(9)]).unwrap();
        assert!(matches!(
            exact_median(&inst, Metric::Hamming, &OracleBudget::default()),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn lexicographic_enumeration_is_complete() {
        let mut seen = Vec::new();
        for_each_permutation(3, |x| seen.push(x.to_one_based()));
        assert_eq!(
            seen,
            vec![
                vec![1, 2, 3],
                vec![1, 3, 2],
                vec![2, 1, 3],
                vec![2, 3, 1],
                vec![3, 1, 2],
                vec![3, 2, 1],
            ]
        );
    }
}
