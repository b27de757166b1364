//! Exact distance kernels.
//!
//! * Hamming: number of disagreeing positions; weighted variant charges
//!   `(w(p[i]) + w(q[i])) / 2` per disagreeing position.
//! * Footrule: `Σ_i |p[i] - q[i]|` over one-line entries.
//! * Kendall tau: number of element pairs ordered differently; weighted
//!   variant charges `(w(e) + w(e')) / 2` per inverted pair.  `O(n log n)`.
//! * Ulam: move distance `n - LCS(p, q)`; indel (insert/delete edit) distance
//!   is exactly twice the move distance.  Weighted move distance is the total
//!   weight minus a maximum-weight common subsequence.  `O(n log n)`.
//!
//! The framework treats Ulam distances in indel units throughout, so the
//! [`distance`] dispatcher returns `ulam_indel` for the Ulam metrics.

use crate::error::{Error, Result};
use crate::perm::{Instance, Metric, Permutation, WeightVector};

fn check_dims(p: &Permutation, q: &Permutation) -> Result<usize> {
    if p.n() != q.n() {
        return Err(Error::LengthMismatch {
            expected: p.n(),
            got: q.n(),
        });
    }
    Ok(p.n())
}

fn check_weights<'w>(w: &'w WeightVector, n: usize, metric: &'static str) -> Result<&'w WeightVector> {
    if w.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: w.len(),
        });
    }
    let _ = metric;
    Ok(w)
}

pub fn hamming(p: &Permutation, q: &Permutation) -> Result<u64> {
    let n = check_dims(p, q)?;
    Ok((0..n).filter(|&i| p.at(i) != q.at(i)).count() as u64)
}

pub fn hamming_weighted(p: &Permutation, q: &Permutation, w: &WeightVector) -> Result<f64> {
    let n = check_dims(p, q)?;
    let w = check_weights(w, n, "weighted-hamming")?;
    Ok((0..n)
        .filter(|&i| p.at(i) != q.at(i))
        .map(|i| w.pair(p.at(i), q.at(i)))
        .sum())
}

pub fn footrule(p: &Permutation, q: &Permutation) -> Result<u64> {
    let n = check_dims(p, q)?;
    Ok((0..n)
        .map(|i| p.at(i).abs_diff(q.at(i)) as u64)
        .sum())
}

/// Fenwick tree over values `0..n` keeping counts and weight sums.
struct BitSum {
    count: Vec<u64>,
    weight: Vec<f64>,
}

impl BitSum {
    fn new(n: usize) -> Self {
        BitSum {
            count: vec![0; n + 1],
            weight: vec![0.0; n + 1],
        }
    }

    fn add(&mut self, v: usize, w: f64) {
        let mut i = v + 1;
        while i < self.count.len() {
            self.count[i] += 1;
            self.weight[i] += w;
            i += i & i.wrapping_neg();
        }
    }

    /// Count and weight of inserted values `<= v`.
    fn prefix(&self, v: usize) -> (u64, f64) {
        let (mut c, mut s) = (0u64, 0.0f64);
        let mut i = v + 1;
        while i > 0 {
            c += self.count[i];
            s += self.weight[i];
            i -= i & i.wrapping_neg();
        }
        (c, s)
    }
}

/// Relabeling `a[k] = pos_q(p[k])`: pairs inverted between `p` and `q` are
/// exactly the inversions of `a`.
fn kendall_relabel(p: &Permutation, q: &Permutation) -> Vec<usize> {
    (0..p.n()).map(|k| q.pos(p.at(k))).collect()
}

pub fn kendall(p: &Permutation, q: &Permutation) -> Result<u64> {
    let n = check_dims(p, q)?;
    let a = kendall_relabel(p, q);
    let mut bit = BitSum::new(n);
    let mut inv = 0u64;
    for (k, &v) in a.iter().enumerate() {
        let (le, _) = bit.prefix(v);
        inv += k as u64 - le; // previously inserted values strictly above v
        bit.add(v, 0.0);
    }
    Ok(inv)
}

pub fn kendall_weighted(p: &Permutation, q: &Permutation, w: &WeightVector) -> Result<f64> {
    let n = check_dims(p, q)?;
    let w = check_weights(w, n, "weighted-kendall")?;
    let a = kendall_relabel(p, q);
    let mut bit = BitSum::new(n);
    let mut total_w = 0.0f64;
    let mut dist = 0.0f64;
    for (k, &v) in a.iter().enumerate() {
        let wk = w.of(p.at(k));
        let (le_c, le_w) = bit.prefix(v);
        let above_c = k as u64 - le_c;
        let above_w = total_w - le_w;
        // each earlier k' with a[k'] > v contributes (w_{k'} + w_k) / 2
        dist += (above_w + above_c as f64 * wk) / 2.0;
        bit.add(v, wk);
        total_w += wk;
    }
    Ok(dist)
}

/// Relabeling `s[k] = pos_p(q[k])`: common subsequences of `p` and `q`
/// correspond to increasing subsequences of `s`.
fn ulam_relabel(p: &Permutation, q: &Permutation) -> Vec<usize> {
    (0..p.n()).map(|k| p.pos(q.at(k))).collect()
}

/// Longest increasing subsequence length by patience sorting.
fn lis_len(s: &[usize]) -> usize {
    let mut tails: Vec<usize> = Vec::new();
    for &v in s {
        match tails.binary_search(&v) {
            Ok(_) => unreachable!("distinct values"),
            Err(pos) => {
                if pos == tails.len() {
                    tails.push(v);
                } else {
                    tails[pos] = v;
                }
            }
        }
    }
    tails.len()
}

/// Fenwick tree for prefix maxima of f64 values.
struct BitMax(Vec<f64>);

impl BitMax {
    fn new(n: usize) -> Self {
        BitMax(vec![0.0; n + 1])
    }

    fn add(&mut self, v: usize, x: f64) {
        let mut i = v + 1;
        while i < self.0.len() {
            if x > self.0[i] {
                self.0[i] = x;
            }
            i += i & i.wrapping_neg();
        }
    }

    fn prefix_max(&self, v: usize) -> f64 {
        let mut best = 0.0f64;
        let mut i = v + 1;
        while i > 0 {
            if self.0[i] > best {
                best = self.0[i];
            }
            i -= i & i.wrapping_neg();
        }
        best
    }
}

/// Ulam move distance: minimum number of remove-reinsert moves, `n - LCS`.
pub fn ulam_move(p: &Permutation, q: &Permutation) -> Result<u64> {
    let n = check_dims(p, q)?;
    Ok((n - lis_len(&ulam_relabel(p, q))) as u64)
}

/// Ulam indel distance: insert/delete edit distance, `2 * (n - LCS)`.
pub fn ulam_indel(p: &Permutation, q: &Permutation) -> Result<u64> {
    Ok(2 * ulam_move(p, q)?)
}

/// Weighted move distance: total weight minus a maximum-weight common
/// subsequence (each moved element pays its weight once).
pub fn ulam_move_weighted(p: &Permutation, q: &Permutation, w: &WeightVector) -> Result<f64> {
    let n = check_dims(p, q)?;
    let w = check_weights(w, n, "weighted-ulam")?;
    let s = ulam_relabel(p, q);
    let mut bit = BitMax::new(n);
    let mut total = 0.0f64;
    for (k, &v) in s.iter().enumerate() {
        let wk = w.of(q.at(k));
        total += wk;
        let best = if v == 0 { 0.0 } else { bit.prefix_max(v - 1) };
        bit.add(v, best + wk);
    }
    Ok(total - bit.prefix_max(n - 1))
}

/// Weighted indel distance: every moved element is deleted and reinserted,
/// paying its weight twice.
pub fn ulam_indel_weighted(p: &Permutation, q: &Permutation, w: &WeightVector) -> Result<f64> {
    Ok(2.0 * ulam_move_weighted(p, q, w)?)
}

/// Metric dispatcher.  Weighted metrics require `weights`; Ulam metrics are
/// reported in indel units.
pub fn distance(
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
        Metric::Hamming => hamming(p, q)? as f64,
        Metric::WeightedHamming => hamming_weighted(p, q, w.unwrap())?,
        Metric::Footrule => footrule(p, q)? as f64,
        Metric::Kendall => kendall(p, q)? as f64,
        Metric::WeightedKendall => kendall_weighted(p, q, w.unwrap())?,
        Metric::Ulam => ulam_indel(p, q)? as f64,
        Metric::WeightedUlam => ulam_indel_weighted(p, q, w.unwrap())?,
    })
}

/// Sum of distances from `x` to every member.
pub fn total_cost(metric: Metric, x: &Permutation, inst: &Instance) -> Result<f64> {
    let mut sum = 0.0;
    for p in &inst.perms {
        sum += distance(metric, x, p, inst.weights.as_ref())?;
    }
    Ok(sum)
}

/// Average distance from `x` to the members — the 1-median objective.
pub fn cost(metric: Metric, x: &Permutation, inst: &Instance) -> Result<f64> {
    Ok(total_cost(metric, x, inst)? / inst.m() as f64)
}
