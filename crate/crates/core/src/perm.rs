//! Permutations, element weights, instances, and the metric selector.
//!
//! Internally elements and positions are 0-based; the text format used by
//! files and the CLI is 1-based one-line notation (`"2 1 3"`).

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A permutation of `{0, .., n-1}` stored together with its inverse.
///
/// `forward[i]` is the element at position `i`; `inverse[e]` is the position
/// of element `e`.  Both views are kept because half of the metrics compare
/// positions of elements and the other half elements at positions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    /// Build from 0-based one-line notation.
    pub fn from_forward(forward: Vec<usize>) -> Result<Self> {
        let n = forward.len();
        let mut inverse = vec![usize::MAX; n];
        for (i, &e) in forward.iter().enumerate() {
            if e >= n {
                return Err(Error::NotAPermutation {
                    reason: format!("element {} out of range 1..={}", e + 1, n),
                });
            }
            if inverse[e] != usize::MAX {
                return Err(Error::NotAPermutation {
                    reason: format!("element {} appears twice", e + 1),
                });
            }
            inverse[e] = i;
        }
        Ok(Permutation { forward, inverse })
    }

    /// Build from 1-based one-line notation.
    pub fn from_one_based(line: &[usize]) -> Result<Self> {
        let forward = line
            .iter()
            .map(|&v| {
                v.checked_sub(1).ok_or_else(|| Error::NotAPermutation {
                    reason: "element 0 (format is 1-based)".into(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_forward(forward)
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            forward: (0..n).collect(),
            inverse: (0..n).collect(),
        }
    }

    pub fn reversed(n: usize) -> Self {
        let forward: Vec<usize> = (0..n).rev().collect();
        Permutation {
            inverse: forward.clone(),
            forward,
        }
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut forward: Vec<usize> = (0..n).collect();
        forward.shuffle(rng);
        Self::from_forward(forward).expect("shuffle of identity is a permutation")
    }

    pub fn n(&self) -> usize {
        self.forward.len()
    }

    /// Element at position `i`.
    pub fn at(&self, i: usize) -> usize {
        self.forward[i]
    }

    /// Position of element `e`.
    pub fn pos(&self, e: usize) -> usize {
        self.inverse[e]
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.forward.iter().map(|&e| e + 1).collect()
    }

    /// Remove the element at position `from` and reinsert it so that it ends
    /// up at position `to` — a single "move" in the Ulam metric.
    pub fn with_move(&self, from: usize, to: usize) -> Self {
        let mut forward = self.forward.clone();
        let e = forward.remove(from);
        forward.insert(to, e);
        Self::from_forward(forward).expect("a move preserves permutation-ness")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for &e in &self.forward {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}", e + 1)?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    /// Shows the 1-based one-line form, e.g. `perm(2 1 3)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "perm({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let vals = s
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>().map_err(|_| Error::NotAPermutation {
                    reason: format!("token {t:?} is not a positive integer"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if vals.is_empty() {
            return Err(Error::NotAPermutation {
                reason: "empty permutation text".into(),
            });
        }
        Self::from_one_based(&vals)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::from_one_based(&v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.to_one_based()
    }
}

/// Per-element positive weights, 0-based like the internal element ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if let Some(bad) = w.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "weights must be positive and finite, got {bad}"
            )));
        }
        Ok(WeightVector(w))
    }

    pub fn unit(n: usize) -> Self {
        WeightVector(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn of(&self, e: usize) -> f64 {
        self.0[e]
    }

    /// The pair weight `(w(a) + w(b)) / 2` used by Hamming and Kendall.
    pub fn pair(&self, a: usize, b: usize) -> f64 {
        (self.0[a] + self.0[b]) / 2.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// A multiset of permutations of common length, with optional weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub perms: Vec<Permutation>,
    pub weights: Option<WeightVector>,
}

impl Instance {
    pub fn new(perms: Vec<Permutation>, weights: Option<WeightVector>) -> Result<Self> {
        if perms.is_empty() {
            return Err(Error::InvalidInput("instance needs at least one permutation".into()));
        }
        let n = perms[0].n();
        for p in &perms {
            if p.n() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: p.n(),
                });
            }
        }
        if let Some(w) = &weights {
            if w.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: w.len(),
                });
            }
        }
        Ok(Instance { perms, weights })
    }

    pub fn unweighted(perms: Vec<Permutation>) -> Result<Self> {
        Self::new(perms, None)
    }

    pub fn n(&self) -> usize {
        self.perms[0].n()
    }

    pub fn m(&self) -> usize {
        self.perms.len()
    }

    /// Sub-instance over the given member indices (weights carried over).
    pub fn subset(&self, idx: &[usize]) -> Result<Instance> {
        let perms = idx
            .iter()
            .map(|&i| {
                self.perms
                    .get(i)
                    .cloned()
                    .ok_or(Error::IndexOutOfRange {
                        index: i,
                        len: self.perms.len(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(perms, self.weights.clone())
    }
}

/// Distance selector.  The weighted variants require `Instance::weights`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Hamming,
    WeightedHamming,
    Footrule,
    Kendall,
    WeightedKendall,
    Ulam,
    WeightedUlam,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::Hamming,
        Metric::WeightedHamming,
        Metric::Footrule,
        Metric::Kendall,
        Metric::WeightedKendall,
        Metric::Ulam,
        Metric::WeightedUlam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Hamming => "hamming",
            Metric::WeightedHamming => "weighted-hamming",
            Metric::Footrule => "footrule",
            Metric::Kendall => "kendall",
            Metric::WeightedKendall => "weighted-kendall",
            Metric::Ulam => "ulam",
            Metric::WeightedUlam => "weighted-ulam",
        }
    }

    pub fn is_weighted(self) -> bool {
        matches!(
            self,
            Metric::WeightedHamming | Metric::WeightedKendall | Metric::WeightedUlam
        )
    }

    /// The unweighted counterpart (identity for unweighted metrics).
    pub fn base(self) -> Metric {
        match self {
            Metric::WeightedHamming => Metric::Hamming,
            Metric::WeightedKendall => Metric::Kendall,
            Metric::WeightedUlam => Metric::Ulam,
            other => other,
        }
    }

    /// Subset size the local consensus rule for this metric expects.
    pub fn subset_size(self) -> usize {
        match self.base() {
            Metric::Ulam => 5,
            _ => 3,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown metric {s:?}; expected one of {}",
                    Metric::ALL.map(|m| m.name()).join(", ")
                ))
            })
    }
}
