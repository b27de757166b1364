//! Metric-specific consensus solvers for constant-size instances.
//!
//! Each solver takes a small instance `Q` (three members, or five for the
//! move-distance solver) and returns a single permutation whose distance to
//! any fixed ranking is controlled by that ranking's triangle-inequality
//! slack over `Q`.  The solvers are deterministic given their seed and
//! ignore element weights at runtime; weights enter only through the
//! analysis-side oracles in [`crate::oracles`].

#[cfg(test)]
use crate::dist;
use crate::perm::{Instance, Metric, Permutation, WeightVector};
use crate::rng::subrng;
use rand::Rng;

/// Pairwise "who goes first" counts over the members of a small instance.
///
/// Vertex `a` beats vertex `b` when strictly more members place `a` before
/// `b` than the other way around.  With an odd number of full permutations
/// every pair has a strict winner; ties can occur only when some elements
/// are missing from some sequences (the reconstruction pipeline handles
/// that case with its own digraph).
#[derive(Clone, Debug)]
pub struct MajorityTournament {
    n: usize,
    /// `before[a * n + b]` = number of members placing `a` before `b`.
    before: Vec<u32>,
    weights: WeightVector,
}

impl MajorityTournament {
    pub fn from_instance(q: &Instance) -> Self {
        let n = q.n();
        let mut before = vec![0u32; n * n];
        for p in &q.perms {
            for a in 0..n {
                for b in 0..n {
                    if a != b && p.pos(a) < p.pos(b) {
                        before[a * n + b] += 1;
                    }
                }
            }
        }
        let weights = q.weights.clone().unwrap_or_else(|| WeightVector::unit(n));
        MajorityTournament { n, before, weights }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of members placing `a` before `b`.
    pub fn before_count(&self, a: usize, b: usize) -> u32 {
        self.before[a * self.n + b]
    }

    /// Strict majority order: `a` beats `b`.
    pub fn beats(&self, a: usize, b: usize) -> bool {
        self.before_count(a, b) > self.before_count(b, a)
    }

    /// True when neither direction has a strict majority.
    pub fn tied(&self, a: usize, b: usize) -> bool {
        a != b && self.before_count(a, b) == self.before_count(b, a)
    }

    /// Weight of the ordered pair, `(w(a) + w(b)) / 2`.
    pub fn edge_weight(&self, a: usize, b: usize) -> f64 {
        self.weights.pair(a, b)
    }

    pub fn vertex_weight(&self, v: usize) -> f64 {
        self.weights.of(v)
    }

    /// Does deleting the vertices in `mask` leave an acyclic majority graph?
    pub fn is_acyclic_without(&self, mask: usize) -> bool {
        let alive: Vec<usize> = (0..self.n).filter(|v| mask & (1 << v) == 0).collect();
        self.topological_order(&alive).is_some()
    }

    /// Kahn's algorithm over the beats edges among `alive` vertices, breaking
    /// ties toward the smallest vertex id.  `None` when a cycle remains.
    pub fn topological_order(&self, alive: &[usize]) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.n];
        for &a in alive {
            for &b in alive {
                if a != b && self.beats(a, b) {
                    indeg[b] += 1;
                }
            }
        }
        let mut placed = vec![false; self.n];
        let mut order = Vec::with_capacity(alive.len());
        for _ in 0..alive.len() {
            let next = alive
                .iter()
                .copied()
                .find(|&v| !placed[v] && indeg[v] == 0)?;
            placed[next] = true;
            order.push(next);
            for &b in alive {
                if b != next && !placed[b] && self.beats(next, b) {
                    indeg[b] -= 1;
                }
            }
        }
        Some(order)
    }

    /// Total weight of pairs the given ordering decides against the majority.
    pub fn disagreement_weight(&self, order: &[usize]) -> f64 {
        let mut total = 0.0;
        for (i, &a) in order.iter().enumerate() {
            for &b in &order[i + 1..] {
                if self.beats(b, a) {
                    total += self.edge_weight(a, b);
                }
            }
        }
        total
    }

    /// Lexicographically first vertex triple `a < b < c` (all alive) that
    /// forms a directed 3-cycle in either orientation.
    pub fn lex_first_triangle(&self, alive: &[bool]) -> Option<[usize; 3]> {
        for a in 0..self.n {
            if !alive[a] {
                continue;
            }
            for b in a + 1..self.n {
                if !alive[b] {
                    continue;
                }
                for c in b + 1..self.n {
                    if !alive[c] {
                        continue;
                    }
                    let fwd = self.beats(a, b) && self.beats(b, c) && self.beats(c, a);
                    let rev = self.beats(a, c) && self.beats(c, b) && self.beats(b, a);
                    if fwd || rev {
                        return Some([a, b, c]);
                    }
                }
            }
        }
        None
    }
}

/// Consensus by position-wise majority vote.
///
/// Position `k` receives element `e` whenever a strict majority of members
/// put `e` at `k`.  No element can win two positions and no position two
/// elements, so the partial assignment extends to a permutation: unfilled
/// positions, scanned left to right, receive the unused elements in
/// ascending order.
pub fn hamming_majority_median(q: &Instance) -> Permutation {
    let n = q.n();
    let m = q.m();
    let mut forward = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for k in 0..n {
        let mut count = vec![0usize; n];
        for p in &q.perms {
            count[p.at(k)] += 1;
        }
        if let Some(e) = (0..n).find(|&e| 2 * count[e] > m) {
            forward[k] = e;
            used[e] = true;
        }
    }
    let mut unused = (0..n).filter(|&e| !used[e]);
    for slot in forward.iter_mut() {
        if *slot == usize::MAX {
            *slot = unused.next().expect("as many unused elements as open positions");
        }
    }
    Permutation::from_forward(forward).expect("majority assignment is a bijection")
}

/// Position-wise (lower) median of the members' one-line entries.  The result
/// is a "pseudo-permutation": entries may repeat.
pub fn footrule_position_medians(q: &Instance) -> Vec<usize> {
    let n = q.n();
    (0..n)
        .map(|k| {
            let mut col: Vec<usize> = q.perms.iter().map(|p| p.at(k)).collect();
            col.sort_unstable();
            col[(col.len() - 1) / 2]
        })
        .collect()
}

/// Consensus by position-wise medians, rounded to a permutation.
///
/// Position `k` of the pseudo-permutation `z` holds the median of the
/// members' entries at `k`.  Ranks are then assigned in order of `z`: the
/// position with the i-th smallest `z`-value (ties to the smaller position
/// index) receives rank `i`.  By the rearrangement inequality this rounding
/// minimizes the displacement sum to `z` over all permutations.
pub fn footrule_median(q: &Instance) -> Permutation {
    let z = footrule_position_medians(q);
    let n = z.len();
    let mut by_z: Vec<usize> = (0..n).collect();
    by_z.sort_by_key(|&k| (z[k], k));
    let mut forward = vec![0usize; n];
    for (rank, &k) in by_z.iter().enumerate() {
        forward[k] = rank;
    }
    Permutation::from_forward(forward).expect("rank assignment is a bijection")
}

/// Node of the pivot search tree used by [`multilevel_kwiksort`].
struct PivotNode {
    item: usize,
    left: Option<usize>,
    right: Option<usize>,
}

/// Deterministic multi-level quicksort over a majority tournament.
///
/// The layout starts as `0..n` in one group.  At every level each group of
/// length >= 2 draws `min(pivot_cap, len)` pivots from its own RNG stream
/// (`subrng(seed, "kwik", level << 32 | group_start)`), arranges them in a
/// search tree ordered by the beats relation, routes every other group item
/// through the tree into one of the gaps between consecutive pivots, and
/// rewrites the group as gap/pivot/gap/.../pivot/gap.  Gaps become the next
/// level's groups; the partition is stable within each gap.
///
/// The same procedure, keyed by the same stream labels, drives both the
/// in-memory solver (one pivot per group) and the distributed engine (many
/// pivots per group), so the two produce bit-identical orderings whenever
/// they run the same schedule.
pub fn multilevel_kwiksort(
    t: &MajorityTournament,
    seed: u64,
    pivot_cap: usize,
    max_levels: usize,
) -> Vec<usize> {
    multilevel_kwiksort_traced(t, seed, pivot_cap, max_levels).0
}

/// One group actually split at some level: its layout span and the layout
/// slots its pivots were drawn from.
#[derive(Clone, Debug)]
pub(crate) struct KwikGroup {
    pub start: usize,
    pub len: usize,
    pub pivot_slots: Vec<usize>,
}

/// Split activity of one level; empty when every group was already a
/// singleton.
#[derive(Clone, Debug, Default)]
pub(crate) struct KwikLevel {
    pub groups: Vec<KwikGroup>,
}

/// [`multilevel_kwiksort`] plus a per-level activity record, which the
/// distributed engine turns into message and storage charges.
pub(crate) fn multilevel_kwiksort_traced(
    t: &MajorityTournament,
    seed: u64,
    pivot_cap: usize,
    max_levels: usize,
) -> (Vec<usize>, Vec<KwikLevel>) {
    let n = t.n();
    let mut layout: Vec<usize> = (0..n).collect();
    let mut trace = Vec::new();
    // (start, len) of each group, in layout order
    let mut groups: Vec<(usize, usize)> = vec![(0, n)];
    for level in 0..max_levels {
        if groups.iter().all(|&(_, len)| len < 2) {
            break;
        }
        let mut next_layout = Vec::with_capacity(n);
        let mut next_groups = Vec::new();
        let mut level_rec = KwikLevel::default();
        for &(start, len) in &groups {
            if len < 2 {
                next_groups.push((next_layout.len(), len));
                next_layout.extend_from_slice(&layout[start..start + len]);
                continue;
            }
            let mut rng = subrng(seed, "kwik", ((level as u64) << 32) | start as u64);
            let pivot_count = pivot_cap.min(len);
            // partial Fisher-Yates over the local indices picks the pivots
            let mut idx: Vec<usize> = (0..len).collect();
            for k in 0..pivot_count {
                let j = rng.gen_range(k..len);
                idx.swap(k, j);
            }
            level_rec.groups.push(KwikGroup {
                start,
                len,
                pivot_slots: idx[..pivot_count].iter().map(|&li| start + li).collect(),
            });
            let mut is_pivot = vec![false; len];
            let mut nodes: Vec<PivotNode> = Vec::with_capacity(pivot_count);
            for &li in &idx[..pivot_count] {
                is_pivot[li] = true;
                let item = layout[start + li];
                if nodes.is_empty() {
                    nodes.push(PivotNode { item, left: None, right: None });
                    continue;
                }
                let mut at = 0;
                loop {
                    let go_left = t.beats(item, nodes[at].item);
                    let slot = if go_left { nodes[at].left } else { nodes[at].right };
                    match slot {
                        Some(next) => at = next,
                        None => {
                            let new = nodes.len();
                            if go_left {
                                nodes[at].left = Some(new);
                            } else {
                                nodes[at].right = Some(new);
                            }
                            nodes.push(PivotNode { item, left: None, right: None });
                            break;
                        }
                    }
                }
            }
            // in-order ranks: sorted_pivots[r] = item with rank r
            let mut sorted_pivots = Vec::with_capacity(pivot_count);
            let mut rank_of_node = vec![0usize; pivot_count];
            in_order(&nodes, 0, &mut |node| {
                rank_of_node[node] = sorted_pivots.len();
                sorted_pivots.push(nodes[node].item);
            });
            // route non-pivots into the gaps between consecutive pivots
            let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); pivot_count + 1];
            for li in 0..len {
                if is_pivot[li] {
                    continue;
                }
                let item = layout[start + li];
                let mut at = 0;
                let gap = loop {
                    let go_left = t.beats(item, nodes[at].item);
                    let slot = if go_left { nodes[at].left } else { nodes[at].right };
                    match slot {
                        Some(next) => at = next,
                        None if go_left => break rank_of_node[at],
                        None => break rank_of_node[at] + 1,
                    }
                };
                buckets[gap].push(item);
            }
            for (g, bucket) in buckets.iter().enumerate() {
                if !bucket.is_empty() {
                    next_groups.push((next_layout.len(), bucket.len()));
                    next_layout.extend_from_slice(bucket);
                }
                if g < pivot_count {
                    next_groups.push((next_layout.len(), 1));
                    next_layout.push(sorted_pivots[g]);
                }
            }
        }
        layout = next_layout;
        groups = next_groups;
        trace.push(level_rec);
    }
    (layout, trace)
}

fn in_order(nodes: &[PivotNode], at: usize, visit: &mut impl FnMut(usize)) {
    if let Some(l) = nodes[at].left {
        in_order(nodes, l, visit);
    }
    visit(at);
    if let Some(r) = nodes[at].right {
        in_order(nodes, r, visit);
    }
}

/// Consensus by randomized quicksort over the majority tournament.
///
/// Single-pivot partitioning recursed to completion; deterministic given the
/// seed.  On an acyclic tournament every pivot sequence returns the unique
/// topological order.
pub fn kendall_kwiksort_median(q: &Instance, seed: u64) -> Permutation {
    let t = MajorityTournament::from_instance(q);
    let order = multilevel_kwiksort(&t, seed, 1, q.n() + 1);
    Permutation::from_forward(order).expect("kwiksort emits each item once")
}

/// Feedback vertex set by repeated triangle removal: while a directed
/// 3-cycle exists, delete all three vertices of the lexicographically first
/// one.  Returns the removed vertices in ascending order.
///
/// Every directed cycle in a tournament contains a directed triangle, and
/// the removed triangles are vertex-disjoint, so the removed set is at most
/// three times the minimum feedback vertex set (in cardinality).
pub fn triangle_removal_fvs(t: &MajorityTournament) -> Vec<usize> {
    let mut alive = vec![true; t.n()];
    while let Some(tri) = t.lex_first_triangle(&alive) {
        for v in tri {
            alive[v] = false;
        }
    }
    (0..t.n()).filter(|&v| !alive[v]).collect()
}

/// Consensus for the move distance: order the majority tournament after
/// removing a feedback vertex set by triangle removal, then append the
/// removed elements in ascending order.
pub fn ulam_fvs_median(q: &Instance) -> Permutation {
    let t = MajorityTournament::from_instance(q);
    let removed = triangle_removal_fvs(&t);
    let mut dead = vec![false; t.n()];
    for &v in &removed {
        dead[v] = true;
    }
    let alive: Vec<usize> = (0..t.n()).filter(|&v| !dead[v]).collect();
    let mut order = t
        .topological_order(&alive)
        .expect("triangle-free tournament is transitive");
    order.extend_from_slice(&removed);
    Permutation::from_forward(order).expect("partition of the element set")
}

/// A consensus routine for fixed-size sub-instances, pluggable into the
/// sampling driver in [`crate::slack`].
pub trait LocalSolver {
    /// Sub-instance size this solver expects.
    fn subset_size(&self) -> usize;
    /// Solve the sub-instance.  `seed` feeds any internal randomness;
    /// deterministic solvers ignore it.
    fn solve(&self, q: &Instance, seed: u64) -> Permutation;
    fn name(&self) -> &'static str;
}

/// Majority-vote solver for the (weighted) Hamming objective.
pub struct HammingMajority;

impl LocalSolver for HammingMajority {
    fn subset_size(&self) -> usize {
        3
    }
    fn solve(&self, q: &Instance, _seed: u64) -> Permutation {
        hamming_majority_median(q)
    }
    fn name(&self) -> &'static str {
        "hamming-majority"
    }
}

/// Position-median solver for the displacement objective.
pub struct FootruleMedian;

impl LocalSolver for FootruleMedian {
    fn subset_size(&self) -> usize {
        3
    }
    fn solve(&self, q: &Instance, _seed: u64) -> Permutation {
        footrule_median(q)
    }
    fn name(&self) -> &'static str {
        "footrule-median"
    }
}

/// Randomized quicksort solver for the (weighted) inversion objective.
pub struct KendallKwikSort;

impl LocalSolver for KendallKwikSort {
    fn subset_size(&self) -> usize {
        3
    }
    fn solve(&self, q: &Instance, seed: u64) -> Permutation {
        kendall_kwiksort_median(q, seed)
    }
    fn name(&self) -> &'static str {
        "kendall-kwiksort"
    }
}

/// Triangle-removal solver for the (weighted) move objective.
pub struct UlamFvs;

impl LocalSolver for UlamFvs {
    fn subset_size(&self) -> usize {
        5
    }
    fn solve(&self, q: &Instance, _seed: u64) -> Permutation {
        ulam_fvs_median(q)
    }
    fn name(&self) -> &'static str {
        "ulam-fvs"
    }
}

/// The standard solver for each metric.
pub fn default_solver(metric: Metric) -> Box<dyn LocalSolver> {
    match metric.base() {
        Metric::Hamming => Box::new(HammingMajority),
        Metric::Footrule => Box::new(FootruleMedian),
        Metric::Kendall => Box::new(KendallKwikSort),
        Metric::Ulam => Box::new(UlamFvs),
        other => unreachable!("base() returns an unweighted metric, got {other}"),
    }
}

/// Total slack of `x` over all member pairs of `q` (test helper shared with
/// the proximity checks; the full reporting version lives in
/// [`crate::slack`]).
#[cfg(test)]
pub(crate) fn raw_total_slack(q: &Instance, x: &Permutation, metric: Metric) -> f64 {
    let mut total = 0.0;
    for i in 0..q.m() {
        for j in i + 1..q.m() {
            let dxi = dist::distance(metric, x, &q.perms[i], q.weights.as_ref()).unwrap();
            let dxj = dist::distance(metric, x, &q.perms[j], q.weights.as_ref()).unwrap();
            let dij =
                dist::distance(metric, &q.perms[i], &q.perms[j], q.weights.as_ref()).unwrap();
            total += dxi + dxj - dij;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::oracles;
    use crate::perm::Metric;

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_one_based(v).unwrap()
    }

    fn inst(rows: &[&[usize]]) -> Instance {
        Instance::unweighted(rows.iter().map(|r| p(r)).collect()).unwrap()
    }

    #[test]
    fn hamming_majority_examples() {
        let q = inst(&[&[1, 2, 3], &[1, 2, 3], &[2, 1, 3]]);
        assert_eq!(hamming_majority_median(&q), p(&[1, 2, 3]));

        // Latin square: no position has a majority, fill rule assigns
        // ascending elements to ascending positions.
        let q = inst(&[&[1, 2, 3], &[2, 3, 1], &[3, 1, 2]]);
        assert_eq!(hamming_majority_median(&q), p(&[1, 2, 3]));

        let q = inst(&[&[4, 2, 3, 1], &[4, 2, 3, 1], &[4, 2, 3, 1]]);
        assert_eq!(hamming_majority_median(&q), p(&[4, 2, 3, 1]));
    }

    #[test]
    fn hamming_majority_partial_fill() {
        let q = inst(&[&[1, 4, 3, 2], &[3, 4, 1, 2], &[2, 4, 3, 1]]);
        // position 1 -> 4 (all three members), position 2 -> 3 (two members);
        // positions 0 and 3 have no majority and take the unused elements
        // {1, 2} in ascending order.
        assert_eq!(hamming_majority_median(&q), p(&[1, 4, 3, 2]));
    }

    #[test]
    fn footrule_examples() {
        let q = inst(&[&[1, 2, 3], &[1, 2, 3], &[3, 2, 1]]);
        assert_eq!(footrule_position_medians(&q), vec![0, 1, 2]);
        assert_eq!(footrule_median(&q), p(&[1, 2, 3]));

        let q = inst(&[&[1, 2, 3], &[2, 1, 3], &[2, 3, 1]]);
        assert_eq!(footrule_position_medians(&q), vec![1, 1, 2]);
        assert_eq!(footrule_median(&q), p(&[1, 2, 3]));
    }

    #[test]
    fn footrule_rounding_is_optimal_for_z() {
        // the rank assignment minimizes the displacement sum to z over all
        // permutations (exhaustive check)
        for trial in 0..40 {
            let q = gen::uniform_instance(6, 3, 900 + trial);
            let z = footrule_position_medians(&q);
            let y = footrule_median(&q);
            let cost =
                |x: &Permutation| -> u64 { (0..6).map(|k| x.at(k).abs_diff(z[k]) as u64).sum() };
            let yc = cost(&y);
            let mut best = u64::MAX;
            oracles::for_each_permutation(6, |x| best = best.min(cost(x)));
            assert_eq!(yc, best, "rounding not optimal for z={z:?}");
        }
    }

    #[test]
    fn kendall_kwiksort_examples() {
        let q = inst(&[&[1, 2, 3], &[1, 2, 3], &[2, 1, 3]]);
        for seed in 0..40 {
            assert_eq!(kendall_kwiksort_median(&q, seed), p(&[1, 2, 3]));
        }
        let q = inst(&[&[3, 1, 2], &[3, 1, 2], &[3, 1, 2]]);
        for seed in 0..10 {
            assert_eq!(kendall_kwiksort_median(&q, seed), p(&[3, 1, 2]));
        }
    }

    #[test]
    fn kwiksort_disagreement_tracks_exact_fas() {
        // averaged over 200 pivot seeds, the violated-pair weight stays
        // within twice the exact minimum feedback-arc weight
        let budget = oracles::OracleBudget::default();
        for trial in 0..5 {
            let q = gen::uniform_instance(6, 3, 1200 + trial);
            let t = MajorityTournament::from_instance(&q);
            let (opt, _) = oracles::exact_feedback_arc_set(&t, &budget).unwrap();
            let mut mean = 0.0;
            for seed in 0..200 {
                let y = kendall_kwiksort_median(&q, seed);
                mean += t.disagreement_weight(y.forward());
            }
            mean /= 200.0;
            assert!(
                mean <= 2.0 * opt + 1e-9,
                "trial {trial}: mean disagreement {mean} vs opt {opt}"
            );
        }
    }

    #[test]
    fn multilevel_kwiksort_many_pivots_sorts_acyclic() {
        // on an acyclic tournament any pivot budget returns the unique
        // topological order in few levels
        let center = p(&[5, 3, 1, 6, 2, 4, 7, 8]);
        let q = Instance::unweighted(vec![center.clone(); 3]).unwrap();
        let t = MajorityTournament::from_instance(&q);
        for cap in [1, 2, 3, 8] {
            let order = multilevel_kwiksort(&t, 77, cap, 16);
            assert_eq!(order, center.forward().to_vec(), "pivot cap {cap}");
        }
    }

    #[test]
    fn ulam_fvs_examples() {
        let q = Instance::unweighted(vec![p(&[2, 4, 1, 3]); 5]).unwrap();
        assert_eq!(ulam_fvs_median(&q), p(&[2, 4, 1, 3]));

        // four copies force the majority orientation on every pair
        let mut rng = subrng(404, "test", 0);
        for _ in 0..30 {
            let center = Permutation::random(9, &mut rng);
            let noise = Permutation::random(9, &mut rng);
            let q = Instance::unweighted(vec![
                center.clone(),
                center.clone(),
                center.clone(),
                center.clone(),
                noise,
            ])
            .unwrap();
            assert_eq!(ulam_fvs_median(&q), center);
        }
    }

    #[test]
    fn triangle_removal_within_three_times_exact_fvs() {
        let budget = oracles::OracleBudget::default();
        for trial in 0..30 {
            let q = gen::uniform_instance(7, 5, 4400 + trial);
            let t = MajorityTournament::from_instance(&q);
            let removed = triangle_removal_fvs(&t);
            let (opt, _) = oracles::exact_feedback_vertex_set(&t, &budget).unwrap();
            let w: f64 = removed.iter().map(|&v| t.vertex_weight(v)).sum();
            assert!(
                w <= 3.0 * opt + 1e-9,
                "trial {trial}: removed {w} vs opt {opt}"
            );
            // the tournament really is acyclic afterwards
            let mask: usize = removed.iter().map(|&v| 1usize << v).sum();
            assert!(t.is_acyclic_without(mask));
        }
    }

    #[test]
    fn hamming_proximity_to_exact_median() {
        // dist(x*, y) <= total slack of x* over Q, under weighted Hamming,
        // where x* is the exact median of a larger instance containing Q
        let budget = oracles::OracleBudget::default();
        for trial in 0..40 {
            let mut inst = gen::uniform_instance(6, 8, 5100 + trial);
            inst.weights = Some(gen::random_weights(6, 5100 + trial));
            let (xstar, _) = oracles::exact_median(&inst, Metric::WeightedHamming, &budget).unwrap();
            let q = inst.subset(&[0, 1, 2]).unwrap();
            let y = hamming_majority_median(&q);
            let d = dist::distance(Metric::WeightedHamming, &xstar, &y, inst.weights.as_ref())
                .unwrap();
            let slack = raw_total_slack(&q, &xstar, Metric::WeightedHamming);
            assert!(d <= slack + 1e-9, "trial {trial}: d {d} > slack {slack}");
        }
    }

    #[test]
    fn footrule_proximity_to_exact_median() {
        let budget = oracles::OracleBudget::default();
        for trial in 0..40 {
            let inst = gen::uniform_instance(6, 8, 5200 + trial);
            let (xstar, _) = oracles::exact_median(&inst, Metric::Footrule, &budget).unwrap();
            let q = inst.subset(&[0, 1, 2]).unwrap();
            let y = footrule_median(&q);
            let d = dist::distance(Metric::Footrule, &xstar, &y, None).unwrap();
            let slack = raw_total_slack(&q, &xstar, Metric::Footrule);
            assert!(d <= slack + 1e-9, "trial {trial}: d {d} > slack {slack}");
        }
    }

    #[test]
    fn kendall_proximity_with_exact_fas() {
        // with the exact feedback-arc oracle in place of quicksort the
        // proximity bound carries factor 3
        let budget = oracles::OracleBudget::default();
        for trial in 0..40 {
            let mut inst = gen::uniform_instance(6, 8, 5300 + trial);
            inst.weights = Some(gen::random_weights(6, 5300 + trial));
            let (xstar, _) =
                oracles::exact_median(&inst, Metric::WeightedKendall, &budget).unwrap();
            let q = inst.subset(&[0, 1, 2]).unwrap();
            let t = MajorityTournament::from_instance(&q);
            let (_, order) = oracles::exact_feedback_arc_set(&t, &budget).unwrap();
            let y = Permutation::from_forward(order).unwrap();
            let d = dist::distance(Metric::WeightedKendall, &xstar, &y, inst.weights.as_ref())
                .unwrap();
            let slack = raw_total_slack(&q, &xstar, Metric::WeightedKendall);
            assert!(
                d <= 3.0 * slack + 1e-9,
                "trial {trial}: d {d} > 3*slack {slack}"
            );
        }
    }

    #[test]
    fn ulam_pairwise_slack_bound() {
        // indel(x, y) <= slack(x, Q) + slack(y, Q) for any two rankings
        let mut rng = subrng(606, "test", 0);
        for trial in 0..60 {
            let q = gen::uniform_instance(8, 5, 5400 + trial);
            let x = Permutation::random(8, &mut rng);
            let y = Permutation::random(8, &mut rng);
            let d = dist::distance(Metric::Ulam, &x, &y, None).unwrap();
            let sx = raw_total_slack(&q, &x, Metric::Ulam);
            let sy = raw_total_slack(&q, &y, Metric::Ulam);
            assert!(
                d <= sx + sy + 1e-9,
                "trial {trial}: indel {d} > {sx} + {sy}"
            );
        }
    }

    #[test]
    fn kendall_shared_inverted_pairs_equal_half_slack() {
        let mut rng = subrng(707, "test", 0);
        for trial in 0..50 {
            let n = 7;
            let pp = Permutation::random(n, &mut rng);
            let qq = Permutation::random(n, &mut rng);
            let x = Permutation::random(n, &mut rng);
            let w = gen::random_weights(n, 7000 + trial);
            let mut shared = 0.0;
            for a in 0..n {
                for b in a + 1..n {
                    let in_xp = (x.pos(a) < x.pos(b)) != (pp.pos(a) < pp.pos(b));
                    let in_xq = (x.pos(a) < x.pos(b)) != (qq.pos(a) < qq.pos(b));
                    if in_xp && in_xq {
                        shared += w.pair(a, b);
                    }
                }
            }
            let slack = dist::kendall_weighted(&x, &pp, &w).unwrap()
                + dist::kendall_weighted(&x, &qq, &w).unwrap()
                - dist::kendall_weighted(&pp, &qq, &w).unwrap();
            assert!(
                (slack - 2.0 * shared).abs() < 1e-9,
                "trial {trial}: slack {slack} vs shared {shared}"
            );
        }
    }

    #[test]
    fn ulam_shared_unaligned_weight_below_slack() {
        let mut rng = subrng(808, "test", 0);
        for trial in 0..50 {
            let n = 8;
            let pp = Permutation::random(n, &mut rng);
            let qq = Permutation::random(n, &mut rng);
            let x = Permutation::random(n, &mut rng);
            let w = gen::random_weights(n, 8000 + trial);
            let unaligned = |a: &Permutation, b: &Permutation| -> Vec<bool> {
                let pairs = oracles::canonical_lcs_pairs(a.forward(), b.forward());
                let mut out = vec![true; n];
                for (i, _) in pairs {
                    out[a.at(i)] = false;
                }
                out
            };
            let uxp = unaligned(&pp, &x);
            let uxq = unaligned(&qq, &x);
            let shared: f64 = (0..n).filter(|&e| uxp[e] && uxq[e]).map(|e| w.of(e)).sum();
            let slack = dist::ulam_indel_weighted(&x, &pp, &w).unwrap()
                + dist::ulam_indel_weighted(&x, &qq, &w).unwrap()
                - dist::ulam_indel_weighted(&pp, &qq, &w).unwrap();
            assert!(
                shared <= slack + 1e-9,
                "trial {trial}: shared {shared} > slack {slack}"
            );
        }
    }

    #[test]
    fn default_solver_dispatch() {
        for metric in Metric::ALL {
            let s = default_solver(metric);
            assert_eq!(s.subset_size(), metric.subset_size());
        }
    }
}
