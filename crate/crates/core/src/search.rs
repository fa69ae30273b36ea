//! Exact minimum-entropy partitioning of a weighted graph into independent
//! sets (graphs of at most 128 vertices, bitmask representation).
//!
//! The cost of a partition is `Σ h(w(C))` with `h(p) = -p log2 p`. Some
//! optimal partition has its heaviest class maximal in the graph: moving a
//! vertex from a lighter class into the heaviest one never increases the
//! cost (h is Schur-concave). Applying that to the remainder gives
//!
//! ```text
//! f(R) = min over maximal independent C of G[R] of  h(w(C)) + f(R \ C)
//! ```
//!
//! which is evaluated depth-first with memoization on `R`, budgeted
//! branch-and-bound and a majorization lower bound.

use std::collections::HashMap;

pub(crate) const DEFAULT_EPS: f64 = 1e-12;

/// `-p log2 p` with `h(0) = 0`.
pub fn h(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

pub(crate) fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

/// Lowest cost for total mass `mass` split into classes of mass at most
/// `cap`: fill classes to the cap, remainder last.
fn mass_lower_bound(mass: f64, cap: f64) -> f64 {
    if mass <= 0.0 || cap <= 0.0 {
        return 0.0;
    }
    let k = (mass / cap + 1e-12).floor();
    let rest = (mass - k * cap).max(0.0);
    k * h(cap) + h(rest)
}

#[derive(Debug, Clone, Copy)]
enum Memo {
    Exact(f64, u128),
    Above(f64),
}

pub struct MinEntropySearch {
    adj: Vec<u128>,
    w: Vec<f64>,
    all: u128,
    memo: HashMap<u128, Memo>,
    eps: f64,
}

impl MinEntropySearch {
    pub fn new(adj: Vec<u128>, w: Vec<f64>) -> Self {
        assert_eq!(adj.len(), w.len());
        assert!(adj.len() <= 128);
        let all = if adj.len() == 128 {
            u128::MAX
        } else {
            (1u128 << adj.len()) - 1
        };
        MinEntropySearch {
            adj,
            w,
            all,
            memo: HashMap::new(),
            eps: DEFAULT_EPS,
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn weight(&self, set: u128) -> f64 {
        bits(set).map(|v| self.w[v]).sum()
    }

    /// Maximal independent sets of the subgraph induced by `r`, via
    /// Bron–Kerbosch with pivoting on the complement.
    pub fn maximal_independent_sets(&self, r: u128) -> Vec<u128> {
        let mut out = Vec::new();
        self.bk(r, 0, r, 0, &mut out);
        out
    }

    fn non_adj(&self, v: usize, r: u128) -> u128 {
        r & !self.adj[v] & !(1u128 << v)
    }

    fn bk(&self, r: u128, chosen: u128, p: u128, x: u128, out: &mut Vec<u128>) {
        if p == 0 {
            if x == 0 {
                out.push(chosen);
            }
            return;
        }
        let pivot = bits(p | x)
            .max_by_key(|&u| (p & self.non_adj(u, r)).count_ones())
            .expect("p | x is non-empty");
        let mut p = p;
        let mut x = x;
        for v in bits(p & !self.non_adj(pivot, r)) {
            let nv = self.non_adj(v, r);
            self.bk(r, chosen | (1u128 << v), p & nv, x & nv, out);
            p &= !(1u128 << v);
            x |= 1u128 << v;
        }
    }

    /// `Some(f(r))` if `f(r) <= budget` (within eps), `None` otherwise.
    pub fn solve(&mut self, r: u128, budget: f64) -> Option<f64> {
        if r == 0 {
            return Some(0.0);
        }
        match self.memo.get(&r) {
            Some(&Memo::Exact(v, _)) => return (v <= budget + self.eps).then_some(v),
            Some(&Memo::Above(lb)) if budget <= lb => return None,
            _ => {}
        }

        let mut sets: Vec<(u128, f64)> = self
            .maximal_independent_sets(r)
            .into_iter()
            .map(|s| (s, self.weight(s)))
            .collect();
        sets.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mass = self.weight(r);
        let cap = sets[0].1;

        let mut best = f64::INFINITY;
        let mut best_set = 0u128;
        if mass_lower_bound(mass, cap) <= budget + self.eps {
            for &(s, ws) in &sets {
                let bound = budget.min(best);
                let cost = h(ws);
                if cost + mass_lower_bound(mass - ws, cap) > bound + self.eps {
                    continue;
                }
                if let Some(v) = self.solve(r & !s, bound - cost) {
                    if cost + v < best - self.eps {
                        best = cost + v;
                        best_set = s;
                    }
                }
            }
        }

        if best <= budget + self.eps {
            self.memo.insert(r, Memo::Exact(best, best_set));
            Some(best)
        } else {
            let lb = match self.memo.get(&r) {
                Some(&Memo::Above(prev)) => prev.max(budget),
                _ => budget,
            };
            self.memo.insert(r, Memo::Above(lb));
            None
        }
    }

    /// Optimal cost and the classes of one optimal partition of the whole
    /// vertex set.
    pub fn optimum(&mut self) -> (f64, Vec<u128>) {
        let value = self
            .solve(self.all, f64::INFINITY)
            .expect("unbounded search always succeeds");
        let mut classes = Vec::new();
        let mut r = self.all;
        while r != 0 {
            match self.memo.get(&r) {
                Some(&Memo::Exact(_, s)) => {
                    classes.push(s);
                    r &= !s;
                }
                _ => {
                    // Sub-results on the optimal path are always exact;
                    // recompute defensively if evicted by an Above entry.
                    self.memo.remove(&r);
                    self.solve(r, f64::INFINITY);
                }
            }
        }
        (value, classes)
    }
}

/// Partition of all vertices into independent sets with minimum cost,
/// returned as a canonical assignment that is lexicographically smallest
/// among optimal partitions.
pub fn lexmin_optimal_assignment(adj: &[u128], w: &[f64], eps: f64) -> (f64, Vec<usize>) {
    let n = adj.len();
    if n == 0 {
        return (0.0, Vec::new());
    }
    let (target, classes) = MinEntropySearch::new(adj.to_vec(), w.to_vec())
        .with_eps(eps)
        .optimum();
    let mut witness = vec![0usize; n];
    for (c, &s) in classes.iter().enumerate() {
        for v in bits(s) {
            witness[v] = c;
        }
    }

    // Prefix classes fixed so far, by canonical color.
    let mut fixed: Vec<u128> = Vec::new();
    for v in 0..n {
        // The witness' choice for v as a canonical color.
        let wc = witness[v];
        let witness_color = fixed
            .iter()
            .position(|&cls| bits(cls).any(|u| witness[u] == wc))
            .unwrap_or(fixed.len());
        let mut chosen = witness_color;
        for c in 0..witness_color {
            if adj[v] & fixed[c] != 0 {
                continue;
            }
            let mut trial = fixed.clone();
            trial[c] |= 1u128 << v;
            if let Some(assign) = constrained_completion(adj, w, &trial, v + 1, target, eps) {
                witness = assign;
                chosen = c;
                break;
            }
        }
        if chosen == fixed.len() {
            fixed.push(1u128 << v);
        } else {
            fixed[chosen] |= 1u128 << v;
        }
    }

    let mut assign = vec![0usize; n];
    for (c, &s) in fixed.iter().enumerate() {
        for v in bits(s) {
            assign[v] = c;
        }
    }
    let value = fixed.iter().map(|&s| h(bits(s).map(|v| w[v]).sum())).sum();
    (value, assign)
}

/// Best completion of a partial partition where vertices `0..start` are
/// already placed in `fixed`. Returns a full assignment (fixed classes keep
/// their indices, new classes follow) if its cost is within `target + eps`.
fn constrained_completion(
    adj: &[u128],
    w: &[f64],
    fixed: &[u128],
    start: usize,
    target: f64,
    eps: f64,
) -> Option<Vec<usize>> {
    let n = adj.len();
    let k = fixed.len();
    let rest: Vec<usize> = (start..n).collect();
    let m = k + rest.len();
    // Contracted graph: k pairwise-adjacent super vertices, then the rest.
    let mut cadj = vec![0u128; m];
    let mut cw = vec![0.0; m];
    for i in 0..k {
        cw[i] = bits(fixed[i]).map(|v| w[v]).sum();
        for j in 0..k {
            if i != j {
                cadj[i] |= 1u128 << j;
            }
        }
    }
    for (a, &u) in rest.iter().enumerate() {
        let ia = k + a;
        cw[ia] = w[u];
        for i in 0..k {
            if adj[u] & fixed[i] != 0 {
                cadj[ia] |= 1u128 << i;
                cadj[i] |= 1u128 << ia;
            }
        }
        for (b, &v) in rest.iter().enumerate() {
            if adj[u] >> v & 1 == 1 {
                cadj[ia] |= 1u128 << (k + b);
            }
        }
    }
    let mut search = MinEntropySearch::new(cadj, cw).with_eps(eps);
    let all = search.all;
    search.solve(all, target)?;
    let (_, classes) = search.optimum();

    let mut assign = vec![usize::MAX; n];
    for (i, &cls) in fixed.iter().enumerate() {
        for v in bits(cls) {
            assign[v] = i;
        }
    }
    let mut next = k;
    for &cls in &classes {
        let color = match bits(cls).find(|&i| i < k) {
            Some(i) => i,
            None => {
                next += 1;
                next - 1
            }
        };
        for i in bits(cls).filter(|&i| i >= k) {
            assign[rest[i - k]] = color;
        }
    }
    Some(assign)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Vec<u128> {
        (0..n)
            .map(|v| (1u128 << ((v + 1) % n)) | (1u128 << ((v + n - 1) % n)))
            .collect()
    }

    #[test]
    fn bound_is_exact_for_full_classes() {
        assert!((mass_lower_bound(1.0, 0.5) - 1.0).abs() < 1e-15);
        assert_eq!(mass_lower_bound(0.0, 0.5), 0.0);
    }

    #[test]
    fn mis_of_five_cycle() {
        let s = MinEntropySearch::new(cycle(5), vec![0.2; 5]);
        let sets = s.maximal_independent_sets(0b11111);
        assert_eq!(sets.len(), 5);
        assert!(sets.iter().all(|m| m.count_ones() == 2));
    }

    #[test]
    fn ten_cycle_bipartition() {
        let (v, assign) = lexmin_optimal_assignment(&cycle(10), &[0.1; 10], DEFAULT_EPS);
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(assign, vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn budget_rejects_when_too_small() {
        let mut s = MinEntropySearch::new(cycle(10), vec![0.1; 10]);
        assert!(s.solve((1 << 10) - 1, 0.9).is_none());
        assert!((s.solve((1 << 10) - 1, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }
}
