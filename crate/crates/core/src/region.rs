//! Inner and outer bounds on the rate region, time-sharing membership and
//! finite-n chromatic-entropy frontiers.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coloring::{enumerate_colorings, support_block_pairs, DEFAULT_BLOCK_BUDGET};
use crate::entropy::{entropy, graph_entropy, GraphEntropyConfig};
use crate::error::{Error, Result};
use crate::graphs::{
    confusability_graphs, confusability_pgraphs, f_rook_graph, f_rook_pgraph, or_product,
};
use crate::model::{
    marginals, product_probs, support, support_probs, to_f64, Blocks, ProblemInstance,
};
use crate::search::MinEntropySearch;

/// Tolerance for corner comparisons, tightness and membership.
pub const REGION_TOL: f64 = 1e-9;

/// Rates in bits per symbol on the A→C, B→C and broadcast links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTriple {
    pub r_a: f64,
    pub r_b: f64,
    pub r_c: f64,
}

impl RateTriple {
    pub fn new(r_a: f64, r_b: f64, r_c: f64) -> Result<Self> {
        let t = RateTriple { r_a, r_b, r_c };
        if t.as_array().iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Validation(format!(
                "rates must be finite and >= 0: {t:?}"
            )));
        }
        Ok(t)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.r_a, self.r_b, self.r_c]
    }

    fn from_array(a: [f64; 3]) -> Self {
        RateTriple {
            r_a: a[0],
            r_b: a[1],
            r_c: a[2],
        }
    }

    /// Component-wise `self >= other - tol`.
    pub fn dominates(&self, other: &RateTriple, tol: f64) -> bool {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .all(|(a, b)| *a >= b - tol)
    }

    pub fn approx_eq(&self, other: &RateTriple, tol: f64) -> bool {
        self.dominates(other, tol) && other.dominates(self, tol)
    }

    pub fn lerp(&self, other: &RateTriple, lambda: f64) -> RateTriple {
        let (a, b) = (self.as_array(), other.as_array());
        RateTriple::from_array([0, 1, 2].map(|k| lambda * a[k] + (1.0 - lambda) * b[k]))
    }
}

/// The single-letter graph entropies the corners are assembled from.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SingleLetter {
    pub h_x: f64,
    pub h_y: f64,
    /// `H_{G_{X|Y}^f}(X)`
    pub hg_x: f64,
    /// `H_{G_{Y|X}^f}(Y)`
    pub hg_y: f64,
    /// `H_{G_XY^f}(X, Y)`
    pub hg_xy: f64,
}

pub fn single_letter(inst: &ProblemInstance, cfg: &GraphEntropyConfig) -> Result<SingleLetter> {
    let (px, py) = marginals(inst);
    let (pgx, pgy) = confusability_pgraphs(inst);
    Ok(SingleLetter {
        h_x: entropy(&px),
        h_y: entropy(&py),
        hg_x: graph_entropy(&pgx, cfg)?.bits,
        hg_y: graph_entropy(&pgy, cfg)?.bits,
        hg_xy: graph_entropy(&f_rook_pgraph(inst), cfg)?.bits,
    })
}

impl SingleLetter {
    pub fn corner_i1(&self) -> RateTriple {
        RateTriple::from_array([self.h_x, self.h_y, self.hg_xy])
    }

    pub fn corner_i2(&self) -> RateTriple {
        RateTriple::from_array([self.hg_x, self.hg_y, self.hg_x + self.hg_y])
    }

    pub fn corner_o(&self) -> RateTriple {
        RateTriple::from_array([self.hg_x, self.hg_y, self.hg_xy])
    }
}

/// `(H(X), H(Y), H_{G_XY^f}(X,Y))`: send the sources, relay a coloring.
pub fn inner_bound_1(inst: &ProblemInstance, cfg: &GraphEntropyConfig) -> Result<RateTriple> {
    let (px, py) = marginals(inst);
    let hg_xy = graph_entropy(&f_rook_pgraph(inst), cfg)?.bits;
    Ok(RateTriple::from_array([entropy(&px), entropy(&py), hg_xy]))
}

/// Send colorings of the confusability graphs; relay forwards both.
pub fn inner_bound_2(inst: &ProblemInstance, cfg: &GraphEntropyConfig) -> Result<RateTriple> {
    let (pgx, pgy) = confusability_pgraphs(inst);
    let a = graph_entropy(&pgx, cfg)?.bits;
    let b = graph_entropy(&pgy, cfg)?.bits;
    Ok(RateTriple::from_array([a, b, a + b]))
}

pub fn outer_bound(inst: &ProblemInstance, cfg: &GraphEntropyConfig) -> Result<RateTriple> {
    Ok(single_letter(inst, cfg)?.corner_o())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    InsideInner,
    BetweenBounds,
    OutsideOuter,
}

/// Corners of both bounds.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Bounds {
    pub corner_i1: RateTriple,
    pub corner_i2: RateTriple,
    pub corner_o: RateTriple,
}

impl Bounds {
    pub fn compute(inst: &ProblemInstance, cfg: &GraphEntropyConfig) -> Result<Self> {
        let sl = single_letter(inst, cfg)?;
        Ok(Bounds {
            corner_i1: sl.corner_i1(),
            corner_i2: sl.corner_i2(),
            corner_o: sl.corner_o(),
        })
    }

    /// Inner and outer bounds coincide: the outer corner is one of the
    /// inner corners.
    pub fn tight(&self) -> bool {
        self.corner_i1.approx_eq(&self.corner_o, REGION_TOL)
            || self.corner_i2.approx_eq(&self.corner_o, REGION_TOL)
    }

    /// Time-sharing weight `λ` with `r >= λ·i1 + (1-λ)·i2`, if one exists.
    pub fn time_sharing(&self, r: &RateTriple) -> Option<f64> {
        let (i1, i2, rr) = (
            self.corner_i1.as_array(),
            self.corner_i2.as_array(),
            r.as_array(),
        );
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for k in 0..3 {
            let d = i1[k] - i2[k];
            let slack = rr[k] - i2[k] + REGION_TOL;
            if d.abs() <= f64::EPSILON {
                if slack < 0.0 {
                    return None;
                }
            } else if d > 0.0 {
                hi = hi.min(slack / d);
            } else {
                lo = lo.max(slack / d);
            }
        }
        (lo <= hi).then_some(lo.max(0.0))
    }

    pub fn membership(&self, r: &RateTriple) -> Membership {
        if self.time_sharing(r).is_some() {
            Membership::InsideInner
        } else if !r.dominates(&self.corner_o, REGION_TOL) {
            Membership::OutsideOuter
        } else {
            Membership::BetweenBounds
        }
    }
}

pub fn membership(
    inst: &ProblemInstance,
    r: &RateTriple,
    cfg: &GraphEntropyConfig,
) -> Result<Membership> {
    Ok(Bounds::compute(inst, cfg)?.membership(r))
}

// ---------------------------------------------------------------------------
// Finite-n frontier

#[derive(Debug, Clone, Copy)]
pub struct FrontierConfig {
    pub max_alphabet: usize,
    pub max_n: usize,
    /// Per-side cap on enumerated colorings of the confusability powers.
    pub max_colorings: usize,
    /// Cap on `(c_A, c_B)` pairs examined.
    pub max_pairs: usize,
    pub block_budget: usize,
    pub eps: f64,
}

impl Default for FrontierConfig {
    fn default() -> Self {
        FrontierConfig {
            max_alphabet: 5,
            max_n: 2,
            max_colorings: 50_000,
            max_pairs: 5_000_000,
            block_budget: DEFAULT_BLOCK_BUDGET,
            eps: 1e-12,
        }
    }
}

/// Pareto-minimal per-symbol triples `(H(c_A), H(c_B), H(c_C)) / n` over all
/// color covers of the n-th OR power of `G_XY^f`.
///
/// `c_A` and `c_B` range over every canonical coloring of the powers of the
/// two confusability graphs (equivalently, every `c_A × c_B` coloring the
/// rook's-graph power). For a fixed pair only the cheapest relay coloring
/// matters; it is a minimum-entropy coloring of the quotient of the support
/// blocks by `c_A × c_B`, solved exactly with a budget taken from points
/// already on the frontier.
pub fn chromatic_region_frontier(
    inst: &ProblemInstance,
    n: usize,
    cfg: &FrontierConfig,
) -> Result<Vec<RateTriple>> {
    if n == 0 {
        return Err(Error::Validation("block length must be positive".into()));
    }
    if n > cfg.max_n {
        return Err(Error::cap("frontier block length", n, cfg.max_n));
    }
    let widest = inst.nx().max(inst.ny());
    if widest > cfg.max_alphabet {
        return Err(Error::cap(
            "frontier alphabet size",
            widest,
            cfg.max_alphabet,
        ));
    }

    let (gx, gy) = confusability_graphs(inst);
    let (px, py) = marginals(inst);
    let side =
        |g: &crate::graphs::Graph, p: &[crate::model::Prob]| -> Result<Vec<(Vec<usize>, f64)>> {
            let prod = or_product(g, n)?.materialize(128)?;
            let pn = product_probs(p, n, 128)?;
            Ok(enumerate_colorings(&prod, cfg.max_colorings)?
                .into_iter()
                .map(|c| {
                    let hc = c.entropy(&pn);
                    (c.colors().to_vec(), hc)
                })
                .collect())
        };
    let side_a = side(&gx, &px)?;
    let side_b = side(&gy, &py)?;
    let total_pairs = side_a.len().saturating_mul(side_b.len());
    if total_pairs > cfg.max_pairs {
        return Err(Error::cap(
            "frontier coloring pairs",
            total_pairs,
            cfg.max_pairs,
        ));
    }

    // Support blocks, their masses and the edges of the OR power among them.
    let s = support(inst);
    let blocks = support_block_pairs(inst, n, cfg.block_budget)?;
    let sb = Blocks::new(s.len(), n);
    let cell_p: Vec<f64> = support_probs(inst, &s).iter().map(to_f64).collect();
    let block_w: Vec<f64> = (0..blocks.len())
        .map(|t| sb.decode(t).iter().map(|&c| cell_p[c]).product())
        .collect();
    let g = f_rook_graph(inst);
    let tuples: Vec<Vec<usize>> = (0..blocks.len()).map(|t| sb.decode(t)).collect();
    let mut edges = Vec::new();
    for t in 0..tuples.len() {
        for u in t + 1..tuples.len() {
            if tuples[t]
                .iter()
                .zip(&tuples[u])
                .any(|(&a, &b)| g.has_edge(a, b))
            {
                edges.push((t, u));
            }
        }
    }

    let mut order: Vec<(usize, usize)> = (0..side_a.len())
        .flat_map(|i| (0..side_b.len()).map(move |j| (i, j)))
        .collect();
    order.sort_by(|&(i, j), &(k, l)| {
        let s1 = side_a[i].1 + side_b[j].1;
        let s2 = side_a[k].1 + side_b[l].1;
        s1.total_cmp(&s2)
            .then(side_a[i].1.total_cmp(&side_a[k].1))
            .then((i, j).cmp(&(k, l)))
    });

    let nf = n as f64;
    let mut found: Vec<[f64; 3]> = Vec::new();
    for (i, j) in order {
        let (ref ca, ha) = side_a[i];
        let (ref cb, hb) = side_b[j];
        let budget = found
            .iter()
            .filter(|p| p[0] <= ha + REGION_TOL && p[1] <= hb + REGION_TOL)
            .map(|p| p[2])
            .fold(f64::INFINITY, f64::min);

        let mut class_of: HashMap<(usize, usize), usize> = HashMap::new();
        let mut cls = Vec::with_capacity(blocks.len());
        let mut w: Vec<f64> = Vec::new();
        for (t, &(xb, yb)) in blocks.iter().enumerate() {
            let next = class_of.len();
            let c = *class_of.entry((ca[xb], cb[yb])).or_insert(next);
            if c == w.len() {
                w.push(0.0);
            }
            w[c] += block_w[t];
            cls.push(c);
        }
        if w.len() > 128 {
            return Err(Error::cap("relay quotient size", w.len(), 128));
        }
        let mut adj = vec![0u128; w.len()];
        for &(t, u) in &edges {
            let (a, b) = (cls[t], cls[u]);
            debug_assert_ne!(a, b, "c_A x c_B must color the rook's-graph power");
            adj[a] |= 1u128 << b;
            adj[b] |= 1u128 << a;
        }
        let all = if w.len() == 128 {
            u128::MAX
        } else {
            (1u128 << w.len()) - 1
        };
        let mut search = MinEntropySearch::new(adj, w).with_eps(cfg.eps);
        let bound = if budget.is_finite() {
            budget * nf
        } else {
            f64::INFINITY
        };
        if let Some(hc) = search.solve(all, bound) {
            let point = [ha / nf, hb / nf, hc / nf];
            if point[2] < budget - REGION_TOL || !budget.is_finite() {
                found.push(point);
            }
        }
    }

    let mut front: Vec<RateTriple> = Vec::new();
    for p in &found {
        let t = RateTriple::from_array(*p);
        let dominated = found.iter().any(|q| {
            let qt = RateTriple::from_array(*q);
            t.dominates(&qt, REGION_TOL) && !qt.approx_eq(&t, REGION_TOL)
        });
        if !dominated && !front.iter().any(|f| f.approx_eq(&t, REGION_TOL)) {
            front.push(t);
        }
    }
    front.sort_by(|a, b| {
        a.r_a
            .total_cmp(&b.r_a)
            .then(a.r_b.total_cmp(&b.r_b))
            .then(a.r_c.total_cmp(&b.r_c))
    });
    Ok(front)
}

#[derive(Debug, Clone, Serialize)]
pub struct FrontierLevel {
    pub n: usize,
    pub points: Vec<RateTriple>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateRegionReport {
    pub corner_i1: RateTriple,
    pub corner_i2: RateTriple,
    pub corner_o: RateTriple,
    pub tight: bool,
    pub frontier_n: Vec<FrontierLevel>,
}

pub fn region_report(
    inst: &ProblemInstance,
    frontier_ns: &[usize],
    ge: &GraphEntropyConfig,
    fc: &FrontierConfig,
) -> Result<RateRegionReport> {
    let b = Bounds::compute(inst, ge)?;
    let frontier_n = frontier_ns
        .iter()
        .map(|&n| {
            Ok(FrontierLevel {
                n,
                points: chromatic_region_frontier(inst, n, fc)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateRegionReport {
        corner_i1: b.corner_i1,
        corner_i2: b.corner_i2,
        corner_o: b.corner_o,
        tight: b.tight(),
        frontier_n,
    })
}

impl RateRegionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `n,r_a,r_b,r_c` rows of every frontier point.
    pub fn frontier_csv(&self) -> String {
        let mut out = String::from("n,r_a,r_b,r_c\n");
        for level in &self.frontier_n {
            for p in &level.points {
                let _ = writeln!(out, "{},{:.12},{:.12},{:.12}", level.n, p.r_a, p.r_b, p.r_c);
            }
        }
        out
    }
}
