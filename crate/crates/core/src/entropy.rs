//! Shannon entropy, Körner graph entropy and supporting oracles.
//!
//! Graph entropy is `min I(W; X)` over conditionals `p(w|x)` supported on
//! independent sets `w ∋ x`. W ranges over maximal independent sets only: any
//! feasible W can be pushed onto maximal supersets without increasing
//! `I(W; X)`. The minimum is found by alternating minimization:
//!
//! ```text
//! q(w)   = Σ_x p(x) p(w|x)
//! p(w|x) = q(w) [x ∈ w] / Σ_{w' ∋ x} q(w')
//! ```
//!
//! The objective is convex in `p(w|x)` and each sweep is non-increasing.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coloring::{maximal_independent_sets, support_block_pairs, DEFAULT_MIS_CAP};
use crate::error::{Error, Result};
use crate::graphs::{Graph, ProbabilisticGraph};
use crate::model::{support, to_f64, Blocks, Prob, ProblemInstance};
use crate::search::h;

/// Entropy in bits of an exact distribution (`0 log 0 = 0`).
pub fn entropy(dist: &[Prob]) -> f64 {
    dist.iter().map(|p| h(to_f64(p))).sum()
}

/// Entropy in bits of a floating-point distribution.
pub fn entropy_f64(dist: &[f64]) -> f64 {
    dist.iter().map(|&p| h(p)).sum()
}

/// A conditional distribution of W (a maximal independent set) given X.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionalDesign {
    pub sets: Vec<Vec<usize>>,
    /// `weights[x][w] = p(w | x)`; zero unless `x ∈ sets[w]`.
    pub weights: Vec<Vec<f64>>,
}

impl ConditionalDesign {
    pub fn set_marginal(&self, px: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.sets.len()];
        for (x, row) in self.weights.iter().enumerate() {
            for (w, &pw) in row.iter().enumerate() {
                q[w] += px[x] * pw;
            }
        }
        q
    }

    /// `I(W; X)` in bits under the vertex distribution `px`.
    pub fn mutual_information(&self, px: &[f64]) -> f64 {
        let q = self.set_marginal(px);
        let mut total = 0.0;
        for (x, row) in self.weights.iter().enumerate() {
            if px[x] <= 0.0 {
                continue;
            }
            for (w, &pw) in row.iter().enumerate() {
                if pw > 0.0 {
                    total += px[x] * pw * (pw / q[w]).log2();
                }
            }
        }
        total.max(0.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GraphEntropyConfig {
    /// Stop when the relative objective change drops below this.
    pub tol: f64,
    pub max_iter: usize,
    pub mis_cap: usize,
    /// Seed for the perturbed restart.
    pub seed: u64,
    /// Record the objective after every sweep.
    pub trace: bool,
}

impl Default for GraphEntropyConfig {
    fn default() -> Self {
        GraphEntropyConfig {
            tol: 1e-10,
            max_iter: 10_000,
            mis_cap: DEFAULT_MIS_CAP,
            seed: 0,
            trace: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GraphEntropy {
    /// Objective at the returned design (an upper bound on `H_G(X)`).
    pub bits: f64,
    /// Certified lower bound from the vertex-packing dual.
    pub lower_bound: f64,
    pub iterations: usize,
    /// False if `max_iter` was hit; `bits` is then only an upper bound.
    pub converged: bool,
    pub design: ConditionalDesign,
    pub trace: Vec<f64>,
}

struct Run {
    bits: f64,
    iterations: usize,
    converged: bool,
    weights: Vec<Vec<f64>>,
    trace: Vec<f64>,
}

fn alternate(
    px: &[f64],
    sets: &[Vec<usize>],
    members: &[Vec<usize>],
    mut weights: Vec<Vec<f64>>,
    cfg: &GraphEntropyConfig,
) -> Run {
    let design = |w: &Vec<Vec<f64>>| ConditionalDesign {
        sets: sets.to_vec(),
        weights: w.clone(),
    };
    let mut trace = Vec::new();
    let mut prev = design(&weights).mutual_information(px);
    if cfg.trace {
        trace.push(prev);
    }
    let mut iterations = 0;
    let mut converged = false;
    let mut best = (prev, weights.clone());
    while iterations < cfg.max_iter {
        iterations += 1;
        let q = design(&weights).set_marginal(px);
        for (x, row) in weights.iter_mut().enumerate() {
            let z: f64 = members[x].iter().map(|&w| q[w]).sum();
            if z <= 0.0 {
                continue;
            }
            for &w in &members[x] {
                row[w] = q[w] / z;
            }
        }
        let cur = design(&weights).mutual_information(px);
        if cfg.trace {
            trace.push(cur);
        }
        if cur < best.0 {
            best = (cur, weights.clone());
        }
        let change = (prev - cur).abs();
        prev = cur;
        if change <= cfg.tol * cur.abs() || change == 0.0 {
            converged = true;
            break;
        }
    }
    Run {
        bits: best.0,
        iterations,
        converged,
        weights: best.1,
        trace,
    }
}

/// Dual lower bound at the packing point `a_x = Σ_{w ∋ x} q(w)`:
/// `L(a) - (max_w Σ_{x∈w} p_x / a_x - 1) / ln 2` with `L(a) = -Σ p_x log2 a_x`.
fn dual_lower_bound(px: &[f64], sets: &[Vec<usize>], q: &[f64], members: &[Vec<usize>]) -> f64 {
    let a: Vec<f64> = members
        .iter()
        .map(|ws| ws.iter().map(|&w| q[w]).sum())
        .collect();
    if px.iter().zip(&a).any(|(&p, &ax)| p > 0.0 && ax <= 0.0) {
        return 0.0;
    }
    let l: f64 = px
        .iter()
        .zip(&a)
        .filter(|(&p, _)| p > 0.0)
        .map(|(&p, &ax)| -p * ax.log2())
        .sum();
    let m = sets
        .iter()
        .map(|s| {
            s.iter()
                .filter(|&&x| px[x] > 0.0)
                .map(|&x| px[x] / a[x])
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    (l - (m - 1.0) / std::f64::consts::LN_2).max(0.0)
}

/// Graph entropy `H_G(X)` in bits with the achieving design.
pub fn graph_entropy(pg: &ProbabilisticGraph, cfg: &GraphEntropyConfig) -> Result<GraphEntropy> {
    let n = pg.graph.vertex_count();
    let px: Vec<f64> = pg.dist.iter().map(to_f64).collect();
    if n == 0 {
        return Ok(GraphEntropy {
            bits: 0.0,
            lower_bound: 0.0,
            iterations: 0,
            converged: true,
            design: ConditionalDesign {
                sets: Vec::new(),
                weights: Vec::new(),
            },
            trace: Vec::new(),
        });
    }
    let sets = maximal_independent_sets(&pg.graph, cfg.mis_cap)?;
    let mut members = vec![Vec::new(); n];
    for (w, s) in sets.iter().enumerate() {
        for &x in s {
            members[x].push(w);
        }
    }
    let uniform_init: Vec<Vec<f64>> = members
        .iter()
        .map(|ws| {
            let mut row = vec![0.0; sets.len()];
            for &w in ws {
                row[w] = 1.0 / ws.len() as f64;
            }
            row
        })
        .collect();

    let mut run = alternate(&px, &sets, &members, uniform_init, cfg);
    let q_of = |w: &Vec<Vec<f64>>| {
        ConditionalDesign {
            sets: sets.clone(),
            weights: w.clone(),
        }
        .set_marginal(&px)
    };
    let mut lower = dual_lower_bound(&px, &sets, &q_of(&run.weights), &members);

    // Wide duality gap: retry once from a seeded interior point.
    if run.bits - lower > 1e-6 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let init: Vec<Vec<f64>> = members
            .iter()
            .map(|ws| {
                let mut row = vec![0.0; sets.len()];
                let raw: Vec<f64> = ws.iter().map(|_| 1.0 + rng.gen::<f64>()).collect();
                let z: f64 = raw.iter().sum();
                for (&w, r) in ws.iter().zip(raw) {
                    row[w] = r / z;
                }
                row
            })
            .collect();
        let retry = alternate(&px, &sets, &members, init, cfg);
        let retry_lower = dual_lower_bound(&px, &sets, &q_of(&retry.weights), &members);
        lower = lower.max(retry_lower);
        if retry.bits < run.bits {
            let mut trace = std::mem::take(&mut run.trace);
            trace.extend(retry.trace);
            run = Run { trace, ..retry };
        }
    }

    Ok(GraphEntropy {
        bits: run.bits,
        lower_bound: lower.min(run.bits),
        iterations: run.iterations,
        converged: run.converged,
        design: ConditionalDesign {
            sets,
            weights: run.weights,
        },
        trace: run.trace,
    })
}

/// CSV trace `iter,objective_bits`.
pub fn trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("iter,objective_bits\n");
    for (i, v) in trace.iter().enumerate() {
        out.push_str(&format!("{i},{v:.15}\n"));
    }
    out
}

// ---------------------------------------------------------------------------
// Fractional chromatic number

/// Exact optimum of `min Σ_s t_s` s.t. `Σ_{s ∋ v} t_s ≥ 1`, `t ≥ 0`, over
/// maximal independent sets `s`, computed through its dual
/// `max Σ_v y_v` s.t. `Σ_{v ∈ s} y_v ≤ 1` with a rational simplex.
pub fn fractional_chromatic_lp(g: &Graph, mis_cap: usize) -> Result<BigRational> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(BigRational::zero());
    }
    let sets = maximal_independent_sets(g, mis_cap)?;
    let rows: Vec<Vec<BigRational>> = sets
        .iter()
        .map(|s| {
            let mut r = vec![BigRational::zero(); n];
            for &v in s {
                r[v] = BigRational::one();
            }
            r
        })
        .collect();
    Ok(simplex_max_packing(&rows))
}

/// `max 1·y` s.t. `A y ≤ 1`, `y ≥ 0` for a 0/1 matrix `A` with no zero
/// column. Bland's rule, so it terminates.
fn simplex_max_packing(a: &[Vec<BigRational>]) -> BigRational {
    let m = a.len();
    let n = a[0].len();
    let width = n + m + 1;
    // Tableau rows: [A | I | b]; objective row holds reduced costs.
    let mut t: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r.push(BigRational::one());
            r
        })
        .collect();
    let mut obj: Vec<BigRational> = (0..width)
        .map(|j| {
            if j < n {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(enter) = (0..n + m).find(|&j| obj[j].is_positive()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave.expect("packing LP is bounded");
        let pivot = t[r][enter].clone();
        for v in t[r].iter_mut() {
            *v /= &pivot;
        }
        let prow = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= &f * p;
                }
            }
        }
        let f = obj[enter].clone();
        for (v, p) in obj.iter_mut().zip(&prow) {
            *v -= &f * p;
        }
        basis[r] = enter;
    }
    -obj[width - 1].clone()
}

// ---------------------------------------------------------------------------
// H(f^n | M_A, M_B)

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalFEntropy {
    pub bits: f64,
    /// Every message pair with positive mass determines a single `f^n`,
    /// decided on exact masses.
    pub determined: bool,
}

/// `H(f(X^n, Y^n) | M_A, M_B)` under the n-fold product distribution on the
/// support. `msg_a` is indexed by X-block, `msg_b` by Y-block.
pub fn conditional_entropy_of_f(
    inst: &ProblemInstance,
    n: usize,
    msg_a: &[usize],
    msg_b: &[usize],
    budget: usize,
) -> Result<ConditionalFEntropy> {
    let s = support(inst);
    let pairs = support_block_pairs(inst, n, budget)?;
    let xb = Blocks::new(inst.nx(), n);
    let yb = Blocks::new(inst.ny(), n);
    if msg_a.len() != xb.count().unwrap_or(0) || msg_b.len() != yb.count().unwrap_or(0) {
        return Err(Error::Validation(
            "message tables do not cover every block".into(),
        ));
    }
    let sb = Blocks::new(s.len(), n);
    let mut groups: HashMap<(usize, usize), HashMap<Vec<usize>, Prob>> = HashMap::new();
    for (t, &(xi, yi)) in pairs.iter().enumerate() {
        let cells = sb.decode(t);
        let p = cells.iter().fold(Prob::one(), |acc, &c| {
            acc * inst.pmf(s.pairs[c].0, s.pairs[c].1)
        });
        let fv: Vec<usize> = cells
            .iter()
            .map(|&c| inst.f(s.pairs[c].0, s.pairs[c].1))
            .collect();
        *groups
            .entry((msg_a[xi], msg_b[yi]))
            .or_default()
            .entry(fv)
            .or_insert_with(Prob::zero) += p;
    }
    let mut bits = 0.0;
    let mut determined = true;
    for by_f in groups.values() {
        if by_f.len() > 1 {
            determined = false;
        }
        let total: Prob = by_f.values().fold(Prob::zero(), |a, b| a + b);
        for p in by_f.values() {
            let ratio = to_f64(&(&total / p));
            bits += to_f64(p) * ratio.log2();
        }
    }
    Ok(ConditionalFEntropy { bits, determined })
}

#[cfg(test)]
pub(crate) fn rational(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}
