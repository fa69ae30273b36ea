//! Colorings, maximal independent sets, exact chromatic entropy and color
//! covers.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{f_rook_graph, product_pgraph, Graph, ProbabilisticGraph};
use crate::model::{support, to_f64, Blocks, Prob, ProblemInstance};
use crate::search::{self, bits, MinEntropySearch};

pub const DEFAULT_MIS_CAP: usize = 24;
pub const DEFAULT_EXACT_CAP: usize = 16;

/// A proper vertex coloring in canonical form: colors `0..k`, numbered by
/// first appearance in vertex order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coloring {
    colors: Vec<usize>,
}

impl Coloring {
    /// Renumbers an arbitrary color map by first appearance.
    pub fn canonical(raw: &[usize]) -> Self {
        let mut remap = HashMap::new();
        let colors = raw
            .iter()
            .map(|c| {
                let next = remap.len();
                *remap.entry(*c).or_insert(next)
            })
            .collect();
        Coloring { colors }
    }

    pub fn identity(n: usize) -> Self {
        Coloring {
            colors: (0..n).collect(),
        }
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn num_colors(&self) -> usize {
        self.colors.iter().max().map_or(0, |m| m + 1)
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_colors()];
        for (v, &c) in self.colors.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// Exact color distribution under a vertex distribution.
    pub fn color_masses(&self, dist: &[Prob]) -> Vec<Prob> {
        color_masses(&self.colors, dist)
    }

    pub fn entropy(&self, dist: &[Prob]) -> f64 {
        crate::entropy::entropy(&self.color_masses(dist))
    }

    /// `vertex<TAB>color` lines using the graph's labels.
    pub fn to_text(&self, g: &Graph) -> String {
        let mut out = String::new();
        for (v, c) in self.colors.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}", g.label(v), c);
        }
        out
    }
}

/// Masses of arbitrary color ids, indexed by color id.
pub fn color_masses(colors: &[usize], dist: &[Prob]) -> Vec<Prob> {
    let k = colors.iter().max().map_or(0, |m| m + 1);
    let mut m = vec![Prob::default(); k];
    for (c, p) in colors.iter().zip(dist) {
        m[*c] += p;
    }
    m
}

/// First monochromatic edge `(u, v)`, `u < v`, in edge order.
pub fn first_conflict(g: &Graph, colors: &[usize]) -> Option<(usize, usize)> {
    g.edges().find(|&(u, v)| colors[u] == colors[v])
}

pub fn is_coloring(g: &Graph, colors: &[usize]) -> bool {
    first_conflict(g, colors).is_none()
}

/// First monochromatic edge of `base^∨n`, where `colors` is indexed by
/// block (see [`Blocks`]). Reports `(earlier, later)` with `later` as small
/// as possible, then `earlier` as small as possible.
pub fn first_product_conflict(base: &Graph, n: usize, colors: &[usize]) -> Option<(usize, usize)> {
    let blocks = Blocks::new(base.vertex_count(), n);
    // (color, coordinate, base vertex) -> first block index showing it.
    let mut seen: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for (t, &c) in colors.iter().enumerate() {
        let tuple = blocks.decode(t);
        let hit = tuple
            .iter()
            .enumerate()
            .flat_map(|(i, &v)| base.neighbors(v).iter().map(move |&u| (i, u)))
            .filter_map(|(i, u)| seen.get(&(c, i, u)).copied())
            .min();
        if let Some(earlier) = hit {
            return Some((earlier, t));
        }
        for (i, &v) in tuple.iter().enumerate() {
            seen.entry((c, i, v)).or_insert(t);
        }
    }
    None
}

pub fn is_product_coloring(base: &Graph, n: usize, colors: &[usize]) -> bool {
    first_product_conflict(base, n, colors).is_none()
}

/// All inclusion-maximal independent sets, each sorted, in lexicographic
/// order.
pub fn maximal_independent_sets(g: &Graph, cap: usize) -> Result<Vec<Vec<usize>>> {
    let n = g.vertex_count();
    if n > cap {
        return Err(Error::cap(
            "vertex count for independent-set enumeration",
            n,
            cap,
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let s = MinEntropySearch::new(g.masks()?, vec![0.0; n]);
    let all = if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    };
    let mut sets: Vec<Vec<usize>> = s
        .maximal_independent_sets(all)
        .into_iter()
        .map(|m| bits(m).collect())
        .collect();
    sets.sort();
    Ok(sets)
}

#[derive(Debug, Clone, Copy)]
pub struct ChromaticConfig {
    /// Largest graph searched exactly.
    pub cap_vertices: usize,
    /// Absolute tolerance for entropy comparisons during search.
    pub eps: f64,
}

impl Default for ChromaticConfig {
    fn default() -> Self {
        ChromaticConfig {
            cap_vertices: DEFAULT_EXACT_CAP,
            eps: search::DEFAULT_EPS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChromaticEntropy {
    /// Bits (per symbol for products).
    pub bits: f64,
    pub witness: Coloring,
}

/// Exact minimum entropy of `c(X)` over colorings `c` of the graph. The
/// witness is the lexicographically smallest optimal canonical coloring.
pub fn chromatic_entropy(
    pg: &ProbabilisticGraph,
    cfg: &ChromaticConfig,
) -> Result<ChromaticEntropy> {
    let n = pg.graph.vertex_count();
    if n > cfg.cap_vertices {
        return Err(Error::cap(
            "vertex count for exact chromatic entropy",
            n,
            cfg.cap_vertices,
        ));
    }
    let adj = pg.graph.masks()?;
    let w: Vec<f64> = pg.dist.iter().map(to_f64).collect();
    let (_, assign) = search::lexmin_optimal_assignment(&adj, &w, cfg.eps);
    let witness = Coloring::canonical(&assign);
    debug_assert!(is_coloring(&pg.graph, witness.colors()));
    Ok(ChromaticEntropy {
        bits: witness.entropy(&pg.dist),
        witness,
    })
}

/// `(1/n) H_χ(G^∨n, X^n)` with the n-fold product distribution.
pub fn chromatic_entropy_product(
    pg: &ProbabilisticGraph,
    n: usize,
    cfg: &ChromaticConfig,
) -> Result<ChromaticEntropy> {
    let prod = product_pgraph(pg, n, cfg.cap_vertices)?;
    let mut ce = chromatic_entropy(&prod, cfg)?;
    ce.bits /= n as f64;
    Ok(ce)
}

/// Greedy coloring (heaviest vertices first, first fit into the heaviest
/// compatible class). Its entropy is only an upper bound on the chromatic
/// entropy; use it when the exact search is over its cap.
pub fn chromatic_entropy_upper_bound(pg: &ProbabilisticGraph) -> ChromaticEntropy {
    let n = pg.graph.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pg.dist[b].cmp(&pg.dist[a]).then(a.cmp(&b)));
    let mut classes: Vec<(Vec<usize>, Prob)> = Vec::new();
    let mut colors = vec![0usize; n];
    for v in order {
        let slot = classes
            .iter()
            .enumerate()
            .filter(|(_, (members, _))| members.iter().all(|&u| !pg.graph.has_edge(u, v)))
            .max_by(|a, b| a.1 .1.cmp(&b.1 .1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i);
        let i = slot.unwrap_or_else(|| {
            classes.push((Vec::new(), Prob::default()));
            classes.len() - 1
        });
        classes[i].0.push(v);
        classes[i].1 += &pg.dist[v];
        colors[v] = i;
    }
    let witness = Coloring::canonical(&colors);
    ChromaticEntropy {
        bits: witness.entropy(&pg.dist),
        witness,
    }
}

/// Every proper coloring in canonical form (i.e. every partition of the
/// vertices into independent sets), in lexicographic order.
pub fn enumerate_colorings(g: &Graph, cap: usize) -> Result<Vec<Coloring>> {
    let adj = g.masks()?;
    let n = adj.len();
    let mut out = Vec::new();
    let mut colors = vec![0usize; n];
    let mut classes: Vec<u128> = Vec::new();
    fn rec(
        v: usize,
        adj: &[u128],
        colors: &mut Vec<usize>,
        classes: &mut Vec<u128>,
        out: &mut Vec<Coloring>,
        cap: usize,
    ) -> Result<()> {
        if v == adj.len() {
            if out.len() == cap {
                return Err(Error::cap("coloring enumeration", cap + 1, cap));
            }
            out.push(Coloring {
                colors: colors.clone(),
            });
            return Ok(());
        }
        for c in 0..=classes.len() {
            if c < classes.len() && adj[v] & classes[c] != 0 {
                continue;
            }
            if c == classes.len() {
                classes.push(0);
            }
            classes[c] |= 1u128 << v;
            colors[v] = c;
            let r = rec(v + 1, adj, colors, classes, out, cap);
            classes[c] &= !(1u128 << v);
            if classes[c] == 0 {
                classes.pop();
            }
            r?;
        }
        Ok(())
    }
    rec(0, &adj, &mut colors, &mut classes, &mut out, cap)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Color covers

/// `(c_A, c_B, c_C)` for the n-th OR power of the f-modified rook's graph,
/// with the merge map `θ` witnessing that `c_A × c_B` refines `c_C`.
///
/// `c_a` is indexed by X-blocks, `c_b` by Y-blocks and `c_c` by blocks of
/// support cells (base = support size, row-major support order).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorCover {
    pub n: usize,
    pub c_a: Vec<usize>,
    pub c_b: Vec<usize>,
    pub c_c: Vec<usize>,
    pub theta: BTreeMap<(usize, usize), usize>,
}

/// Support blocks as `(x-block, y-block)` pairs, in support-block order.
pub fn support_block_pairs(
    inst: &ProblemInstance,
    n: usize,
    cap: usize,
) -> Result<Vec<(usize, usize)>> {
    let s = support(inst);
    let sb = Blocks::new(s.len(), n);
    let count = sb.count_capped("support block count", cap)?;
    let xb = Blocks::new(inst.nx(), n);
    let yb = Blocks::new(inst.ny(), n);
    Ok((0..count)
        .map(|t| {
            let cells = sb.decode(t);
            let xs: Vec<usize> = cells.iter().map(|&i| s.pairs[i].0).collect();
            let ys: Vec<usize> = cells.iter().map(|&i| s.pairs[i].1).collect();
            (xb.encode(&xs), yb.encode(&ys))
        })
        .collect())
}

/// Default cap on support blocks visited by exhaustive checks.
pub const DEFAULT_BLOCK_BUDGET: usize = 10_000;

impl ColorCover {
    /// Cover with `c_C = θ ∘ (c_A × c_B)`. Fails if θ misses a pair that
    /// occurs on the support.
    pub fn from_theta(
        inst: &ProblemInstance,
        n: usize,
        c_a: Vec<usize>,
        c_b: Vec<usize>,
        theta: BTreeMap<(usize, usize), usize>,
    ) -> Result<Self> {
        let pairs = support_block_pairs(inst, n, DEFAULT_BLOCK_BUDGET)?;
        let c_c = pairs
            .iter()
            .map(|&(xb, yb)| {
                let key = (c_a[xb], c_b[yb]);
                theta.get(&key).copied().ok_or_else(|| {
                    Error::Verification(format!("θ undefined on color pair {key:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ColorCover {
            n,
            c_a,
            c_b,
            c_c,
            theta,
        })
    }

    /// Cover from an explicit relay coloring; θ is read off the support and
    /// the call fails if `c_A × c_B` does not refine `c_C`.
    pub fn from_relay_coloring(
        inst: &ProblemInstance,
        n: usize,
        c_a: Vec<usize>,
        c_b: Vec<usize>,
        c_c: Vec<usize>,
    ) -> Result<Self> {
        let pairs = support_block_pairs(inst, n, DEFAULT_BLOCK_BUDGET)?;
        let mut theta = BTreeMap::new();
        for (t, &(xb, yb)) in pairs.iter().enumerate() {
            let key = (c_a[xb], c_b[yb]);
            if let Some(&prev) = theta.get(&key) {
                if prev != c_c[t] {
                    return Err(Error::Verification(format!(
                        "c_A × c_B does not refine c_C: pair {key:?} maps to {prev} and {}",
                        c_c[t]
                    )));
                }
            }
            theta.insert(key, c_c[t]);
        }
        Ok(ColorCover {
            n,
            c_a,
            c_b,
            c_c,
            theta,
        })
    }

    /// Cover at n = 1 where both sources send their symbols and the relay
    /// sends `c_c`.
    pub fn identity_with_relay(inst: &ProblemInstance, c_c: Vec<usize>) -> Result<Self> {
        ColorCover::from_relay_coloring(
            inst,
            1,
            (0..inst.nx()).collect(),
            (0..inst.ny()).collect(),
            c_c,
        )
    }

    /// Text export: the three color tables followed by the θ table.
    pub fn to_text(&self, inst: &ProblemInstance) -> String {
        let s = support(inst);
        let lbl = |alpha: &[String], t: Vec<usize>| {
            t.iter()
                .map(|&i| alpha[i].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        let xb = Blocks::new(inst.nx(), self.n);
        let yb = Blocks::new(inst.ny(), self.n);
        let sb = Blocks::new(s.len(), self.n);
        let _ = writeln!(out, "# c_A");
        for (b, c) in self.c_a.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}", lbl(inst.alphabet_x(), xb.decode(b)), c);
        }
        let _ = writeln!(out, "# c_B");
        for (b, c) in self.c_b.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}", lbl(inst.alphabet_y(), yb.decode(b)), c);
        }
        let _ = writeln!(out, "# c_C");
        for (b, c) in self.c_c.iter().enumerate() {
            let cells: Vec<String> = sb
                .decode(b)
                .iter()
                .map(|&i| inst.cell_label(s.pairs[i].0, s.pairs[i].1))
                .collect();
            let _ = writeln!(out, "{}\t{}", cells.join(" "), c);
        }
        let _ = writeln!(out, "# theta");
        for ((a, b), c) in &self.theta {
            let _ = writeln!(out, "{a}\t{b}\t{c}");
        }
        out
    }
}

/// Why a triple fails to be a color cover. Tuples are support blocks,
/// rendered as lists of cell labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CoverViolation {
    /// `c_A × c_B` gives both endpoints of an edge the same pair.
    PairColoring { u: Vec<String>, v: Vec<String> },
    /// `c_C` is monochromatic on an edge.
    RelayColoring { u: Vec<String>, v: Vec<String> },
    /// `θ(c_A, c_B) ≠ c_C` on a support block (or θ undefined there).
    Refinement {
        block: Vec<String>,
        expected: Option<usize>,
        found: usize,
    },
    /// Table sizes do not match the alphabets.
    Shape(String),
}

pub(crate) fn block_labels(inst: &ProblemInstance, n: usize, t: usize) -> Vec<String> {
    let s = support(inst);
    Blocks::new(s.len(), n)
        .decode(t)
        .iter()
        .map(|&i| inst.cell_label(s.pairs[i].0, s.pairs[i].1))
        .collect()
}

/// Checks the three cover conditions exhaustively over support blocks.
/// `Ok(None)` means the triple is a valid color cover.
pub fn verify_color_cover(
    inst: &ProblemInstance,
    cover: &ColorCover,
    budget: usize,
) -> Result<Option<CoverViolation>> {
    let n = cover.n;
    let pairs = support_block_pairs(inst, n, budget)?;
    let xc = Blocks::new(inst.nx(), n).count().unwrap_or(usize::MAX);
    let yc = Blocks::new(inst.ny(), n).count().unwrap_or(usize::MAX);
    if cover.c_a.len() != xc || cover.c_b.len() != yc || cover.c_c.len() != pairs.len() {
        return Ok(Some(CoverViolation::Shape(format!(
            "expected table sizes ({xc}, {yc}, {}), got ({}, {}, {})",
            pairs.len(),
            cover.c_a.len(),
            cover.c_b.len(),
            cover.c_c.len()
        ))));
    }
    let g = f_rook_graph(inst);

    // c_A × c_B as a single color id per block.
    let k_b = cover.c_b.iter().max().map_or(0, |m| m + 1);
    let pair_colors: Vec<usize> = pairs
        .iter()
        .map(|&(xb, yb)| cover.c_a[xb] * k_b + cover.c_b[yb])
        .collect();
    if let Some((u, v)) = first_product_conflict(&g, n, &pair_colors) {
        return Ok(Some(CoverViolation::PairColoring {
            u: block_labels(inst, n, u),
            v: block_labels(inst, n, v),
        }));
    }
    if let Some((u, v)) = first_product_conflict(&g, n, &cover.c_c) {
        return Ok(Some(CoverViolation::RelayColoring {
            u: block_labels(inst, n, u),
            v: block_labels(inst, n, v),
        }));
    }
    for (t, &(xb, yb)) in pairs.iter().enumerate() {
        let expected = cover.theta.get(&(cover.c_a[xb], cover.c_b[yb])).copied();
        if expected != Some(cover.c_c[t]) {
            return Ok(Some(CoverViolation::Refinement {
                block: block_labels(inst, n, t),
                expected,
                found: cover.c_c[t],
            }));
        }
    }
    Ok(None)
}
