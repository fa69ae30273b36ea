//! Rook's graphs, the f-modified rook's graph, the two f-confusability
//! graphs and n-fold OR products.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{marginals, support, support_probs, Blocks, Prob, ProblemInstance};

/// Default cap on explicitly materialized product vertices.
pub const DEFAULT_MATERIALIZE_CAP: usize = 1_000_000;

/// Undirected simple graph with labelled vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(labels: Vec<String>) -> Self {
        let n = labels.len();
        Graph {
            labels,
            adj: vec![Vec::new(); n],
        }
    }

    /// Graph on `0..n` with numeric labels.
    pub fn unlabeled(n: usize) -> Self {
        Graph::new((0..n).map(|i| i.to_string()).collect())
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::unlabeled(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Validation(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::Validation(format!("self-loop at {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::unlabeled(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::unlabeled(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n);
        }
        g
    }

    /// Adds `{u, v}`; duplicates and self-loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            return;
        }
        if let Err(pos) = self.adj[u].binary_search(&v) {
            self.adj[u].insert(pos, v);
            let pos = self.adj[v].binary_search(&u).unwrap_err();
            self.adj[v].insert(pos, u);
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn is_complete(&self) -> bool {
        let n = self.vertex_count();
        self.adj.iter().all(|ns| ns.len() + 1 == n)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Adjacency as bitmasks; exact searches work on graphs of at most 128
    /// vertices.
    pub fn masks(&self) -> Result<Vec<u128>> {
        if self.vertex_count() > 128 {
            return Err(Error::cap(
                "vertex count for bitmask search",
                self.vertex_count(),
                128,
            ));
        }
        Ok(self
            .adj
            .iter()
            .map(|ns| ns.iter().fold(0u128, |m, &v| m | (1u128 << v)))
            .collect())
    }

    /// Same graph with vertices relabelled by `perm`: old vertex `v` becomes
    /// `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let n = self.vertex_count();
        let mut labels = vec![String::new(); n];
        for v in 0..n {
            labels[perm[v]] = self.labels[v].clone();
        }
        let mut g = Graph::new(labels);
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }

    /// Edge-list text: a vertex header followed by one `u -- v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# vertices {}", self.vertex_count());
        for l in &self.labels {
            let _ = writeln!(out, "{l}");
        }
        let _ = writeln!(out, "# edges {}", self.edge_count());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{} -- {}", self.labels[u], self.labels[v]);
        }
        out
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{}\" {{", escape(name));
        for l in &self.labels {
            let _ = writeln!(out, "  \"{}\";", escape(l));
        }
        for (u, v) in self.edges() {
            let _ = writeln!(
                out,
                "  \"{}\" -- \"{}\";",
                escape(&self.labels[u]),
                escape(&self.labels[v])
            );
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// A graph together with a distribution over its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilisticGraph {
    pub graph: Graph,
    pub dist: Vec<Prob>,
}

impl ProbabilisticGraph {
    pub fn new(graph: Graph, dist: Vec<Prob>) -> Result<Self> {
        if dist.len() != graph.vertex_count() {
            return Err(Error::Validation(format!(
                "distribution has {} entries for {} vertices",
                dist.len(),
                graph.vertex_count()
            )));
        }
        if dist.iter().any(Signed::is_negative) {
            return Err(Error::Validation("negative vertex probability".into()));
        }
        if !dist.iter().fold(Prob::zero(), |a, b| a + b).is_one() {
            return Err(Error::Validation(
                "vertex distribution does not sum to 1".into(),
            ));
        }
        Ok(ProbabilisticGraph { graph, dist })
    }

    pub fn uniform(graph: Graph) -> Self {
        let n = graph.vertex_count();
        let p = Prob::new(1.into(), n.into());
        ProbabilisticGraph {
            graph,
            dist: vec![p; n],
        }
    }
}

/// Rook's graph on `X × Y`; vertex `(x, y)` has index `x * |Y| + y`.
pub fn rook_graph(inst: &ProblemInstance) -> Graph {
    let (nx, ny) = (inst.nx(), inst.ny());
    let mut labels = Vec::with_capacity(nx * ny);
    for x in 0..nx {
        for y in 0..ny {
            labels.push(inst.cell_label(x, y));
        }
    }
    let mut g = Graph::new(labels);
    for x in 0..nx {
        for y in 0..ny {
            for y2 in y + 1..ny {
                g.add_edge(x * ny + y, x * ny + y2);
            }
            for x2 in x + 1..nx {
                g.add_edge(x * ny + y, x2 * ny + y);
            }
        }
    }
    g
}

/// The f-modified rook's graph on the support set (row-major order): cells
/// sharing a row or a column are adjacent iff their f-values differ.
pub fn f_rook_graph(inst: &ProblemInstance) -> Graph {
    let s = support(inst);
    let mut g = Graph::new(
        s.pairs
            .iter()
            .map(|&(x, y)| inst.cell_label(x, y))
            .collect(),
    );
    for (i, &(x1, y1)) in s.pairs.iter().enumerate() {
        for (j, &(x2, y2)) in s.pairs.iter().enumerate().skip(i + 1) {
            if (x1 == x2 || y1 == y2) && inst.f(x1, y1) != inst.f(x2, y2) {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// `(G_{X|Y}^f, G_{Y|X}^f)`.
pub fn confusability_graphs(inst: &ProblemInstance) -> (Graph, Graph) {
    let s = support(inst);
    let mut gx = Graph::new(inst.alphabet_x().to_vec());
    let mut gy = Graph::new(inst.alphabet_y().to_vec());
    for y in 0..inst.ny() {
        for x in 0..inst.nx() {
            for x2 in x + 1..inst.nx() {
                if s.contains(x, y) && s.contains(x2, y) && inst.f(x, y) != inst.f(x2, y) {
                    gx.add_edge(x, x2);
                }
            }
        }
    }
    for x in 0..inst.nx() {
        for y in 0..inst.ny() {
            for y2 in y + 1..inst.ny() {
                if s.contains(x, y) && s.contains(x, y2) && inst.f(x, y) != inst.f(x, y2) {
                    gy.add_edge(y, y2);
                }
            }
        }
    }
    (gx, gy)
}

/// `(G_XY^f, p_XY restricted to the support)`.
pub fn f_rook_pgraph(inst: &ProblemInstance) -> ProbabilisticGraph {
    let s = support(inst);
    ProbabilisticGraph {
        graph: f_rook_graph(inst),
        dist: support_probs(inst, &s),
    }
}

/// Confusability graphs paired with the X and Y marginals.
pub fn confusability_pgraphs(inst: &ProblemInstance) -> (ProbabilisticGraph, ProbabilisticGraph) {
    let (gx, gy) = confusability_graphs(inst);
    let (px, py) = marginals(inst);
    (
        ProbabilisticGraph {
            graph: gx,
            dist: px,
        },
        ProbabilisticGraph {
            graph: gy,
            dist: py,
        },
    )
}

/// n-fold OR product. Vertices are n-tuples indexed by [`Blocks`]; two
/// tuples are adjacent iff some coordinate pair is an edge of the base.
#[derive(Debug, Clone)]
pub struct ProductGraph {
    pub base: Graph,
    pub n: usize,
}

pub fn or_product(g: &Graph, n: usize) -> Result<ProductGraph> {
    if n == 0 {
        return Err(Error::Validation("product power must be positive".into()));
    }
    Ok(ProductGraph { base: g.clone(), n })
}

impl ProductGraph {
    pub fn blocks(&self) -> Blocks {
        Blocks::new(self.base.vertex_count(), self.n)
    }

    pub fn vertex_count(&self) -> Option<usize> {
        self.blocks().count()
    }

    pub fn tuple(&self, v: usize) -> Vec<usize> {
        self.blocks().decode(v)
    }

    pub fn adjacent_tuples(&self, a: &[usize], b: &[usize]) -> bool {
        a.iter().zip(b).any(|(&u, &v)| self.base.has_edge(u, v))
    }

    /// O(n) adjacency test without materializing anything.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacent_tuples(&self.tuple(a), &self.tuple(b))
    }

    /// Builds the product explicitly, provided it has at most `cap` vertices.
    pub fn materialize(&self, cap: usize) -> Result<Graph> {
        let blocks = self.blocks();
        let count = blocks.count_capped("product vertex count", cap)?;
        let tuples: Vec<Vec<usize>> = (0..count).map(|i| blocks.decode(i)).collect();
        let labels = tuples
            .iter()
            .map(|t| {
                let parts: Vec<&str> = t.iter().map(|&v| self.base.label(v)).collect();
                format!("[{}]", parts.join(" "))
            })
            .collect();
        let mut g = Graph::new(labels);
        for a in 0..count {
            for b in a + 1..count {
                if self.adjacent_tuples(&tuples[a], &tuples[b]) {
                    g.adj[a].push(b);
                    g.adj[b].push(a);
                }
            }
        }
        Ok(g)
    }
}

/// `(G^∨n, X^n)` with the n-fold product distribution.
pub fn product_pgraph(pg: &ProbabilisticGraph, n: usize, cap: usize) -> Result<ProbabilisticGraph> {
    let g = or_product(&pg.graph, n)?.materialize(cap)?;
    let dist = crate::model::product_probs(&pg.dist, n, cap)?;
    Ok(ProbabilisticGraph { graph: g, dist })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{equality_instance, greater_than_instance, min_instance};

    fn grid(nx: usize, ny: usize) -> ProblemInstance {
        let w = vec![vec![1u64; ny]; nx];
        let f = vec![vec![0usize; ny]; nx];
        ProblemInstance::from_weights(&w, &f).unwrap()
    }

    #[test]
    fn rook_graph_counts() {
        let g = rook_graph(&grid(2, 2));
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));
        let g = rook_graph(&grid(1, 1));
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
        let g = rook_graph(&grid(5, 5));
        assert_eq!(g.edge_count(), 100);
        assert!((0..25).all(|v| g.degree(v) == 8));
    }

    #[test]
    fn equality_f_rook_graph_is_ten_cycle() {
        let g = f_rook_graph(&equality_instance());
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edge_count(), 10);
        assert!((0..10).all(|v| g.degree(v) == 2));
        assert!(g.is_connected());
        // (x,x) sits next to (x,x+1) in its row and (x-1,x) in its column.
        let lbl: Vec<&str> = g.labels().iter().map(String::as_str).collect();
        let idx = |s: &str| lbl.iter().position(|l| *l == s).unwrap();
        assert!(g.has_edge(idx("(0,0)"), idx("(0,1)")));
        assert!(g.has_edge(idx("(0,0)"), idx("(4,0)")));
    }

    #[test]
    fn constant_f_has_no_edges() {
        let inst = grid(3, 3);
        assert_eq!(f_rook_graph(&inst).edge_count(), 0);
        let (gx, gy) = confusability_graphs(&inst);
        assert_eq!(gx.edge_count() + gy.edge_count(), 0);
    }

    #[test]
    fn greater_than_f_rook_graph() {
        let g = f_rook_graph(&greater_than_instance());
        assert_eq!(g.vertex_count(), 6);
        let edges: Vec<(String, String)> = g
            .edges()
            .map(|(u, v)| (g.label(u).to_string(), g.label(v).to_string()))
            .collect();
        assert_eq!(edges.len(), 2);
        assert!(edges.contains(&("(1,2)".into(), "(3,2)".into())));
        assert!(edges.contains(&("(2,1)".into(), "(2,3)".into())));
    }

    #[test]
    fn confusability_graphs_examples() {
        let (gx, gy) = confusability_graphs(&equality_instance());
        for g in [&gx, &gy] {
            assert_eq!(g.edge_count(), 5);
            assert!((0..5).all(|v| g.degree(v) == 2));
            assert!(g.is_connected());
        }
        let (gx, gy) = confusability_graphs(&min_instance());
        assert!(gx.is_complete() && gy.is_complete());
        assert_eq!(gx.vertex_count(), 3);
    }

    #[test]
    fn or_product_examples() {
        let k2 = or_product(&Graph::complete(2), 2)
            .unwrap()
            .materialize(100)
            .unwrap();
        assert_eq!((k2.vertex_count(), k2.edge_count()), (4, 6));

        let empty = or_product(&Graph::unlabeled(3), 3)
            .unwrap()
            .materialize(100)
            .unwrap();
        assert_eq!((empty.vertex_count(), empty.edge_count()), (27, 0));

        let c5 = or_product(&Graph::cycle(5), 2).unwrap();
        let g = c5.materialize(100).unwrap();
        assert_eq!(g.vertex_count(), 25);
        assert!((0..25).all(|v| g.degree(v) == 16));
        for a in 0..25 {
            assert!(!c5.adjacent(a, a));
            for b in 0..25 {
                assert_eq!(c5.adjacent(a, b), c5.adjacent(b, a));
                assert_eq!(c5.adjacent(a, b), g.has_edge(a, b));
            }
        }
    }

    #[test]
    fn materialize_cap() {
        let p = or_product(&Graph::cycle(5), 3).unwrap();
        assert!(matches!(p.materialize(100), Err(Error::CapExceeded { .. })));
        assert!(or_product(&Graph::cycle(5), 0).is_err());
    }

    #[test]
    fn export_formats() {
        let g = Graph::cycle(3);
        let el = g.to_edge_list();
        assert!(el.starts_with("# vertices 3\n0\n1\n2\n# edges 3\n"));
        assert!(el.contains("0 -- 1\n"));
        let dot = g.to_dot("c3");
        assert!(dot.starts_with("graph \"c3\" {"));
        assert!(dot.contains("\"1\" -- \"2\";"));
    }
}
