//! Concrete length-n one-round schemes: Huffman-coded encoders built from a
//! color cover, zero-error verification, decoder tables, rate measurement
//! and relay computability.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use num_traits::{One, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::{
    block_labels, first_product_conflict, support_block_pairs, verify_color_cover, ColorCover,
};
use crate::entropy::conditional_entropy_of_f;
use crate::error::{Error, Result};
use crate::graphs::f_rook_graph;
use crate::model::{marginals, product_probs, support, to_f64, Blocks, Prob, ProblemInstance};
use crate::region::RateTriple;

pub use crate::coloring::DEFAULT_BLOCK_BUDGET;

// ---------------------------------------------------------------------------
// Prefix codes

/// Binary codewords per color id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixCode {
    pub words: BTreeMap<usize, String>,
}

impl PrefixCode {
    pub fn len_of(&self, color: usize) -> usize {
        self.words[&color].len()
    }

    /// Non-empty binary words, none a prefix of another (which also gives
    /// the Kraft inequality).
    pub fn validate(&self) -> Result<()> {
        let mut words: Vec<&String> = self.words.values().collect();
        if let Some(w) = words
            .iter()
            .find(|w| w.is_empty() || w.chars().any(|c| c != '0' && c != '1'))
        {
            return Err(Error::Validation(format!("invalid codeword {w:?}")));
        }
        words.sort();
        for pair in words.windows(2) {
            if pair[1].starts_with(pair[0].as_str()) {
                return Err(Error::Validation(format!(
                    "codeword {:?} is a prefix of {:?}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(())
    }

    pub fn kraft_sum(&self) -> f64 {
        self.words
            .values()
            .map(|w| 0.5f64.powi(w.len() as i32))
            .sum()
    }
}

/// Huffman code over `(color, mass)` pairs. The two lightest nodes merge
/// first, ties going to the node holding the smaller color id; the lighter
/// node takes bit `0`. A lone color gets the codeword `0`.
pub fn huffman(masses: &[(usize, Prob)]) -> PrefixCode {
    let mut words: BTreeMap<usize, String> = BTreeMap::new();
    match masses.len() {
        0 => return PrefixCode { words },
        1 => {
            words.insert(masses[0].0, "0".into());
            return PrefixCode { words };
        }
        _ => {}
    }
    // Node arena: leaves first, then merged nodes.
    let mut children: Vec<Option<(usize, usize)>> = vec![None; masses.len()];
    let mut heap = BinaryHeap::new();
    for (i, (color, p)) in masses.iter().enumerate() {
        heap.push(Reverse((p.clone(), *color, i)));
    }
    while heap.len() > 1 {
        let Reverse((p0, id0, n0)) = heap.pop().expect("two nodes");
        let Reverse((p1, id1, n1)) = heap.pop().expect("two nodes");
        children.push(Some((n0, n1)));
        heap.push(Reverse((p0 + p1, id0.min(id1), children.len() - 1)));
    }
    let Reverse((_, _, root)) = heap.pop().expect("root");
    let mut stack = vec![(root, String::new())];
    while let Some((node, prefix)) = stack.pop() {
        match children[node] {
            Some((l, r)) => {
                stack.push((r, format!("{prefix}1")));
                stack.push((l, format!("{prefix}0")));
            }
            None => {
                words.insert(masses[node].0, prefix);
            }
        }
    }
    PrefixCode { words }
}

fn masses_by_color(colors: impl Iterator<Item = (usize, Prob)>) -> Vec<(usize, Prob)> {
    let mut m: BTreeMap<usize, Prob> = BTreeMap::new();
    for (c, p) in colors {
        *m.entry(c).or_insert_with(Prob::zero) += p;
    }
    m.into_iter().collect()
}

// ---------------------------------------------------------------------------
// Schemes

/// Encoders `φ_A`, `φ_B` as color maps on blocks, the relay map `θ` on color
/// pairs, and a prefix code for each link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scheme {
    pub n: usize,
    pub enc_a: Vec<usize>,
    pub enc_b: Vec<usize>,
    pub theta: BTreeMap<(usize, usize), usize>,
    pub code_a: PrefixCode,
    pub code_b: PrefixCode,
    pub code_c: PrefixCode,
}

/// Exact color masses on each link.
struct LinkMasses {
    a: Vec<(usize, Prob)>,
    b: Vec<(usize, Prob)>,
    c: Vec<(usize, Prob)>,
}

fn link_masses(
    inst: &ProblemInstance,
    n: usize,
    enc_a: &[usize],
    enc_b: &[usize],
    theta: &BTreeMap<(usize, usize), usize>,
    budget: usize,
) -> Result<LinkMasses> {
    let (px, py) = marginals(inst);
    let pxn = product_probs(&px, n, budget)?;
    let pyn = product_probs(&py, n, budget)?;
    if enc_a.len() != pxn.len() || enc_b.len() != pyn.len() {
        return Err(Error::Validation(
            "encoder tables must cover every block".into(),
        ));
    }
    let a = masses_by_color(enc_a.iter().copied().zip(pxn));
    let b = masses_by_color(enc_b.iter().copied().zip(pyn));
    let relay = relay_colors(inst, n, enc_a, enc_b, theta, budget)?;
    let probs = support_block_probs(inst, n, budget)?;
    let mut c = masses_by_color(relay.into_iter().zip(probs));
    // Relay colors that θ can emit but the support never reaches still get
    // codewords, with zero mass.
    for &v in theta.values() {
        if !c.iter().any(|(col, _)| *col == v) {
            c.push((v, Prob::zero()));
        }
    }
    c.sort_by_key(|(col, _)| *col);
    Ok(LinkMasses { a, b, c })
}

/// Exact probability of every support block, in block order.
pub fn support_block_probs(inst: &ProblemInstance, n: usize, budget: usize) -> Result<Vec<Prob>> {
    let s = support(inst);
    let sb = Blocks::new(s.len(), n);
    let count = sb.count_capped("support block count", budget)?;
    Ok((0..count)
        .map(|t| {
            sb.decode(t).iter().fold(Prob::one(), |acc, &c| {
                acc * inst.pmf(s.pairs[c].0, s.pairs[c].1)
            })
        })
        .collect())
}

/// Relay color of every support block; errors if θ misses a reachable pair.
pub fn relay_colors(
    inst: &ProblemInstance,
    n: usize,
    enc_a: &[usize],
    enc_b: &[usize],
    theta: &BTreeMap<(usize, usize), usize>,
    budget: usize,
) -> Result<Vec<usize>> {
    support_block_pairs(inst, n, budget)?
        .into_iter()
        .map(|(xb, yb)| {
            let key = (enc_a[xb], enc_b[yb]);
            theta.get(&key).copied().ok_or_else(|| {
                Error::Validation(format!("relay map undefined on reachable pair {key:?}"))
            })
        })
        .collect()
}

impl Scheme {
    /// Scheme from raw encoder maps, Huffman-coded on the exact color
    /// distributions. Does not check zero error.
    pub fn from_maps(
        inst: &ProblemInstance,
        n: usize,
        enc_a: Vec<usize>,
        enc_b: Vec<usize>,
        theta: BTreeMap<(usize, usize), usize>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("block length must be positive".into()));
        }
        let m = link_masses(inst, n, &enc_a, &enc_b, &theta, DEFAULT_BLOCK_BUDGET)?;
        Ok(Scheme {
            n,
            enc_a,
            enc_b,
            theta,
            code_a: huffman(&m.a),
            code_b: huffman(&m.b),
            code_c: huffman(&m.c),
        })
    }

    pub fn relay_colors(&self, inst: &ProblemInstance, budget: usize) -> Result<Vec<usize>> {
        relay_colors(inst, self.n, &self.enc_a, &self.enc_b, &self.theta, budget)
    }

    /// Structural checks: prefix-free codes covering every color in use.
    pub fn validate(&self, inst: &ProblemInstance) -> Result<()> {
        for code in [&self.code_a, &self.code_b, &self.code_c] {
            code.validate()?;
        }
        fn covers(
            code: &PrefixCode,
            mut colors: impl Iterator<Item = usize>,
            link: &str,
        ) -> Result<()> {
            match colors.find(|c| !code.words.contains_key(c)) {
                Some(c) => Err(Error::Validation(format!(
                    "no {link} codeword for color {c}"
                ))),
                None => Ok(()),
            }
        }
        covers(&self.code_a, self.enc_a.iter().copied(), "A")?;
        covers(&self.code_b, self.enc_b.iter().copied(), "B")?;
        covers(&self.code_c, self.theta.values().copied(), "relay")?;
        self.relay_colors(inst, DEFAULT_BLOCK_BUDGET).map(|_| ())
    }
}

/// Scheme realizing a verified color cover: `φ_A = c_A`, `φ_B = c_B`,
/// `φ_C = θ`, each link Huffman-coded.
pub fn build_scheme(inst: &ProblemInstance, cover: &ColorCover) -> Result<Scheme> {
    if let Some(v) = verify_color_cover(inst, cover, DEFAULT_BLOCK_BUDGET)? {
        return Err(Error::Verification(format!("not a color cover: {v:?}")));
    }
    Scheme::from_maps(
        inst,
        cover.n,
        cover.c_a.clone(),
        cover.c_b.clone(),
        cover.theta.clone(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZeroErrorVerdict {
    pub zero_error: bool,
    /// Two adjacent support blocks sharing a relay color.
    pub violation: Option<(Vec<String>, Vec<String>)>,
}

/// Zero error holds iff the composed relay map colors the n-th OR power of
/// the f-modified rook's graph; checked over all support blocks.
pub fn verify_zero_error(
    inst: &ProblemInstance,
    scheme: &Scheme,
    budget: usize,
) -> Result<ZeroErrorVerdict> {
    let relay = scheme.relay_colors(inst, budget)?;
    let g = f_rook_graph(inst);
    Ok(match first_product_conflict(&g, scheme.n, &relay) {
        None => ZeroErrorVerdict {
            zero_error: true,
            violation: None,
        },
        Some((u, v)) => ZeroErrorVerdict {
            zero_error: false,
            violation: Some((
                block_labels(inst, scheme.n, u),
                block_labels(inst, scheme.n, v),
            )),
        },
    })
}

/// `ψ_A` and `ψ_B` as lookup tables over support-reachable inputs. Values
/// are f-value indices into [`ProblemInstance::range`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderTables {
    pub psi_a: BTreeMap<(usize, usize), Vec<usize>>,
    pub psi_b: BTreeMap<(usize, usize), Vec<usize>>,
}

impl DecoderTables {
    pub fn decode_a(&self, x_block: usize, relay: usize) -> Option<&[usize]> {
        self.psi_a.get(&(x_block, relay)).map(Vec::as_slice)
    }

    pub fn decode_b(&self, y_block: usize, relay: usize) -> Option<&[usize]> {
        self.psi_b.get(&(y_block, relay)).map(Vec::as_slice)
    }
}

/// Builds both decoders by scanning the support blocks; fails on the first
/// input whose relay message is consistent with two different `f^n`.
pub fn build_decoders(
    inst: &ProblemInstance,
    scheme: &Scheme,
    budget: usize,
) -> Result<DecoderTables> {
    let relay = scheme.relay_colors(inst, budget)?;
    decoders_for_relay(inst, scheme.n, &relay, budget)
}

/// Decoder tables for an arbitrary relay assignment `relay[t]` on support
/// block `t`.
pub fn decoders_for_relay(
    inst: &ProblemInstance,
    n: usize,
    relay: &[usize],
    budget: usize,
) -> Result<DecoderTables> {
    let s = support(inst);
    let sb = Blocks::new(s.len(), n);
    let pairs = support_block_pairs(inst, n, budget)?;
    if relay.len() != pairs.len() {
        return Err(Error::Validation(
            "relay assignment must cover every support block".into(),
        ));
    }
    let mut psi_a = BTreeMap::new();
    let mut psi_b = BTreeMap::new();
    for (t, &(xb, yb)) in pairs.iter().enumerate() {
        let fv: Vec<usize> = sb
            .decode(t)
            .iter()
            .map(|&c| inst.f(s.pairs[c].0, s.pairs[c].1))
            .collect();
        for (table, key, node) in [
            (&mut psi_a, (xb, relay[t]), "A"),
            (&mut psi_b, (yb, relay[t]), "B"),
        ] {
            match table.get(&key) {
                Some(prev) if *prev != fv => {
                    return Err(Error::Ambiguity(format!(
                        "node {node} cannot decode input block {} with relay color {}",
                        key.0, key.1
                    )));
                }
                Some(_) => {}
                None => {
                    table.insert(key, fv.clone());
                }
            }
        }
    }
    Ok(DecoderTables { psi_a, psi_b })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMode {
    Exact,
    Simulate { blocks: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateMeasurement {
    pub rates: RateTriple,
    /// Standard errors per component (simulation only).
    pub std_err: Option<[f64; 3]>,
}

const SIM_CHUNK: usize = 4096;

/// Expected codeword lengths per symbol, exactly or by seeded simulation.
/// Simulation splits the blocks into fixed chunks, each with its own
/// ChaCha stream, so the result does not depend on thread scheduling.
pub fn measure_rates(
    inst: &ProblemInstance,
    scheme: &Scheme,
    mode: RateMode,
) -> Result<RateMeasurement> {
    let n = scheme.n;
    let nf = n as f64;
    match mode {
        RateMode::Exact => {
            let m = link_masses(
                inst,
                n,
                &scheme.enc_a,
                &scheme.enc_b,
                &scheme.theta,
                DEFAULT_BLOCK_BUDGET,
            )?;
            let avg = |masses: &[(usize, Prob)], code: &PrefixCode| {
                let total = masses.iter().fold(Prob::zero(), |acc, (c, p)| {
                    acc + p * Prob::from_integer(code.len_of(*c).into())
                });
                to_f64(&total) / nf
            };
            Ok(RateMeasurement {
                rates: RateTriple::new(
                    avg(&m.a, &scheme.code_a),
                    avg(&m.b, &scheme.code_b),
                    avg(&m.c, &scheme.code_c),
                )?,
                std_err: None,
            })
        }
        RateMode::Simulate { blocks, seed } => {
            if blocks == 0 {
                return Err(Error::Validation(
                    "simulation needs at least one block".into(),
                ));
            }
            let s = support(inst);
            let weights: Vec<f64> = s
                .pairs
                .iter()
                .map(|&(x, y)| to_f64(inst.pmf(x, y)))
                .collect();
            let sampler = WeightedIndex::new(&weights)
                .map_err(|e| Error::Validation(format!("cannot sample support: {e}")))?;
            let xb = Blocks::new(inst.nx(), n);
            let yb = Blocks::new(inst.ny(), n);
            let len_a: HashMap<usize, f64> = scheme
                .code_a
                .words
                .iter()
                .map(|(c, w)| (*c, w.len() as f64))
                .collect();
            let len_b: HashMap<usize, f64> = scheme
                .code_b
                .words
                .iter()
                .map(|(c, w)| (*c, w.len() as f64))
                .collect();
            let len_c: HashMap<usize, f64> = scheme
                .code_c
                .words
                .iter()
                .map(|(c, w)| (*c, w.len() as f64))
                .collect();

            let chunks = blocks.div_ceil(SIM_CHUNK);
            let partials: Vec<Result<Moments>> = (0..chunks)
                .into_par_iter()
                .map(|k| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(k as u64);
                    let count = SIM_CHUNK.min(blocks - k * SIM_CHUNK);
                    let mut acc = [[0.0f64; 2]; 3];
                    let mut xs = vec![0usize; n];
                    let mut ys = vec![0usize; n];
                    for _ in 0..count {
                        for i in 0..n {
                            let (x, y) = s.pairs[sampler.sample(&mut rng)];
                            xs[i] = x;
                            ys[i] = y;
                        }
                        let ca = scheme.enc_a[xb.encode(&xs)];
                        let cb = scheme.enc_b[yb.encode(&ys)];
                        let cc = *scheme.theta.get(&(ca, cb)).ok_or_else(|| {
                            Error::Validation(format!("relay map undefined on ({ca}, {cb})"))
                        })?;
                        let lens = [len_a[&ca], len_b[&cb], len_c[&cc]];
                        for (slot, l) in acc.iter_mut().zip(lens) {
                            slot[0] += l;
                            slot[1] += l * l;
                        }
                    }
                    Ok(acc)
                })
                .collect();
            let partials = partials.into_iter().collect::<Result<Vec<_>>>()?;
            let sums = pairwise_sum(&partials);
            let b = blocks as f64;
            let mut mean = [0.0; 3];
            let mut se = [0.0; 3];
            for k in 0..3 {
                let m = sums[k][0] / b;
                let var = if blocks > 1 {
                    ((sums[k][1] - b * m * m) / (b - 1.0)).max(0.0)
                } else {
                    0.0
                };
                mean[k] = m / nf;
                se[k] = (var / b).sqrt() / nf;
            }
            Ok(RateMeasurement {
                rates: RateTriple::new(mean[0], mean[1], mean[2])?,
                std_err: Some(se),
            })
        }
    }
}

type Moments = [[f64; 2]; 3];

/// Pairwise (tree) summation over the fixed chunk order.
fn pairwise_sum(parts: &[Moments]) -> Moments {
    match parts {
        [] => [[0.0; 2]; 3],
        [one] => *one,
        _ => {
            let (l, r) = parts.split_at(parts.len() / 2);
            let (a, b) = (pairwise_sum(l), pairwise_sum(r));
            std::array::from_fn(|k| [a[k][0] + b[k][0], a[k][1] + b[k][1]])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelayVerdict {
    pub computable: bool,
    pub residual_bits: f64,
}

/// Whether the relay's received messages determine `f^n`; the verdict is
/// decided on exact masses, the residual `H(f^n | M_A, M_B)` is reported in
/// bits.
pub fn relay_computability(
    inst: &ProblemInstance,
    scheme: &Scheme,
    budget: usize,
) -> Result<RelayVerdict> {
    let r = conditional_entropy_of_f(inst, scheme.n, &scheme.enc_a, &scheme.enc_b, budget)?;
    Ok(RelayVerdict {
        computable: r.determined,
        residual_bits: if r.determined { 0.0 } else { r.bits },
    })
}

// ---------------------------------------------------------------------------
// Scheme documents

#[derive(Serialize, Deserialize)]
struct BlockColor {
    block: Vec<String>,
    color: usize,
}

#[derive(Serialize, Deserialize)]
struct ThetaEntry {
    a: usize,
    b: usize,
    c: usize,
}

#[derive(Serialize, Deserialize)]
struct SchemeDoc {
    n: usize,
    enc_a: Vec<BlockColor>,
    enc_b: Vec<BlockColor>,
    theta: Vec<ThetaEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    code_a: Option<BTreeMap<usize, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    code_b: Option<BTreeMap<usize, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    code_c: Option<BTreeMap<usize, String>>,
}

fn block_table(
    entries: &[BlockColor],
    alphabet: &[String],
    n: usize,
    side: &str,
) -> Result<Vec<usize>> {
    let blocks = Blocks::new(alphabet.len(), n);
    let count = blocks.count_capped("encoder block count", DEFAULT_BLOCK_BUDGET)?;
    let index: HashMap<&str, usize> = alphabet
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut table = vec![None; count];
    for e in entries {
        if e.block.len() != n {
            return Err(Error::Validation(format!(
                "{side} block {:?} has length != {n}",
                e.block
            )));
        }
        let digits = e
            .block
            .iter()
            .map(|s| {
                index
                    .get(s.as_str())
                    .copied()
                    .ok_or_else(|| Error::Validation(format!("unknown {side} symbol {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let slot = &mut table[blocks.encode(&digits)];
        if slot.is_some() {
            return Err(Error::Validation(format!(
                "{side} block {:?} listed twice",
                e.block
            )));
        }
        *slot = Some(e.color);
    }
    table
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            c.ok_or_else(|| {
                let missing: Vec<&str> = blocks
                    .decode(i)
                    .iter()
                    .map(|&d| alphabet[d].as_str())
                    .collect();
                Error::Validation(format!("{side} encoder misses block {missing:?}"))
            })
        })
        .collect()
}

/// Parses a scheme document; codes missing from it are filled in by
/// Huffman coding.
pub fn load_scheme(inst: &ProblemInstance, text: &str) -> Result<Scheme> {
    let doc: SchemeDoc = serde_json::from_str(text)?;
    if doc.n == 0 {
        return Err(Error::Validation("block length must be positive".into()));
    }
    let enc_a = block_table(&doc.enc_a, inst.alphabet_x(), doc.n, "x")?;
    let enc_b = block_table(&doc.enc_b, inst.alphabet_y(), doc.n, "y")?;
    let mut theta = BTreeMap::new();
    for t in &doc.theta {
        if theta.insert((t.a, t.b), t.c).is_some() {
            return Err(Error::Validation(format!(
                "theta lists ({}, {}) twice",
                t.a, t.b
            )));
        }
    }
    let mut scheme = Scheme::from_maps(inst, doc.n, enc_a, enc_b, theta)?;
    if let Some(w) = doc.code_a {
        scheme.code_a = PrefixCode { words: w };
    }
    if let Some(w) = doc.code_b {
        scheme.code_b = PrefixCode { words: w };
    }
    if let Some(w) = doc.code_c {
        scheme.code_c = PrefixCode { words: w };
    }
    scheme.validate(inst)?;
    Ok(scheme)
}

pub fn store_scheme(inst: &ProblemInstance, scheme: &Scheme) -> String {
    let entries = |table: &[usize], alphabet: &[String]| {
        let blocks = Blocks::new(alphabet.len(), scheme.n);
        table
            .iter()
            .enumerate()
            .map(|(i, &color)| BlockColor {
                block: blocks
                    .decode(i)
                    .iter()
                    .map(|&d| alphabet[d].clone())
                    .collect(),
                color,
            })
            .collect()
    };
    let doc = SchemeDoc {
        n: scheme.n,
        enc_a: entries(&scheme.enc_a, inst.alphabet_x()),
        enc_b: entries(&scheme.enc_b, inst.alphabet_y()),
        theta: scheme
            .theta
            .iter()
            .map(|(&(a, b), &c)| ThetaEntry { a, b, c })
            .collect(),
        code_a: Some(scheme.code_a.words.clone()),
        code_b: Some(scheme.code_b.words.clone()),
        code_c: Some(scheme.code_c.words.clone()),
    };
    serde_json::to_string_pretty(&doc).expect("scheme document serializes")
}

/// Everything `simulate` reports for a scheme.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub n: usize,
    pub zero_error: ZeroErrorVerdict,
    pub exact: RateTriple,
    pub empirical: RateTriple,
    pub std_err: [f64; 3],
    pub blocks: usize,
    pub seed: u64,
    pub relay: RelayVerdict,
}

pub fn simulate(
    inst: &ProblemInstance,
    scheme: &Scheme,
    blocks: usize,
    seed: u64,
) -> Result<SimulationReport> {
    let zero_error = verify_zero_error(inst, scheme, DEFAULT_BLOCK_BUDGET)?;
    let exact = measure_rates(inst, scheme, RateMode::Exact)?;
    let sim = measure_rates(inst, scheme, RateMode::Simulate { blocks, seed })?;
    let relay = relay_computability(inst, scheme, DEFAULT_BLOCK_BUDGET)?;
    Ok(SimulationReport {
        n: scheme.n,
        zero_error,
        exact: exact.rates,
        empirical: sim.rates,
        std_err: sim.std_err.unwrap_or([0.0; 3]),
        blocks,
        seed,
        relay,
    })
}
