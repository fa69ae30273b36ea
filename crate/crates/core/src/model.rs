//! Problem instances `(X, Y, p_XY, f)`: validation, the support set,
//! marginals and block (n-tuple) bookkeeping.
//!
//! Probabilities are exact rationals. Symbol labels are opaque strings and
//! everything downstream works on integer indices.

use std::collections::{HashMap, HashSet};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Prob = BigRational;

/// A finite joint source together with the function to be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    alphabet_x: Vec<String>,
    alphabet_y: Vec<String>,
    pmf: Vec<Vec<Prob>>,
    f_table: Vec<Vec<String>>,
    // Derived: f-values as indices into `range`, labels in first-appearance order.
    f_index: Vec<Vec<usize>>,
    range: Vec<String>,
}

/// Positive-probability cells `(x, y)` in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSet {
    pub pairs: Vec<(usize, usize)>,
}

impl SupportSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.pairs.binary_search(&(x, y)).is_ok()
    }

    pub fn index_of(&self, x: usize, y: usize) -> Option<usize> {
        self.pairs.binary_search(&(x, y)).ok()
    }
}

fn check_unique(labels: &[String], which: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::Validation(format!("duplicate {which} symbol {l:?}")));
        }
    }
    Ok(())
}

impl ProblemInstance {
    pub fn new(
        alphabet_x: Vec<String>,
        alphabet_y: Vec<String>,
        pmf: Vec<Vec<Prob>>,
        f_table: Vec<Vec<String>>,
    ) -> Result<Self> {
        if alphabet_x.is_empty() || alphabet_y.is_empty() {
            return Err(Error::Validation("alphabets must be non-empty".into()));
        }
        check_unique(&alphabet_x, "x")?;
        check_unique(&alphabet_y, "y")?;
        let (nx, ny) = (alphabet_x.len(), alphabet_y.len());
        if pmf.len() != nx || pmf.iter().any(|r| r.len() != ny) {
            return Err(Error::Validation(format!("pmf must be a {nx}x{ny} matrix")));
        }
        if f_table.len() != nx || f_table.iter().any(|r| r.len() != ny) {
            return Err(Error::Validation(format!(
                "f table must be a {nx}x{ny} matrix (every cell defined)"
            )));
        }
        let mut total = Prob::zero();
        for (i, row) in pmf.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if p.is_negative() {
                    return Err(Error::Validation(format!(
                        "negative probability {p} at ({}, {})",
                        alphabet_x[i], alphabet_y[j]
                    )));
                }
                total += p;
            }
        }
        if !total.is_one() {
            return Err(Error::Validation(format!("pmf sums to {total}, not 1")));
        }

        let mut range: Vec<String> = Vec::new();
        let mut lookup: HashMap<String, usize> = HashMap::new();
        let f_index = f_table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        *lookup.entry(v.clone()).or_insert_with(|| {
                            range.push(v.clone());
                            range.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();

        Ok(ProblemInstance {
            alphabet_x,
            alphabet_y,
            pmf,
            f_table,
            f_index,
            range,
        })
    }

    /// Builds an instance from index-level data: labels are the decimal
    /// indices, probabilities given as `numerator / denominator` weights.
    pub fn from_weights(weights: &[Vec<u64>], f: &[Vec<usize>]) -> Result<Self> {
        let total: u64 = weights.iter().flatten().sum();
        if total == 0 {
            return Err(Error::Validation("all weights are zero".into()));
        }
        let nx = weights.len();
        let ny = weights.first().map_or(0, Vec::len);
        let pmf = weights
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&w| Prob::new(BigInt::from(w), BigInt::from(total)))
                    .collect()
            })
            .collect();
        let f_table = f
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect();
        ProblemInstance::new(
            (0..nx).map(|i| i.to_string()).collect(),
            (0..ny).map(|j| j.to_string()).collect(),
            pmf,
            f_table,
        )
    }

    pub fn alphabet_x(&self) -> &[String] {
        &self.alphabet_x
    }

    pub fn alphabet_y(&self) -> &[String] {
        &self.alphabet_y
    }

    pub fn nx(&self) -> usize {
        self.alphabet_x.len()
    }

    pub fn ny(&self) -> usize {
        self.alphabet_y.len()
    }

    pub fn pmf(&self, x: usize, y: usize) -> &Prob {
        &self.pmf[x][y]
    }

    pub fn f_label(&self, x: usize, y: usize) -> &str {
        &self.f_table[x][y]
    }

    /// Function value as an index into [`Self::range`].
    pub fn f(&self, x: usize, y: usize) -> usize {
        self.f_index[x][y]
    }

    /// Distinct function labels, in first-appearance (row-major) order.
    pub fn range(&self) -> &[String] {
        &self.range
    }

    pub fn cell_label(&self, x: usize, y: usize) -> String {
        format!("({},{})", self.alphabet_x[x], self.alphabet_y[y])
    }

    pub fn is_full_support(&self) -> bool {
        self.pmf.iter().flatten().all(|p| p.is_positive())
    }
}

pub fn support(inst: &ProblemInstance) -> SupportSet {
    let mut pairs = Vec::new();
    for x in 0..inst.nx() {
        for y in 0..inst.ny() {
            if inst.pmf(x, y).is_positive() {
                pairs.push((x, y));
            }
        }
    }
    SupportSet { pairs }
}

pub fn marginals(inst: &ProblemInstance) -> (Vec<Prob>, Vec<Prob>) {
    let mut px = vec![Prob::zero(); inst.nx()];
    let mut py = vec![Prob::zero(); inst.ny()];
    for (x, row) in inst.pmf.iter().enumerate() {
        for (y, p) in row.iter().enumerate() {
            px[x] += p;
            py[y] += p;
        }
    }
    (px, py)
}

/// Probabilities of the support cells, aligned with `support(inst).pairs`.
pub fn support_probs(inst: &ProblemInstance, s: &SupportSet) -> Vec<Prob> {
    s.pairs
        .iter()
        .map(|&(x, y)| inst.pmf(x, y).clone())
        .collect()
}

// ---------------------------------------------------------------------------
// Blocks

/// Mixed-radix indexing of n-tuples over an alphabet of size `base`.
/// The first coordinate is the most significant digit, so index order is
/// lexicographic tuple order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Blocks {
    pub base: usize,
    pub n: usize,
}

impl Blocks {
    pub fn new(base: usize, n: usize) -> Self {
        Blocks { base, n }
    }

    /// `base^n`, or `None` on overflow.
    pub fn count(&self) -> Option<usize> {
        let exp = u32::try_from(self.n).ok()?;
        self.base.checked_pow(exp)
    }

    pub fn count_capped(&self, what: &'static str, cap: usize) -> Result<usize> {
        match self.count() {
            Some(c) if c <= cap => Ok(c),
            Some(c) => Err(Error::cap(what, c, cap)),
            None => Err(Error::cap(what, usize::MAX, cap)),
        }
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut t = vec![0; self.n];
        for slot in t.iter_mut().rev() {
            *slot = index % self.base;
            index /= self.base;
        }
        t
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &d| acc * self.base + d)
    }
}

/// n-fold product distribution over blocks, in block-index order.
pub fn product_probs(dist: &[Prob], n: usize, cap: usize) -> Result<Vec<Prob>> {
    let blocks = Blocks::new(dist.len(), n);
    let count = blocks.count_capped("block count", cap)?;
    Ok((0..count)
        .map(|i| {
            blocks
                .decode(i)
                .iter()
                .fold(Prob::one(), |acc, &s| acc * &dist[s])
        })
        .collect())
}

pub fn to_f64(p: &Prob) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

// ---------------------------------------------------------------------------
// Instance documents

/// Parses `a/b`, an integer, or a decimal such as `0.125` or `1e-3` into an
/// exact rational.
pub fn parse_rational(text: &str) -> Result<Prob> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((num, den)) = t.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Prob::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Prob::from_integer(BigInt::from_str(&all_digits).map_err(|_| bad())?);
    let shift = exp - frac_part.len() as i32;
    let ten = Prob::from_integer(BigInt::from(10));
    for _ in 0..shift.unsigned_abs() {
        if shift > 0 {
            value *= &ten;
        } else {
            value /= &ten;
        }
    }
    Ok(if neg { -value } else { value })
}

fn format_rational(p: &Prob) -> String {
    if p.denom().is_one() {
        p.numer().to_string()
    } else {
        format!("{}/{}", p.numer(), p.denom())
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    alphabet_x: Vec<Value>,
    alphabet_y: Vec<Value>,
    pmf: Vec<Vec<Value>>,
    f: Vec<Vec<Value>>,
}

fn label(v: &Value, what: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        other => Err(Error::Parse(format!(
            "{what}: expected a label, got {other}"
        ))),
    }
}

/// Parses and validates an instance document (JSON).
pub fn load_instance(text: &str) -> Result<ProblemInstance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let ax = doc
        .alphabet_x
        .iter()
        .map(|v| label(v, "alphabet_x"))
        .collect::<Result<Vec<_>>>()?;
    let ay = doc
        .alphabet_y
        .iter()
        .map(|v| label(v, "alphabet_y"))
        .collect::<Result<Vec<_>>>()?;
    let pmf = doc
        .pmf
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| match v {
                    Value::String(s) => parse_rational(s),
                    Value::Number(n) => parse_rational(&n.to_string()),
                    other => Err(Error::Parse(format!("pmf: expected a number, got {other}"))),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let f = doc
        .f
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| label(v, "f"))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ProblemInstance::new(ax, ay, pmf, f)
}

/// Serializes an instance back into the document format.
pub fn store_instance(inst: &ProblemInstance) -> String {
    let strs = |v: &[String]| v.iter().cloned().map(Value::String).collect::<Vec<_>>();
    let doc = InstanceDoc {
        alphabet_x: strs(&inst.alphabet_x),
        alphabet_y: strs(&inst.alphabet_y),
        pmf: inst
            .pmf
            .iter()
            .map(|r| {
                r.iter()
                    .map(|p| Value::String(format_rational(p)))
                    .collect()
            })
            .collect(),
        f: inst.f_table.iter().map(|r| strs(r)).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("instance document serializes")
}

// ---------------------------------------------------------------------------
// Instances used throughout the docs and tests

/// The equality function on `{0..4}²` with mass 1/10 on `y = x` and
/// `y = x + 1 (mod 5)`.
pub fn equality_instance() -> ProblemInstance {
    let w: Vec<Vec<u64>> = (0..5)
        .map(|x| {
            (0..5)
                .map(|y| u64::from(y == x || y == (x + 1) % 5))
                .collect()
        })
        .collect();
    let f: Vec<Vec<usize>> = (0..5)
        .map(|x| (0..5).map(|y| usize::from(x == y)).collect())
        .collect();
    ProblemInstance::from_weights(&w, &f).expect("valid instance")
}

/// `min(X, Y)` with X, Y independent and uniform on `{0, 1, 2}`.
pub fn min_instance() -> ProblemInstance {
    let w = vec![vec![1u64; 3]; 3];
    let f: Vec<Vec<usize>> = (0..3).map(|x| (0..3).map(|y| x.min(y)).collect()).collect();
    ProblemInstance::from_weights(&w, &f).expect("valid instance")
}

/// X, Y on `{1, 2, 3}` with mass 1/6 off the diagonal and `f = [x > y]`.
pub fn greater_than_instance() -> ProblemInstance {
    let labels = || ["1", "2", "3"].iter().map(|s| s.to_string()).collect();
    let sixth = Prob::new(BigInt::from(1), BigInt::from(6));
    let pmf = (0..3)
        .map(|x| {
            (0..3)
                .map(|y| if x != y { sixth.clone() } else { Prob::zero() })
                .collect()
        })
        .collect();
    let f = (0..3)
        .map(|x| (0..3).map(|y| usize::from(x > y).to_string()).collect())
        .collect();
    ProblemInstance::new(labels(), labels(), pmf, f).expect("valid instance")
}
