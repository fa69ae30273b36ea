//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the lines are always printed; exits non-zero if any criterion fails.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zefc::coloring::{
    chromatic_entropy, chromatic_entropy_product, enumerate_colorings, is_coloring,
    ChromaticConfig, ColorCover, Coloring, DEFAULT_BLOCK_BUDGET,
};
use zefc::entropy::{entropy, fractional_chromatic_lp, graph_entropy, GraphEntropyConfig};
use zefc::graphs::{
    confusability_graphs, confusability_pgraphs, f_rook_graph, f_rook_pgraph, Graph,
    ProbabilisticGraph,
};
use zefc::model::{
    equality_instance, greater_than_instance, min_instance, support, to_f64, Prob, ProblemInstance,
};
use zefc::protocol::{
    build_decoders, build_scheme, decoders_for_relay, measure_rates, relay_computability,
    support_block_probs, verify_zero_error, RateMode, Scheme,
};
use zefc::region::{chromatic_region_frontier, Bounds, FrontierConfig, RateTriple, REGION_TOL};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn is_cycle_graph(g: &Graph, n: usize) -> bool {
    g.vertex_count() == n
        && g.edge_count() == n
        && (0..n).all(|v| g.degree(v) == 2)
        && g.is_connected()
}

fn class_sizes(c: &Coloring) -> Vec<usize> {
    let mut s: Vec<usize> = c.classes().iter().map(Vec::len).collect();
    s.sort_unstable();
    s
}

// ---------------------------------------------------------------------------

fn c1_equality_structure() -> Outcome {
    let inst = equality_instance();
    let g = f_rook_graph(&inst);
    let (gx, gy) = confusability_graphs(&inst);
    let ok = is_cycle_graph(&g, 10) && is_cycle_graph(&gx, 5) && is_cycle_graph(&gy, 5);
    outcome(
        ok,
        format!(
            "f-rook graph {}v/{}e connected={}; confusability graphs {}v/{}e and {}v/{}e (exact)",
            g.vertex_count(),
            g.edge_count(),
            g.is_connected(),
            gx.vertex_count(),
            gx.edge_count(),
            gy.vertex_count(),
            gy.edge_count()
        ),
    )
}

fn c2_graph_entropy() -> Outcome {
    let cfg = GraphEntropyConfig::default();
    let k3 = graph_entropy(&ProbabilisticGraph::uniform(Graph::complete(3)), &cfg).unwrap();
    let empty = graph_entropy(&ProbabilisticGraph::uniform(Graph::unlabeled(4)), &cfg).unwrap();
    let c5 = graph_entropy(&ProbabilisticGraph::uniform(Graph::cycle(5)), &cfg).unwrap();
    let chi_f = fractional_chromatic_lp(&Graph::cycle(5), 24).unwrap();
    let five_halves = Prob::new(5.into(), 2.into());
    let d_k3 = (k3.bits - 3f64.log2()).abs();
    let d_c5 = (c5.bits - 2.5f64.log2()).abs();
    let d_lp = (c5.bits - to_f64(&chi_f).log2()).abs();
    let ok = d_k3 <= 1e-6
        && empty.bits.abs() <= 1e-12
        && d_c5 <= 1e-4
        && chi_f == five_halves
        && d_lp <= 1e-4;
    outcome(
        ok,
        format!(
            "|K3-log2 3|={d_k3:.1e} (tol 1e-6); edgeless={:.1e} (tol 1e-12); |C5-log2 2.5|={d_c5:.1e} (tol 1e-4); chi_f(C5)={chi_f}",
            empty.bits
        ),
    )
}

fn c3_chromatic_entropy() -> Outcome {
    let cfg = ChromaticConfig::default();
    let c10 = chromatic_entropy(&ProbabilisticGraph::uniform(Graph::cycle(10)), &cfg).unwrap();
    let c5 = chromatic_entropy(&ProbabilisticGraph::uniform(Graph::cycle(5)), &cfg).unwrap();
    let c10_ok = c10.bits == 1.0
        && c10.witness.num_colors() == 2
        && class_sizes(&c10.witness) == vec![5, 5]
        && is_coloring(&Graph::cycle(10), c10.witness.colors());
    let c5_ok = (c5.bits - 1.5219).abs() <= 1e-4
        && class_sizes(&c5.witness) == vec![1, 2, 2]
        && is_coloring(&Graph::cycle(5), c5.witness.colors());
    outcome(
        c10_ok && c5_ok,
        format!(
            "C10 -> {} bits, classes {:?}; C5 -> {:.6} bits (tol 1e-4), classes {:?}",
            c10.bits,
            class_sizes(&c10.witness),
            c5.bits,
            class_sizes(&c5.witness)
        ),
    )
}

fn c4_sandwich() -> Outcome {
    let inst = equality_instance();
    let (pgx, _) = confusability_pgraphs(&inst);
    let ge = graph_entropy(&pgx, &GraphEntropyConfig::default()).unwrap();
    let single = chromatic_entropy(&pgx, &ChromaticConfig::default()).unwrap();
    let cfg = ChromaticConfig {
        cap_vertices: 25,
        ..Default::default()
    };
    let pair = chromatic_entropy_product(&pgx, 2, &cfg).unwrap();
    let ok = ge.bits <= pair.bits + 1e-12 && pair.bits <= single.bits + 1e-12;
    outcome(
        ok,
        format!(
            "H_G(C5)={:.6} <= H_chi(C5^2)/2={:.6} <= H_chi(C5)={:.6}",
            ge.bits, pair.bits, single.bits
        ),
    )
}

fn c5_min_tight() -> Outcome {
    let inst = min_instance();
    let (gx, gy) = confusability_graphs(&inst);
    let b = Bounds::compute(&inst, &GraphEntropyConfig::default()).unwrap();
    let gap = b
        .corner_i1
        .as_array()
        .iter()
        .zip(b.corner_o.as_array())
        .map(|(a, o)| (a - o).abs())
        .fold(0.0, f64::max);
    let ok = gx.vertex_count() == 3
        && gx.is_complete()
        && gy.vertex_count() == 3
        && gy.is_complete()
        && gap <= 1e-9
        && b.tight();
    outcome(
        ok,
        format!(
            "both graphs K3; max|i1-o|={gap:.1e} (tol 1e-9); tight={}",
            b.tight()
        ),
    )
}

fn greater_than_scheme(inst: &ProblemInstance) -> Scheme {
    // Each source sends 1 for the symbol "1", 0 otherwise; the relay sends
    // 1 iff the two bits agree.
    let phi = vec![1, 0, 0];
    let mut theta = BTreeMap::new();
    for a in 0..2 {
        for b in 0..2 {
            theta.insert((a, b), usize::from(a == b));
        }
    }
    Scheme::from_maps(inst, 1, phi.clone(), phi, theta).unwrap()
}

fn c6_example_end_to_end() -> Outcome {
    let inst = greater_than_instance();
    let scheme = greater_than_scheme(&inst);
    let v = verify_zero_error(&inst, &scheme, DEFAULT_BLOCK_BUDGET).unwrap();
    let decoders = build_decoders(&inst, &scheme, DEFAULT_BLOCK_BUDGET).is_ok();
    let relay = relay_computability(&inst, &scheme, DEFAULT_BLOCK_BUDGET).unwrap();
    let ok = v.zero_error && decoders && !relay.computable && relay.residual_bits > 0.0;
    outcome(
        ok,
        format!(
            "zero_error={} decoders={} relay_computable={} residual={:.6} bits",
            v.zero_error, decoders, relay.computable, relay.residual_bits
        ),
    )
}

// ---------------------------------------------------------------------------
// Random instances and schemes

fn random_instance(rng: &mut ChaCha8Rng, full_support: bool, range: usize) -> ProblemInstance {
    loop {
        let nx = rng.gen_range(1..=3);
        let ny = rng.gen_range(1..=3);
        let lo = u64::from(full_support);
        let w: Vec<Vec<u64>> = (0..nx)
            .map(|_| (0..ny).map(|_| rng.gen_range(lo..=4)).collect())
            .collect();
        if w.iter().flatten().all(|&v| v == 0) {
            continue;
        }
        let f: Vec<Vec<usize>> = (0..nx)
            .map(|_| (0..ny).map(|_| rng.gen_range(0..range)).collect())
            .collect();
        return ProblemInstance::from_weights(&w, &f).unwrap();
    }
}

/// Random proper coloring: vertices in random order, each taking a random
/// color among those its colored neighbours leave free (a fresh color is
/// always allowed).
fn random_coloring(
    rng: &mut ChaCha8Rng,
    n: usize,
    adjacent: impl Fn(usize, usize) -> bool,
) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut colors = vec![usize::MAX; n];
    let mut used = 0usize;
    for &v in &order {
        let free: Vec<usize> = (0..=used)
            .filter(|&c| (0..n).all(|u| colors[u] != c || !adjacent(u, v)))
            .collect();
        let c = *free.choose(rng).expect("a fresh color is always free");
        colors[v] = c;
        used = used.max(c + 1);
    }
    colors
}

/// Random zero-error scheme at n = 1: random colorings of the confusability
/// graphs and a random coloring of their product quotient for the relay.
fn random_zero_error_scheme(rng: &mut ChaCha8Rng, inst: &ProblemInstance) -> Scheme {
    let (gx, gy) = confusability_graphs(inst);
    let ca = random_coloring(rng, inst.nx(), |u, v| gx.has_edge(u, v));
    let cb = random_coloring(rng, inst.ny(), |u, v| gy.has_edge(u, v));
    let s = support(inst);
    let g = f_rook_graph(inst);
    let keys: Vec<(usize, usize)> = s.pairs.iter().map(|&(x, y)| (ca[x], cb[y])).collect();
    let quotient: Vec<(usize, usize)> = keys
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index = |k: &(usize, usize)| quotient.binary_search(k).unwrap();
    let cq = random_coloring(rng, quotient.len(), |p, q| {
        g.edges().any(|(u, v)| {
            let (a, b) = (index(&keys[u]), index(&keys[v]));
            (a, b) == (p, q) || (a, b) == (q, p)
        })
    });
    let theta: BTreeMap<(usize, usize), usize> = quotient
        .iter()
        .enumerate()
        .map(|(i, &k)| (k, cq[i]))
        .collect();
    Scheme::from_maps(inst, 1, ca, cb, theta).unwrap()
}

fn relay_color_entropy(inst: &ProblemInstance, scheme: &Scheme) -> f64 {
    let relay = scheme.relay_colors(inst, DEFAULT_BLOCK_BUDGET).unwrap();
    let probs = support_block_probs(inst, scheme.n, DEFAULT_BLOCK_BUDGET).unwrap();
    let mut masses: BTreeMap<usize, Prob> = BTreeMap::new();
    for (c, p) in relay.into_iter().zip(probs) {
        *masses
            .entry(c)
            .or_insert_with(|| Prob::from_integer(0.into())) += p;
    }
    entropy(&masses.into_values().collect::<Vec<_>>())
}

/// `R_C <= H(c_C)/n + 1/n`; returns the worst slack violation (<= 0 is fine).
fn achievability_excess(inst: &ProblemInstance, scheme: &Scheme) -> f64 {
    let r = measure_rates(inst, scheme, RateMode::Exact).unwrap().rates;
    let n = scheme.n as f64;
    r.r_c - (relay_color_entropy(inst, scheme) / n + 1.0 / n)
}

fn c7_full_support_relay(worst_slack: &Cell<f64>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e57);
    let (instances, per) = (200, 20);
    let mut schemes = 0;
    let mut bad = Vec::new();
    for i in 0..instances {
        let inst = random_instance(&mut rng, true, 3);
        for _ in 0..per {
            let scheme = random_zero_error_scheme(&mut rng, &inst);
            let v = verify_zero_error(&inst, &scheme, DEFAULT_BLOCK_BUDGET).unwrap();
            let relay = relay_computability(&inst, &scheme, DEFAULT_BLOCK_BUDGET).unwrap();
            worst_slack.set(worst_slack.get().max(achievability_excess(&inst, &scheme)));
            schemes += 1;
            if !v.zero_error || !relay.computable || relay.residual_bits != 0.0 {
                bad.push(i);
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{instances} instances x {per} verified schemes = {schemes}; nonzero residuals: {}",
            bad.len()
        ),
    )
}

fn partitions(n: usize, max_blocks: usize) -> Vec<Vec<usize>> {
    enumerate_colorings(&Graph::unlabeled(n), usize::MAX)
        .unwrap()
        .into_iter()
        .filter(|c| c.num_colors() <= max_blocks)
        .map(|c| c.colors().to_vec())
        .collect()
}

fn c8_decodability_equivalences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e33a);
    let instances = 500;
    let parts: Vec<Vec<Vec<usize>>> = (0..=9).map(|n| partitions(n, 3)).collect();
    let mut relay_checks = 0usize;
    let mut pair_checks = 0usize;
    let mut seen_truth = [false; 2];
    let mut mismatches = 0usize;
    for _ in 0..instances {
        let inst = random_instance(&mut rng, false, 2);
        let s = support(&inst);
        let g = f_rook_graph(&inst);
        let (gx, gy) = confusability_graphs(&inst);
        let mut relays: HashSet<Vec<usize>> = HashSet::new();
        for pa in &parts[inst.nx()] {
            for pb in &parts[inst.ny()] {
                // Encoder product as a coloring of the rook's graph.
                let prod: Vec<usize> = s.pairs.iter().map(|&(x, y)| pa[x] * 3 + pb[y]).collect();
                let lhs = is_coloring(&g, &prod);
                let rhs = is_coloring(&gx, pa) && is_coloring(&gy, pb);
                pair_checks += 1;
                mismatches += usize::from(lhs != rhs);

                let keys: Vec<(usize, usize)> =
                    s.pairs.iter().map(|&(x, y)| (pa[x], pb[y])).collect();
                let reach: Vec<(usize, usize)> = keys
                    .iter()
                    .copied()
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                for theta in &parts[reach.len()] {
                    let relay: Vec<usize> = keys
                        .iter()
                        .map(|k| theta[reach.binary_search(k).unwrap()])
                        .collect();
                    relays.insert(Coloring::canonical(&relay).colors().to_vec());
                }
            }
        }
        for relay in relays {
            let coloring = is_coloring(&g, &relay);
            let decodable = decoders_for_relay(&inst, 1, &relay, DEFAULT_BLOCK_BUDGET).is_ok();
            seen_truth[usize::from(coloring)] = true;
            relay_checks += 1;
            mismatches += usize::from(coloring != decodable);
        }
    }
    outcome(
        mismatches == 0 && seen_truth == [true, true],
        format!(
            "{instances} instances; {relay_checks} distinct composed relay maps, {pair_checks} encoder pairs; mismatches: {mismatches}"
        ),
    )
}

/// The achievability slack is checked on every scheme built in this suite,
/// including the random ones from criterion 7.
fn c9_rates(worst_slack: &Cell<f64>) -> Outcome {
    let inst = equality_instance();
    let ce = chromatic_entropy(&f_rook_pgraph(&inst), &ChromaticConfig::default()).unwrap();
    let cover = ColorCover::identity_with_relay(&inst, ce.witness.colors().to_vec()).unwrap();
    let scheme = build_scheme(&inst, &cover).unwrap();
    let exact = measure_rates(&inst, &scheme, RateMode::Exact)
        .unwrap()
        .rates;
    let sim = measure_rates(
        &inst,
        &scheme,
        RateMode::Simulate {
            blocks: 100_000,
            seed: 7,
        },
    )
    .unwrap();
    let se = sim.std_err.unwrap();
    let within = exact
        .as_array()
        .iter()
        .zip(sim.rates.as_array())
        .zip(se)
        .all(|((e, s), se)| (e - s).abs() <= 5.0 * se);
    let bump = |v: f64| worst_slack.set(worst_slack.get().max(v));
    bump(achievability_excess(&inst, &scheme));

    // Block length 2: identity encoders with the product of the single-letter
    // relay coloring.
    let single = ce.witness.colors();
    let k = ce.witness.num_colors();
    let relay2: Vec<usize> = (0..100)
        .map(|t| single[t / 10] * k + single[t % 10])
        .collect();
    let cover2 =
        ColorCover::from_relay_coloring(&inst, 2, (0..25).collect(), (0..25).collect(), relay2)
            .unwrap();
    let scheme2 = build_scheme(&inst, &cover2).unwrap();
    bump(achievability_excess(&inst, &scheme2));
    let gt = greater_than_instance();
    bump(achievability_excess(&gt, &greater_than_scheme(&gt)));

    let ok = exact.r_c == 1.0 && within && worst_slack.get() <= 1e-12;
    outcome(
        ok,
        format!(
            "exact R_C={}; simulated R_C={:.6} (se {:.1e}), |sim-exact| <= 5 se on all links: {within}; worst R_C - (H(c_C)+1)/n = {:.3e}",
            exact.r_c, sim.rates.r_c, se[2], worst_slack.get()
        ),
    )
}

fn frontier_instances() -> Vec<(&'static str, ProblemInstance)> {
    let w2 = vec![vec![1, 1], vec![1, 1]];
    vec![
        (
            "constant",
            ProblemInstance::from_weights(&w2, &[vec![0, 0], vec![0, 0]]).unwrap(),
        ),
        (
            "xor",
            ProblemInstance::from_weights(&w2, &[vec![0, 1], vec![1, 0]]).unwrap(),
        ),
        (
            "and",
            ProblemInstance::from_weights(&[vec![3, 1], vec![1, 2]], &[vec![0, 0], vec![0, 1]])
                .unwrap(),
        ),
        (
            "partial",
            ProblemInstance::from_weights(
                &[vec![1, 2, 0], vec![0, 1, 1]],
                &[vec![0, 1, 0], vec![0, 0, 1]],
            )
            .unwrap(),
        ),
        ("min", min_instance()),
        ("greater_than", greater_than_instance()),
    ]
}

fn c10_frontier() -> Outcome {
    let tol = 1e-6;
    let fc = FrontierConfig::default();
    let mut points = 0;
    let mut failures = Vec::new();
    for (name, inst) in frontier_instances() {
        let corner = Bounds::compute(&inst, &GraphEntropyConfig::default())
            .unwrap()
            .corner_o;
        let levels: Vec<Vec<RateTriple>> = [1, 2]
            .iter()
            .map(|&n| chromatic_region_frontier(&inst, n, &fc).unwrap())
            .collect();
        for (n, level) in levels.iter().enumerate() {
            for p in level {
                points += 1;
                if !p.dominates(&corner, tol) {
                    failures.push(format!("{name} n={} {p:?}", n + 1));
                }
            }
        }
        for p in &levels[0] {
            if !levels[1].iter().any(|q| p.dominates(q, REGION_TOL)) {
                failures.push(format!("{name}: n=1 point {p:?} not matched at n=2"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} instances, {points} frontier points dominate corner_o (tol {tol:.0e}); failures: {:?}",
            frontier_instances().len(),
            failures
        ),
    )
}

fn main() {
    type Criterion<'a> = (&'a str, Duration, Box<dyn FnMut() -> Outcome + 'a>);
    let worst_slack = Cell::new(f64::NEG_INFINITY);
    let criteria: Vec<Criterion> = vec![
        (
            "equality instance structure",
            Duration::from_secs(1),
            Box::new(c1_equality_structure),
        ),
        (
            "graph entropy values",
            Duration::from_secs(5),
            Box::new(c2_graph_entropy),
        ),
        (
            "chromatic entropy values",
            Duration::from_secs(10),
            Box::new(c3_chromatic_entropy),
        ),
        (
            "sandwich at the 25-vertex product",
            Duration::from_secs(60),
            Box::new(c4_sandwich),
        ),
        (
            "min(X,Y) bounds are tight",
            Duration::from_secs(5),
            Box::new(c5_min_tight),
        ),
        (
            "x>y scheme: zero error, relay cannot compute",
            Duration::from_secs(1),
            Box::new(c6_example_end_to_end),
        ),
        (
            "full support: relay always computes",
            Duration::from_secs(60),
            Box::new(|| c7_full_support_relay(&worst_slack)),
        ),
        (
            "decodability <=> coloring, product <=> factors",
            Duration::from_secs(120),
            Box::new(c8_decodability_equivalences),
        ),
        (
            "rate measurement consistency",
            Duration::from_secs(30),
            Box::new(|| c9_rates(&worst_slack)),
        ),
        (
            "frontier dominates the outer corner",
            Duration::from_secs(120),
            Box::new(c10_frontier),
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, mut run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took <= limit;
        failed += usize::from(!pass);
        println!(
            "criterion {:>2}: {} {name}: {} [{:.2}s, limit {}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
