//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topchain_core::chains::ChainCode;
use topchain_core::dag::{Dag, NodeId};
use topchain_core::oracle::{random_temporal_graph, GenParams, OnePass};
use topchain_core::query::{gg_in, gg_out, oplus};
use topchain_core::tgraph::example_graph;
use topchain_core::{
    CodeMode, Index, IndexConfig, Querier, QueryKind, TemporalEdge, TemporalGraph, Time, TimeInterval, TopoMode,
    VertexId,
};

/// Collects failed checks instead of stopping at the first one.
#[derive(Default)]
struct Report {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 1000 {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

fn c(x: u32, y: u64) -> ChainCode {
    ChainCode::new(x, y)
}

fn iv(s: Time, e: Time) -> TimeInterval {
    TimeInterval::new(s, e).unwrap()
}

fn random_interval(rng: &mut ChaCha8Rng, horizon: Time) -> TimeInterval {
    let s = rng.gen_range(0..horizon);
    if rng.gen_bool(0.2) {
        TimeInterval::unbounded(s)
    } else {
        iv(s, s + rng.gen_range(0..horizon))
    }
}

fn graph_params(seed: u64, rng: &mut ChaCha8Rng) -> GenParams {
    GenParams {
        vertices: 50,
        avg_degree: rng.gen_range(2.0..=20.0),
        max_multiplicity: 5,
        horizon: 100,
        lambda_min: 1,
        lambda_max: 5,
        seed,
    }
}

/// k ∈ {1,2,5} × code modes × reduced/unreduced × topo pruning on/off.
fn config_grid() -> Vec<IndexConfig> {
    let mut out = Vec::new();
    for k in [1, 2, 5] {
        for codes in [CodeMode::Timestamp, CodeMode::Position] {
            for reduce in [false, true] {
                for topo in [false, true] {
                    out.push(IndexConfig {
                        k,
                        codes,
                        reduce,
                        topo,
                        ..IndexConfig::default()
                    });
                }
            }
        }
    }
    out
}

/// Oracle answers for all ordered pairs and one interval.
struct Expected {
    reach: Vec<bool>,
    earliest: Vec<Option<Time>>,
    fastest: Vec<Option<Time>>,
}

fn expected_answers(oracle: &OnePass, n: usize, window: TimeInterval) -> Expected {
    let mut e = Expected {
        reach: vec![false; n * n],
        earliest: vec![None; n * n],
        fastest: vec![None; n * n],
    };
    for a in 0..n {
        let arr = oracle.arrivals(a as VertexId, window);
        let dur = oracle.min_durations(a as VertexId, window);
        for b in 0..n {
            let i = a * n + b;
            if a == b {
                e.reach[i] = arr.back != Time::MAX;
                e.earliest[i] = Some(window.start);
                e.fastest[i] = Some(0);
            } else {
                e.reach[i] = arr.get(b as VertexId).is_some();
                e.earliest[i] = arr.get(b as VertexId);
                e.fastest[i] = dur[b];
            }
        }
    }
    e
}

/// Transitive closure of the transformed graph as bit rows.
fn closure<G: Dag>(g: &G) -> Vec<Vec<u64>> {
    let n = g.num_nodes();
    let words = n.div_ceil(64);
    let order = topchain_core::dag::topological_order(g).unwrap();
    let mut rows = vec![vec![0u64; words]; n];
    for &v in order.iter().rev() {
        let mut row = vec![0u64; words];
        row[v as usize / 64] |= 1 << (v % 64);
        for &w in g.successors(v) {
            for (r, x) in row.iter_mut().zip(&rows[w as usize]) {
                *r |= x;
            }
        }
        rows[v as usize] = row;
    }
    rows
}

fn reaches(cl: &[Vec<u64>], u: NodeId, v: NodeId) -> bool {
    cl[u as usize][v as usize / 64] >> (v % 64) & 1 == 1
}

fn criterion_1(r: &mut Report) {
    let config = IndexConfig {
        k: 2,
        codes: CodeMode::Position,
        reduce: false,
        ..IndexConfig::default()
    };
    let index = Index::build(&example_graph(), config).unwrap();
    let g = index.graph();
    r.check(g.num_vertices() == 12 && g.num_edges() == 13, || {
        format!("transformed graph has {} vertices / {} edges", g.num_vertices(), g.num_edges())
    });
    let cover = index.cover();
    let mut by_rank: Vec<usize> = (0..cover.len()).collect();
    by_rank.sort_by_key(|&ch| cover.rank(ch));
    let owners: Vec<Option<u32>> = by_rank.iter().map(|&ch| cover.owner(ch)).collect();
    r.check(owners == vec![Some(0), Some(1), Some(2), Some(3)], || {
        format!("chain ranks by owner {owners:?}, expected a, b, c, d")
    });
    // v1..v12 in rank-then-position order.
    let mut v = vec![0];
    for &ch in &by_rank {
        v.extend_from_slice(cover.chain(ch));
    }
    let labels = index.labels();
    let expect: [(&str, &[ChainCode], Vec<ChainCode>); 5] = [
        ("L_out(v3)", labels.l_out(v[3]), vec![c(1, 3), c(3, 1)]),
        ("L_in(v3)", labels.l_in(v[3]), vec![c(1, 3)]),
        ("L_out(v9)", labels.l_out(v[9]), vec![c(1, 4), c(3, 2)]),
        ("L_out(v8)", labels.l_out(v[8]), vec![c(1, 4), c(3, 1)]),
        ("L_in(v12)", labels.l_in(v[12]), vec![c(1, 3), c(3, 2)]),
    ];
    for (name, got, want) in expect {
        r.check(got == want.as_slice(), || format!("{name} = {got:?}, expected {want:?}"));
    }
    r.check(oplus(labels.l_out(v[3]), labels.l_in(v[12])), || "⊕(v3, v12) is false".into());
    r.check(gg_out(labels.l_out(v[3]), labels.l_out(v[5])), || "≫ does not separate v3 from v5".into());
    r.check(gg_out(labels.l_out(v[2]), labels.l_out(v[5])), || "≫ does not separate v2 from v5".into());
    let mut q = Querier::new(&index);
    r.check(q.reach_dag(v[3], v[12], None), || "v3 does not reach v12".into());
    r.check(!q.reach_dag(v[3], v[5], None), || "v3 reaches v5".into());
    r.check(!q.reach_dag(v[2], v[5], None), || "v2 reaches v5".into());
}

fn criterion_2(r: &mut Report) {
    let g = example_graph();
    let index = Index::build(&g, IndexConfig::default()).unwrap();
    let mut q = Querier::new(&index);
    let oracle = OnePass::new(&g);
    let (a, d) = (0, 3);
    r.check(q.reach(a, d, iv(2, 5)).unwrap(), || "reach(a, d, [2,5]) is false".into());
    r.check(!q.reach(a, d, iv(1, 3)).unwrap(), || "reach(a, d, [1,3]) is true".into());
    let ea = q.earliest_arrival(a, d, iv(1, 10)).unwrap().map(|p| p.value);
    r.check(ea == Some(5), || format!("earliest(a, d, [1,10]) = {ea:?}"));
    let fd = q.min_duration(a, d, iv(1, 10)).unwrap().map(|p| p.value);
    r.check(fd == Some(2), || format!("fastest(a, d, [1,10]) = {fd:?}"));
    r.check(
        oracle.reach(a, d, iv(2, 5))
            && !oracle.reach(a, d, iv(1, 3))
            && oracle.earliest_arrival(a, d, iv(1, 10)) == Some(5)
            && oracle.min_duration(a, d, iv(1, 10)) == Some(2),
        || "oracle disagrees with the worked example".into(),
    );
}

fn criterion_3(r: &mut Report) {
    let configs = config_grid();
    let mut queries = 0u64;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let g = random_temporal_graph(&graph_params(seed, &mut rng));
        let n = g.num_vertices();
        let oracle = OnePass::new(&g);
        let mut windows = vec![TimeInterval::all()];
        windows.extend((0..4).map(|_| random_interval(&mut rng, 100)));
        let expected: Vec<Expected> = windows.iter().map(|&w| expected_answers(&oracle, n, w)).collect();
        for config in &configs {
            let index = Index::build(&g, config.clone()).unwrap();
            let mut q = Querier::new(&index);
            for (w, exp) in windows.iter().zip(&expected) {
                for a in 0..n as VertexId {
                    for b in 0..n as VertexId {
                        if a == b {
                            continue;
                        }
                        let i = a as usize * n + b as usize;
                        let reach = q.reach(a, b, *w).unwrap();
                        let ea = q.earliest_arrival(a, b, *w).unwrap().map(|p| p.value);
                        let fd = q.min_duration(a, b, *w).unwrap().map(|p| p.value);
                        queries += 3;
                        r.check(reach == exp.reach[i], || {
                            format!("seed {seed} {config:?} reach {a}->{b} {w}: {reach}")
                        });
                        r.check(ea == exp.earliest[i], || {
                            format!("seed {seed} {config:?} earliest {a}->{b} {w}: {ea:?} vs {:?}", exp.earliest[i])
                        });
                        r.check(fd == exp.fastest[i], || {
                            format!("seed {seed} {config:?} fastest {a}->{b} {w}: {fd:?} vs {:?}", exp.fastest[i])
                        });
                    }
                }
            }
        }
    }
    r.note(format!("{queries} queries"));
}

fn criterion_4(r: &mut Report) {
    let mut with_cycles = 0;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + seed);
        let p = GenParams {
            vertices: rng.gen_range(2..=40),
            avg_degree: rng.gen_range(0.5..=12.0),
            max_multiplicity: rng.gen_range(1..=5),
            horizon: rng.gen_range(1..=100),
            lambda_min: 1,
            lambda_max: rng.gen_range(1..=5),
            seed,
        };
        let g = random_temporal_graph(&p);
        let oracle = OnePass::new(&g);
        if (0..g.num_vertices() as VertexId).any(|a| oracle.reach(a, a, TimeInterval::all())) {
            with_cycles += 1;
        }
        let t = topchain_core::transform(&g);
        r.check(t.verify_dag().is_ok(), || format!("seed {seed}: transformed graph has a cycle"));
    }
    r.check(with_cycles > 0, || "no generated graph had a temporal cycle".into());
    r.note(format!("{with_cycles} graphs with temporal cycles"));
}

fn criterion_5(r: &mut Report) {
    let mut builds = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + seed);
        let g = random_temporal_graph(&graph_params(seed, &mut rng));
        for k in [1, 2, 5] {
            for variant in ["topchain", "tc1", "tc2"] {
                let base = IndexConfig {
                    k,
                    ..IndexConfig::for_variant(variant).unwrap()
                };
                let full = Index::build(
                    &g,
                    IndexConfig {
                        reduce: false,
                        ..base.clone()
                    },
                )
                .unwrap();
                builds += 1;
                let n = full.graph().num_vertices();
                let labels = full.labels();
                let per_side_ok = (0..n as NodeId).all(|v| labels.l_out(v).len() <= k && labels.l_in(v).len() <= k);
                r.check(per_side_ok, || format!("seed {seed} k={k} {variant}: a label set exceeds k"));
                let total = full.label_sizes().total;
                r.check(total <= 2 * k * n, || format!("seed {seed} k={k} {variant}: {total} > 2k|V|"));
                let reduced = Index::build(&g, base).unwrap();
                if reduced.cover().is_temporal() {
                    builds += 1;
                    let sizes = reduced.label_sizes();
                    r.check(sizes.max_per_vertex <= k && sizes.total <= k * n, || {
                        format!("seed {seed} k={k} {variant}: reduced sizes {sizes:?} with |V|={n}")
                    });
                }
            }
        }
    }
    r.note(format!("{builds} builds"));
}

fn random_queries(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<(VertexId, VertexId, TimeInterval)> {
    (0..count)
        .map(|_| {
            (
                rng.gen_range(0..n as VertexId),
                rng.gen_range(0..n as VertexId),
                random_interval(rng, 110),
            )
        })
        .collect()
}

fn criterion_6(r: &mut Report) {
    for mode in [TopoMode::Plain, TopoMode::Plus] {
        let mut rng = ChaCha8Rng::seed_from_u64(6000);
        let mut g = random_temporal_graph(&graph_params(6, &mut rng));
        let config = IndexConfig::default();
        let mut index = Index::build(&g, config.clone()).unwrap();
        for step in 0..200 {
            let e = TemporalEdge::new(
                rng.gen_range(0..55),
                rng.gen_range(0..55),
                rng.gen_range(0..100),
                rng.gen_range(1..=5),
            )
            .unwrap();
            g.add_edge(e).unwrap();
            index.insert_edge(e, mode).unwrap();
            let fresh = Index::build(&g, config.clone()).unwrap();
            let mut qi = Querier::new(&index);
            let mut qf = Querier::new(&fresh);
            for kind in [QueryKind::Reach, QueryKind::Earliest, QueryKind::Fastest] {
                for (a, b, w) in random_queries(&mut rng, g.num_vertices(), 100) {
                    let got = qi.answer(kind, a, b, w).unwrap();
                    let want = qf.answer(kind, a, b, w).unwrap();
                    r.check(got == want, || {
                        format!("{mode:?} step {step} {kind:?} {a}->{b} {w}: {got:?} vs rebuilt {want:?}")
                    });
                }
            }
        }
        index.reduce_labels();
        let oracle = OnePass::new(&g);
        let mut q = Querier::new(&index);
        for (a, b, w) in random_queries(&mut rng, g.num_vertices(), 500) {
            let got = q.reach(a, b, w).unwrap();
            r.check(got == oracle.reach(a, b, w), || {
                format!("{mode:?} re-reduced index: reach {a}->{b} {w} = {got}")
            });
        }
    }
}

fn criterion_7(r: &mut Report) {
    let mut verdicts = 0u64;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + seed);
        let g = random_temporal_graph(&graph_params(seed, &mut rng));
        let base = Index::build(&g, IndexConfig::default()).unwrap();
        let cl = closure(base.graph());
        let n = base.graph().num_vertices() as NodeId;
        if n == 0 {
            continue;
        }
        // Uniform pairs plus pairs drawn along random walks (mostly reachable).
        let mut pairs: Vec<(NodeId, NodeId)> = (0..500).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        for _ in 0..500 {
            let u = rng.gen_range(0..n);
            let mut w = u;
            for _ in 0..rng.gen_range(1..12) {
                let s = base.graph().successors(w);
                if s.is_empty() {
                    break;
                }
                w = s[rng.gen_range(0..s.len())];
            }
            pairs.push((u, w));
        }
        let mut configs = config_grid();
        configs.push(IndexConfig::for_variant("tc1").unwrap());
        configs.push(IndexConfig::for_variant("tc2").unwrap());
        for config in configs {
            let index = Index::build(&g, config.clone()).unwrap();
            let labels = index.labels();
            let topo = index.topo();
            for &(u, v) in &pairs {
                let truth = reaches(&cl, u, v);
                verdicts += 1;
                r.check(!(topo.excludes(u, v) && truth), || format!("seed {seed} {config:?}: topo prunes {u}->{v}"));
                let pruned = gg_out(labels.l_out(u), labels.l_out(v)) || gg_in(labels.l_in(v), labels.l_in(u));
                r.check(!(pruned && truth), || format!("seed {seed} {config:?}: ≫ prunes {u}->{v}"));
                // ⊕ is consulted only between different chains.
                if labels.code(u).x != labels.code(v).x {
                    let hit = oplus(labels.l_out(u), labels.l_in(v));
                    r.check(!(hit && !truth), || format!("seed {seed} {config:?}: ⊕ claims {u}->{v}"));
                }
            }
        }
    }
    r.note(format!("{verdicts} pairs checked"));
}

fn scaled(vertices: usize, seed: u64) -> GenParams {
    GenParams {
        vertices,
        avg_degree: 10.0,
        max_multiplicity: 100,
        horizon: 1000,
        lambda_min: 1,
        lambda_max: 5,
        seed,
    }
}

fn criterion_8(r: &mut Report) {
    let small = random_temporal_graph(&scaled(10_000, 8));
    let large = random_temporal_graph(&scaled(100_000, 8));
    let time_build = |g: &TemporalGraph| {
        let start = Instant::now();
        let index = Index::build(g, IndexConfig::default()).unwrap();
        (start.elapsed(), index)
    };
    // Same method at both sizes: best of three builds.
    let (mut t_small, index) = time_build(&small);
    for _ in 0..2 {
        t_small = t_small.min(time_build(&small).0);
    }
    let mut t_large = Duration::MAX;
    for _ in 0..3 {
        t_large = t_large.min(time_build(&large).0);
    }
    let ratio = t_large.as_secs_f64() / t_small.as_secs_f64().max(1e-9);
    r.check(ratio <= 15.0, || {
        format!("build time ratio {ratio:.2} ({:?} vs {:?})", t_large, t_small)
    });
    r.note(format!("build {:.3}s vs {:.3}s, ratio {ratio:.2}", t_small.as_secs_f64(), t_large.as_secs_f64()));

    let oracle = OnePass::new(&small);
    let mut rng = ChaCha8Rng::seed_from_u64(8008);
    let mut q = Querier::new(&index);
    for _ in 0..100 {
        let a = rng.gen_range(0..10_000);
        let b = rng.gen_range(0..10_000);
        let w = if rng.gen_bool(0.5) { TimeInterval::all() } else { random_interval(&mut rng, 1000) };
        let reach = q.reach(a, b, w).unwrap();
        r.check(reach == oracle.reach(a, b, w), || format!("reach {a}->{b} {w}: {reach}"));
        if a != b {
            let ea = q.earliest_arrival(a, b, w).unwrap().map(|p| p.value);
            r.check(ea == oracle.earliest_arrival(a, b, w), || format!("earliest {a}->{b} {w}: {ea:?}"));
            let fd = q.min_duration(a, b, w).unwrap().map(|p| p.value);
            r.check(fd == oracle.min_duration(a, b, w), || format!("fastest {a}->{b} {w}: {fd:?}"));
        }
    }
}

fn criterion_9(r: &mut Report) {
    let mut cases = 0;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(9000 + seed);
        let g = random_temporal_graph(&graph_params(seed, &mut rng));
        let index = Index::build(&g, IndexConfig::default()).unwrap();
        let mut q = Querier::new(&index);
        let n = g.num_vertices() as VertexId;
        for _ in 0..1000 {
            cases += 1;
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let inner = random_interval(&mut rng, 100);
            let start = rng.gen_range(0..=inner.start);
            let end = if rng.gen_bool(0.3) {
                Time::MAX
            } else {
                inner.end.saturating_add(rng.gen_range(0..50))
            };
            let outer = iv(start, end);
            let r1 = q.reach(a, b, inner).unwrap();
            let r2 = q.reach(a, b, outer).unwrap();
            r.check(!r1 || r2, || format!("reach {a}->{b} lost when {inner} grows to {outer}"));
            let e1 = q.earliest_arrival(a, b, inner).unwrap().map(|p| p.value);
            let e2 = q.earliest_arrival(a, b, outer).unwrap().map(|p| p.value);
            r.check(e1.is_none() || e2.is_some_and(|x| x <= e1.unwrap()), || {
                format!("earliest {a}->{b}: {e1:?} in {inner}, {e2:?} in {outer}")
            });
            let d1 = q.min_duration(a, b, inner).unwrap().map(|p| p.value);
            let d2 = q.min_duration(a, b, outer).unwrap().map(|p| p.value);
            r.check(d1.is_none() || d2.is_some_and(|x| x <= d1.unwrap()), || {
                format!("fastest {a}->{b}: {d1:?} in {inner}, {d2:?} in {outer}")
            });
        }
    }
    r.note(format!("{cases} cases"));
}

type Criterion = (u32, &'static str, Duration, fn(&mut Report));

fn main() -> ExitCode {
    let criteria: &[Criterion] = &[
        (1, "worked example labels and operators", Duration::from_secs(1), criterion_1),
        (2, "worked example temporal queries", Duration::from_secs(1), criterion_2),
        (3, "oracle equivalence", Duration::from_secs(300), criterion_3),
        (4, "acyclicity of transformed graphs", Duration::MAX, criterion_4),
        (5, "label size bounds", Duration::MAX, criterion_5),
        (6, "update equivalence", Duration::from_secs(120), criterion_6),
        (7, "prune soundness", Duration::MAX, criterion_7),
        (8, "scalability smoke", Duration::from_secs(300), criterion_8),
        (9, "interval monotonicity", Duration::MAX, criterion_9),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for &(id, name, budget, run) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let mut report = Report::default();
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| run(&mut report)));
        let elapsed = start.elapsed();
        if let Err(panic) = outcome {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            report.failures.push(format!("panicked: {msg}"));
        }
        if elapsed > budget {
            report.failures.push(format!("took {:.2}s, budget {:.0}s", elapsed.as_secs_f64(), budget.as_secs_f64()));
        }
        let status = if report.failures.is_empty() { "PASS" } else { "FAIL" };
        let notes = if report.notes.is_empty() {
            String::new()
        } else {
            format!("; {}", report.notes.join("; "))
        };
        println!("{status} criterion {id}: {name} ({:.2}s{notes})", elapsed.as_secs_f64());
        for f in report.failures.iter().take(10) {
            println!("    {f}");
        }
        if report.failures.len() > 10 {
            println!("    ... {} more", report.failures.len() - 10);
        }
        if !report.failures.is_empty() {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
