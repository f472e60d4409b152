//! Acceptance criteria. Each criterion prints one `PASS`/`FAIL` line with
//! its elapsed time; the process exits non-zero if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqsum::bench::{measure, synthetic, GranularityGrid, VAST};
use seqsum_core::coreflow::mine_coreflow;
use seqsum_core::insight::{evaluate, InsightQuery};
use seqsum_core::layout::{layout, LayoutConfig};
use seqsum_core::render::{render_svg, Style};
use seqsum_core::sententree::{mine_sententree, SentenTreeConfig};
use seqsum_core::summary::{NodeId, Technique};
use seqsum_core::synopsis::{cluster, edit_cost, objective, to_summary, SynopsisParams};
use seqsum_core::{Dataset, MinSupport, Summary};
use seqsum_testkit as tk;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn grid() -> GranularityGrid {
    GranularityGrid::default()
}

/// Random small dataset number `i` of a family, reproducible across criteria.
fn small_dataset(family: u64, i: u64, seqs: usize, events: usize, len: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(family * 1_000_003 + i);
    tk::random_dataset(&mut rng, seqs, events, len)
}

fn coreflow_dataset(i: u64) -> Dataset {
    small_dataset(2, i, 5, 4, 4)
}

fn monotonic_dataset(i: u64) -> Dataset {
    small_dataset(3, i, 12, 5, 8)
}

fn synopsis_dataset(i: u64) -> Dataset {
    small_dataset(4, i, 12, 4, 7)
}

fn ac1() -> Outcome {
    let g = grid();
    ensure(g.min_support_levels == [0.05, 0.10, 0.15, 0.20, 0.25, 0.30], || format!("{:?}", g.min_support_levels))?;
    ensure(g.lambda_levels == [0.90, 0.75, 0.60, 0.45, 0.30, 0.15], || format!("{:?}", g.lambda_levels))?;
    Ok("minSupport 5%..30% step 5%, lambda 90%..15% step 15%".into())
}

fn ac2() -> Outcome {
    let mut checked = 0;
    for i in 0..1000 {
        let d = coreflow_dataset(i);
        let raw = tk::raw(&d);
        for f in grid().min_support_levels.into_iter().chain([0.5, 1.0]) {
            let ms = MinSupport::new(f).unwrap();
            let s = mine_coreflow(&d, ms).map_err(|e| e.to_string())?;
            ensure(s.validate().is_empty(), || format!("dataset {i}: invalid tree {:?}", s.validate()))?;
            let expected = tk::reference_coreflow(&raw, ms.absolute_threshold(d.len()));
            ensure(tk::tree_view(&s) == expected, || format!("dataset {i} at {f}: {raw:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (dataset, threshold) pairs equal the reference"))
}

fn ac3() -> Outcome {
    for i in 0..200 {
        let d = monotonic_dataset(i);
        let mut prev: Option<std::collections::BTreeMap<(Vec<u32>, usize), usize>> = None;
        for f in grid().min_support_levels {
            let s = mine_coreflow(&d, MinSupport::new(f).unwrap()).map_err(|e| e.to_string())?;
            let nodes = tk::tree_paths(&tk::tree_view(&s));
            if let Some(p) = &prev {
                for (k, n) in &nodes {
                    ensure(p.get(k).copied().unwrap_or(0) >= *n, || format!("dataset {i}: node {k:?} appears at {f}"))?;
                }
            }
            prev = Some(nodes);
        }
    }
    Ok("200 datasets, node multisets shrink along the grid".into())
}

fn ac4() -> Outcome {
    let mut merges = 0;
    for i in 0..100 {
        let d = synopsis_dataset(i);
        for lambda in grid().lambda_levels {
            let params = SynopsisParams::new(lambda, &d).map_err(|e| e.to_string())?;
            let syn = cluster(&d, &params).map_err(|e| e.to_string())?;
            ensure(syn.trace.windows(2).all(|w| w[1] < w[0]), || format!("dataset {i} λ={lambda}: {:?}", syn.trace))?;
            ensure(syn.trace.len() <= d.len(), || format!("dataset {i}: {} merges", syn.trace.len() - 1))?;
            let dl = objective(&d, &syn.clusters, &params).map_err(|e| format!("dataset {i}: {e}"))?;
            ensure((dl.total - syn.trace.last().unwrap()).abs() < 1e-6, || format!("dataset {i}: objective drift"))?;
            merges += syn.trace.len() - 1;
        }
    }
    Ok(format!("{merges} accepted merges, each strictly decreasing; all partitions valid"))
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..500 {
        let draw = |rng: &mut ChaCha8Rng| -> Vec<u32> {
            let n = rng.gen_range(0..=12);
            (0..n).map(|_| rng.gen_range(0..5)).collect()
        };
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let (got, want) = (edit_cost(&a, &b), tk::dp_edit_distance(&a, &b));
        ensure(got == want, || format!("pair {i}: {a:?} {b:?}: {got} vs {want}"))?;
    }
    Ok("500 pairs equal the insert/delete DP".into())
}

fn ac6() -> Outcome {
    let (mut fine_total, mut coarse_total) = (0, 0);
    for i in 0..100 {
        let d = synopsis_dataset(i);
        let fine = cluster(&d, &SynopsisParams::new(0.90, &d).unwrap()).unwrap().clusters.len();
        let coarse = cluster(&d, &SynopsisParams::new(0.15, &d).unwrap()).unwrap().clusters.len();
        ensure(fine >= coarse, || format!("dataset {i}: {fine} patterns at 0.90 < {coarse} at 0.15"))?;
        fine_total += fine;
        coarse_total += coarse;
    }
    Ok(format!("pattern totals {fine_total} at λ=0.90, {coarse_total} at λ=0.15"))
}

fn miner_outputs() -> Vec<(String, Summary)> {
    let mut out = Vec::new();
    for i in 0..1000 {
        let d = coreflow_dataset(i);
        let f = grid().min_support_levels[i as usize % 6];
        let ms = MinSupport::new(f).unwrap();
        out.push((format!("coreflow/{i}"), mine_coreflow(&d, ms).unwrap()));
        out.push((format!("sententree/{i}"), mine_sententree(&d, ms, SentenTreeConfig::default()).unwrap()));
    }
    for i in 0..200 {
        let d = monotonic_dataset(i);
        for f in grid().min_support_levels {
            let ms = MinSupport::new(f).unwrap();
            out.push((format!("coreflow-m/{i}/{f}"), mine_coreflow(&d, ms).unwrap()));
            out.push((format!("sententree-m/{i}/{f}"), mine_sententree(&d, ms, SentenTreeConfig::default()).unwrap()));
        }
    }
    for i in 0..100 {
        let d = synopsis_dataset(i);
        for lambda in grid().lambda_levels {
            let params = SynopsisParams::new(lambda, &d).unwrap();
            out.push((format!("synopsis/{i}/{lambda}"), to_summary(&d, &params, &cluster(&d, &params).unwrap())));
        }
    }
    out
}

fn ac7() -> Outcome {
    let cfg = LayoutConfig::default();
    let outputs = miner_outputs();
    let mut edges = 0;
    for (name, s) in &outputs {
        let l = layout(s, &cfg).map_err(|e| format!("{name}: {e}"))?;
        let bad = tk::geometry_violations(s, &l);
        ensure(bad.is_empty(), || format!("{name}: {bad:?}"))?;
        edges += s.edges.len();
    }
    Ok(format!("{} summaries, {edges} edges: no overlap, downward edges, predecessors above", outputs.len()))
}

fn ac8() -> Outcome {
    let style = Style::default();
    let cfg = LayoutConfig::default();
    let mut fixtures = Vec::new();
    for i in 0..17u64 {
        let d = small_dataset(8, i, 20, 6, 9);
        let ms = MinSupport::new(0.1).unwrap();
        fixtures.push(mine_coreflow(&d, ms).unwrap());
        fixtures.push(mine_sententree(&d, ms, SentenTreeConfig::default()).unwrap());
        let params = SynopsisParams::new(0.6, &d).unwrap();
        fixtures.push(to_summary(&d, &params, &cluster(&d, &params).unwrap()));
    }
    fixtures.truncate(50);
    for (i, s) in fixtures.iter().enumerate() {
        let first = render_svg(s, &layout(s, &cfg).unwrap(), &style).map_err(|e| e.to_string())?;
        let second = render_svg(&s.clone(), &layout(&s.clone(), &cfg).unwrap(), &style).map_err(|e| e.to_string())?;
        ensure(first.as_bytes() == second.as_bytes(), || format!("fixture {i} differs"))?;
    }
    Ok(format!("{} fixtures byte-identical", fixtures.len()))
}

fn ac9() -> Outcome {
    let d = synthetic(&VAST, 2017);
    let stats = d.stats().unwrap();
    ensure(stats.num_sequences == 1000 && stats.unique_events == 6, || format!("{stats:?}"))?;
    let g = grid();
    let limit = Duration::from_secs(60).as_secs_f64() * 1000.0;
    let mut lines = Vec::new();
    for level in 0..6 {
        let time = |t: Technique| {
            let r = measure(&d, t, g.levels(t)[level], 3);
            assert!(r.is_ok(), "{}", r.status);
            r.wall_time_ms
        };
        let (cf, st, syn) = (time(Technique::CoreFlow), time(Technique::SentenTree), time(Technique::Synopsis));
        ensure(cf < limit && st < limit, || format!("level {level}: coreflow {cf:.1} ms, sententree {st:.1} ms"))?;
        ensure(syn > cf && syn > st, || format!("level {level}: synopsis {syn:.1} ms vs {cf:.1} / {st:.1}"))?;
        lines.push(format!("L{}: {cf:.1}/{st:.1}/{syn:.1}", level + 1));
    }
    Ok(format!("ms coreflow/sententree/synopsis {}", lines.join(", ")))
}

fn emergency_fixture() -> Dataset {
    let mut seqs: Vec<(String, Vec<&str>)> = Vec::new();
    for i in 0..100 {
        let tail: &[&str] = match i {
            0..=36 => &["Discharge-Alive"],
            37..=69 => &["ICU", "Die"],
            _ => &["Floor", "Die"],
        };
        let mut events = vec!["Arrival", "Emergency"];
        events.extend_from_slice(tail);
        seqs.push((format!("p{i:03}"), events));
    }
    Dataset::from_labels("Emergency", seqs).unwrap()
}

fn ac10() -> Outcome {
    let d = emergency_fixture();
    let s = mine_coreflow(&d, MinSupport::new(0.05).unwrap()).map_err(|e| e.to_string())?;
    let q = InsightQuery {
        events: vec!["Emergency".into(), "Discharge-Alive".into()],
        expected_count: 37,
        tolerance: 0.10,
        description: "about a third are discharged alive after the emergency room".into(),
    };
    let v = evaluate(&s, &q);
    ensure(v.contains_key_events && v.matched_count == Some(37) && v.numbers_match, || format!("{v:?}"))?;
    let off = evaluate(&s, &InsightQuery { expected_count: 50, ..q.clone() });
    ensure(!off.numbers_match, || "count 37 matched an expectation of 50".into())?;
    Ok(format!("matched count {:?}, tags {:?}", v.matched_count, v.tags()))
}

fn ac11() -> Outcome {
    let d = Dataset::from_labels(
        "worked",
        [("s1", vec!["A", "B", "C"]), ("s2", vec!["A", "B", "D"]), ("s3", vec!["A", "C", "D"])],
    )
    .unwrap();
    let ms = MinSupport::new(0.5).unwrap();
    let cf = mine_coreflow(&d, ms).unwrap();
    let shape: Vec<(Option<&str>, usize)> =
        cf.nodes.iter().map(|n| (n.event.and_then(|e| d.label(e)), n.support)).collect();
    ensure(shape == [(None, 3), (Some("A"), 3), (Some("B"), 2)], || format!("{shape:?}"))?;
    let edges: Vec<(u32, u32, usize)> = cf.edges.iter().map(|e| (e.source.0, e.target.0, e.support)).collect();
    ensure(edges == [(0, 1, 3), (1, 2, 2)], || format!("{edges:?}"))?;
    ensure(cf.node(NodeId(0)).is_some_and(|n| n.hidden), || "root not hidden".into())?;
    let st = mine_sententree(&d, ms, SentenTreeConfig::default()).unwrap();
    let (a, b) = (cf.visible_nodes().count(), st.visible_nodes().count());
    ensure(b > a, || format!("sententree {b} nodes vs coreflow {a}"))?;
    Ok(format!("Root->A(3)->B(2); sententree {b} nodes > coreflow {a}"))
}

type Criterion = (&'static str, &'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 11] = [
        ("AC1", "granularity grids", ac1, Duration::from_secs(1)),
        ("AC2", "coreflow oracle equivalence", ac2, Duration::from_secs(30)),
        ("AC3", "coreflow monotonicity", ac3, Duration::from_secs(30)),
        ("AC4", "synopsis descent and partition", ac4, Duration::from_secs(60)),
        ("AC5", "edit-cost identity", ac5, Duration::from_secs(5)),
        ("AC6", "synopsis coarseness", ac6, Duration::from_secs(60)),
        ("AC7", "layout geometry", ac7, Duration::from_secs(60)),
        ("AC8", "render determinism", ac8, Duration::from_secs(10)),
        ("AC9", "runtime ordering", ac9, Duration::from_secs(15 * 60)),
        ("AC10", "insight evaluation", ac10, Duration::from_secs(1)),
        ("AC11", "worked example", ac11, Duration::from_secs(1)),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| id.eq_ignore_ascii_case(f)) {
            continue;
        }
        let t0 = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = t0.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:.2?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("{id:<4} PASS {name} ({elapsed:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{id:<4} FAIL {name} ({elapsed:.2?}): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
