//! Time and memory sweeps over techniques, granularity levels and datasets.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use seqsum_core::summary::Technique;
use seqsum_core::Dataset;

use crate::mine;

pub const MIN_SUPPORT_LEVELS: [f64; 6] = [0.05, 0.10, 0.15, 0.20, 0.25, 0.30];
pub const LAMBDA_LEVELS: [f64; 6] = [0.90, 0.75, 0.60, 0.45, 0.30, 0.15];

/// Six granularity levels per technique family, finest first.
#[derive(Debug, Clone, PartialEq)]
pub struct GranularityGrid {
    pub min_support_levels: [f64; 6],
    pub lambda_levels: [f64; 6],
}

impl Default for GranularityGrid {
    fn default() -> Self {
        GranularityGrid { min_support_levels: MIN_SUPPORT_LEVELS, lambda_levels: LAMBDA_LEVELS }
    }
}

impl GranularityGrid {
    pub fn levels(&self, technique: Technique) -> [f64; 6] {
        match technique {
            Technique::CoreFlow | Technique::SentenTree => self.min_support_levels,
            Technique::Synopsis => self.lambda_levels,
        }
    }
}

// ------------------------------------------------------------ synthetic data

/// Shape parameters of a published dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetShape {
    pub name: &'static str,
    pub unique_events: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub median_len: f64,
    pub sequences: usize,
    pub total_events: usize,
}

pub const TRAUMA: DatasetShape =
    DatasetShape { name: "Trauma", unique_events: 11, min_len: 5, max_len: 11, median_len: 9.0, sequences: 215, total_events: 1991 };
pub const EMERGENCY: DatasetShape =
    DatasetShape { name: "Emergency", unique_events: 6, min_len: 3, max_len: 16, median_len: 4.5, sequences: 100, total_events: 451 };
pub const BASKETBALL: DatasetShape =
    DatasetShape { name: "Basketball", unique_events: 13, min_len: 4, max_len: 13, median_len: 6.0, sequences: 69, total_events: 465 };
pub const VAST: DatasetShape =
    DatasetShape { name: "VAST", unique_events: 6, min_len: 2, max_len: 49, median_len: 8.0, sequences: 1000, total_events: 9443 };
pub const WORKFLOW: DatasetShape =
    DatasetShape { name: "Workflow", unique_events: 16, min_len: 2, max_len: 21, median_len: 11.0, sequences: 45, total_events: 177 };
pub const CAREER: DatasetShape =
    DatasetShape { name: "Career", unique_events: 10, min_len: 11, max_len: 32, median_len: 17.0, sequences: 40, total_events: 767 };

pub const TABLE_1: [DatasetShape; 6] = [TRAUMA, EMERGENCY, BASKETBALL, VAST, WORKFLOW, CAREER];

/// Sequence lengths with exactly the shape's min, max and median, and a
/// total as close to the shape's total as those allow. Lengths above the
/// floor of each half are exponential with a mean set by the remaining
/// budget.
fn lengths<R: Rng>(shape: &DatasetShape, rng: &mut R) -> Vec<usize> {
    let n = shape.sequences;
    let (mid_lo, mid_hi) = (shape.median_len.floor() as usize, shape.median_len.ceil() as usize);
    let middle: Vec<usize> = if n % 2 == 1 { vec![mid_lo] } else { vec![mid_lo, mid_hi] };
    let half = (n - middle.len()) / 2;
    let floor = half * shape.min_len + middle.iter().sum::<usize>() + half * mid_hi;
    let room_lo = (half * (mid_lo - shape.min_len)) as f64;
    let room_hi = (half * (shape.max_len - mid_hi)) as f64;
    let budget = shape.total_events.saturating_sub(floor) as f64;
    let fill = if room_lo + room_hi > 0.0 { (budget / (room_lo + room_hi)).min(1.0) } else { 0.0 };
    let mut draw = |base: usize, cap: usize| {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        (base + (-u.ln() * fill * (cap - base) as f64).round() as usize).min(cap)
    };
    let mut out: Vec<usize> = (0..half).map(|_| draw(shape.min_len, mid_lo)).collect();
    out.extend(middle);
    out.extend((0..half).map(|_| draw(mid_hi, shape.max_len)));
    if n >= 3 {
        out[0] = shape.min_len;
        *out.last_mut().unwrap() = shape.max_len;
    }
    out.shuffle(rng);
    out
}

/// A fixed-seed dataset with the given shape. Events follow a random
/// Markov chain with skewed transition weights so that frequent patterns
/// exist to be mined.
pub fn synthetic(shape: &DatasetShape, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = shape.unique_events;
    let weights: Vec<Vec<f64>> = (0..=k)
        .map(|_| {
            let mut w: Vec<f64> = (0..k).map(|r| 1.0 / (1.0 + r as f64).powi(2)).collect();
            for i in (1..k).rev() {
                let j = rng.gen_range(0..=i);
                w.swap(i, j);
            }
            w
        })
        .collect();
    let draw = |rng: &mut ChaCha8Rng, row: &[f64]| {
        let mut x = rng.gen_range(0.0..row.iter().sum::<f64>());
        for (i, w) in row.iter().enumerate() {
            if x < *w {
                return i;
            }
            x -= w;
        }
        row.len() - 1
    };
    let lens = lengths(shape, &mut rng);
    let sequences: Vec<(String, Vec<String>)> = lens
        .iter()
        .enumerate()
        .map(|(i, &len)| {
            let mut state = k;
            let events = (0..len)
                .map(|j| {
                    // The first `k` sequences start on distinct events.
                    state = if j == 0 && i < k { i } else { draw(&mut rng, &weights[state]) };
                    format!("{}_{}", shape.name.to_ascii_lowercase(), state)
                })
                .collect();
            (format!("{}{:04}", &shape.name[..1], i), events)
        })
        .collect();
    Dataset::from_labels(shape.name, sequences).expect("generated dataset is valid")
}

pub fn synthetic_suite(seed: u64) -> Vec<Dataset> {
    TABLE_1.iter().enumerate().map(|(i, s)| synthetic(s, seed.wrapping_add(i as u64))).collect()
}

// ------------------------------------------------------------- measurement

fn resident_bytes() -> u64 {
    std::fs::read_to_string("/proc/self/status")
        .ok()
        .and_then(|s| {
            s.lines()
                .find_map(|l| l.strip_prefix("VmRSS:"))
                .and_then(|v| v.trim().trim_end_matches("kB").trim().parse::<u64>().ok())
        })
        .map_or(0, |kb| kb * 1024)
}

pub const SAMPLE_INTERVAL: Duration = Duration::from_millis(10);

/// Samples resident set size on a background thread.
struct RssSampler {
    stop: Arc<AtomicBool>,
    handle: thread::JoinHandle<u64>,
    baseline: u64,
}

impl RssSampler {
    fn start() -> Self {
        let baseline = resident_bytes();
        let stop = Arc::new(AtomicBool::new(false));
        let flag = Arc::clone(&stop);
        let handle = thread::spawn(move || {
            let mut peak = resident_bytes();
            while !flag.load(Ordering::Relaxed) {
                thread::sleep(SAMPLE_INTERVAL);
                peak = peak.max(resident_bytes());
            }
            peak
        });
        RssSampler { stop, handle, baseline }
    }

    /// Peak growth over the baseline.
    fn finish(self) -> u64 {
        let last = resident_bytes();
        self.stop.store(true, Ordering::Relaxed);
        let peak = self.handle.join().unwrap_or(0).max(last);
        peak.saturating_sub(self.baseline)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub technique: String,
    pub dataset: String,
    pub granularity: f64,
    pub wall_time_ms: f64,
    pub peak_memory_bytes: u64,
    pub nodes: usize,
    pub edges: usize,
    pub patterns: usize,
    pub status: String,
}

impl BenchRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// One record per (dataset, technique, level): median wall time and largest
/// peak memory over `repeats` sequential runs.
pub fn run_sweep(datasets: &[Dataset], grid: &GranularityGrid, repeats: usize) -> Vec<BenchRecord> {
    assert!(repeats >= 1, "repeats must be at least 1");
    let mut out = Vec::new();
    for data in datasets {
        for technique in Technique::ALL {
            for level in grid.levels(technique) {
                out.push(measure(data, technique, level, repeats));
            }
        }
    }
    out
}

pub fn measure(data: &Dataset, technique: Technique, level: f64, repeats: usize) -> BenchRecord {
    let mut times = Vec::with_capacity(repeats);
    let mut memory = 0;
    let mut last = None;
    for _ in 0..repeats {
        let sampler = RssSampler::start();
        let t0 = Instant::now();
        let result = mine(technique, data, level);
        let elapsed = t0.elapsed().as_secs_f64() * 1000.0;
        memory = memory.max(sampler.finish());
        times.push(elapsed);
        let failed = result.is_err();
        last = Some(result);
        if failed {
            break;
        }
    }
    let base = BenchRecord {
        technique: technique.as_str().into(),
        dataset: data.name().into(),
        granularity: level,
        wall_time_ms: median(&mut times),
        peak_memory_bytes: memory,
        nodes: 0,
        edges: 0,
        patterns: 0,
        status: "ok".into(),
    };
    match last.expect("at least one run") {
        Ok(s) => BenchRecord {
            nodes: s.visible_nodes().count(),
            edges: s.edges.len(),
            patterns: s.patterns.len(),
            ..base
        },
        Err(e) => BenchRecord { wall_time_ms: 0.0, peak_memory_bytes: 0, status: format!("error: {e}"), ..base },
    }
}

// ------------------------------------------------------------------ report

pub const CSV_HEADER: &str = "technique,dataset,granularity,wall_time_ms,peak_memory_bytes,nodes,edges,patterns,status";

pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("in-memory write");
    }
    if records.is_empty() {
        return format!("{CSV_HEADER}\n");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn records_from_csv(text: &str) -> Result<Vec<BenchRecord>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

const TECHNIQUE_COLORS: [&str; 3] = ["#1f77b4", "#ff7f0e", "#2ca02c"];
const PANEL_W: f64 = 300.0;
const PANEL_H: f64 = 180.0;
const PAD: f64 = 50.0;

fn log_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let (lo, hi) = (lo.log10().floor(), hi.log10().ceil());
    (lo, if hi > lo { hi } else { lo + 1.0 })
}

type Panel = (&'static str, f64, fn(&BenchRecord) -> f64);

/// Log-scale panels of wall time and peak memory per dataset; x runs over
/// the six levels from finer to coarser.
pub fn records_to_svg(records: &[BenchRecord]) -> String {
    let mut datasets: Vec<&str> = Vec::new();
    for r in records {
        if !datasets.contains(&r.dataset.as_str()) {
            datasets.push(&r.dataset);
        }
    }
    let width = 2.0 * (PANEL_W + 2.0 * PAD);
    let height = 40.0 + datasets.len() as f64 * (PANEL_H + 2.0 * PAD);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.2}" height="{h:.2}" viewBox="0 0 {w:.2} {h:.2}" font-family="sans-serif" font-size="11">"#,
        w = width,
        h = height
    );
    let _ = writeln!(svg, r##"<rect x="0.00" y="0.00" width="{width:.2}" height="{height:.2}" fill="#ffffff"/>"##);
    for (k, t) in Technique::ALL.iter().enumerate() {
        let x = PAD + k as f64 * 110.0;
        let _ = writeln!(svg, r#"<rect x="{x:.2}" y="12.00" width="12.00" height="12.00" fill="{}"/>"#, TECHNIQUE_COLORS[k]);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="22.00">{}</text>"#, x + 16.0, t.as_str());
    }
    for (row, ds) in datasets.iter().enumerate() {
        let top = 40.0 + row as f64 * (PANEL_H + 2.0 * PAD) + PAD;
        let rows: Vec<&BenchRecord> = records.iter().filter(|r| r.dataset == *ds && r.is_ok()).collect();
        let panels: [Panel; 2] = [
            ("wall time (ms)", 1e-3, |r| r.wall_time_ms),
            ("peak memory (bytes)", 1.0, |r| r.peak_memory_bytes as f64),
        ];
        for (col, (title, floor, value)) in panels.iter().enumerate() {
            let left = PAD + col as f64 * (PANEL_W + 2.0 * PAD);
            let (lo, hi) = log_range(rows.iter().map(|r| value(r).max(*floor)));
            let y_of = |v: f64| top + PANEL_H - (v.max(*floor).log10() - lo) / (hi - lo) * PANEL_H;
            let _ = writeln!(svg, r#"<text x="{left:.2}" y="{:.2}">{} · {}</text>"#, top - 10.0, crate::xml_escape(ds), title);
            let _ = writeln!(
                svg,
                r##"<rect x="{left:.2}" y="{top:.2}" width="{PANEL_W:.2}" height="{PANEL_H:.2}" fill="none" stroke="#888888"/>"##
            );
            let mut e = lo;
            while e <= hi {
                let y = top + PANEL_H - (e - lo) / (hi - lo) * PANEL_H;
                let _ = writeln!(svg, r#"<text x="{:.2}" y="{y:.2}" text-anchor="end">1e{}</text>"#, left - 4.0, e as i64);
                e += 1.0;
            }
            for i in 0..6 {
                let x = left + (i as f64 + 0.5) * PANEL_W / 6.0;
                let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">L{}</text>"#, top + PANEL_H + 14.0, i + 1);
            }
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">finer to coarser</text>"#,
                left + PANEL_W / 2.0,
                top + PANEL_H + 30.0
            );
            for (k, t) in Technique::ALL.iter().enumerate() {
                let mut series: Vec<&&BenchRecord> = rows.iter().filter(|r| r.technique == t.as_str()).collect();
                let levels = GranularityGrid::default().levels(*t);
                series.sort_by_key(|r| levels.iter().position(|l| (l - r.granularity).abs() < 1e-9).unwrap_or(usize::MAX));
                let points: Vec<String> = series
                    .iter()
                    .filter_map(|r| {
                        let i = levels.iter().position(|l| (l - r.granularity).abs() < 1e-9)?;
                        let x = left + (i as f64 + 0.5) * PANEL_W / 6.0;
                        Some(format!("{x:.2},{:.2}", y_of(value(r))))
                    })
                    .collect();
                if !points.is_empty() {
                    let _ = writeln!(
                        svg,
                        r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2.00"/>"#,
                        points.join(" "),
                        TECHNIQUE_COLORS[k]
                    );
                }
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// CSV and SVG chart for a non-empty set of records.
pub fn emit_report(records: &[BenchRecord]) -> (String, String) {
    (records_to_csv(records), records_to_svg(records))
}
