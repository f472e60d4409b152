//! Command-line front-end.
//!
//! Exit codes: 0 on success, 1 on bad input (arguments or files), 2 when a
//! computed result breaks a structural invariant.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use seqsum_core::layout::{layout, LayoutConfig};
use seqsum_core::render::{render_svg, Style};
use seqsum_core::sententree::{mine_sententree, SentenTreeConfig};
use seqsum_core::summary::Technique;
use seqsum_core::{MinSupport, Summary};

use crate::bench::{emit_report, run_sweep, synthetic_suite, GranularityGrid};
use crate::insights::{parse_insights, report, report_json};
use crate::io::{load_dataset, read_text, write_atomic, Format};
use crate::summary_json::{from_json, to_json};

#[derive(Debug, Parser)]
#[command(name = "seqsum", version, about = "Visual summaries of event-sequence datasets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print dataset statistics as JSON.
    Stats {
        #[arg(long)]
        input: PathBuf,
    },
    /// Mine a summary from a dataset.
    Mine(MineArgs),
    /// Lay out and draw a summary as SVG.
    Render(RenderArgs),
    /// Score a summary against insight queries.
    Eval {
        #[arg(long)]
        summary: PathBuf,
        #[arg(long)]
        insights: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Time and memory sweep over techniques and granularity levels.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[arg(long, value_parser = parse_technique)]
    pub technique: Technique,
    /// Minimum support fraction (coreflow, sententree).
    #[arg(long)]
    pub min_support: Option<f64>,
    /// λ fraction (synopsis).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// SentenTree node cap; 0 disables it.
    #[arg(long)]
    pub max_nodes: Option<usize>,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub node_width: Option<f64>,
    #[arg(long)]
    pub node_height: Option<f64>,
    #[arg(long)]
    pub horizontal_gap: Option<f64>,
    #[arg(long)]
    pub vertical_gap: Option<f64>,
    #[arg(long)]
    pub canvas_width: Option<f64>,
    #[arg(long)]
    pub canvas_height: Option<f64>,
    #[arg(long)]
    pub link_width_per_sequence: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of .csv/.json datasets; the synthetic suite when omitted.
    #[arg(long)]
    pub datasets: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn parse_technique(s: &str) -> Result<Technique, String> {
    Technique::parse(s).ok_or_else(|| format!("unknown technique {s:?}, expected coreflow, sententree or synopsis"))
}

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Invariant(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Invariant(_) => 2,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            let (Failure::Input(m) | Failure::Invariant(m)) = &f;
            let _ = writeln!(err, "error: {m}");
            f.exit_code()
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Stats { input: path } => stats(&path, out),
        Command::Mine(args) => mine(args, out),
        Command::Render(args) => render(args),
        Command::Eval { summary, insights, report } => eval(&summary, &insights, &report, out),
        Command::Bench(args) => bench(args, out),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct StatsOut<'a> {
    name: &'a str,
    num_sequences: usize,
    total_events: usize,
    unique_events: usize,
    min_len: usize,
    max_len: usize,
    median_len: f64,
}

fn stats(path: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let d = load_dataset(path).map_err(input)?;
    let s = d.stats().map_err(input)?;
    let body = StatsOut {
        name: d.name(),
        num_sequences: s.num_sequences,
        total_events: s.total_events,
        unique_events: s.unique_events,
        min_len: s.min_len,
        max_len: s.max_len,
        median_len: s.median_len,
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&body).expect("stats serialize")).map_err(input)
}

fn check(summary: &Summary) -> Result<(), Failure> {
    let v = summary.validate();
    if v.is_empty() {
        Ok(())
    } else {
        let list: Vec<String> = v.iter().map(ToString::to_string).collect();
        Err(Failure::Invariant(format!("summary violates invariants: {}", list.join("; "))))
    }
}

fn mine(args: MineArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let granularity = match (args.technique, args.min_support, args.lambda) {
        (Technique::Synopsis, Some(_), _) => {
            return Err(Failure::Input("synopsis takes --lambda, not --min-support".into()));
        }
        (Technique::Synopsis, None, Some(l)) => l,
        (Technique::Synopsis, None, None) => return Err(Failure::Input("synopsis requires --lambda".into())),
        (t, _, Some(_)) => return Err(Failure::Input(format!("{t} takes --min-support, not --lambda"))),
        (_, Some(f), None) => f,
        (t, None, None) => return Err(Failure::Input(format!("{t} requires --min-support"))),
    };
    if args.max_nodes.is_some() && args.technique != Technique::SentenTree {
        return Err(Failure::Input("--max-nodes applies to sententree only".into()));
    }
    let data = load_dataset(&args.input).map_err(input)?;
    let summary = match (args.technique, args.max_nodes) {
        (Technique::SentenTree, Some(cap)) => {
            let config = SentenTreeConfig { max_nodes: (cap > 0).then_some(cap) };
            mine_sententree(&data, MinSupport::new(granularity).map_err(input)?, config)
        }
        (t, _) => crate::mine(t, &data, granularity),
    }
    .map_err(input)?;
    check(&summary)?;
    write_atomic(&args.output, to_json(&summary).as_bytes()).map_err(input)?;
    writeln!(
        out,
        "{}: {} nodes, {} edges, {} patterns -> {}",
        args.technique,
        summary.visible_nodes().count(),
        summary.edges.len(),
        summary.patterns.len(),
        args.output.display()
    )
    .map_err(input)
}

fn load_summary(path: &Path) -> Result<Summary, Failure> {
    let s = from_json(&read_text(path).map_err(input)?).map_err(input)?;
    let v = s.validate();
    if !v.is_empty() {
        let list: Vec<String> = v.iter().map(ToString::to_string).collect();
        return Err(Failure::Input(format!("{}: invalid summary: {}", path.display(), list.join("; "))));
    }
    Ok(s)
}

fn render(args: RenderArgs) -> Result<(), Failure> {
    let summary = load_summary(&args.input)?;
    let d = LayoutConfig::default();
    let cfg = LayoutConfig {
        node_width: args.node_width.unwrap_or(d.node_width),
        node_height: args.node_height.unwrap_or(d.node_height),
        horizontal_gap: args.horizontal_gap.unwrap_or(d.horizontal_gap),
        vertical_gap: args.vertical_gap.unwrap_or(d.vertical_gap),
        canvas_width: args.canvas_width.unwrap_or(d.canvas_width),
        canvas_height: args.canvas_height.unwrap_or(d.canvas_height),
        link_width_per_sequence: args.link_width_per_sequence.unwrap_or(d.link_width_per_sequence),
    };
    if !cfg.is_valid() {
        return Err(Failure::Input("layout dimensions must be positive and finite".into()));
    }
    let l = layout(&summary, &cfg).map_err(|e| Failure::Invariant(e.to_string()))?;
    let svg = render_svg(&summary, &l, &Style::default()).map_err(|e| Failure::Invariant(e.to_string()))?;
    write_atomic(&args.output, svg.as_bytes()).map_err(input)
}

fn eval(summary: &Path, insights: &Path, out_path: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let s = load_summary(summary)?;
    let queries = parse_insights(&read_text(insights).map_err(input)?).map_err(input)?;
    let r = report(&s, &queries);
    write_atomic(out_path, report_json(&r).as_bytes()).map_err(input)?;
    let show = |f: Option<f64>| f.map_or("n/a".to_string(), |v| format!("{v:.2}"));
    writeln!(
        out,
        "contains key events: {}, numbers match: {}",
        show(r.contains_fraction),
        show(r.numbers_fraction)
    )
    .map_err(input)
}

fn bench(args: BenchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    if args.repeats == 0 {
        return Err(Failure::Input("--repeats must be at least 1".into()));
    }
    let datasets = match &args.datasets {
        None => synthetic_suite(args.seed),
        Some(dir) => {
            let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
                .map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| Format::from_path(p).is_some())
                .collect();
            paths.sort();
            if paths.is_empty() {
                return Err(Failure::Input(format!("{}: no .csv or .json datasets", dir.display())));
            }
            paths.iter().map(|p| load_dataset(p).map_err(input)).collect::<Result<_, _>>()?
        }
    };
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Failure::Input(format!("{}: {e}", args.out_dir.display())))?;
    let records = run_sweep(&datasets, &GranularityGrid::default(), args.repeats);
    let (csv, svg) = emit_report(&records);
    write_atomic(&args.out_dir.join("bench.csv"), csv.as_bytes()).map_err(input)?;
    write_atomic(&args.out_dir.join("bench.svg"), svg.as_bytes()).map_err(input)?;
    for r in &records {
        writeln!(
            out,
            "{:<10} {:<11} {:>5.2} {:>12.3} ms {:>12} B  {}",
            r.technique, r.dataset, r.granularity, r.wall_time_ms, r.peak_memory_bytes, r.status
        )
        .map_err(input)?;
    }
    Ok(())
}
