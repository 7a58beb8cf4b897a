//! Command-line front end for the walk-analysis library.
//!
//! One verb per module: `analyze` runs the full pipeline and is the only
//! verb with a consistency verdict; the others project single blocks.
//! Every number in a report comes from a library call, so reports are
//! byte-identical across runs with the same configuration. Exit codes:
//! 0 success, 2 consistency-verdict failure, 1 usage or input error.

use std::fs;
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use oddwalk::generators::{self, GraphSpec};
use oddwalk::report::{
    ball_row, gap_section, graph_section, riesz_section, spectrum_section, volume_section,
    GapSection, GraphSection, RieszParams, RieszSection, SpectrumSection, VolumeSection, F17,
};
use oddwalk::spectral::ball_scan;
use oddwalk::{
    bipartition, build_report, defect_bound_check, eps_ball, eps_view, find_small_boundary_ball,
    fit_growth, format_edge_list, implication_check, parse_edge_list, report, BipartiteCertificate,
    EquivalenceParams, WeightedGraph,
};

#[derive(Parser)]
#[command(
    name = "oddwalk",
    version,
    about = "Spectral and geometric analysis of reversible random walks on finite weighted graphs"
)]
struct Cli {
    /// Worker threads (default: all cores); results do not depend on it
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: spectrum, gap at -1, odd-step returns, volume growth,
    /// ball scans, witnesses, consistency verdict, optional Riesz block
    Analyze(AnalyzeArgs),
    /// Walk spectrum, gap at -1, and analyticity constants
    Spectrum(SpectrumArgs),
    /// Threshold two-colorings of the whole graph and of balls
    Bipartite(BipartiteArgs),
    /// Volume growth constants and regime implications
    Volume(VolumeArgs),
    /// Small-boundary balls and witness defect checks
    Witness(WitnessArgs),
    /// Quasidistance validation, Riesz norms, subgaussian fit, domination
    Riesz(RieszArgs),
    /// Emit a generated graph as an edge list
    Generate(GenerateArgs),
}

/// Where the graph comes from: an edge-list file or a generator spec.
#[derive(Args, Clone)]
struct InputArgs {
    /// Edge-list file: one `u v weight` triple per line, `#` comments
    #[arg(
        value_name = "FILE",
        conflicts_with = "generate",
        required_unless_present = "generate"
    )]
    path: Option<String>,

    /// Generate the input instead: cycle:N, path:N, lattice2d:WxH,
    /// complete:N, complete_bipartite:AxB, sierpinski:L,
    /// random_weighted:N:DENSITY:SEED
    #[arg(long, value_name = "SPEC")]
    generate: Option<String>,

    /// Uniform edge weight for the generated graph
    #[arg(long, value_name = "W", requires = "generate")]
    weight: Option<f64>,

    /// Replace the walk by `alpha I + (1 - alpha) P` via loop surgery
    #[arg(long, value_name = "ALPHA")]
    lazify: Option<f64>,
}

/// Grid flags shared by the scanning verbs.
#[derive(Args, Clone)]
struct ScanArgs {
    /// Comma-separated closeness thresholds, e.g. `0,0.05,0.1`
    #[arg(long = "eps", value_name = "LIST", default_value = "0")]
    eps: String,

    /// Ball radii: a value, an inclusive range `a..b`, or a comma union
    #[arg(long = "r", value_name = "GRID", default_value = "2..4")]
    r: String,

    /// Largest odd power probed for on-diagonal return mass
    #[arg(long = "odd-k", value_name = "K", default_value_t = 9)]
    odd_k: usize,

    /// Comma-separated witness norm exponents (each >= 1)
    #[arg(long = "q", value_name = "LIST", default_value = "2")]
    q: String,

    /// Number of analyticity constants reported
    #[arg(long = "analytic-n", value_name = "N", default_value_t = 8)]
    analytic_n: usize,

    /// Vertex count above which only spectral extremes are estimated
    #[arg(long = "dense-cap", value_name = "N", default_value_t = 4096)]
    dense_cap: usize,

    /// Largest radius of the volume-growth fit
    #[arg(long = "growth-r", value_name = "R", default_value_t = 8)]
    growth_r: usize,
}

/// Knobs of the Riesz block.
#[derive(Args, Clone)]
struct RieszKnobs {
    /// Step count for the rescale and kernel-domination checks
    #[arg(long, value_name = "L", default_value_t = 3)]
    l: usize,

    /// Horizon of the subgaussian kernel fit
    #[arg(long = "k-max", value_name = "K", default_value_t = 8)]
    k_max: usize,

    /// Largest radius of the implied polynomial-growth constant
    #[arg(long = "r-max", value_name = "R", default_value_t = 8)]
    r_max: usize,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    scan: ScanArgs,

    /// Add the Riesz block in this quasidistance: `d` or `d^M` (M > 1)
    #[arg(long, value_name = "RHO")]
    rho: Option<String>,

    #[command(flatten)]
    riesz: RieszKnobs,

    /// Write the JSON report here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<String>,

    /// Also write the witness-defect table as CSV
    #[arg(long, value_name = "PATH")]
    csv: Option<String>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Number of analyticity constants reported
    #[arg(long = "analytic-n", value_name = "N", default_value_t = 8)]
    analytic_n: usize,

    /// Vertex count above which only spectral extremes are estimated
    #[arg(long = "dense-cap", value_name = "N", default_value_t = 4096)]
    dense_cap: usize,

    /// Write the JSON report here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
}

#[derive(Args)]
struct BipartiteArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Comma-separated closeness thresholds
    #[arg(long = "eps", value_name = "LIST", default_value = "0")]
    eps: String,

    /// Ball radii: a value, an inclusive range `a..b`, or a comma union
    #[arg(long = "r", value_name = "GRID", default_value = "2..4")]
    r: String,

    /// Write the JSON report here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
}

#[derive(Args)]
struct VolumeArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Scan radii; the fit runs up to the largest value
    #[arg(long = "r", value_name = "GRID", default_value = "8")]
    r: String,

    /// Write the JSON report here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Comma-separated closeness thresholds
    #[arg(long = "eps", value_name = "LIST", default_value = "0")]
    eps: String,

    /// Boundary fractions 1/p to certify: a value, `a..b`, or a union
    #[arg(long = "p", value_name = "GRID", default_value = "2")]
    p: String,

    /// Comma-separated witness norm exponents (each >= 1)
    #[arg(long = "q", value_name = "LIST", default_value = "2")]
    q: String,

    /// Write the JSON report here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<String>,

    /// Also write the defect table as CSV
    #[arg(long, value_name = "PATH")]
    csv: Option<String>,
}

#[derive(Args)]
struct RieszArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Quasidistance: `d` for the hop metric or `d^M` with M > 1
    #[arg(long, value_name = "RHO", default_value = "d")]
    rho: String,

    /// Comma-separated norm exponents (each >= 1; only q = 2 is two-sided)
    #[arg(long = "q", value_name = "LIST", default_value = "2")]
    q: String,

    #[command(flatten)]
    knobs: RieszKnobs,

    /// Write the JSON report here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator spec, e.g. cycle:12 or random_weighted:20:0.3:7
    #[arg(value_name = "SPEC")]
    spec: String,

    /// Uniform edge weight
    #[arg(long, value_name = "W")]
    weight: Option<f64>,

    /// Replace the walk by `alpha I + (1 - alpha) P` via loop surgery
    #[arg(long, value_name = "ALPHA")]
    lazify: Option<f64>,

    /// Write the edge list here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
}

/// Everything one `analyze` run depends on. The on-disk form is JSON;
/// serialization round-trips losslessly, so a run can be archived and
/// replayed byte-for-byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RunConfig {
    input: Option<String>,
    generate: Option<String>,
    weight: Option<f64>,
    lazify: Option<f64>,
    eps_grid: Vec<f64>,
    radii: Vec<usize>,
    odd_k_max: usize,
    q_list: Vec<f64>,
    analytic_n_max: usize,
    dense_cap: usize,
    growth_radius: usize,
    rho: Option<String>,
    l: usize,
    k_max: usize,
    r_max: usize,
    out: Option<String>,
    csv: Option<String>,
}

impl RunConfig {
    fn from_analyze(args: &AnalyzeArgs) -> Result<Self> {
        let cfg = RunConfig {
            input: args.input.path.clone(),
            generate: args.input.generate.clone(),
            weight: args.input.weight,
            lazify: args.input.lazify,
            eps_grid: parse_real_list(&args.scan.eps, "eps")?,
            radii: parse_integer_grid(&args.scan.r, "radius")?,
            odd_k_max: args.scan.odd_k,
            q_list: parse_real_list(&args.scan.q, "q")?,
            analytic_n_max: args.scan.analytic_n,
            dense_cap: args.scan.dense_cap,
            growth_radius: args.scan.growth_r,
            rho: args.rho.clone(),
            l: args.riesz.l,
            k_max: args.riesz.k_max,
            r_max: args.riesz.r_max,
            out: args.out.clone(),
            csv: args.csv.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Grids nonempty and the quasidistance selector well-formed.
    fn validate(&self) -> Result<()> {
        ensure!(!self.eps_grid.is_empty(), "eps grid is empty");
        ensure!(!self.radii.is_empty(), "radius grid is empty");
        ensure!(!self.q_list.is_empty(), "q list is empty");
        if let Some(rho) = &self.rho {
            parse_rho(rho)?;
        }
        Ok(())
    }

    fn equivalence_params(&self) -> EquivalenceParams {
        EquivalenceParams {
            eps_grid: self.eps_grid.clone(),
            radii: self.radii.clone(),
            odd_k_max: self.odd_k_max,
            q_list: self.q_list.clone(),
            analytic_n_max: self.analytic_n_max,
            dense_cap: self.dense_cap,
        }
    }

    fn riesz_params(&self) -> Result<Option<RieszParams>> {
        match &self.rho {
            None => Ok(None),
            Some(rho) => Ok(Some(RieszParams {
                rho_exponent: parse_rho(rho)?,
                l: self.l,
                k_max: self.k_max,
                q_list: self.q_list.clone(),
                r_max: self.r_max,
            })),
        }
    }
}

/// Comma list of reals; entries must be finite, the list nonempty.
fn parse_real_list(text: &str, what: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for token in text.split(',') {
        let t = token.trim();
        ensure!(!t.is_empty(), "{what} list {text:?} has an empty entry");
        let v: f64 = t
            .parse()
            .with_context(|| format!("{what} entry {t:?} is not a number"))?;
        ensure!(v.is_finite(), "{what} entry {t} is not finite");
        out.push(v);
    }
    Ok(out)
}

/// Comma union of integers and inclusive `a..b` ranges.
fn parse_integer_grid(text: &str, what: &str) -> Result<Vec<usize>> {
    let one = |s: &str| -> Result<usize> {
        s.trim()
            .parse()
            .with_context(|| format!("{what} bound {:?} is not an integer", s.trim()))
    };
    let mut out = Vec::new();
    for token in text.split(',') {
        let t = token.trim();
        ensure!(!t.is_empty(), "{what} grid {text:?} has an empty entry");
        match t.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (one(a)?, one(b)?);
                ensure!(a <= b, "{what} range {t:?} is empty (needs a <= b)");
                out.extend(a..=b);
            }
            None => out.push(one(t)?),
        }
    }
    Ok(out)
}

/// `d` selects the hop metric, `d^M` its M-th power (M > 1).
fn parse_rho(text: &str) -> Result<Option<f64>> {
    let t = text.trim();
    if t == "d" {
        return Ok(None);
    }
    if let Some(exp) = t.strip_prefix("d^") {
        let m: f64 = exp
            .parse()
            .with_context(|| format!("quasidistance exponent {exp:?} is not a number"))?;
        ensure!(m.is_finite(), "quasidistance exponent {m} is not finite");
        return Ok(Some(m));
    }
    bail!("quasidistance must be `d` or `d^M` with an exponent M > 1, got {text:?}")
}

/// Loads or generates the graph and names it for the report header.
fn load_graph(
    input: Option<&str>,
    spec_text: Option<&str>,
    weight: Option<f64>,
    lazify: Option<f64>,
) -> Result<(String, WeightedGraph)> {
    let (mut name, mut g) = match (input, spec_text) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read input {path}"))?;
            let g = parse_edge_list(&text).with_context(|| format!("parsing {path}"))?;
            (path.to_string(), g)
        }
        (None, Some(spec_text)) => {
            let mut spec: GraphSpec = spec_text.parse()?;
            if let Some(w) = weight {
                spec = spec.with_weight(w)?;
            }
            let g = generators::generate(&spec)?;
            let name = match weight {
                Some(w) => format!("{spec}*{w}"),
                None => spec.to_string(),
            };
            (name, g)
        }
        _ => bail!("provide exactly one input: an edge-list file or --generate SPEC"),
    };
    if let Some(alpha) = lazify {
        g = generators::lazify(&g, alpha)?;
        name = format!("lazy[{alpha}]:{name}");
    }
    Ok((name, g))
}

fn load_input(input: &InputArgs) -> Result<(String, WeightedGraph)> {
    load_graph(
        input.path.as_deref(),
        input.generate.as_deref(),
        input.weight,
        input.lazify,
    )
}

/// Writes to the path when given, otherwise to stdout.
fn emit(text: &str, out: Option<&str>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {path}"))?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: Option<&str>) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).context("serializing the report")?;
    text.push('\n');
    emit(&text, out)
}

fn run_analyze(cfg: &RunConfig) -> Result<ExitCode> {
    let (name, g) = load_graph(
        cfg.input.as_deref(),
        cfg.generate.as_deref(),
        cfg.weight,
        cfg.lazify,
    )?;
    let params = cfg.equivalence_params();
    let riesz = cfg.riesz_params()?;
    let report = build_report(&g, &name, &params, cfg.growth_radius, riesz.as_ref())?;
    emit(&(report.to_json() + "\n"), cfg.out.as_deref())?;
    if let Some(csv) = &cfg.csv {
        fs::write(csv, report.witnesses_csv())
            .with_context(|| format!("cannot write {csv}"))?;
    }
    if report.verdict.applicable && !report.verdict.consistent {
        eprintln!(
            "consistency verdict failed: gap_is_zero={}, bipartite_at_zero={}, \
             odd_infima_all_zero={}",
            report.verdict.gap_is_zero,
            report.verdict.bipartite_at_zero,
            report.verdict.odd_infima_all_zero
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SpectrumOut {
    graph: GraphSection,
    spectrum: SpectrumSection,
    gap_at_minus_one: GapSection,
    analyticity: Vec<F17>,
}

fn run_spectrum(args: &SpectrumArgs) -> Result<()> {
    let (name, g) = load_input(&args.input)?;
    let params = EquivalenceParams {
        eps_grid: Vec::new(),
        radii: Vec::new(),
        odd_k_max: 1,
        q_list: Vec::new(),
        analytic_n_max: args.analytic_n,
        dense_cap: args.dense_cap,
    };
    let eq = oddwalk::equivalence_report(&g, &params)?;
    let out = SpectrumOut {
        graph: graph_section(&g, &name),
        spectrum: spectrum_section(&eq),
        gap_at_minus_one: gap_section(&eq),
        analyticity: report::analyticity_values(&eq),
    };
    emit_json(&out, args.out.as_deref())
}

#[derive(Serialize)]
struct ThresholdRow {
    eps: F17,
    bipartite: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    class_sizes: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    odd_walk_witness: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct BipartiteOut {
    graph: GraphSection,
    thresholds: Vec<ThresholdRow>,
    balls: Vec<report::BallRow>,
}

fn run_bipartite(args: &BipartiteArgs) -> Result<()> {
    let (name, g) = load_input(&args.input)?;
    let eps_grid = parse_real_list(&args.eps, "eps")?;
    let radii = parse_integer_grid(&args.r, "radius")?;
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    let mut thresholds = Vec::new();
    let mut balls = Vec::new();
    for &eps in &eps_grid {
        let view = eps_view(&g, eps)?;
        let row = match bipartition(&view, &all)? {
            BipartiteCertificate::Bipartite { class0, class1 } => ThresholdRow {
                eps: F17(eps),
                bipartite: true,
                class_sizes: Some((class0.len(), class1.len())),
                odd_walk_witness: None,
            },
            BipartiteCertificate::NotBipartite { witness } => ThresholdRow {
                eps: F17(eps),
                bipartite: false,
                class_sizes: None,
                odd_walk_witness: Some(witness),
            },
        };
        thresholds.push(row);
        for &radius in &radii {
            let (cell, _) = ball_scan(&view, radius)?;
            balls.push(ball_row(&cell));
        }
    }
    let out = BipartiteOut { graph: graph_section(&g, &name), thresholds, balls };
    emit_json(&out, args.out.as_deref())
}

#[derive(Serialize)]
struct VolumeOut {
    graph: GraphSection,
    volume: VolumeSection,
}

fn run_volume(args: &VolumeArgs) -> Result<()> {
    let (name, g) = load_input(&args.input)?;
    let radii = parse_integer_grid(&args.r, "radius")?;
    let r_max = *radii.iter().max().expect("grid is nonempty");
    let fit = fit_growth(&g, r_max)?;
    let implications = implication_check(&g, &fit)?;
    let out = VolumeOut {
        graph: graph_section(&g, &name),
        volume: volume_section(&fit, &implications),
    };
    emit_json(&out, args.out.as_deref())
}

#[derive(Serialize)]
struct WitnessCheckRow {
    eps: F17,
    p: usize,
    q: F17,
    center: usize,
    radius: usize,
    ball_mass: F17,
    boundary_mass: F17,
    defect: F17,
    bound: F17,
    holds: bool,
}

#[derive(Serialize)]
struct WitnessOut {
    graph: GraphSection,
    checks: Vec<WitnessCheckRow>,
}

fn run_witness(args: &WitnessArgs) -> Result<()> {
    let (name, g) = load_input(&args.input)?;
    let eps_grid = parse_real_list(&args.eps, "eps")?;
    let p_grid = parse_integer_grid(&args.p, "p")?;
    let q_list = parse_real_list(&args.q, "q")?;
    let centers: Vec<usize> = (0..g.vertex_count()).collect();
    let mut checks = Vec::new();
    for &eps in &eps_grid {
        let view = eps_view(&g, eps)?;
        for &p in &p_grid {
            let record = find_small_boundary_ball(&view, &centers, p)?;
            let ball = eps_ball(&view, record.center, record.radius)?;
            for &q in &q_list {
                let check = defect_bound_check(&view, &ball, p, q)?;
                checks.push(WitnessCheckRow {
                    eps: F17(eps),
                    p,
                    q: F17(q),
                    center: record.center,
                    radius: record.radius,
                    ball_mass: F17(record.ball_mass),
                    boundary_mass: F17(record.boundary_mass),
                    defect: F17(check.witness.defect),
                    bound: F17(check.bound),
                    holds: check.holds,
                });
            }
        }
    }
    if let Some(csv) = &args.csv {
        let mut table = String::from("eps,p,q,center,radius,defect,bound,holds\n");
        for row in &checks {
            table.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.eps, row.p, row.q, row.center, row.radius, row.defect, row.bound, row.holds
            ));
        }
        fs::write(csv, table).with_context(|| format!("cannot write {csv}"))?;
    }
    let out = WitnessOut { graph: graph_section(&g, &name), checks };
    emit_json(&out, args.out.as_deref())
}

#[derive(Serialize)]
struct RieszOut {
    graph: GraphSection,
    riesz: RieszSection,
}

fn run_riesz(args: &RieszArgs) -> Result<()> {
    let (name, g) = load_input(&args.input)?;
    let params = RieszParams {
        rho_exponent: parse_rho(&args.rho)?,
        l: args.knobs.l,
        k_max: args.knobs.k_max,
        q_list: parse_real_list(&args.q, "q")?,
        r_max: args.knobs.r_max,
    };
    let out = RieszOut {
        graph: graph_section(&g, &name),
        riesz: riesz_section(&g, &params)?,
    };
    emit_json(&out, args.out.as_deref())
}

fn run_generate(args: &GenerateArgs) -> Result<()> {
    let (_, g) = load_graph(None, Some(&args.spec), args.weight, args.lazify)?;
    emit(&format_edge_list(&g), args.out.as_deref())
}

fn configure_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        ensure!(n >= 1, "--threads needs at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads(cli.threads)?;
    match &cli.command {
        Command::Analyze(args) => run_analyze(&RunConfig::from_analyze(args)?),
        Command::Spectrum(args) => run_spectrum(args).map(|()| ExitCode::SUCCESS),
        Command::Bipartite(args) => run_bipartite(args).map(|()| ExitCode::SUCCESS),
        Command::Volume(args) => run_volume(args).map(|()| ExitCode::SUCCESS),
        Command::Witness(args) => run_witness(args).map(|()| ExitCode::SUCCESS),
        Command::Riesz(args) => run_riesz(args).map(|()| ExitCode::SUCCESS),
        Command::Generate(args) => run_generate(args).map(|()| ExitCode::SUCCESS),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests arrive as clap "errors" but are
            // successful outputs; everything else is a usage error.
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_config_round_trips_losslessly() {
        let cfg = RunConfig {
            input: None,
            generate: Some("random_weighted:20:0.3:7".into()),
            weight: Some(0.1),
            lazify: Some(1.0 / 3.0),
            eps_grid: vec![0.0, 0.1, 1e-300, 2.0f64.powi(-52)],
            radii: vec![1, 2, 3, 100],
            odd_k_max: 9,
            q_list: vec![1.0, 1.5, 2.0, 602214076.0e15],
            analytic_n_max: 8,
            dense_cap: 4096,
            growth_radius: 8,
            rho: Some("d^2.321928094887362".into()),
            l: 3,
            k_max: 8,
            r_max: 8,
            out: Some("report.json".into()),
            csv: None,
        };
        let disk = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&disk).unwrap();
        assert_eq!(back, cfg);
        // A second trip through the on-disk form is byte-stable.
        assert_eq!(serde_json::to_string(&back).unwrap(), disk);
    }

    #[test]
    fn integer_grids_accept_values_ranges_and_unions() {
        assert_eq!(parse_integer_grid("3", "r").unwrap(), vec![3]);
        assert_eq!(parse_integer_grid("2..5", "r").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(
            parse_integer_grid("1, 4..6, 9", "r").unwrap(),
            vec![1, 4, 5, 6, 9]
        );
        assert!(parse_integer_grid("5..2", "r").is_err());
        assert!(parse_integer_grid("x", "r").is_err());
        assert!(parse_integer_grid("", "r").is_err());
    }

    #[test]
    fn real_lists_parse_and_reject_gaps() {
        assert_eq!(parse_real_list("0", "eps").unwrap(), vec![0.0]);
        assert_eq!(
            parse_real_list("0, 0.05, .1", "eps").unwrap(),
            vec![0.0, 0.05, 0.1]
        );
        assert!(parse_real_list("1,,2", "eps").is_err());
        assert!(parse_real_list("", "eps").is_err());
        assert!(parse_real_list("inf", "eps").is_err());
    }

    #[test]
    fn rho_selector_parses_hop_and_powers() {
        assert_eq!(parse_rho("d").unwrap(), None);
        assert_eq!(parse_rho("d^2").unwrap(), Some(2.0));
        assert_eq!(parse_rho("d^2.321928").unwrap(), Some(2.321928));
        assert!(parse_rho("hop").is_err());
        assert!(parse_rho("d^").is_err());
        assert!(parse_rho("d^inf").is_err());
    }
}
