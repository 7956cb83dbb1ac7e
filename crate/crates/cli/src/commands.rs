use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use serde_json::json;

use spectrakit::analysis::{
    correlate_class, density_grid, er_density_sweep, growth_experiment, permutation_p_value,
    write_correlation_csv, write_sweep_csv, GraphClassSample, SweepModel, SweepResult,
    SweepSettings,
};
use spectrakit::complexity::{
    default_block_size, k_graph_with, k_unlabeled, write_complexity_csv, ComplexityRow,
    EstimatorConfig, DEFAULT_UNLABELED_CAP,
};
use spectrakit::ctm::{build_ctm_table_sharded, BuildMode, CtmConfig, ShapeFilter, DEFAULT_BUDGET};
use spectrakit::graph::io::{parse_graph, serialize_graph, Format};
use spectrakit::graph::{generate_ba, generate_er, generate_family, generate_ws, Family};
use spectrakit::rng::{stream_rng, GENERATOR_NAME};
use spectrakit::spectra::{
    flatness, normalized_spectrum_with, spectra_signature, spectrum, write_signature_csv,
    DEFAULT_FLATNESS_TOL,
};
use spectrakit::{
    Boundary, CtmTable, Estimator, EstimatorKind, Fallback, FamilyKind, Graph, Normalization,
    QuantileMethod, RankSelector, SpectraSignature,
};

use crate::error::{CliError, TABLE_HINT};
use crate::output::{write_text, OutputArgs, RunConfig};
use crate::svg::{BoxGlyph, Chart, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RandomModel {
    Er,
    Ws,
    Ba,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Deterministic family: complete, cycle, path, star, wheel, fan, grid, crown.
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    family: Option<FamilyKind>,
    /// Seeded random model.
    #[arg(long)]
    model: Option<RandomModel>,
    /// Vertex count (grid: rows; crown: side of the bipartition).
    #[arg(long)]
    n: usize,
    /// Grid columns; defaults to `n`.
    #[arg(long)]
    cols: Option<usize>,
    /// Edge probability (er).
    #[arg(long)]
    p: Option<f64>,
    /// With --count, spread edge probabilities evenly from --p to this value.
    #[arg(long)]
    p_max: Option<f64>,
    /// Lattice neighbors (ws), even.
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Rewiring probability (ws).
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
    /// Edges per new vertex (ba).
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of graphs; graph `i` draws from stream `i` of the seed.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Output file for a single graph; `-` for stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Directory for generated files named after the configuration.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, default_value = "edges")]
    format: Format,
}

fn family_of(kind: FamilyKind, n: usize, cols: Option<usize>) -> Family {
    match (kind, cols) {
        (FamilyKind::Grid, Some(cols)) => Family::Grid { rows: n, cols },
        _ => kind.with_size(n),
    }
}

pub fn generate(args: &GenerateArgs, deterministic: bool) -> Result<(), CliError> {
    if args.count == 0 {
        return Err(CliError::usage("--count must be at least 1"));
    }
    if args.count > 1 && args.output.is_some() {
        return Err(CliError::usage(
            "--output names one file; use --out-dir with --count",
        ));
    }
    let mut cfg = RunConfig::new("generate", deterministic);
    cfg.set("n", args.n).set("format", format_name(args.format));
    let stem = match (args.family, args.model) {
        (Some(kind), _) => {
            let fam = family_of(kind, args.n, args.cols);
            // validates the size before any file is written
            generate_family(fam)?;
            cfg.set("family", kind).set_opt("cols", args.cols);
            match args.cols {
                Some(c) => format!("{kind}_n{}x{c}", args.n),
                None => format!("{kind}_n{}", args.n),
            }
        }
        (None, Some(model)) => {
            cfg.set("model", format!("{model:?}").to_lowercase())
                .set("seed", args.seed)
                .set("rng", GENERATOR_NAME);
            match model {
                RandomModel::Er => {
                    let p = args
                        .p
                        .ok_or_else(|| CliError::usage("--model er needs --p"))?;
                    cfg.set("p", p).set_opt("p_max", args.p_max);
                    format!("er_n{}_p{p}_s{}", args.n, args.seed)
                }
                RandomModel::Ws => {
                    cfg.set("k", args.k).set("beta", args.beta);
                    format!("ws_n{}_k{}_b{}_s{}", args.n, args.k, args.beta, args.seed)
                }
                RandomModel::Ba => {
                    cfg.set("m", args.m);
                    format!("ba_n{}_m{}_s{}", args.n, args.m, args.seed)
                }
            }
        }
        (None, None) => return Err(CliError::usage("give --family or --model")),
    };
    cfg.set("count", args.count);

    let ext = match args.format {
        Format::EdgeList => "edges",
        Format::Matrix => "matrix",
    };
    let dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    if args.out_dir.is_some() {
        fs::create_dir_all(&dir)
            .map_err(|e| CliError::missing(format!("cannot create {}: {e}", dir.display())))?;
    }
    for i in 0..args.count {
        let g = build_graph(args, i)?;
        let mut text = cfg.preamble();
        text.push_str(&format!("# run.index={i}\n"));
        text.push_str(&serialize_graph(&g, args.format));
        let path = match &args.output {
            Some(p) if p.as_os_str() == "-" => None,
            Some(p) => Some(p.clone()),
            None if args.count == 1 => Some(dir.join(format!("{stem}.{ext}"))),
            None => Some(dir.join(format!("{stem}_{i:04}.{ext}"))),
        };
        write_text(path.as_deref(), &text)?;
    }
    Ok(())
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::EdgeList => "edges",
        Format::Matrix => "matrix",
    }
}

fn build_graph(args: &GenerateArgs, i: usize) -> Result<Graph, CliError> {
    if let Some(kind) = args.family {
        return Ok(generate_family(family_of(kind, args.n, args.cols))?);
    }
    let mut rng = stream_rng(args.seed, i as u64);
    let g = match args.model.expect("checked by caller") {
        RandomModel::Er => {
            let p0 = args.p.expect("checked by caller");
            let p = match args.p_max {
                Some(p1) if args.count > 1 => p0 + (p1 - p0) * i as f64 / (args.count - 1) as f64,
                _ => p0,
            };
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::usage(format!(
                    "edge probability must lie in [0, 1], got {p}"
                )));
            }
            generate_er(args.n, p, &mut rng)?
        }
        RandomModel::Ws => generate_ws(args.n, args.k, args.beta, &mut rng)?,
        RandomModel::Ba => generate_ba(args.n, args.m, &mut rng)?,
    };
    Ok(g)
}

#[derive(Debug, Args)]
pub struct CtmBuildArgs {
    /// Machine states (exhaustive builds allow 1 or 2).
    #[arg(long)]
    states: u8,
    /// Step budget per machine.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Output shapes to tabulate: `all` or a list like `3x3,2x2`.
    #[arg(long, default_value = "all")]
    shapes: ShapeFilter,
    /// Sample this many uniformly random rules instead of enumerating.
    #[arg(long)]
    samples: Option<u64>,
    /// Seed for --samples; rule `j` draws from stream `j`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop machines whose configuration repeats.
    #[arg(long)]
    detect_cycles: bool,
    /// Index shards tallied in parallel and merged.
    #[arg(long, default_value_t = 8)]
    shards: usize,
    #[arg(short, long)]
    output: PathBuf,
}

pub fn ctm_build(args: &CtmBuildArgs, deterministic: bool) -> Result<(), CliError> {
    let mode = match args.samples {
        Some(count) => BuildMode::Sampled {
            count,
            seed: args.seed,
        },
        None => BuildMode::Exhaustive,
    };
    let config = CtmConfig {
        states: args.states,
        max_steps: args.budget,
        shapes: args.shapes.clone(),
        mode,
        detect_cycles: args.detect_cycles,
    };
    let table = build_ctm_table_sharded(&config, args.shards.max(1))?;
    let mut cfg = RunConfig::new("ctm-build", deterministic);
    cfg.set("shards", args.shards).set("rng", GENERATOR_NAME);
    let mut text = cfg.preamble();
    text.push_str(&table.to_csv());
    write_text(Some(&args.output), &text)
}

#[derive(Debug, Clone, Args)]
pub struct EstimatorArgs {
    /// `bdm` (needs a table) or `entropy`.
    #[arg(long, default_value = "bdm")]
    estimator: EstimatorKind,
    /// Block size; for bdm the largest square shape the table covers
    /// among 4, 3, 2, otherwise 2.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value = "discard")]
    boundary: Boundary,
    #[arg(long, default_value = "entropy-bits")]
    fallback: Fallback,
    /// CTM table file.
    #[arg(long, env = "SPECTRAKIT_TABLE")]
    table: Option<PathBuf>,
    /// Divisor for normalized values: `edges` or `twice-edges`.
    #[arg(long, default_value = "edges")]
    normalization: Normalization,
}

impl EstimatorArgs {
    fn load_table(&self) -> Result<Option<CtmTable>, CliError> {
        if self.estimator != EstimatorKind::Bdm {
            return Ok(None);
        }
        let path = self.table.as_ref().ok_or_else(|| {
            CliError::missing(format!("the bdm estimator needs a CTM table; {TABLE_HINT}"))
        })?;
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::missing(format!(
                "cannot read table {}: {e}; {TABLE_HINT}",
                path.display()
            ))
        })?;
        Ok(Some(CtmTable::from_csv(&text)?))
    }

    fn config(&self, table: Option<&CtmTable>) -> EstimatorConfig {
        let d = self
            .d
            .unwrap_or_else(|| table.map_or(2, default_block_size));
        EstimatorConfig {
            kind: self.estimator,
            d,
            boundary: self.boundary,
            fallback: self.fallback,
        }
    }

    fn stamp(&self, cfg: &mut RunConfig, est: &EstimatorConfig) {
        cfg.set("estimator", est.kind)
            .set("d", est.d)
            .set("boundary", est.boundary)
            .set("fallback", est.fallback)
            .set("normalization", self.normalization)
            .set("laplacian_encoding", "adjacency+degree-bits");
        if est.kind == EstimatorKind::Bdm {
            cfg.set_opt(
                "table",
                self.table.as_ref().map(|p| p.display().to_string()),
            );
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    /// Adjacency spectrum of each input graph.
    Spectra(SpectraArgs),
    /// Complexity estimate of each input graph.
    Complexity(ComplexityArgs),
    /// Spectra signature along a growing family, model or file sequence.
    Signature(SignatureArgs),
    /// Eigenvalue trajectories over an ER density grid or a growth grid.
    Sweep(SweepArgs),
    /// Per-class correlation of normalized complexity and eigenvalues.
    Correlate(CorrelateArgs),
}

pub fn report(cmd: &ReportCommand, deterministic: bool) -> Result<(), CliError> {
    match cmd {
        ReportCommand::Spectra(a) => report_spectra(a, deterministic),
        ReportCommand::Complexity(a) => report_complexity(a, deterministic),
        ReportCommand::Signature(a) => report_signature(a, deterministic),
        ReportCommand::Sweep(a) => report_sweep(a, deterministic),
        ReportCommand::Correlate(a) => report_correlate(a, deterministic),
    }
}

fn read_graph(path: &Path) -> Result<(String, Graph), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::missing(format!("cannot read {}: {e}", path.display())))?;
    let format = match path.extension().and_then(|e| e.to_str()) {
        Some("matrix") | Some("adj") => Format::Matrix,
        _ => Format::EdgeList,
    };
    let g = parse_graph(&text, format)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok((id, g))
}

fn graph_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::missing(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("edges" | "matrix" | "adj")
            )
        })
        .collect();
    files.sort();
    Ok(files)
}

fn stamp_inputs(cfg: &mut RunConfig, files: &[PathBuf]) {
    let list: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    cfg.set("inputs", list.join(" "));
}

#[derive(Debug, Args)]
pub struct SpectraArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Divide eigenvalues by the normalization divisor.
    #[arg(long)]
    normalized: bool,
    #[arg(long, default_value = "edges")]
    normalization: Normalization,
    #[command(flatten)]
    out: OutputArgs,
}

fn report_spectra(a: &SpectraArgs, deterministic: bool) -> Result<(), CliError> {
    let graphs = a
        .inputs
        .iter()
        .map(|p| read_graph(p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cfg = RunConfig::new("report spectra", deterministic);
    stamp_inputs(&mut cfg, &a.inputs);
    cfg.set("values", if a.normalized { "normalized" } else { "raw" })
        .set("normalization", a.normalization);
    let width = graphs
        .iter()
        .map(|(_, g)| g.vertex_count())
        .max()
        .unwrap_or(0);
    let mut csv = String::from("graph_id,n,m_edges,values,defined");
    for i in 1..=width {
        csv.push_str(&format!(",lambda_{i}"));
    }
    csv.push('\n');
    for (id, g) in &graphs {
        let values = if a.normalized {
            match normalized_spectrum_with(g, a.normalization) {
                Ok(s) => Some(s),
                Err(spectrakit::SpectraError::UndefinedNormalization) => None,
                Err(e) => return Err(e.into()),
            }
        } else {
            Some(spectrum(g)?)
        };
        csv.push_str(&format!(
            "{id},{},{},{},{}",
            g.vertex_count(),
            g.edge_count(),
            if a.normalized { "normalized" } else { "raw" },
            values.is_some()
        ));
        let vals = values.as_ref().map(|s| s.values()).unwrap_or(&[]);
        for i in 0..width {
            match vals.get(i) {
                Some(v) => csv.push_str(&format!(",{v}")),
                None => csv.push(','),
            }
        }
        csv.push('\n');
    }
    a.out.emit(&cfg, &csv, None)
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    est: EstimatorArgs,
    /// Minimize over all vertex labelings.
    #[arg(long)]
    unlabeled: bool,
    /// Largest vertex count accepted with --unlabeled.
    #[arg(long, default_value_t = DEFAULT_UNLABELED_CAP)]
    cap: usize,
    #[command(flatten)]
    out: OutputArgs,
}

fn report_complexity(a: &ComplexityArgs, deterministic: bool) -> Result<(), CliError> {
    let graphs = a
        .inputs
        .iter()
        .map(|p| read_graph(p))
        .collect::<Result<Vec<_>, _>>()?;
    let table = a.est.load_table()?;
    let config = a.est.config(table.as_ref());
    let est = Estimator::from_config(config, table.as_ref())?;
    let mut cfg = RunConfig::new("report complexity", deterministic);
    stamp_inputs(&mut cfg, &a.inputs);
    a.est.stamp(&mut cfg, &config);
    cfg.set("unlabeled", a.unlabeled);
    let mut rows = Vec::with_capacity(graphs.len());
    for (id, g) in graphs {
        let score = if a.unlabeled {
            let mut s = k_unlabeled(&g, &est, a.cap)?.score;
            s.normalized_bits = a
                .est
                .normalization
                .divisor(g.edge_count())
                .map(|d| s.raw_bits / d);
            s
        } else {
            k_graph_with(&g, &est, a.est.normalization)?
        };
        rows.push(ComplexityRow {
            graph_id: id,
            n: g.vertex_count(),
            m_edges: g.edge_count(),
            score,
        });
    }
    let mut buf = Vec::new();
    write_complexity_csv(&rows, &config, &mut buf).expect("writing to memory");
    a.out
        .emit(&cfg, &String::from_utf8(buf).expect("utf-8 csv"), None)
}

/// Increasing vertex counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeGrid(pub Vec<usize>);

impl std::str::FromStr for SizeGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sizes(s).map(SizeGrid)
    }
}

/// `a..b` (inclusive), `a..b:step`, or a comma list.
fn parse_sizes(s: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("bad size grid {s:?}; use a..b, a..b:step or a,b,c");
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (hi, step.parse::<usize>().map_err(|_| bad())?),
            None => (rest, 1),
        };
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if step == 0 || hi < lo {
            return Err(bad());
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| bad()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GrowthModel {
    Family,
    Ws,
    Ba,
}

#[derive(Debug, Clone, Args)]
pub struct GrowthArgs {
    /// Family grown over --sizes.
    #[arg(long)]
    family: Option<FamilyKind>,
    /// Size grid: `a..b`, `a..b:step` or `a,b,c`.
    #[arg(long)]
    sizes: Option<SizeGrid>,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
pub struct SignatureArgs {
    /// Graph files taken as consecutive steps 1, 2, ...; alternative to
    /// --family or --model.
    inputs: Vec<PathBuf>,
    /// Random growth model (ws or ba) over --sizes.
    #[arg(long)]
    model: Option<RandomModel>,
    #[command(flatten)]
    growth: GrowthArgs,
    #[arg(long, default_value = "type7")]
    quantile: QuantileMethod,
    #[arg(long, default_value = "edges")]
    normalization: Normalization,
    /// Relative interquartile range at or below which a step counts as flat.
    #[arg(long, default_value_t = DEFAULT_FLATNESS_TOL)]
    flatness_tol: f64,
    /// Also write box glyphs per step to this SVG file.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

fn growth_model(model: Option<RandomModel>, g: &GrowthArgs) -> Result<SweepModel, CliError> {
    match (g.family, model) {
        (Some(kind), None) => Ok(SweepModel::Family(kind)),
        (None, Some(RandomModel::Ws)) => Ok(SweepModel::Ws {
            k: g.k,
            beta: g.beta,
        }),
        (None, Some(RandomModel::Ba)) => Ok(SweepModel::Ba { m_attach: g.m }),
        (None, Some(RandomModel::Er)) => Err(CliError::usage(
            "er is a density sweep; use `report sweep --model er`",
        )),
        (Some(_), Some(_)) => Err(CliError::usage("give either --family or --model")),
        (None, None) => Err(CliError::usage("give input files, --family or --model")),
    }
}

fn stamp_growth(cfg: &mut RunConfig, model: &SweepModel, g: &GrowthArgs, sizes: &[usize]) {
    match model {
        SweepModel::Family(kind) => {
            cfg.set("family", kind);
        }
        SweepModel::Ws { k, beta } => {
            cfg.set("model", "ws")
                .set("k", k)
                .set("beta", beta)
                .set("seed", g.seed);
        }
        SweepModel::Ba { m_attach } => {
            cfg.set("model", "ba")
                .set("m", m_attach)
                .set("seed", g.seed);
        }
        SweepModel::ErDensity { n } => {
            cfg.set("model", "er").set("n", n);
        }
    }
    let list: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
    cfg.set("sizes", list.join(","));
}

fn signature_svg(sig: &SpectraSignature, title: &str, x_label: &str) -> String {
    let boxes = sig
        .steps()
        .iter()
        .map(|s| BoxGlyph {
            x: s.param,
            min: s.summary.min,
            q1: s.summary.q1,
            median: s.summary.median,
            q3: s.summary.q3,
            max: s.summary.max,
        })
        .collect();
    Chart {
        title: title.to_string(),
        x_label: x_label.to_string(),
        y_label: "normalized eigenvalue".into(),
        boxes,
        ..Chart::default()
    }
    .render()
}

fn report_signature(a: &SignatureArgs, deterministic: bool) -> Result<(), CliError> {
    let mut cfg = RunConfig::new("report signature", deterministic);
    cfg.set("quantile", a.quantile.name())
        .set("normalization", a.normalization)
        .set("flatness_tol", a.flatness_tol);
    let sig = if !a.inputs.is_empty() {
        if a.model.is_some() || a.growth.family.is_some() {
            return Err(CliError::usage(
                "input files and --family/--model are exclusive",
            ));
        }
        let graphs = a
            .inputs
            .iter()
            .map(|p| read_graph(p))
            .collect::<Result<Vec<_>, _>>()?;
        stamp_inputs(&mut cfg, &a.inputs);
        let seq: Vec<(f64, Graph)> = graphs
            .into_iter()
            .enumerate()
            .map(|(i, (_, g))| ((i + 1) as f64, g))
            .collect();
        spectra_signature(&seq, a.quantile, a.normalization)?
    } else {
        let model = growth_model(a.model, &a.growth)?;
        let sizes = a
            .growth
            .sizes
            .clone()
            .ok_or_else(|| CliError::usage("--sizes is required with --family or --model"))?
            .0;
        stamp_growth(&mut cfg, &model, &a.growth, &sizes);
        let settings = SweepSettings {
            ranks: &[],
            normalization: a.normalization,
            quantile: a.quantile,
            estimator: None,
        };
        growth_experiment(model, &sizes, a.growth.seed, &settings)?.signature
    };
    let flat = flatness(&sig, a.flatness_tol);
    let mut buf = Vec::new();
    write_signature_csv(&sig, &mut buf).expect("writing to memory");
    if let Some(path) = &a.svg {
        write_text(
            Some(path),
            &signature_svg(&sig, "spectra signature", "step"),
        )?;
    }
    a.out.emit(
        &cfg,
        &String::from_utf8(buf).expect("utf-8 csv"),
        Some(json!({ "low_information": flat.low_information })),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Er,
    Ws,
    Ba,
    Family,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    model: SweepKind,
    /// Vertex count of the ER sweep.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Number of evenly spaced ER densities ending at 1.
    #[arg(long, default_value_t = 20)]
    grid: usize,
    /// Explicit ER densities, overriding --grid.
    #[arg(long, value_delimiter = ',')]
    densities: Option<Vec<f64>>,
    /// Graphs per ER density.
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[command(flatten)]
    growth: GrowthArgs,
    #[arg(long, value_delimiter = ',', default_value = "largest,second,smallest")]
    ranks: Vec<RankSelector>,
    #[arg(long, default_value = "type7")]
    quantile: QuantileMethod,
    /// Also estimate per-step complexity with the estimator options.
    #[arg(long)]
    complexity: bool,
    #[command(flatten)]
    est: EstimatorArgs,
    /// Also plot raw eigenvalue trajectories, one polyline per rank.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

fn sweep_svg(res: &SweepResult, x_label: &str) -> String {
    let series = res
        .trajectories
        .ranks
        .iter()
        .zip(&res.trajectories.series)
        .map(|(rank, pts)| Series {
            label: rank.label(),
            points: pts.iter().map(|p| (p.param, p.raw)).collect(),
        })
        .collect();
    Chart {
        title: "eigenvalue trajectories".into(),
        x_label: x_label.to_string(),
        y_label: "eigenvalue".into(),
        series,
        ..Chart::default()
    }
    .render()
}

fn report_sweep(a: &SweepArgs, deterministic: bool) -> Result<(), CliError> {
    let table = if a.complexity {
        a.est.load_table()?
    } else {
        None
    };
    let config = a.est.config(table.as_ref());
    let est = if a.complexity {
        Some(Estimator::from_config(config, table.as_ref())?)
    } else {
        None
    };
    let mut cfg = RunConfig::new("report sweep", deterministic);
    let labels: Vec<String> = a.ranks.iter().map(|r| r.label()).collect();
    cfg.set("ranks", labels.join(","))
        .set("quantile", a.quantile.name())
        .set("rng", GENERATOR_NAME);
    if let Some(e) = &est {
        a.est.stamp(&mut cfg, &e.config);
    } else {
        cfg.set("normalization", a.est.normalization);
    }
    let settings = SweepSettings {
        ranks: &a.ranks,
        normalization: a.est.normalization,
        quantile: a.quantile,
        estimator: est.as_ref(),
    };
    let (res, x_label) = match a.model {
        SweepKind::Er => {
            let grid = a.densities.clone().unwrap_or_else(|| density_grid(a.grid));
            let list: Vec<String> = grid.iter().map(|p| p.to_string()).collect();
            cfg.set("model", "er")
                .set("n", a.n)
                .set("densities", list.join(","))
                .set("trials", a.trials)
                .set("seed", a.growth.seed);
            (
                er_density_sweep(a.n, &grid, a.trials, a.growth.seed, &settings)?,
                "edge density",
            )
        }
        kind => {
            let model = match kind {
                SweepKind::Family => growth_model(None, &a.growth)?,
                SweepKind::Ws => growth_model(Some(RandomModel::Ws), &a.growth)?,
                _ => growth_model(Some(RandomModel::Ba), &a.growth)?,
            };
            let sizes = a
                .growth
                .sizes
                .clone()
                .ok_or_else(|| CliError::usage("--sizes is required for growth sweeps"))?
                .0;
            stamp_growth(&mut cfg, &model, &a.growth, &sizes);
            (
                growth_experiment(model, &sizes, a.growth.seed, &settings)?,
                "vertices",
            )
        }
    };
    let mut buf = Vec::new();
    write_sweep_csv(&res, &mut buf).expect("writing to memory");
    if let Some(path) = &a.svg {
        write_text(Some(path), &sweep_svg(&res, x_label))?;
    }
    a.out
        .emit(&cfg, &String::from_utf8(buf).expect("utf-8 csv"), None)
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Directory of graph files forming one class; repeat for more classes.
    #[arg(long, required = true)]
    class_dir: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "largest,second,smallest")]
    ranks: Vec<RankSelector>,
    #[command(flatten)]
    est: EstimatorArgs,
    /// Also compute a permutation p-value with this many shuffles.
    #[arg(long)]
    permutations: Option<usize>,
    /// Seed of the permutation test.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

fn report_correlate(a: &CorrelateArgs, deterministic: bool) -> Result<(), CliError> {
    let table = a.est.load_table()?;
    let config = a.est.config(table.as_ref());
    let est = Estimator::from_config(config, table.as_ref())?;
    let mut cfg = RunConfig::new("report correlate", deterministic);
    a.est.stamp(&mut cfg, &config);
    let labels: Vec<String> = a.ranks.iter().map(|r| r.label()).collect();
    cfg.set("ranks", labels.join(","))
        .set("tails", "two-tailed");
    cfg.set_opt("permutations", a.permutations);
    if a.permutations.is_some() {
        cfg.set("seed", a.seed);
    }
    let mut reports = Vec::new();
    let mut skipped = serde_json::Map::new();
    let mut perm_cells: Vec<Vec<String>> = Vec::new();
    for dir in &a.class_dir {
        let class = dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| dir.display().to_string());
        let files = graph_files(dir)?;
        let mut graphs = Vec::with_capacity(files.len());
        let mut edgeless = 0usize;
        for f in &files {
            let (id, g) = read_graph(f)?;
            if g.edge_count() == 0 {
                edgeless += 1;
            } else {
                graphs.push((id, g));
            }
        }
        skipped.insert(format!("{class}_edgeless_skipped"), json!(edgeless));
        let sample = GraphClassSample::build(class.clone(), graphs, &est, a.est.normalization)?;
        let report = correlate_class(&sample, &a.ranks)?;
        if let Some(resamples) = a.permutations {
            let xs: Vec<f64> = sample.members().iter().map(|m| m.complexity).collect();
            let mut cells = Vec::new();
            for row in &report.rows {
                let ys = sample
                    .members()
                    .iter()
                    .map(|m| m.spectrum.at(row.rank))
                    .collect::<Result<Vec<_>, _>>()?;
                cells.push(if row.degenerate {
                    String::new()
                } else {
                    format!("{:e}", permutation_p_value(&xs, &ys, resamples, a.seed)?)
                });
            }
            perm_cells.push(cells);
        }
        reports.push(report);
    }
    let mut buf = Vec::new();
    write_correlation_csv(&reports, &mut buf).expect("writing to memory");
    let mut csv = String::from_utf8(buf).expect("utf-8 csv");
    if a.permutations.is_some() {
        let flat: Vec<&String> = perm_cells.iter().flatten().collect();
        let mut lines = csv.lines();
        let mut out = format!("{},perm_p_value\n", lines.next().unwrap_or_default());
        for (line, cell) in lines.zip(flat) {
            out.push_str(&format!("{line},{cell}\n"));
        }
        csv = out;
    }
    a.out
        .emit(&cfg, &csv, Some(serde_json::Value::Object(skipped)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_grids() {
        assert_eq!(parse_sizes("3..6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_sizes("10..40:10").unwrap(), vec![10, 20, 30, 40]);
        assert_eq!(parse_sizes("5,7").unwrap(), vec![5, 7]);
        assert!(parse_sizes("6..3").is_err());
        assert!(parse_sizes("a,b").is_err());
    }
}
