use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use polyvis::dataset::{run_pipeline, write_pipeline, DatasetRecord, PipelineConfig, Split};
use polyvis::io::{
    graph_from_value, parse_graph, parse_polygon, parse_triangulation, parse_values, polygon_from_value, read_text,
};
use polyvis::metrics::{
    best_threshold, dataset_score, edge_confusion, recognize, sweep_csv, threshold_sweep, Averaging, RecognitionCase,
    ThresholdGrid,
};
use polyvis::polygen::{augment, generate_family, rng_from_seed, AugmentConfig, Family, FamilyConfig};
use polyvis::render::{render_svg, RenderSpec};
use polyvis::sdf::{
    boundary_hausdorff, extract_contour, normalize_unit, polygon_sdf, read_sdf, sdf_round_trip_detailed,
    visvalingam_simplify, write_pgm, write_sdf, Frame, SdfSidecar,
};
use polyvis::triangulate::{flip_path, triangulation_graph};
use polyvis::visibility::{graph_density, link_diameter, visibility_graph};
use polyvis::Error;

#[derive(Parser)]
#[command(name = "polyvis", version, about = "Visibility graphs, polygon datasets, SDFs and triangulations")]
struct Cli {
    /// Human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random or typed polygons.
    Gen(GenArgs),
    /// Visibility graph of a polygon.
    Vis(InOut),
    /// Rasterize a polygon's signed distance field.
    Sdf(SdfArgs),
    /// Extract the zero contour from a binary SDF.
    Contour(ContourArgs),
    /// Polygon -> SDF -> contour -> simplified polygon.
    Roundtrip(RoundtripArgs),
    /// Constrained Delaunay triangulation.
    Tri(InOut),
    /// Flip path between two triangulations.
    FlipPath(FlipArgs),
    /// Graph-preserving augmentations of a polygon.
    Augment(AugmentArgs),
    /// Build the full dataset.
    Pipeline(PipelineArgs),
    /// Edge metrics of predicted vs true graphs.
    Score(ScoreArgs),
    /// Decide whether a target graph is realized by any candidate.
    Recognize(RecognizeArgs),
    /// Recognition accuracy over a threshold grid.
    Sweep(SweepArgs),
    /// SVG figure of a polygon.
    Render(RenderArgs),
}

#[derive(Args)]
struct InOut {
    /// Input polygon (record, vertex array or {"vertices": ...}); `-` for stdin.
    #[arg(long = "in", default_value = "-")]
    input: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 25)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "random")]
    family: String,
    /// Number of polygons; more than one writes JSONL.
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SdfArgs {
    #[arg(long = "in", default_value = "-")]
    input: PathBuf,
    #[arg(long, default_value_t = 40)]
    res: usize,
    #[arg(long, default_value_t = 0.05)]
    margin: f64,
    /// Binary grid path; a `.json` sidecar is written next to it.
    #[arg(long)]
    out: PathBuf,
    /// Also write a PGM preview.
    #[arg(long)]
    pgm: Option<PathBuf>,
}

#[derive(Args)]
struct ContourArgs {
    /// Binary grid written by `sdf`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Sidecar with the frame; defaults to the grid path with `.json`.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Simplify to this many vertices.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RoundtripArgs {
    #[arg(long = "in", default_value = "-")]
    input: PathBuf,
    #[arg(long, default_value_t = 40)]
    res: usize,
    #[arg(long, default_value_t = 25)]
    k: usize,
    #[arg(long, default_value_t = 0.05)]
    margin: f64,
    /// Print F1 and Hausdorff distance against the input.
    #[arg(long)]
    report: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlipArgs {
    /// Triangulation, record or polygon.
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AugmentArgs {
    #[arg(long = "in", default_value = "-")]
    input: PathBuf,
    #[arg(long, default_value_t = 20)]
    copies: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    sigma: f64,
    #[arg(long, default_value_t = 0.5)]
    shear: f64,
    #[arg(long, default_value_t = 200)]
    max_attempts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// TOML or JSON config; unset fields take defaults.
    #[arg(long, env = "POLYVIS_CONFIG")]
    config: Option<PathBuf>,
    /// Start from the one-tenth scale preset.
    #[arg(long)]
    desk: bool,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_raw: Option<usize>,
    #[arg(long)]
    n_rebalanced: Option<usize>,
    #[arg(long)]
    copies: Option<usize>,
    #[arg(long)]
    reserve: Option<usize>,
    #[arg(long)]
    typed_per_family: Option<usize>,
    #[arg(long)]
    rotation_copies: Option<usize>,
    /// Write binary SDFs for the base training polygons.
    #[arg(long)]
    sdf: bool,
}

#[derive(Args)]
struct ScoreArgs {
    /// Predicted graphs or polygons, one per line.
    #[arg(long)]
    pred: PathBuf,
    /// True graphs or polygons, matched by line.
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, value_enum, default_value_t = Averaging::Macro)]
    averaging: Averaging,
}

#[derive(Args)]
struct RecognizeArgs {
    /// Candidate polygons, one per line.
    #[arg(long)]
    candidates: PathBuf,
    /// Target graph, record or polygon.
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value_t = 0.85)]
    threshold: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// One case per line: {"candidates": [...], "target": ..., "label": bool}.
    #[arg(long)]
    cases: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    from: f64,
    #[arg(long, default_value_t = 1.0)]
    to: f64,
    #[arg(long, default_value_t = 50)]
    steps: usize,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long = "in", default_value = "-")]
    input: PathBuf,
    /// Overlay visible edges and append the adjacency matrix.
    #[arg(long)]
    graph: bool,
    #[arg(long, default_value_t = 400)]
    size: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Bad flags or flag values; exit code 1.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn read_input(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        Ok(s)
    } else {
        Ok(read_text(path)?)
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json_line<T: Serialize>(v: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string(v)? + "\n")
}

fn gen(a: GenArgs) -> anyhow::Result<()> {
    let family: Family = a.family.parse().map_err(|e: Error| usage(e.to_string()))?;
    if family == Family::HoleInvalid {
        return Err(usage("hole polygons are produced by `pipeline`"));
    }
    let mut rng = rng_from_seed(a.seed);
    let mut text = String::new();
    for k in 0..a.count {
        let p = generate_family(family, a.n, &FamilyConfig::default(), &mut rng)?;
        let id = format!("{}-s{}-{k:04}", family.name(), a.seed);
        text += &json_line(&DatasetRecord::from_polygon(id, p, family, Split::Train)?)?;
    }
    emit(a.out.as_deref(), &text)
}

fn vis(a: InOut, pretty: bool) -> anyhow::Result<()> {
    let p = parse_polygon(&read_input(&a.input)?)?;
    let g = visibility_graph(&p)?;
    let text = if pretty {
        format!(
            "vertices  {}\nedges     {}\ndensity   {:.4}\ndiameter  {}\n{}",
            g.n(),
            g.edge_count(),
            graph_density(&g),
            link_diameter(&g).map_or("-".to_string(), |d| d.to_string()),
            g.to_matrix_string()
        )
    } else {
        json_line(&json!({
            "n": g.n(),
            "edges": g.edge_count(),
            "density": graph_density(&g),
            "link_diameter": link_diameter(&g),
            "vis_graph": g,
        }))?
    };
    emit(a.out.as_deref(), &text)
}

fn sidecar_path(p: &Path) -> PathBuf {
    p.with_extension("json")
}

fn sdf(a: SdfArgs) -> anyhow::Result<()> {
    let p = parse_polygon(&read_input(&a.input)?)?;
    let grid = polygon_sdf(&p, a.res, a.margin)?;
    write_sdf(&grid, fs::File::create(&a.out).with_context(|| a.out.display().to_string())?)?;
    let side = SdfSidecar::for_grid(&grid, a.margin);
    fs::write(sidecar_path(&a.out), json_line(&side)?)?;
    if let Some(pgm) = &a.pgm {
        write_pgm(&grid, fs::File::create(pgm)?)?;
    }
    let min = grid.values().iter().copied().fold(f64::INFINITY, f64::min);
    let max = grid.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    emit(None, &json_line(&json!({ "res": grid.res(), "min": min, "max": max, "frame": grid.frame() }))?)
}

fn contour(a: ContourArgs) -> anyhow::Result<()> {
    let side_path = a.sidecar.clone().unwrap_or_else(|| sidecar_path(&a.input));
    let frame = match fs::read_to_string(&side_path) {
        Ok(s) => serde_json::from_str::<SdfSidecar>(&s)?.frame,
        Err(_) if a.sidecar.is_none() => Frame::IDENTITY,
        Err(e) => bail!("{}: {e}", side_path.display()),
    };
    let grid = read_sdf(fs::File::open(&a.input).with_context(|| a.input.display().to_string())?, frame)?;
    let line = extract_contour(&grid)?;
    let pts = match a.k {
        Some(k) => visvalingam_simplify(&line, k)?.vertices().to_vec(),
        None => line.points,
    };
    let back: Vec<_> = pts.into_iter().map(|p| frame.invert(p)).collect();
    emit(a.out.as_deref(), &json_line(&json!({ "vertices": back }))?)
}

fn roundtrip(a: RoundtripArgs) -> anyhow::Result<()> {
    let p = parse_polygon(&read_input(&a.input)?)?;
    let r = sdf_round_trip_detailed(&p, a.res, a.k, a.margin)?;
    let text = if a.report {
        let c = edge_confusion(&visibility_graph(&r.polygon)?, &visibility_graph(&p)?)?;
        let (norm, _) = normalize_unit(&p, a.margin)?;
        let h = boundary_hausdorff(r.normalized.vertices(), norm.vertices(), 20);
        json_line(&json!({
            "f1": c.f1(),
            "precision": c.precision(),
            "recall": c.recall(),
            "hausdorff": h,
            "hausdorff_cells": h * a.res as f64,
            "contour_points": r.contour.len(),
            "polygon": r.polygon,
        }))?
    } else {
        json_line(&json!({ "vertices": r.polygon }))?
    };
    emit(a.out.as_deref(), &text)
}

fn tri(a: InOut, pretty: bool) -> anyhow::Result<()> {
    let t = parse_triangulation(&read_input(&a.input)?)?;
    let text = if pretty {
        let mut s = format!("vertices   {}\ndiagonals  {}\n", t.n(), t.diagonal_count());
        for [i, j, k] in t.triangles() {
            s += &format!("  {i:>3} {j:>3} {k:>3}\n");
        }
        s
    } else {
        json_line(&json!({
            "n": t.n(),
            "diagonals": t.diagonals().map(|(i, j)| [i, j]).collect::<Vec<_>>(),
            "triangles": t.triangles(),
            "graph": triangulation_graph(&t),
        }))?
    };
    emit(a.out.as_deref(), &text)
}

fn flip_path_cmd(a: FlipArgs) -> anyhow::Result<()> {
    let ta = parse_triangulation(&read_input(&a.a)?)?;
    let tb = parse_triangulation(&read_input(&a.b)?)?;
    let path = flip_path(&ta, &tb)?;
    let steps: Vec<Vec<[usize; 2]>> = path
        .steps()
        .iter()
        .map(|t| t.diagonals().map(|(i, j)| [i, j]).collect())
        .collect();
    emit(a.out.as_deref(), &json_line(&steps)?)
}

fn augment_cmd(a: AugmentArgs) -> anyhow::Result<()> {
    let text = read_input(&a.input)?;
    let v: Value = serde_json::from_str(text.lines().find(|l| !l.trim().is_empty()).unwrap_or(&text))
        .or_else(|_| serde_json::from_str(&text))?;
    let parent_id = v.get("id").and_then(Value::as_str).unwrap_or("input").to_string();
    let p = polygon_from_value(v)?;
    let cfg = AugmentConfig {
        shear_range: (-a.shear, a.shear),
        perturb_sigma: a.sigma,
        max_attempts: a.max_attempts,
        copies: a.copies,
        ..AugmentConfig::default()
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let parent = DatasetRecord::from_polygon(parent_id.clone(), p.clone(), Family::Random, Split::Train)?;
    let mut out = String::new();
    for (k, c) in augment(&p, &cfg, &mut rng_from_seed(a.seed))?.into_iter().enumerate() {
        let mut r = DatasetRecord::from_polygon(format!("{parent_id}-a{k:02}"), c, parent.family, Split::Train)?;
        r.parent_id = Some(parent_id.clone());
        out += &json_line(&r)?;
    }
    emit(a.out.as_deref(), &out)
}

fn load_config(path: &Path) -> anyhow::Result<PipelineConfig> {
    let text = read_text(path)?;
    let cfg = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
    } else {
        toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
    };
    Ok(cfg)
}

fn pipeline(a: PipelineArgs, pretty: bool) -> anyhow::Result<()> {
    let mut cfg = match &a.config {
        Some(p) => load_config(p)?,
        None if a.desk => PipelineConfig::desk(),
        None => PipelineConfig::default(),
    };
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    macro_rules! set {
        ($field:expr, $v:expr) => {
            if let Some(v) = $v {
                $field = v;
            }
        };
    }
    set!(cfg.n_raw, a.n_raw);
    set!(cfg.n_rebalanced, a.n_rebalanced);
    set!(cfg.augment.copies, a.copies);
    set!(cfg.reserve_per_diameter, a.reserve);
    set!(cfg.typed_per_family, a.typed_per_family);
    set!(cfg.rotation_copies, a.rotation_copies);
    cfg.sdf |= a.sdf;
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    if let Some(j) = a.jobs {
        if j == 0 {
            return Err(usage("--jobs must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    let start = Instant::now();
    let mut out = run_pipeline(&cfg)?;
    let written = write_pipeline(&mut out, &a.out)?;
    let s = &out.summary;
    let secs = start.elapsed().as_secs_f64();
    let text = if pretty {
        let mut t = format!(
            "raw {}  train_base {}  train {}  test_in {}  test_out {}  recognition {}\n",
            s.raw, s.train_base, s.train, s.test_in, s.test_out, s.recognition
        );
        t += "diameter  raw  rebalanced\n";
        for (d, c) in &s.rebalance.input {
            t += &format!("{d:>8} {c:>4} {:>11}\n", s.rebalance.output.get(d).copied().unwrap_or(0));
        }
        t += &format!("bucket ratio {:.3}, {} augment failures, {secs:.1}s\n", s.bucket_ratio, s.augment_failures.len());
        t
    } else {
        json_line(&json!({
            "files": written,
            "seconds": secs,
            "bucket_ratio": s.bucket_ratio,
            "rebalanced": s.rebalance.output,
            "train": s.train,
            "augment_failures": s.augment_failures.len(),
        }))?
    };
    emit(None, &text)
}

fn graphs_of(path: &Path) -> anyhow::Result<Vec<polyvis::VisGraph>> {
    parse_values(&read_input(path)?)?
        .into_iter()
        .map(|v| graph_from_value(v).map_err(anyhow::Error::from))
        .collect()
}

fn score(a: ScoreArgs, pretty: bool) -> anyhow::Result<()> {
    let pred = graphs_of(&a.pred)?;
    let truth = graphs_of(&a.truth)?;
    if pred.len() != truth.len() {
        bail!(Error::SizeMismatch(pred.len(), truth.len()));
    }
    let pairs: Vec<_> = pred.into_iter().zip(truth).collect();
    let s = dataset_score(&pairs, a.averaging)?;
    let text = if pretty {
        format!(
            "pairs      {}\naccuracy   {:.4}\nprecision  {:.4}\nrecall     {:.4}\nf1         {:.4}\n",
            s.count, s.scores.accuracy, s.scores.precision, s.scores.recall, s.scores.f1
        )
    } else {
        json_line(&s)?
    };
    emit(None, &text)
}

fn recognize_cmd(a: RecognizeArgs) -> anyhow::Result<()> {
    let cands = parse_values(&read_input(&a.candidates)?)?
        .into_iter()
        .map(polygon_from_value)
        .collect::<polyvis::Result<Vec<_>>>()?;
    let target = parse_graph(&read_input(&a.target)?)?;
    let v = recognize(&cands, &target, a.threshold).map_err(|e| match e {
        Error::InvalidThreshold(_) => usage(e.to_string()),
        e => e.into(),
    })?;
    emit(None, &json_line(&v)?)
}

fn sweep(a: SweepArgs, pretty: bool) -> anyhow::Result<()> {
    let cases = parse_values(&read_input(&a.cases)?)?
        .into_iter()
        .map(|v| -> anyhow::Result<RecognitionCase> {
            let label = v.get("label").and_then(Value::as_bool).context("case without boolean `label`")?;
            let target = graph_from_value(v.get("target").cloned().context("case without `target`")?)?;
            let candidates = v
                .get("candidates")
                .and_then(Value::as_array)
                .context("case without `candidates` array")?
                .iter()
                .cloned()
                .map(polygon_from_value)
                .collect::<polyvis::Result<_>>()?;
            Ok(RecognitionCase { candidates, target, label })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let grid = ThresholdGrid { from: a.from, to: a.to, steps: a.steps };
    let curve = threshold_sweep(&cases, &grid).map_err(|e| match e {
        Error::InvalidThreshold(_) => usage(e.to_string()),
        e => e.into(),
    })?;
    emit(a.out.as_deref(), &sweep_csv(&curve))?;
    if pretty {
        if let Some(b) = best_threshold(&curve) {
            eprintln!("best threshold {:.2}: accuracy {:.3}", b.threshold, b.accuracy);
        }
    }
    Ok(())
}

fn render(a: RenderArgs) -> anyhow::Result<()> {
    let p = parse_polygon(&read_input(&a.input)?)?;
    let g = if a.graph { Some(visibility_graph(&p)?) } else { None };
    let spec = RenderSpec {
        width: a.size,
        height: a.size,
        visible_edges: a.graph,
        matrix: a.graph,
        ..RenderSpec::default()
    };
    emit(a.out.as_deref(), &render_svg(&p, g.as_ref(), &spec))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let pretty = cli.pretty;
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Vis(a) => vis(a, pretty),
        Command::Sdf(a) => sdf(a),
        Command::Contour(a) => contour(a),
        Command::Roundtrip(a) => roundtrip(a),
        Command::Tri(a) => tri(a, pretty),
        Command::FlipPath(a) => flip_path_cmd(a),
        Command::Augment(a) => augment_cmd(a),
        Command::Pipeline(a) => pipeline(a, pretty),
        Command::Score(a) => score(a, pretty),
        Command::Recognize(a) => recognize_cmd(a),
        Command::Sweep(a) => sweep(a, pretty),
        Command::Render(a) => render(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
