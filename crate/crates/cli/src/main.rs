use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ardl_lab::ardl::{classify, BoundLevel, Decision};
use ardl_lab::index::{build_index, VolumeMode};
use ardl_lab::ingest::{load_asset_csv, resample_weekly, ColumnMap, PanelDataset, ResampleRule, Strictness};
use ardl_lab::pipeline::{
    adf_options, bounds_for, load_sources, run_dependent, run_pipeline, split_names, AdfRow, CaseChoice,
    DependentReport, PipelineConfig, ReportBundle, ReportFormat,
};
use ardl_lab::report::{self, adf_table};
use ardl_lab::synth::{generate, DgpConfig, DgpKind};
use ardl_lab::unitroot::{adf_test, difference, Deterministic};

/// ARDL bound testing, error-correction models and index construction.
///
/// Set ARDL_LAB_THREADS to cap the worker pool. Exit status is 0 on
/// success, 1 on error and 2 when a bound test is inconclusive at the
/// configured level (5% unless changed).
#[derive(Parser)]
#[command(name = "ardl-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a panel from a known data-generating process.
    Synth(SynthArgs),
    /// Build the market-cap weighted index from per-asset CSV files.
    Index(IndexArgs),
    /// Augmented Dickey-Fuller test on one column.
    Adf(AdfArgs),
    /// Select, fit and report an ARDL model for one dependent variable.
    Fit(ModelArgs),
    /// Bound test, from a fitted model or from a given F statistic.
    Bounds(BoundsArgs),
    /// Restricted error-correction model.
    Ecm(ModelArgs),
    /// CUSUM path and lines for the fitted unrestricted model.
    Cusum(ModelArgs),
    /// Full pipeline from a configuration file.
    Run(RunArgs),
    /// Re-render a summary.json produced by `run`.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    WhiteNoise,
    Ar1,
    Rw,
    Coint,
    Walks,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 400)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    #[arg(long, default_value_t = -0.25, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    rho: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    drift: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 100)]
    burn_in: usize,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IndexArgs {
    /// Directory of `date,price,market_cap,volume,high,low` files.
    #[arg(long)]
    constituents: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    weights_out: Option<PathBuf>,
    /// Keep daily periods instead of resampling to ISO weeks.
    #[arg(long)]
    daily: bool,
    #[arg(long, value_enum, default_value = "last-obs")]
    resample: Resample,
    /// Abort on the first bad row instead of skipping it.
    #[arg(long)]
    strict: bool,
    /// Treat a missing constituent volume as an error.
    #[arg(long)]
    strict_volume: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Resample {
    LastObs,
    Mean,
}

#[derive(Args)]
struct AdfArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    column: String,
    #[arg(long)]
    max_lag: Option<usize>,
    /// n, c or ct.
    #[arg(long, default_value = "ct")]
    det: String,
    /// Test the first difference instead of the level.
    #[arg(long)]
    diff: bool,
    #[arg(long)]
    log: bool,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    /// Simulated p-value with this many replications.
    #[arg(long)]
    pvalue_mc: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Panel CSV with a `date` column.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    dep: Option<String>,
    /// Comma-separated regressors.
    #[arg(long, default_value = "")]
    x: String,
    /// Comma-separated control regressors.
    #[arg(long, default_value = "")]
    z: String,
    /// Comma-separated columns to log before estimation.
    #[arg(long, default_value = "")]
    log: String,
    #[arg(long, default_value_t = 4)]
    max_lag: usize,
    /// auto, I, II, III or IV.
    #[arg(long, default_value = "auto")]
    case: String,
    /// per_variable or full.
    #[arg(long, default_value = "per_variable")]
    search: String,
    #[arg(long, default_value_t = 5)]
    hac_bandwidth: usize,
    #[arg(long, default_value_t = 2)]
    bg_lags: usize,
    #[arg(long)]
    bounds_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    /// csv or text.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct BoundsArgs {
    /// Classify this F statistic against the bounds for `--k` and a fixed
    /// `--case` instead of fitting a model.
    #[arg(long)]
    f: Option<f64>,
    /// Number of regressors, with `--f`.
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct RunArgs {
    /// Flat TOML configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// csv or text.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    dep: Option<String>,
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    z: Option<String>,
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    max_lag: Option<usize>,
    #[arg(long)]
    search: Option<String>,
    #[arg(long)]
    panel: Option<PathBuf>,
    /// Any configuration key, as `key=value`; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    summary: PathBuf,
    /// csv or text.
    #[arg(long, default_value = "text")]
    format: String,
    #[arg(long)]
    out_dir: PathBuf,
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
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("ARDL_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("ARDL_LAB_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        bail!("ARDL_LAB_THREADS must be at least 1");
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the worker pool")?;
    Ok(())
}

fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Synth(a) => synth(a),
        Command::Index(a) => index(a),
        Command::Adf(a) => adf(a),
        Command::Fit(a) => model(a, Output::Fit),
        Command::Ecm(a) => model(a, Output::Ecm),
        Command::Cusum(a) => model(a, Output::Cusum),
        Command::Bounds(a) => bounds(a),
        Command::Run(a) => run(a),
        Command::Report(a) => rerender(a),
    }
}

fn write_out(path: Option<&Path>, body: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(body)?;
            Ok(())
        }
    }
}

fn synth(a: SynthArgs) -> Result<u8> {
    let kind = match a.kind {
        Kind::WhiteNoise => DgpKind::WhiteNoise,
        Kind::Ar1 => DgpKind::Ar1 { rho: a.rho },
        Kind::Rw => DgpKind::RandomWalk { drift: a.drift },
        Kind::Coint => DgpKind::CointegratedPair {
            beta: a.beta,
            lambda: a.lambda,
            mu: a.mu,
        },
        Kind::Walks => DgpKind::IndependentWalks,
    };
    let cfg = DgpConfig {
        sigma: a.sigma,
        burn_in: a.burn_in,
        ..DgpConfig::new(kind, a.n, a.seed)
    };
    let mut buf = Vec::new();
    generate(&cfg)?.write_csv(&mut buf)?;
    write_out(a.out.as_deref(), &buf)?;
    Ok(0)
}

fn index(a: IndexArgs) -> Result<u8> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(&a.constituents)
        .with_context(|| format!("reading {}", a.constituents.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no CSV files in {}", a.constituents.display());
    }
    let strictness = if a.strict { Strictness::Strict } else { Strictness::Lenient };
    let rule = match a.resample {
        Resample::LastObs => ResampleRule::LastObs,
        Resample::Mean => ResampleRule::Mean,
    };
    let mut tables = Vec::new();
    for f in &files {
        let outcome = load_asset_csv(f, &ColumnMap::default(), strictness)?;
        for d in &outcome.rejected {
            eprintln!("warning: {}: line {}: {}", f.display(), d.line, d.message);
        }
        tables.push(if a.daily { outcome.table } else { resample_weekly(&outcome.table, rule) });
    }
    let mode = if a.strict_volume { VolumeMode::Strict } else { VolumeMode::Lenient };
    let idx = build_index(&tables, mode)?;
    let mut buf = Vec::new();
    idx.write_csv(&mut buf)?;
    write_out(a.out.as_deref(), &buf)?;
    if let Some(p) = &a.weights_out {
        let mut w = Vec::new();
        idx.write_weights_csv(&mut w)?;
        write_out(Some(p), &w)?;
    }
    Ok(0)
}

fn adf(a: AdfArgs) -> Result<u8> {
    let panel = PanelDataset::from_csv(&a.input)?;
    let mut series = panel.select(&[a.column.as_str()])?.series(&a.column)?.to_vec();
    if a.log {
        if let Some(v) = series.iter().find(|v| **v <= 0.0) {
            bail!("cannot take log of `{}`: value {v} is not positive", a.column);
        }
        series.iter_mut().for_each(|v| *v = v.ln());
    }
    let transform = if a.diff {
        series = difference(&series);
        "first_difference"
    } else {
        "level"
    };
    let cfg = PipelineConfig {
        adf_max_lag: a.max_lag,
        adf_det: a.det.parse::<Deterministic>()?,
        adf_pvalue_mc: a.pvalue_mc,
        seed: a.seed,
        level: a.level,
        ..PipelineConfig::default()
    };
    let row = AdfRow {
        series: a.column.clone(),
        transform: transform.into(),
        result: adf_test(&series, &adf_options(&cfg, 0))?,
    };
    print!("{}", adf_table("ADF", &[row]).to_csv());
    Ok(0)
}

#[derive(Clone, Copy, PartialEq)]
enum Output {
    Fit,
    Bounds,
    Ecm,
    Cusum,
}

fn model_config(a: &ModelArgs) -> Result<PipelineConfig> {
    Ok(PipelineConfig {
        panel: Some(a.input.clone().context("--input is required")?),
        dependents: vec![a.dep.clone().context("--dep is required")?],
        x: split_names(&a.x),
        z: split_names(&a.z),
        log: split_names(&a.log),
        max_lag: a.max_lag,
        case: a.case.parse::<CaseChoice>()?,
        search: a.search.parse()?,
        hac_bandwidth: a.hac_bandwidth,
        bg_lags: a.bg_lags,
        bounds_file: a.bounds_file.clone(),
        level: a.level,
        format: a.format.parse()?,
        ..PipelineConfig::default()
    })
}

fn fit_one(a: &ModelArgs) -> Result<(PipelineConfig, DependentReport)> {
    let cfg = model_config(a)?;
    cfg.validate()?;
    let sources = load_sources(&cfg)?;
    let r = run_dependent(&sources, &cfg.dependents[0], &cfg, &bounds_for(&cfg)?)?;
    Ok((cfg, r))
}

fn exit_for(r: &DependentReport, cfg: &PipelineConfig) -> Result<u8> {
    let inconclusive = r.decision_at(cfg.bound_level()?) == Decision::Inconclusive;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    Ok(if inconclusive { 2 } else { 0 })
}

fn model(a: ModelArgs, out: Output) -> Result<u8> {
    let (cfg, r) = fit_one(&a)?;
    let f = cfg.format;
    let sep = if f == ReportFormat::Text { "\n" } else { "" };
    let mut body = String::new();
    match out {
        Output::Fit => {
            for t in [
                report::ardl_table(&r),
                report::bounds_table(&r.dep, &r.bounds),
                report::longrun_table(&r.dep, &r.long_run),
                report::ecm_table(&r),
            ] {
                if f == ReportFormat::Csv {
                    body += &format!("# {}\n", t.title);
                }
                body += &t.render(f);
                body += sep;
            }
        }
        Output::Bounds => body += &report::bounds_table(&r.dep, &r.bounds).render(f),
        Output::Ecm => body += &report::ecm_table(&r).render(f),
        Output::Cusum => {
            let mut buf = Vec::new();
            r.cusum.write_csv(&mut buf)?;
            body += &String::from_utf8(buf)?;
        }
    }
    print!("{body}");
    exit_for(&r, &cfg)
}

fn bounds(a: BoundsArgs) -> Result<u8> {
    let Some(f) = a.f else {
        return model(a.model, Output::Bounds);
    };
    let k = a.k.context("--f needs --k")?;
    let case = match a.model.case.parse::<CaseChoice>()? {
        CaseChoice::Fixed(c) => c,
        CaseChoice::Auto => bail!("--f needs a fixed --case (I, II, III or IV)"),
    };
    let cfg = PipelineConfig {
        bounds_file: a.model.bounds_file.clone(),
        level: a.model.level,
        ..PipelineConfig::default()
    };
    let table = bounds_for(&cfg)?;
    println!("case,k,level,lower,upper,f_stat,decision");
    let decisions = classify(f, case, k, &table)?;
    for d in &decisions {
        println!(
            "{case},{k},{},{:.2},{:.2},{},{}",
            d.level.label(),
            d.lower,
            d.upper,
            report::num(f),
            d.decision.name()
        );
    }
    let level = cfg.bound_level()?;
    let at = decisions.iter().find(|d| d.level == level).expect("three levels");
    Ok(if at.decision == Decision::Inconclusive { 2 } else { 0 })
}

const PATH_KEYS: [&str; 5] = ["constituents_dir", "exogenous", "panel", "bounds_file", "out_dir"];

fn parse_value(raw: &str) -> toml::Value {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn run_config(a: &RunArgs) -> Result<PipelineConfig> {
    let mut table = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let mut t: toml::Table = text
                .parse()
                .with_context(|| format!("parsing {}", p.display()))?;
            let base = p.parent().unwrap_or(Path::new("."));
            for key in PATH_KEYS {
                if let Some(toml::Value::String(s)) = t.get(key) {
                    if Path::new(s).is_relative() {
                        let joined = base.join(s).to_string_lossy().into_owned();
                        t.insert(key.into(), toml::Value::String(joined));
                    }
                }
            }
            t
        }
        None => toml::Table::new(),
    };
    let mut put = |k: &str, v: toml::Value| {
        table.insert(k.to_string(), v);
    };
    let s = |v: &str| toml::Value::String(v.to_string());
    let p = |v: &Path| toml::Value::String(v.to_string_lossy().into_owned());
    if let Some(v) = &a.out_dir {
        put("out_dir", p(v));
    }
    if let Some(v) = &a.panel {
        put("panel", p(v));
    }
    for (key, val) in [("format", &a.format), ("dep", &a.dep), ("x", &a.x), ("z", &a.z), ("case", &a.case), ("search", &a.search)] {
        if let Some(v) = val {
            put(key, s(v));
        }
    }
    if let Some(v) = a.max_lag {
        put("max_lag", toml::Value::Integer(v as i64));
    }
    for kv in &a.set {
        let (k, v) = kv.split_once('=').with_context(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
        let k = k.trim();
        let v = v.trim();
        let val = if PATH_KEYS.contains(&k) { s(v) } else { parse_value(v) };
        put(k, val);
    }
    if table.contains_key("dep") && table.contains_key("dependents") {
        let dep = table.remove("dep").expect("checked");
        table.insert("dependents".into(), dep);
    }
    Ok(PipelineConfig::from_table(table)?)
}

fn run(a: RunArgs) -> Result<u8> {
    let cfg = run_config(&a)?;
    let bundle = run_pipeline(&cfg)?;
    report::emit_report(&bundle, cfg.format, &cfg.out_dir)?;
    summarize(&bundle, &cfg.out_dir)
}

fn summarize(bundle: &ReportBundle, out_dir: &Path) -> Result<u8> {
    let level = BoundLevel::parse(&bundle.level.to_string())?;
    for r in &bundle.reports {
        println!(
            "{}: {} case {} F = {} ({} at {}), lambda = {}",
            r.dep,
            r.label,
            r.case,
            report::num(r.bounds.f_stat),
            r.decision_at(level).name(),
            level.label(),
            report::num(r.ecm.lambda)
        );
        for w in &r.warnings {
            eprintln!("warning: {}: {w}", r.dep);
        }
    }
    println!("report written to {}", out_dir.display());
    Ok(if bundle.any_inconclusive() { 2 } else { 0 })
}

fn rerender(a: ReportArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&a.summary).with_context(|| format!("reading {}", a.summary.display()))?;
    let bundle = ReportBundle::from_json(&text)?;
    let format: ReportFormat = a.format.parse()?;
    report::emit_report(&bundle, format, &a.out_dir)?;
    summarize(&bundle, &a.out_dir)
}
