//! End-to-end run: ingest, index, unit-root screening, lag search, bound
//! test, long-run multipliers, error-correction model, diagnostics and
//! CUSUM, for one or more dependent variables.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ardl::{
    bound_test, build_ect, choose_case, fit_recm, fit_unrestricted, long_run, select_spec, ArdlData,
    ArdlFit, BoundLevel, BoundTestResult, BoundsTable, Case, CaseEvidence, Decision, LongRunEstimates,
    Search, Selection, DEFAULT_MAX_LAG,
};
use crate::error::{Error, Result};
use crate::index::{build_index, VolumeMode};
use crate::ingest::{
    align, load_asset_csv, load_exogenous_csv, log_transform, resample_weekly, AlignMode, ColumnMap,
    Frequency, NamedSeries, PanelDataset, ResampleRule, Strictness,
};
use crate::par;
use crate::regression::{
    breusch_godfrey_lm, breusch_pagan_godfrey, durbin_watson, CoefInference, LmTest, OlsFit,
    DEFAULT_HAC_BANDWIDTH,
};
use crate::stability::{cusum_test, CusumResult};
use crate::unitroot::{adf_test, difference, AdfOptions, AdfResult, Deterministic, PValueMethod};

/// `auto` or a fixed case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CaseChoice {
    #[default]
    Auto,
    Fixed(Case),
}

impl std::str::FromStr for CaseChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("auto") {
            Ok(CaseChoice::Auto)
        } else {
            s.parse().map(CaseChoice::Fixed)
        }
    }
}

impl std::fmt::Display for CaseChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseChoice::Auto => f.write_str("auto"),
            CaseChoice::Fixed(c) => c.fmt(f),
        }
    }
}

impl Serialize for CaseChoice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CaseChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Csv,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "text" | "txt" => Ok(ReportFormat::Text),
            other => Err(Error::InvalidArgument(format!(
                "unknown report format `{other}` (expected csv or text)"
            ))),
        }
    }
}

/// Accepts either a TOML array of strings or one comma-separated string.
fn name_list<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(String),
        Many(Vec<String>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(s) => split_names(&s),
        OneOrMany::Many(v) => v.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
    })
}

pub fn split_names(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

/// Flat key-value run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Directory of per-asset CSV files; their index becomes MARP, MARV, MARS.
    pub constituents_dir: Option<PathBuf>,
    /// `date,<name>,...` file of further weekly series.
    pub exogenous: Option<PathBuf>,
    /// Prepared panel CSV, e.g. the output of the generator.
    pub panel: Option<PathBuf>,
    pub frequency: Frequency,
    pub resample: ResampleRule,
    pub strict: bool,
    pub volume_mode: VolumeMode,
    /// Columns replaced by their natural log before estimation.
    #[serde(deserialize_with = "name_list")]
    pub log: Vec<String>,
    #[serde(alias = "dep", deserialize_with = "name_list")]
    pub dependents: Vec<String>,
    #[serde(deserialize_with = "name_list")]
    pub x: Vec<String>,
    #[serde(deserialize_with = "name_list")]
    pub z: Vec<String>,
    pub max_lag: usize,
    pub case: CaseChoice,
    pub search: Search,
    pub hac_bandwidth: usize,
    pub bg_lags: usize,
    pub adf_max_lag: Option<usize>,
    pub adf_det: Deterministic,
    /// Simulated ADF p-values with this many replications when set.
    pub adf_pvalue_mc: Option<usize>,
    pub seed: u64,
    /// Significance for ADF decisions, the exit-code bound decision and the
    /// CUSUM lines; one of 0.10, 0.05, 0.01.
    pub level: f64,
    pub bounds_file: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub format: ReportFormat,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            constituents_dir: None,
            exogenous: None,
            panel: None,
            frequency: Frequency::Weekly,
            resample: ResampleRule::LastObs,
            strict: false,
            volume_mode: VolumeMode::Lenient,
            log: Vec::new(),
            dependents: Vec::new(),
            x: Vec::new(),
            z: Vec::new(),
            max_lag: DEFAULT_MAX_LAG,
            case: CaseChoice::Auto,
            search: Search::PerVariable,
            hac_bandwidth: DEFAULT_HAC_BANDWIDTH,
            bg_lags: 2,
            adf_max_lag: None,
            adf_det: Deterministic::ConstantTrend,
            adf_pvalue_mc: None,
            seed: 0,
            level: 0.05,
            bounds_file: None,
            out_dir: PathBuf::from("report"),
            format: ReportFormat::Csv,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_table(t: toml::Table) -> Result<Self> {
        t.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&s)
    }

    /// Relative paths in the config are taken from `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        for p in [&mut self.constituents_dir, &mut self.exogenous, &mut self.panel, &mut self.bounds_file]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if self.out_dir.is_relative() {
            self.out_dir = base.join(&self.out_dir);
        }
    }

    pub fn bound_level(&self) -> Result<BoundLevel> {
        BoundLevel::parse(&self.level.to_string())
    }

    pub fn validate(&self) -> Result<()> {
        if self.constituents_dir.is_none() && self.exogenous.is_none() && self.panel.is_none() {
            return Err(Error::Config(
                "no input: set constituents_dir, exogenous or panel".into(),
            ));
        }
        for p in [&self.constituents_dir, &self.exogenous, &self.panel, &self.bounds_file]
            .into_iter()
            .flatten()
        {
            if !p.exists() {
                return Err(Error::Config(format!("{} does not exist", p.display())));
            }
        }
        if self.dependents.is_empty() {
            return Err(Error::Config("no dependent variable".into()));
        }
        if self.x.is_empty() && self.z.is_empty() {
            return Err(Error::Config("no regressors in x or z".into()));
        }
        self.bound_level()?;
        Ok(())
    }
}

/// Every input series, unaligned.
pub fn load_sources(cfg: &PipelineConfig) -> Result<Vec<NamedSeries>> {
    let weekly = cfg.frequency == Frequency::Weekly;
    let mut out = Vec::new();
    if let Some(dir) = &cfg.constituents_dir {
        let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(Error::Config(format!("no CSV files in {}", dir.display())));
        }
        let strictness = if cfg.strict { Strictness::Strict } else { Strictness::Lenient };
        let tables = files
            .iter()
            .map(|f| {
                let t = load_asset_csv(f, &ColumnMap::default(), strictness)?.table;
                Ok(if weekly { resample_weekly(&t, cfg.resample) } else { t })
            })
            .collect::<Result<Vec<_>>>()?;
        out.extend(build_index(&tables, cfg.volume_mode)?.to_panel()?.to_series());
    }
    if let Some(p) = &cfg.exogenous {
        out.extend(load_exogenous_csv(p, weekly)?);
    }
    if let Some(p) = &cfg.panel {
        out.extend(PanelDataset::from_csv(p)?.to_series());
    }
    for (i, s) in out.iter().enumerate() {
        if out[..i].iter().any(|o| o.name == s.name) {
            return Err(Error::Config(format!("column `{}` supplied by more than one input", s.name)));
        }
    }
    Ok(out)
}

/// Intersection-aligned panel of `names`, logged where configured.
pub fn model_panel(sources: &[NamedSeries], names: &[&str], log: &[String]) -> Result<PanelDataset> {
    let picked = names
        .iter()
        .map(|n| {
            sources
                .iter()
                .find(|s| s.name == *n)
                .cloned()
                .ok_or_else(|| Error::UnknownVariable(n.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let panel = align(&picked, AlignMode::Intersection)?;
    let logged: Vec<&str> = names.iter().copied().filter(|n| log.iter().any(|l| l == n)).collect();
    if logged.is_empty() {
        Ok(panel)
    } else {
        log_transform(&panel, &logged)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfRow {
    pub series: String,
    pub transform: String,
    pub result: AdfResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitStats {
    pub nobs: usize,
    pub nparams: usize,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub durbin_watson: Option<f64>,
    pub sic: f64,
    pub bg: Option<LmTest>,
    pub bg_lags: usize,
    pub bpg: Option<LmTest>,
}

impl FitStats {
    fn new(fit: &OlsFit, x: &nalgebra::DMatrix<f64>, bg_lags: usize) -> Self {
        let (n, p) = (fit.nobs as f64, fit.nparams as f64);
        Self {
            nobs: fit.nobs,
            nparams: fit.nparams,
            r_squared: fit.r_squared,
            adj_r_squared: 1.0 - (1.0 - fit.r_squared) * (n - 1.0) / (n - p),
            durbin_watson: durbin_watson(&fit.residuals).ok(),
            sic: fit.sic,
            bg: breusch_godfrey_lm(fit, x, bg_lags).ok(),
            bg_lags,
            bpg: breusch_pagan_godfrey(fit, x).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcmSummary {
    pub coefficients: Vec<CoefInference>,
    pub lambda: f64,
    pub stats: FitStats,
    pub warning: Option<String>,
}

/// Everything reported for one dependent variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependentReport {
    pub dep: String,
    pub sample_start: String,
    pub sample_end: String,
    pub adf: Vec<AdfRow>,
    pub selection: Selection,
    pub case_evidence: Option<CaseEvidence>,
    pub case: Case,
    pub label: String,
    pub coefficients: Vec<CoefInference>,
    pub stats: FitStats,
    pub bounds: BoundTestResult,
    pub long_run: LongRunEstimates,
    pub ecm: EcmSummary,
    pub cusum: CusumResult,
    pub warnings: Vec<String>,
}

impl DependentReport {
    pub fn decision_at(&self, level: BoundLevel) -> Decision {
        self.bounds.at(level).decision
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub level: f64,
    pub format: ReportFormat,
    pub reports: Vec<DependentReport>,
}

impl ReportBundle {
    /// True when some bound test is inconclusive at the configured level.
    pub fn any_inconclusive(&self) -> bool {
        let level = BoundLevel::parse(&self.level.to_string()).unwrap_or(BoundLevel::Five);
        self.reports.iter().any(|r| r.decision_at(level) == Decision::Inconclusive)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("summary: {e}")))
    }
}

pub fn adf_options(cfg: &PipelineConfig, salt: u64) -> AdfOptions {
    AdfOptions {
        max_lag: cfg.adf_max_lag,
        deterministic: cfg.adf_det,
        level: cfg.level,
        p_value: match cfg.adf_pvalue_mc {
            Some(reps) => PValueMethod::MonteCarlo {
                reps,
                seed: cfg.seed.wrapping_add(salt),
            },
            None => PValueMethod::Table,
        },
    }
}

/// Level and first-difference ADF rows for each column of `panel`.
pub fn adf_screen(panel: &PanelDataset, names: &[&str], cfg: &PipelineConfig) -> Result<Vec<AdfRow>> {
    let mut rows = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let s = panel.series(name)?;
        let d = difference(s);
        for (transform, series, salt) in [("level", s, 2 * i as u64), ("first_difference", &d[..], 2 * i as u64 + 1)] {
            rows.push(AdfRow {
                series: name.to_string(),
                transform: transform.to_string(),
                result: adf_test(series, &adf_options(cfg, salt))?,
            });
        }
    }
    Ok(rows)
}

/// Lag search, case choice and the final unrestricted fit.
pub fn estimate(
    data: &ArdlData,
    x: &[&str],
    z: &[&str],
    cfg: &PipelineConfig,
) -> Result<(Selection, Option<CaseEvidence>, ArdlFit)> {
    let search_case = match cfg.case {
        CaseChoice::Auto => Case::III,
        CaseChoice::Fixed(c) => c,
    };
    let selection = select_spec(data, x, z, search_case, cfg.max_lag, cfg.search)?;
    let evidence = match cfg.case {
        CaseChoice::Auto => Some(choose_case(data, &selection.spec, cfg.hac_bandwidth)?),
        CaseChoice::Fixed(_) => None,
    };
    let mut spec = selection.spec.clone();
    if let Some(e) = &evidence {
        spec.case = e.case;
    }
    let fit = fit_unrestricted(data, &spec, cfg.hac_bandwidth)?;
    Ok((selection, evidence, fit))
}

pub fn run_dependent(
    sources: &[NamedSeries],
    dep: &str,
    cfg: &PipelineConfig,
    bounds: &BoundsTable,
) -> Result<DependentReport> {
    let x: Vec<&str> = cfg.x.iter().map(String::as_str).collect();
    let z: Vec<&str> = cfg.z.iter().map(String::as_str).collect();
    let mut names = vec![dep];
    names.extend(x.iter().chain(&z));
    let panel = model_panel(sources, &names, &cfg.log)?;
    let adf = adf_screen(&panel, &names, cfg)?;
    let mut warnings: Vec<String> = adf
        .iter()
        .filter(|r| r.transform == "first_difference" && r.result.p_value >= cfg.level)
        .map(|r| format!("{}: first difference still has a unit root; bounds assume at most I(1)", r.series))
        .collect();

    let mut regs = x.clone();
    regs.extend(&z);
    let data = ArdlData::from_panel(&panel, dep, &regs)?;
    let (selection, case_evidence, fit) = estimate(&data, &x, &z, cfg)?;
    let stats = FitStats::new(&fit.fit, &fit.design.x, cfg.bg_lags);
    let bounds = bound_test(&fit, bounds)?;
    let lr = long_run(&fit)?;
    warnings.extend(lr.warning.iter().cloned());
    let ect = build_ect(&data, &fit)?;
    let ecm = fit_recm(&data, &fit.spec, &ect, cfg.hac_bandwidth)?;
    warnings.extend(ecm.warning.iter().cloned());
    let cusum = cusum_test(&fit.response, &fit.design.x, cfg.bound_level()?)?;
    if !cusum.stable {
        warnings.push(format!(
            "CUSUM leaves the {} band at t = {}",
            cusum.level.label(),
            cusum.first_crossing.unwrap_or_default()
        ));
    }
    let first = crate::ardl::ArdlData::first_row(cfg.max_lag);
    Ok(DependentReport {
        dep: dep.to_string(),
        sample_start: panel.index[first].to_string(),
        sample_end: panel.index[panel.len() - 1].to_string(),
        adf,
        selection,
        case_evidence,
        case: fit.spec.case,
        label: fit.spec.label(),
        coefficients: fit.inference(),
        stats,
        bounds,
        long_run: lr,
        ecm: EcmSummary {
            coefficients: ecm.inference(),
            lambda: ecm.lambda,
            stats: FitStats::new(&ecm.fit, &ecm.design.x, cfg.bg_lags),
            warning: ecm.warning.clone(),
        },
        cusum,
        warnings,
    })
}

pub fn bounds_for(cfg: &PipelineConfig) -> Result<BoundsTable> {
    let mut t = BoundsTable::embedded();
    if let Some(p) = &cfg.bounds_file {
        t.merge_csv(p)?;
    }
    Ok(t)
}

/// Runs every dependent variable (in parallel) and collects the reports in
/// configuration order.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<ReportBundle> {
    cfg.validate()?;
    let sources = load_sources(cfg)?;
    for name in cfg.dependents.iter().chain(&cfg.x).chain(&cfg.z) {
        if !sources.iter().any(|s| &s.name == name) {
            return Err(Error::UnknownVariable(name.clone()));
        }
    }
    let bounds = bounds_for(cfg)?;
    let reports = par::map(&cfg.dependents, |dep| run_dependent(&sources, dep, cfg, &bounds))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ReportBundle {
        level: cfg.level,
        format: cfg.format,
        reports,
    })
}
