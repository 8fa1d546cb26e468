//! Augmented Dickey-Fuller test with Schwarz lag selection.
//!
//! The test regression is
//! `dy_t = [c] + [d t] + rho y_{t-1} + sum_{i=1..k} theta_i dy_{t-i} + e_t`
//! and the statistic is the classical t-ratio on `rho`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regression::{nested_rss, ols_fit, schwarz, Design, OlsFit};
use crate::synth::{self, NormalStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deterministic {
    #[serde(alias = "n")]
    None,
    #[serde(alias = "c")]
    Constant,
    #[serde(alias = "ct")]
    ConstantTrend,
}

impl Deterministic {
    fn count(self) -> usize {
        match self {
            Deterministic::None => 0,
            Deterministic::Constant => 1,
            Deterministic::ConstantTrend => 2,
        }
    }

    /// Short code used on the command line: `n`, `c` or `ct`.
    pub fn code(self) -> &'static str {
        match self {
            Deterministic::None => "n",
            Deterministic::Constant => "c",
            Deterministic::ConstantTrend => "ct",
        }
    }
}

impl std::str::FromStr for Deterministic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" | "none" => Ok(Deterministic::None),
            "c" | "constant" => Ok(Deterministic::Constant),
            "ct" | "constant_trend" => Ok(Deterministic::ConstantTrend),
            other => Err(Error::InvalidArgument(format!(
                "unknown deterministic specification `{other}` (expected n, c or ct)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitRootDecision {
    Stationary,
    UnitRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub p_value: f64,
    pub chosen_lag: usize,
    pub max_lag: usize,
    pub deterministic: Deterministic,
    pub nobs_effective: usize,
    pub level: f64,
    pub decision: UnitRootDecision,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PValueMethod {
    /// Log-linear interpolation in the Dickey-Fuller critical value grid.
    Table,
    /// Simulated null distribution at the exact sample size and lag.
    MonteCarlo { reps: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdfOptions {
    /// `None` selects `floor(12 (n/100)^0.25)`.
    pub max_lag: Option<usize>,
    pub deterministic: Deterministic,
    pub level: f64,
    pub p_value: PValueMethod,
}

impl Default for AdfOptions {
    fn default() -> Self {
        Self {
            max_lag: None,
            deterministic: Deterministic::ConstantTrend,
            level: 0.05,
            p_value: PValueMethod::Table,
        }
    }
}

/// `floor(12 (n/100)^(1/4))`.
pub fn default_max_lag(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

pub fn difference(series: &[f64]) -> Vec<f64> {
    series.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Regression rows `t = start..T`; columns ordered deterministics, `y_{t-1}`,
/// then `dy_{t-1} .. dy_{t-lags}` so every lag order is a leading sub-design.
fn adf_design(series: &[f64], lags: usize, det: Deterministic, start: usize) -> Result<(Vec<f64>, Design)> {
    let t_len = series.len();
    debug_assert!(start >= lags + 1);
    let rows = start..t_len;
    let dy = |t: usize| series[t] - series[t - 1];
    let mut cols: Vec<(String, Vec<f64>)> = Vec::with_capacity(det.count() + 1 + lags);
    if det != Deterministic::None {
        cols.push(("C".into(), vec![1.0; rows.len()]));
    }
    if det == Deterministic::ConstantTrend {
        cols.push(("@TREND".into(), rows.clone().map(|t| t as f64).collect()));
    }
    cols.push(("Y(-1)".into(), rows.clone().map(|t| series[t - 1]).collect()));
    for i in 1..=lags {
        cols.push((format!("D(Y(-{i}))"), rows.clone().map(|t| dy(t - i)).collect()));
    }
    let y: Vec<f64> = rows.map(dy).collect();
    Ok((y, Design::from_columns(cols)?))
}

fn check_series(series: &[f64], lags: usize, det: Deterministic) -> Result<()> {
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("series contains non-finite values".into()));
    }
    if series.len() <= lags + 3 + det.count() {
        return Err(Error::InsufficientData(format!(
            "{} observations for an ADF regression with {lags} lags",
            series.len()
        )));
    }
    if series.windows(2).all(|w| w[1] == w[0]) {
        return Err(Error::ZeroVariance("series is constant".into()));
    }
    Ok(())
}

/// Fits the ADF regression with `k` lagged differences on its largest sample
/// and returns the t-ratio on `y_{t-1}`.
pub fn adf_regression(series: &[f64], k: usize, det: Deterministic) -> Result<(f64, OlsFit)> {
    check_series(series, k, det)?;
    let (y, design) = adf_design(series, k, det, k + 1)?;
    let fit = ols_fit(&y, &design)?;
    let j = det.count();
    let se = (fit.sigma2() * fit.xtx_inverse[(j, j)]).sqrt();
    if !(se > 0.0) {
        return Err(Error::ZeroVariance("ADF regression has a perfect fit".into()));
    }
    Ok((fit.coefficients[j] / se, fit))
}

/// Lag order in `0..=max_lag` minimising the Schwarz criterion, all
/// candidates fitted on the sample that drops `max_lag + 1` leading rows.
/// Ties go to the smaller lag.
pub fn adf_select_lag(series: &[f64], max_lag: usize, det: Deterministic) -> Result<usize> {
    check_series(series, max_lag, det)?;
    if max_lag == 0 {
        return Ok(0);
    }
    let (y, design) = adf_design(series, max_lag, det, max_lag + 1)?;
    let n = y.len();
    if n <= design.ncols() {
        return Err(Error::InsufficientData(format!(
            "{n} observations for max lag {max_lag}"
        )));
    }
    let rss = nested_rss(&y, &design)?;
    let base = det.count() + 1;
    let mut best = (0usize, schwarz(rss[base - 1], n, base));
    for k in 1..=max_lag {
        let p = base + k;
        let sic = schwarz(rss[p - 1], n, p);
        if sic < best.1 - 1e-12 * best.1.abs().max(1.0) {
            best = (k, sic);
        }
    }
    Ok(best.0)
}

// Dickey-Fuller critical values of the t-ratio, rows n = 25, 50, 100, 250,
// 500, infinity; columns 1%, 2.5%, 5%, 10%.
const SIZES: [f64; 6] = [25.0, 50.0, 100.0, 250.0, 500.0, f64::INFINITY];
const LEVELS: [f64; 4] = [0.01, 0.025, 0.05, 0.10];
const CV_NONE: [[f64; 4]; 6] = [
    [-2.66, -2.26, -1.95, -1.60],
    [-2.62, -2.25, -1.95, -1.61],
    [-2.60, -2.24, -1.95, -1.61],
    [-2.58, -2.23, -1.95, -1.62],
    [-2.58, -2.23, -1.95, -1.62],
    [-2.58, -2.23, -1.95, -1.62],
];
const CV_CONST: [[f64; 4]; 6] = [
    [-3.75, -3.33, -3.00, -2.63],
    [-3.58, -3.22, -2.93, -2.60],
    [-3.51, -3.17, -2.89, -2.58],
    [-3.46, -3.14, -2.88, -2.57],
    [-3.44, -3.13, -2.87, -2.57],
    [-3.43, -3.12, -2.86, -2.57],
];
const CV_TREND: [[f64; 4]; 6] = [
    [-4.38, -3.95, -3.60, -3.24],
    [-4.15, -3.80, -3.50, -3.18],
    [-4.04, -3.73, -3.45, -3.15],
    [-3.99, -3.69, -3.43, -3.13],
    [-3.98, -3.68, -3.42, -3.13],
    [-3.96, -3.66, -3.41, -3.12],
];

/// Critical values at 1, 2.5, 5 and 10% for sample size `n`, interpolated
/// linearly in `1/n` between grid rows.
pub fn critical_values(det: Deterministic, n: usize) -> [f64; 4] {
    let table = match det {
        Deterministic::None => &CV_NONE,
        Deterministic::Constant => &CV_CONST,
        Deterministic::ConstantTrend => &CV_TREND,
    };
    let n = (n as f64).max(SIZES[0]);
    let inv = 1.0 / n;
    let i = SIZES.iter().rposition(|&s| s <= n).unwrap_or(0);
    if i + 1 >= SIZES.len() {
        return table[SIZES.len() - 1];
    }
    let (a, b) = (1.0 / SIZES[i], 1.0 / SIZES[i + 1]);
    let w = (a - inv) / (a - b);
    let mut out = [0.0; 4];
    for (j, o) in out.iter_mut().enumerate() {
        *o = table[i][j] + w * (table[i + 1][j] - table[i][j]);
    }
    out
}

/// P-value by log-linear interpolation across the critical values, with
/// linear extrapolation of `ln p` beyond the grid clamped to `[0.001, 0.999]`.
pub fn table_p_value(statistic: f64, det: Deterministic, n: usize) -> f64 {
    let cv = critical_values(det, n);
    let seg = if statistic <= cv[1] {
        0
    } else if statistic <= cv[2] {
        1
    } else {
        2
    };
    let (c0, c1) = (cv[seg], cv[seg + 1]);
    let (l0, l1) = (LEVELS[seg].ln(), LEVELS[seg + 1].ln());
    let lnp = l0 + (statistic - c0) / (c1 - c0) * (l1 - l0);
    lnp.exp().clamp(0.001, 0.999)
}

/// Fraction of simulated driftless random walks of the same length whose
/// ADF statistic (same lag and deterministics) is at or below `statistic`.
pub fn monte_carlo_p_value(
    statistic: f64,
    len: usize,
    lag: usize,
    det: Deterministic,
    reps: usize,
    seed: u64,
) -> Result<f64> {
    let stats = synth::monte_carlo(seed, reps, |s| {
        let mut z = NormalStream::seeded(s);
        let mut acc = 0.0;
        let walk: Vec<f64> = (0..len)
            .map(|_| {
                acc += z.next();
                acc
            })
            .collect();
        adf_regression(&walk, lag, det).map(|(t, _)| t)
    });
    let mut below = 0usize;
    for s in stats {
        if s? <= statistic {
            below += 1;
        }
    }
    Ok((below as f64 + 1.0) / (reps as f64 + 1.0))
}

/// Lag selection, final regression and p-value in one call.
pub fn adf_test(series: &[f64], opts: &AdfOptions) -> Result<AdfResult> {
    let det = opts.deterministic;
    let max_lag = match opts.max_lag {
        Some(m) => m,
        None => {
            let mut m = default_max_lag(series.len());
            while m > 0 && series.len() < 2 * (m + 1) + det.count() + 4 {
                m -= 1;
            }
            m
        }
    };
    let chosen_lag = adf_select_lag(series, max_lag, det)?;
    let (statistic, fit) = adf_regression(series, chosen_lag, det)?;
    let p_value = match opts.p_value {
        PValueMethod::Table => table_p_value(statistic, det, fit.nobs),
        PValueMethod::MonteCarlo { reps, seed } => {
            monte_carlo_p_value(statistic, series.len(), chosen_lag, det, reps, seed)?
        }
    };
    Ok(AdfResult {
        statistic,
        p_value,
        chosen_lag,
        max_lag,
        deterministic: det,
        nobs_effective: fit.nobs,
        level: opts.level,
        decision: if p_value < opts.level {
            UnitRootDecision::Stationary
        } else {
            UnitRootDecision::UnitRoot
        },
    })
}
