//! Schwarz-criterion search over lag orders on a common sample.

use std::cmp::Ordering;
use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{level_columns, response, short_run_columns, ArdlData, ArdlSpec, Case};
use crate::error::{Error, Result};
use crate::par;
use crate::regression::{nested_rss, schwarz, Design};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Search {
    /// Coordinate descent from `(1, 0, .., 0)`, one lag order at a time,
    /// until a full pass changes nothing (at most `MAX_PASSES`).
    #[default]
    PerVariable,
    /// Every lag vector in `{1..max} x {0..max}^k`.
    Full,
}

impl std::str::FromStr for Search {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_variable" | "per-variable" => Ok(Search::PerVariable),
            "full" => Ok(Search::Full),
            other => Err(Error::InvalidArgument(format!(
                "unknown search `{other}` (expected per_variable or full)"
            ))),
        }
    }
}

pub const MAX_PASSES: usize = 10;
const SIC_TIE_TOL: f64 = 1e-10;
const CHUNK: usize = 2048;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// `(m, n_1, .., n_k)`.
    pub lags: Vec<usize>,
    pub sic: f64,
    pub rss: f64,
    pub nparams: usize,
}

impl Candidate {
    pub fn total_order(&self) -> usize {
        self.lags.iter().sum()
    }

    /// Ordering used for selection: lower SIC first; SIC values within a
    /// relative `1e-10` count as equal and fall back to the smaller total lag
    /// order, then the lexicographically smaller lag vector.
    pub fn compare(&self, other: &Candidate) -> Ordering {
        let scale = self.sic.abs().max(other.sic.abs()).max(1.0);
        if (self.sic - other.sic).abs() > SIC_TIE_TOL * scale {
            return self.sic.partial_cmp(&other.sic).unwrap_or(Ordering::Equal);
        }
        self.total_order()
            .cmp(&other.total_order())
            .then_with(|| self.lags.cmp(&other.lags))
    }
}

fn better(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.compare(&a) == Ordering::Less { b } else { a }),
        (a, b) => a.or(b),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub spec: ArdlSpec,
    pub best: Candidate,
    pub search: Search,
    pub evaluated: usize,
    pub rank_deficient: usize,
    pub nobs: usize,
}

/// Every column any candidate can use, laid out like the unrestricted
/// design at maximal lags.
struct Pool {
    x: DMatrix<f64>,
    names: Vec<String>,
    y: Vec<f64>,
    det: usize,
    max_lag: usize,
    k: usize,
}

impl Pool {
    fn new(data: &ArdlData, case: Case, max_lag: usize) -> Result<Self> {
        let mut cols = short_run_columns(
            data,
            max_lag,
            &vec![max_lag; data.k()],
            case.has_intercept(),
            case.has_trend(),
            max_lag,
        );
        cols.extend(level_columns(data, max_lag));
        let design = Design::from_columns(cols)?;
        Ok(Self {
            x: design.x,
            names: design.names,
            y: response(data, max_lag),
            det: usize::from(case.has_intercept()) + usize::from(case.has_trend()),
            max_lag,
            k: data.k(),
        })
    }

    fn columns(&self, lags: &[usize]) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.det).collect();
        idx.extend((0..lags[0]).map(|i| self.det + i));
        for (j, &n) in lags[1..].iter().enumerate() {
            let off = self.det + self.max_lag + j * (self.max_lag + 1);
            idx.extend(off..=off + n);
        }
        let levels = self.det + self.max_lag + self.k * (self.max_lag + 1);
        idx.extend(levels..levels + self.k + 1);
        idx
    }

    /// `None` when the candidate design is rank deficient.
    fn evaluate(&self, lags: &[usize]) -> Option<Candidate> {
        let idx = self.columns(lags);
        let n = self.y.len();
        let x = DMatrix::from_fn(n, idx.len(), |r, c| self.x[(r, idx[c])]);
        let names = idx.iter().map(|&j| self.names[j].clone()).collect();
        let design = Design::new(x, names).ok()?;
        let rss = *nested_rss(&self.y, &design).ok()?.last()?;
        let p = idx.len();
        Some(Candidate {
            lags: lags.to_vec(),
            sic: schwarz(rss, n, p),
            rss,
            nparams: p,
        })
    }
}

fn decode(mut i: usize, k: usize, max_lag: usize) -> Vec<usize> {
    let mut lags = vec![0; k + 1];
    for slot in lags[1..].iter_mut().rev() {
        *slot = i % (max_lag + 1);
        i /= max_lag + 1;
    }
    lags[0] = 1 + i;
    lags
}

/// Lag orders minimising SIC for a fixed deterministic case. All candidates
/// share the sample that drops the first `max_lag + 1` rows.
pub fn select_spec(
    data: &ArdlData,
    x_vars: &[&str],
    z_vars: &[&str],
    case: Case,
    max_lag: usize,
    search: Search,
) -> Result<Selection> {
    let names: Vec<&str> = x_vars.iter().chain(z_vars).copied().collect();
    if !names.iter().copied().eq(data.reg_names.iter().map(String::as_str)) {
        return Err(Error::InvalidArgument(
            "regressor lists do not match the data".into(),
        ));
    }
    if max_lag == 0 {
        return Err(Error::InvalidArgument("maximum lag must be at least 1".into()));
    }
    let k = data.k();
    let widest = ArdlSpec {
        dep: data.dep_name.clone(),
        x_vars: x_vars.iter().map(|s| s.to_string()).collect(),
        z_vars: z_vars.iter().map(|s| s.to_string()).collect(),
        dep_lags: max_lag,
        reg_lags: vec![max_lag; k],
        case,
        max_lag,
    };
    let n_eff = data.effective_len(max_lag);
    if n_eff < 10 + widest.design_width() {
        return Err(Error::InsufficientData(format!(
            "{n_eff} observations after trimming {} rows; the search needs at least {}",
            max_lag + 1,
            10 + widest.design_width()
        )));
    }
    let pool = Pool::new(data, case, max_lag)?;

    let (best, evaluated, failed) = match search {
        Search::Full => {
            let total = max_lag * (max_lag + 1).pow(k as u32);
            let chunks = total.div_ceil(CHUNK);
            let per_chunk = par::map_range(chunks, |c| {
                let mut best = None;
                let mut failed = 0usize;
                for i in c * CHUNK..((c + 1) * CHUNK).min(total) {
                    match pool.evaluate(&decode(i, k, max_lag)) {
                        Some(cand) => best = better(best, Some(cand)),
                        None => failed += 1,
                    }
                }
                (best, failed)
            });
            let mut best = None;
            let mut failed = 0;
            for (b, f) in per_chunk {
                best = better(best, b);
                failed += f;
            }
            (best, total, failed)
        }
        Search::PerVariable => {
            let mut seen: HashMap<Vec<usize>, Option<Candidate>> = HashMap::new();
            let mut current = vec![0; k + 1];
            current[0] = 1;
            let mut best = pool.evaluate(&current);
            seen.insert(current.clone(), best.clone());
            for _ in 0..MAX_PASSES {
                let before = current.clone();
                for pos in 0..=k {
                    let lo = usize::from(pos == 0);
                    let trials: Vec<Vec<usize>> = (lo..=max_lag)
                        .map(|v| {
                            let mut l = current.clone();
                            l[pos] = v;
                            l
                        })
                        .filter(|l| !seen.contains_key(l))
                        .collect();
                    let fits = par::map(&trials, |l| pool.evaluate(l));
                    for (l, f) in trials.into_iter().zip(fits) {
                        seen.insert(l, f);
                    }
                    let mut local = None;
                    for v in lo..=max_lag {
                        let mut l = current.clone();
                        l[pos] = v;
                        local = better(local, seen[&l].clone());
                    }
                    if let Some(c) = &local {
                        current = c.lags.clone();
                    }
                    best = better(best, local);
                }
                if current == before {
                    break;
                }
            }
            let failed = seen.values().filter(|c| c.is_none()).count();
            (best, seen.len(), failed)
        }
    };

    let best = best.ok_or_else(|| Error::RankDeficient {
        columns: vec![format!("all {evaluated} candidate designs")],
    })?;
    let spec = ArdlSpec {
        dep_lags: best.lags[0],
        reg_lags: best.lags[1..].to_vec(),
        ..widest
    };
    Ok(Selection {
        spec,
        best,
        search,
        evaluated,
        rank_deficient: failed,
        nobs: n_eff,
    })
}
