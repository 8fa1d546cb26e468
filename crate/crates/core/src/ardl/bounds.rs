//! Wald F bound test on the lagged level terms.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ArdlFit, Case};
use crate::error::{Error, Result};
use crate::regression::{self, wald_f};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundLevel {
    #[serde(rename = "10%")]
    Ten,
    #[serde(rename = "5%")]
    Five,
    #[serde(rename = "1%")]
    One,
}

impl BoundLevel {
    pub const ALL: [BoundLevel; 3] = [BoundLevel::Ten, BoundLevel::Five, BoundLevel::One];

    pub fn alpha(self) -> f64 {
        match self {
            BoundLevel::Ten => 0.10,
            BoundLevel::Five => 0.05,
            BoundLevel::One => 0.01,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BoundLevel::Ten => "10%",
            BoundLevel::Five => "5%",
            BoundLevel::One => "1%",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().trim_end_matches('%') {
            "10" | "0.10" | "0.1" => Ok(BoundLevel::Ten),
            "5" | "0.05" => Ok(BoundLevel::Five),
            "1" | "0.01" => Ok(BoundLevel::One),
            other => Err(Error::InvalidArgument(format!(
                "unsupported significance level `{other}` (expected 10, 5 or 1)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Cointegrated,
    Inconclusive,
    NoCointegration,
}

impl Decision {
    pub fn name(self) -> &'static str {
        match self {
            Decision::Cointegrated => "cointegrated",
            Decision::Inconclusive => "inconclusive",
            Decision::NoCointegration => "no_cointegration",
        }
    }
}

/// Three-way rule: above the upper bound rejects, below the lower bound
/// accepts, anything in between is inconclusive.
pub fn classify_f(f: f64, lower: f64, upper: f64) -> Decision {
    if f > upper {
        Decision::Cointegrated
    } else if f < lower {
        Decision::NoCointegration
    } else {
        Decision::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundDecision {
    pub level: BoundLevel,
    pub lower: f64,
    pub upper: f64,
    pub decision: Decision,
}

/// Lower (all I(0)) and upper (all I(1)) critical bounds keyed by case and
/// number of regressors.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsTable {
    rows: BTreeMap<(Case, usize), [Option<(f64, f64)>; 3]>,
}

type Row = [(f64, f64); 3];

// Columns 10%, 5%, 1%.
const EMBEDDED: [(Case, usize, Row); 8] = [
    (Case::I, 8, [(1.66, 2.79), (1.91, 3.11), (2.45, 3.79)]),
    (Case::II, 8, [(1.85, 2.85), (2.11, 3.15), (2.62, 3.77)]),
    (Case::III, 8, [(1.95, 3.06), (2.22, 3.39), (2.79, 4.10)]),
    (Case::IV, 8, [(2.13, 3.09), (2.38, 3.41), (2.93, 4.06)]),
    (Case::I, 1, [(2.44, 3.28), (3.15, 4.11), (4.81, 6.02)]),
    (Case::II, 1, [(3.02, 3.51), (3.62, 4.16), (4.94, 5.58)]),
    (Case::III, 1, [(4.04, 4.78), (4.94, 5.73), (6.84, 7.84)]),
    (Case::IV, 1, [(4.05, 4.49), (4.68, 5.15), (6.10, 6.73)]),
];

impl Default for BoundsTable {
    fn default() -> Self {
        Self::embedded()
    }
}

impl BoundsTable {
    pub fn empty() -> Self {
        Self {
            rows: BTreeMap::new(),
        }
    }

    /// Asymptotic bounds for k = 1 and k = 8.
    pub fn embedded() -> Self {
        let mut t = Self::empty();
        for (case, k, row) in EMBEDDED {
            for (level, (lo, hi)) in BoundLevel::ALL.into_iter().zip(row) {
                t.insert(case, k, level, lo, hi).expect("embedded bounds are ordered");
            }
        }
        t
    }

    pub fn insert(&mut self, case: Case, k: usize, level: BoundLevel, lower: f64, upper: f64) -> Result<()> {
        if !(lower.is_finite() && upper.is_finite() && lower >= 0.0 && lower <= upper) {
            return Err(Error::InvalidArgument(format!(
                "bounds ({lower}, {upper}) for case {case}, k = {k} must satisfy 0 <= lower <= upper"
            )));
        }
        self.rows.entry((case, k)).or_insert([None; 3])[level.index()] = Some((lower, upper));
        Ok(())
    }

    pub fn get(&self, case: Case, k: usize, level: BoundLevel) -> Option<(f64, f64)> {
        self.rows.get(&(case, k)).and_then(|r| r[level.index()])
    }

    /// All three levels for `(case, k)`, or `MissingBounds`.
    pub fn row(&self, case: Case, k: usize) -> Result<Row> {
        let missing = || Error::MissingBounds {
            case: case.to_string(),
            k,
        };
        let r = self.rows.get(&(case, k)).ok_or_else(missing)?;
        let mut out = [(0.0, 0.0); 3];
        for (o, v) in out.iter_mut().zip(r) {
            *o = v.ok_or_else(missing)?;
        }
        Ok(out)
    }

    /// Reads `case,k,level,lower,upper` rows (level as 10, 5, 1 with or
    /// without `%`) on top of the current entries.
    pub fn merge_csv(&mut self, path: &Path) -> Result<()> {
        #[derive(Deserialize)]
        struct Rec {
            case: String,
            k: usize,
            level: String,
            lower: f64,
            upper: f64,
        }
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::csv(path, e))?;
        for (i, rec) in rdr.deserialize::<Rec>().enumerate() {
            let line = i as u64 + 2;
            let bad = |message: String| Error::BadRow {
                path: path.to_path_buf(),
                line,
                message,
            };
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let case: Case = rec.case.parse().map_err(|e: Error| bad(e.to_string()))?;
            let level = BoundLevel::parse(&rec.level).map_err(|e| bad(e.to_string()))?;
            self.insert(case, rec.k, level, rec.lower, rec.upper)
                .map_err(|e| bad(e.to_string()))?;
        }
        Ok(())
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut t = Self::empty();
        t.merge_csv(path)?;
        Ok(t)
    }
}

/// Decisions at 10, 5 and 1% for a given F.
pub fn classify(f: f64, case: Case, k: usize, table: &BoundsTable) -> Result<Vec<BoundDecision>> {
    let row = table.row(case, k)?;
    Ok(BoundLevel::ALL
        .into_iter()
        .zip(row)
        .map(|(level, (lower, upper))| BoundDecision {
            level,
            lower,
            upper,
            decision: classify_f(f, lower, upper),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTestResult {
    pub f_stat: f64,
    pub k: usize,
    pub case: Case,
    pub num_restrictions: usize,
    pub restricted_rss: f64,
    pub decisions: Vec<BoundDecision>,
}

impl BoundTestResult {
    pub fn at(&self, level: BoundLevel) -> &BoundDecision {
        &self.decisions[level.index()]
    }
}

/// Column indices jointly set to zero under the null: all levels, plus
/// the intercept in Case II and the trend in Case IV.
pub fn restricted_columns(fit: &ArdlFit) -> Vec<usize> {
    let mut idx = fit.level_indices();
    match fit.spec.case {
        Case::II => idx.extend(fit.intercept_index()),
        Case::IV => idx.extend(fit.trend_index()),
        Case::I | Case::III => {}
    }
    idx.sort_unstable();
    idx
}

/// Classical-variance F test of no level relationship.
pub fn bound_test(fit: &ArdlFit, table: &BoundsTable) -> Result<BoundTestResult> {
    let drop = restricted_columns(fit);
    let restricted = fit.design.without(&drop);
    let restricted_rss = regression::ols_fit(&fit.response, &restricted)?.rss;
    let q = drop.len();
    let f_stat = wald_f(&fit.fit, restricted_rss, q)?;
    let k = fit.spec.k();
    Ok(BoundTestResult {
        f_stat,
        k,
        case: fit.spec.case,
        num_restrictions: q,
        restricted_rss,
        decisions: classify(f_stat, fit.spec.case, k, table)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn embedded_k8_rows_match_published() {
        let t = BoundsTable::embedded();
        assert_eq!(t.get(Case::II, 8, BoundLevel::One), Some((2.62, 3.77)));
        assert_eq!(t.get(Case::III, 8, BoundLevel::One), Some((2.79, 4.10)));
        assert_eq!(t.get(Case::I, 8, BoundLevel::Five), Some((1.91, 3.11)));
        assert_eq!(t.get(Case::IV, 8, BoundLevel::Ten), Some((2.13, 3.09)));
        assert!(t.get(Case::I, 3, BoundLevel::Five).is_none());
    }

    #[test]
    fn classification_fixtures() {
        let t = BoundsTable::embedded();
        let d = classify(8.96, Case::II, 8, &t).unwrap();
        assert_eq!(d[2].decision, Decision::Cointegrated);
        let d = classify(1.0, Case::II, 8, &t).unwrap();
        assert_eq!(d[0].decision, Decision::NoCointegration);
        let d = classify(3.0, Case::I, 8, &t).unwrap();
        assert_eq!(d[1].decision, Decision::Inconclusive);
        assert!(matches!(
            classify(3.0, Case::I, 5, &t),
            Err(Error::MissingBounds { k: 5, .. })
        ));
    }

    #[test]
    fn boundary_values_are_inconclusive() {
        assert_eq!(classify_f(3.11, 1.91, 3.11), Decision::Inconclusive);
        assert_eq!(classify_f(1.91, 1.91, 3.11), Decision::Inconclusive);
    }

    #[test]
    fn decision_is_monotone_in_f() {
        let rank = |d: Decision| match d {
            Decision::NoCointegration => 0,
            Decision::Inconclusive => 1,
            Decision::Cointegrated => 2,
        };
        for case in Case::ALL {
            for level in BoundLevel::ALL {
                let (lo, hi) = BoundsTable::embedded().get(case, 8, level).unwrap();
                let mut prev = 0;
                for i in 0..1000 {
                    let r = rank(classify_f(i as f64 * 0.01, lo, hi));
                    assert!(r >= prev);
                    prev = r;
                }
            }
        }
    }

    #[test]
    fn csv_bounds_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "case,k,level,lower,upper").unwrap();
        writeln!(f, "III,3,10%,2.72,3.77").unwrap();
        writeln!(f, "III,3,5,3.23,4.35").unwrap();
        writeln!(f, "III,3,1,4.29,5.61").unwrap();
        drop(f);
        let t = BoundsTable::from_csv(&path).unwrap();
        assert_eq!(t.row(Case::III, 3).unwrap()[1], (3.23, 4.35));
        assert!(t.row(Case::II, 3).is_err());

        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "case,k,level,lower,upper\nIII,3,5,4.0,3.0\n").unwrap();
        assert!(matches!(
            BoundsTable::from_csv(&bad),
            Err(Error::BadRow { line: 2, .. })
        ));
    }
}
