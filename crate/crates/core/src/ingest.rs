//! Loading per-asset CSV tables, weekly resampling, alignment and log
//! transforms.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Write;
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DATE_FORMAT: &str = "%Y-%m-%d";

/// Header names of the per-asset CSV columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub date: String,
    pub price: String,
    pub market_cap: String,
    pub volume: String,
    pub high: String,
    pub low: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            date: "date".into(),
            price: "price".into(),
            market_cap: "market_cap".into(),
            volume: "volume".into(),
            high: "high".into(),
            low: "low".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    /// Any rejected row aborts the load.
    Strict,
    /// Rejected rows are dropped and reported.
    #[default]
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frequency {
    Daily,
    Weekly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssetRow {
    pub date: NaiveDate,
    pub price: Option<f64>,
    pub market_cap: Option<f64>,
    pub volume: Option<f64>,
    pub high: Option<f64>,
    pub low: Option<f64>,
}

impl AssetRow {
    pub fn new(date: NaiveDate) -> Self {
        Self {
            date,
            price: None,
            market_cap: None,
            volume: None,
            high: None,
            low: None,
        }
    }

    fn check(&self) -> std::result::Result<(), String> {
        for (name, v) in [("price", self.price), ("high", self.high), ("low", self.low)] {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(format!("{name} must be positive, got {v}"));
                }
            }
        }
        for (name, v) in [("market_cap", self.market_cap), ("volume", self.volume)] {
            if let Some(v) = v {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(format!("{name} must be non-negative, got {v}"));
                }
            }
        }
        if let (Some(h), Some(l)) = (self.high, self.low) {
            if l > h {
                return Err(format!("low {l} exceeds high {h}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Price,
    MarketCap,
    Volume,
    High,
    Low,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Price => "price",
            Field::MarketCap => "market_cap",
            Field::Volume => "volume",
            Field::High => "high",
            Field::Low => "low",
        }
    }

    pub fn get(self, row: &AssetRow) -> Option<f64> {
        match self {
            Field::Price => row.price,
            Field::MarketCap => row.market_cap,
            Field::Volume => row.volume,
            Field::High => row.high,
            Field::Low => row.low,
        }
    }
}

/// Observations of one asset, sorted by strictly increasing date.
#[derive(Debug, Clone, PartialEq)]
pub struct RawAssetTable {
    pub asset_id: String,
    pub rows: Vec<AssetRow>,
}

impl RawAssetTable {
    /// Sorts the rows and checks every table invariant.
    pub fn new(asset_id: impl Into<String>, mut rows: Vec<AssetRow>) -> Result<Self> {
        let asset_id = asset_id.into();
        rows.sort_by_key(|r| r.date);
        for w in rows.windows(2) {
            if w[0].date == w[1].date {
                return Err(Error::DuplicateDate {
                    date: w[0].date.format(DATE_FORMAT).to_string(),
                    context: format!("asset `{asset_id}`"),
                });
            }
        }
        for r in &rows {
            r.check().map_err(|m| {
                Error::InvalidArgument(format!("asset `{asset_id}` at {}: {m}", r.date))
            })?;
        }
        Ok(Self { asset_id, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row_at(&self, date: NaiveDate) -> Option<&AssetRow> {
        self.rows
            .binary_search_by_key(&date, |r| r.date)
            .ok()
            .map(|i| &self.rows[i])
    }

    /// One field as a named series; absent values stay `None`.
    pub fn series(&self, field: Field, name: impl Into<String>) -> NamedSeries {
        NamedSeries {
            name: name.into(),
            dates: self.rows.iter().map(|r| r.date).collect(),
            values: self.rows.iter().map(|r| field.get(r)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowDiagnostic {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct LoadOutcome {
    pub table: RawAssetTable,
    pub rejected: Vec<RowDiagnostic>,
}

fn parse_number(raw: &str) -> std::result::Result<Option<f64>, String> {
    let s = raw.trim();
    if s.is_empty() {
        return Ok(None);
    }
    s.parse::<f64>()
        .map(Some)
        .map_err(|_| format!("cannot parse `{s}` as a number"))
}

pub fn parse_date(raw: &str) -> std::result::Result<NaiveDate, String> {
    NaiveDate::parse_from_str(raw.trim(), DATE_FORMAT)
        .map_err(|_| format!("malformed date `{}` (expected YYYY-MM-DD)", raw.trim()))
}

/// Reads one asset's CSV. The asset id is the file stem.
pub fn load_asset_csv(path: &Path, schema: &ColumnMap, strictness: Strictness) -> Result<LoadOutcome> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let headers = rdr.headers().map_err(|e| Error::csv(path, e))?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let date_col = find(&schema.date).ok_or_else(|| Error::MissingColumn {
        path: path.to_path_buf(),
        column: schema.date.clone(),
    })?;
    let cols = [
        find(&schema.price),
        find(&schema.market_cap),
        find(&schema.volume),
        find(&schema.high),
        find(&schema.low),
    ];

    let asset_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut by_date: BTreeMap<NaiveDate, AssetRow> = BTreeMap::new();
    let mut rejected = Vec::new();

    for (i, rec) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let parsed = (|| -> std::result::Result<AssetRow, String> {
            let date = parse_date(rec.get(date_col).unwrap_or(""))?;
            let mut vals = [None; 5];
            for (slot, col) in vals.iter_mut().zip(cols) {
                if let Some(c) = col {
                    *slot = parse_number(rec.get(c).unwrap_or(""))?;
                }
            }
            let row = AssetRow {
                date,
                price: vals[0],
                market_cap: vals[1],
                volume: vals[2],
                high: vals[3],
                low: vals[4],
            };
            row.check()?;
            Ok(row)
        })();
        let outcome = parsed.and_then(|row| {
            if by_date.contains_key(&row.date) {
                Err(format!("duplicate date {}", row.date.format(DATE_FORMAT)))
            } else {
                Ok(row)
            }
        });
        match outcome {
            Ok(row) => {
                by_date.insert(row.date, row);
            }
            Err(message) => {
                if strictness == Strictness::Strict {
                    if let Some(d) = message.strip_prefix("duplicate date ") {
                        return Err(Error::DuplicateDate {
                            date: d.to_string(),
                            context: path.display().to_string(),
                        });
                    }
                    return Err(Error::BadRow {
                        path: path.to_path_buf(),
                        line,
                        message,
                    });
                }
                rejected.push(RowDiagnostic { line, message });
            }
        }
    }

    let table = RawAssetTable {
        asset_id,
        rows: by_date.into_values().collect(),
    };
    Ok(LoadOutcome { table, rejected })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleRule {
    /// Last observation of the week for price and market cap.
    #[default]
    LastObs,
    /// Weekly mean for price and market cap.
    Mean,
}

/// Monday of the ISO week containing `date`; weekly periods are labelled by it.
pub fn week_start(date: NaiveDate) -> NaiveDate {
    let w = date.iso_week();
    NaiveDate::from_isoywd_opt(w.year(), w.week(), Weekday::Mon).expect("valid iso week")
}

/// Collapses daily rows into one row per ISO week. Volume is summed and
/// high/low are the weekly extremes under either rule.
pub fn resample_weekly(table: &RawAssetTable, rule: ResampleRule) -> RawAssetTable {
    let mut weeks: BTreeMap<NaiveDate, Vec<&AssetRow>> = BTreeMap::new();
    for r in &table.rows {
        weeks.entry(week_start(r.date)).or_default().push(r);
    }
    let rows = weeks
        .into_iter()
        .map(|(label, rows)| {
            let pick = |f: Field| -> Option<f64> {
                let vals: Vec<f64> = rows.iter().filter_map(|r| f.get(r)).collect();
                if vals.is_empty() {
                    return None;
                }
                match rule {
                    ResampleRule::LastObs => vals.last().copied(),
                    ResampleRule::Mean => Some(vals.iter().sum::<f64>() / vals.len() as f64),
                }
            };
            let fold = |f: Field, op: fn(f64, f64) -> f64| -> Option<f64> {
                rows.iter().filter_map(|r| f.get(r)).reduce(op)
            };
            AssetRow {
                date: label,
                price: pick(Field::Price),
                market_cap: pick(Field::MarketCap),
                volume: fold(Field::Volume, |a, b| a + b),
                high: fold(Field::High, f64::max),
                low: fold(Field::Low, f64::min),
            }
        })
        .collect();
    RawAssetTable {
        asset_id: table.asset_id.clone(),
        rows,
    }
}

/// Dated values of one variable; `None` marks an empty cell.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedSeries {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<Option<f64>>,
}

impl NamedSeries {
    pub fn new(name: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            dates,
            values: values.into_iter().map(Some).collect(),
        }
    }

    fn present(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.dates
            .iter()
            .zip(&self.values)
            .filter_map(|(d, v)| v.map(|v| (*d, v)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlignMode {
    #[default]
    Intersection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub values: Vec<f64>,
    pub missing: Vec<bool>,
}

impl Column {
    pub fn full(values: Vec<f64>) -> Self {
        let missing = vec![false; values.len()];
        Self { values, missing }
    }
}

/// Time-indexed table of named real-valued columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelDataset {
    pub index: Vec<NaiveDate>,
    pub frequency: Frequency,
    pub columns: IndexMap<String, Column>,
}

/// Builds a panel on the dates where every series has a value. An empty cell
/// strictly inside the resulting window is an error rather than a silently
/// dropped row.
pub fn align(series: &[NamedSeries], mode: AlignMode) -> Result<PanelDataset> {
    let AlignMode::Intersection = mode;
    let Some(first) = series.first() else {
        return Err(Error::InvalidArgument("align needs at least one series".into()));
    };
    let mut dates: BTreeSet<NaiveDate> = first.present().map(|(d, _)| d).collect();
    for s in &series[1..] {
        let own: BTreeSet<NaiveDate> = s.present().map(|(d, _)| d).collect();
        dates = dates.intersection(&own).copied().collect();
    }
    let names = || {
        series
            .iter()
            .map(|s| s.name.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    };
    if dates.is_empty() {
        return Err(Error::NoOverlap(names()));
    }
    let lo = *dates.first().unwrap();
    let hi = *dates.last().unwrap();
    for s in series {
        for (d, v) in s.dates.iter().zip(&s.values) {
            if v.is_none() && *d > lo && *d < hi {
                return Err(Error::MissingCell {
                    column: s.name.clone(),
                    date: d.format(DATE_FORMAT).to_string(),
                });
            }
        }
    }
    let index: Vec<NaiveDate> = dates.into_iter().collect();
    let mut columns = IndexMap::new();
    for s in series {
        if columns.contains_key(&s.name) {
            return Err(Error::InvalidArgument(format!("duplicate series name `{}`", s.name)));
        }
        let lookup: BTreeMap<NaiveDate, f64> = s.present().collect();
        let values = index.iter().map(|d| lookup[d]).collect();
        columns.insert(s.name.clone(), Column::full(values));
    }
    Ok(PanelDataset {
        frequency: detect_frequency(&index),
        index,
        columns,
    })
}

fn detect_frequency(index: &[NaiveDate]) -> Frequency {
    if index.len() >= 2 && index.windows(2).all(|w| (w[1] - w[0]).num_days() >= 7) {
        Frequency::Weekly
    } else {
        Frequency::Daily
    }
}

/// Natural log of the named columns; other columns are left untouched.
pub fn log_transform(panel: &PanelDataset, columns: &[&str]) -> Result<PanelDataset> {
    let mut out = panel.clone();
    for &name in columns {
        let col = out
            .columns
            .get_mut(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        for (i, v) in col.values.iter_mut().enumerate() {
            if col.missing[i] {
                continue;
            }
            if !(*v > 0.0) {
                return Err(Error::NonPositive {
                    column: name.to_string(),
                    date: panel.index[i].format(DATE_FORMAT).to_string(),
                    value: *v,
                });
            }
            *v = v.ln();
        }
    }
    Ok(out)
}

impl PanelDataset {
    pub fn new(index: Vec<NaiveDate>, columns: IndexMap<String, Column>) -> Result<Self> {
        for (name, c) in &columns {
            if c.values.len() != index.len() || c.missing.len() != index.len() {
                return Err(Error::Dimension(format!(
                    "column `{name}` has {} rows, index has {}",
                    c.values.len(),
                    index.len()
                )));
            }
        }
        Ok(Self {
            frequency: detect_frequency(&index),
            index,
            columns,
        })
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    /// Values of a column with no missing cells.
    pub fn series(&self, name: &str) -> Result<&[f64]> {
        let col = self
            .columns
            .get(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        if let Some(i) = col.missing.iter().position(|m| *m) {
            return Err(Error::MissingCell {
                column: name.to_string(),
                date: self.index[i].format(DATE_FORMAT).to_string(),
            });
        }
        Ok(&col.values)
    }

    /// Restricts the panel to `names`, dropping leading and trailing rows
    /// where any of them is missing.
    pub fn select(&self, names: &[&str]) -> Result<PanelDataset> {
        let series: Vec<NamedSeries> = names
            .iter()
            .map(|&n| {
                let col = self
                    .columns
                    .get(n)
                    .ok_or_else(|| Error::UnknownVariable(n.to_string()))?;
                Ok(NamedSeries {
                    name: n.to_string(),
                    dates: self.index.clone(),
                    values: col
                        .values
                        .iter()
                        .zip(&col.missing)
                        .map(|(v, m)| (!m).then_some(*v))
                        .collect(),
                })
            })
            .collect::<Result<_>>()?;
        align(&series, AlignMode::Intersection)
    }

    /// Reads `date,<name1>,<name2>,...`; empty fields are missing.
    pub fn from_csv(path: &Path) -> Result<PanelDataset> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::csv(path, e))?;
        let headers = rdr.headers().map_err(|e| Error::csv(path, e))?.clone();
        if headers.get(0) != Some("date") {
            return Err(Error::MissingColumn {
                path: path.to_path_buf(),
                column: "date".into(),
            });
        }
        let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        let mut rows: Vec<(NaiveDate, Vec<Option<f64>>)> = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i as u64 + 2;
            let rec = rec.map_err(|e| Error::csv(path, e))?;
            let bad = |message| Error::BadRow {
                path: path.to_path_buf(),
                line,
                message,
            };
            let date = parse_date(rec.get(0).unwrap_or("")).map_err(bad)?;
            let vals = (1..=names.len())
                .map(|j| parse_number(rec.get(j).unwrap_or("")))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|m| Error::BadRow {
                    path: path.to_path_buf(),
                    line,
                    message: m,
                })?;
            rows.push((date, vals));
        }
        rows.sort_by_key(|(d, _)| *d);
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateDate {
                date: w[0].0.format(DATE_FORMAT).to_string(),
                context: path.display().to_string(),
            });
        }
        let index: Vec<NaiveDate> = rows.iter().map(|(d, _)| *d).collect();
        let mut columns = IndexMap::new();
        for (j, name) in names.iter().enumerate() {
            let values = rows.iter().map(|(_, v)| v[j].unwrap_or(f64::NAN)).collect();
            let missing = rows.iter().map(|(_, v)| v[j].is_none()).collect();
            columns.insert(name.clone(), Column { values, missing });
        }
        PanelDataset::new(index, columns)
    }

    /// Columns as named series, for merging with other sources via `align`.
    pub fn to_series(&self) -> Vec<NamedSeries> {
        self.columns
            .iter()
            .map(|(name, c)| NamedSeries {
                name: name.clone(),
                dates: self.index.clone(),
                values: c
                    .values
                    .iter()
                    .zip(&c.missing)
                    .map(|(v, m)| (!m).then_some(*v))
                    .collect(),
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["date".to_string()];
        header.extend(self.columns.keys().cloned());
        w.write_record(&header).map_err(|e| Error::csv("<panel>", e))?;
        for (i, d) in self.index.iter().enumerate() {
            let mut rec = vec![d.format(DATE_FORMAT).to_string()];
            for c in self.columns.values() {
                rec.push(if c.missing[i] {
                    String::new()
                } else {
                    format!("{}", c.values[i])
                });
            }
            w.write_record(&rec).map_err(|e| Error::csv("<panel>", e))?;
        }
        w.flush().map_err(|e| Error::io("<panel>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(f)
    }
}

/// Reads a `date,<name1>,...` file into named series, snapping dates to the
/// Monday of their ISO week when `weekly` is set.
pub fn load_exogenous_csv(path: &Path, weekly: bool) -> Result<Vec<NamedSeries>> {
    let panel = PanelDataset::from_csv(path)?;
    let mut series = panel.to_series();
    if weekly {
        let snapped: Vec<NaiveDate> = panel.index.iter().map(|d| week_start(*d)).collect();
        if let Some(w) = snapped.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateDate {
                date: w[0].format(DATE_FORMAT).to_string(),
                context: format!("{} after snapping to ISO weeks", path.display()),
            });
        }
        for s in &mut series {
            s.dates = snapped.clone();
        }
    }
    Ok(series)
}
