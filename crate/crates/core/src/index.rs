//! Market-cap weighted index: price, total volume and log high/low
//! volatility per period.

use std::collections::BTreeSet;
use std::io::Write;

use chrono::NaiveDate;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Column, PanelDataset, RawAssetTable, DATE_FORMAT};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMode {
    /// A present constituent with no volume is an error.
    Strict,
    /// Missing volumes count as zero.
    #[default]
    Lenient,
}

fn fmt(d: NaiveDate) -> String {
    d.format(DATE_FORMAT).to_string()
}

/// `MC_i / sum_j MC_j` over the constituents with a market cap at `period`.
/// Assets not yet listed are left out of the denominator.
pub fn compute_weights(constituents: &[RawAssetTable], period: NaiveDate) -> Result<IndexMap<String, f64>> {
    let caps: Vec<(&str, f64)> = constituents
        .iter()
        .filter_map(|t| {
            t.row_at(period)
                .and_then(|r| r.market_cap)
                .map(|mc| (t.asset_id.as_str(), mc))
        })
        .collect();
    let total: f64 = caps.iter().map(|(_, mc)| mc).sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateWeights(fmt(period)));
    }
    Ok(caps
        .into_iter()
        .map(|(id, mc)| (id.to_string(), mc / total))
        .collect())
}

fn weighted(
    constituents: &[RawAssetTable],
    weights: &IndexMap<String, f64>,
    period: NaiveDate,
    field: crate::ingest::Field,
) -> Result<f64> {
    let mut acc = 0.0;
    for t in constituents {
        let Some(&w) = weights.get(&t.asset_id) else {
            continue;
        };
        if w == 0.0 {
            continue;
        }
        let v = t.row_at(period).and_then(|r| field.get(r)).ok_or_else(|| {
            Error::MissingConstituentValue {
                asset: t.asset_id.clone(),
                field: field.name(),
                date: fmt(period),
            }
        })?;
        acc += w * v;
    }
    Ok(acc)
}

/// `sum_i w_i P_i`.
pub fn index_price(constituents: &[RawAssetTable], period: NaiveDate) -> Result<f64> {
    let w = compute_weights(constituents, period)?;
    weighted(constituents, &w, period, crate::ingest::Field::Price)
}

/// Sum of constituent volumes at `period`.
pub fn index_volume(constituents: &[RawAssetTable], period: NaiveDate, mode: VolumeMode) -> Result<f64> {
    let mut total = 0.0;
    for t in constituents {
        let Some(row) = t.row_at(period) else {
            continue;
        };
        match (row.volume, mode) {
            (Some(v), _) => total += v,
            (None, VolumeMode::Lenient) => {}
            (None, VolumeMode::Strict) => {
                return Err(Error::MissingConstituentValue {
                    asset: t.asset_id.clone(),
                    field: "volume",
                    date: fmt(period),
                })
            }
        }
    }
    Ok(total)
}

/// Index high and low: the period's weights applied to constituent highs and
/// lows.
pub fn index_extremes(constituents: &[RawAssetTable], period: NaiveDate) -> Result<(f64, f64)> {
    let w = compute_weights(constituents, period)?;
    Ok((
        weighted(constituents, &w, period, crate::ingest::Field::High)?,
        weighted(constituents, &w, period, crate::ingest::Field::Low)?,
    ))
}

/// `ln(high / low)`.
pub fn index_volatility(high: f64, low: f64) -> Result<f64> {
    if !(low > 0.0) {
        return Err(Error::InvalidArgument(format!("low price must be positive, got {low}")));
    }
    if high < low {
        return Err(Error::InvalidArgument(format!("high {high} below low {low}")));
    }
    Ok((high / low).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexSeries {
    pub index: Vec<NaiveDate>,
    pub marp: Vec<f64>,
    pub marv: Vec<f64>,
    pub mars: Vec<f64>,
    pub weights: Vec<IndexMap<String, f64>>,
}

struct Period {
    marp: f64,
    marv: f64,
    mars: f64,
    weights: IndexMap<String, f64>,
}

/// Builds the index on every date where some constituent reports a market cap.
pub fn build_index(constituents: &[RawAssetTable], volume_mode: VolumeMode) -> Result<IndexSeries> {
    let dates: Vec<NaiveDate> = constituents
        .iter()
        .flat_map(|t| t.rows.iter().filter(|r| r.market_cap.is_some()).map(|r| r.date))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if dates.is_empty() {
        return Err(Error::InsufficientData("no constituent reports a market cap".into()));
    }
    let periods = par::map(&dates, |&d| -> Result<Period> {
        let weights = compute_weights(constituents, d)?;
        let marp = weighted(constituents, &weights, d, crate::ingest::Field::Price)?;
        let high = weighted(constituents, &weights, d, crate::ingest::Field::High)?;
        let low = weighted(constituents, &weights, d, crate::ingest::Field::Low)?;
        Ok(Period {
            marp,
            marv: index_volume(constituents, d, volume_mode)?,
            mars: index_volatility(high, low)?,
            weights,
        })
    });
    let mut out = IndexSeries {
        index: dates,
        marp: Vec::new(),
        marv: Vec::new(),
        mars: Vec::new(),
        weights: Vec::new(),
    };
    for p in periods {
        let p = p?;
        out.marp.push(p.marp);
        out.marv.push(p.marv);
        out.mars.push(p.mars);
        out.weights.push(p.weights);
    }
    Ok(out)
}

impl IndexSeries {
    /// Panel with columns `MARP`, `MARV`, `MARS`.
    pub fn to_panel(&self) -> Result<PanelDataset> {
        let mut columns = IndexMap::new();
        columns.insert("MARP".to_string(), Column::full(self.marp.clone()));
        columns.insert("MARV".to_string(), Column::full(self.marv.clone()));
        columns.insert("MARS".to_string(), Column::full(self.mars.clone()));
        PanelDataset::new(self.index.clone(), columns)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e| Error::csv("<index>", e);
        w.write_record(["date", "marp", "marv", "mars"]).map_err(err)?;
        for i in 0..self.index.len() {
            w.write_record([
                fmt(self.index[i]),
                self.marp[i].to_string(),
                self.marv[i].to_string(),
                self.mars[i].to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| Error::io("<index>", e))
    }

    pub fn write_weights_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e| Error::csv("<weights>", e);
        w.write_record(["date", "asset_id", "weight"]).map_err(err)?;
        for (d, ws) in self.index.iter().zip(&self.weights) {
            for (id, wt) in ws {
                w.write_record([fmt(*d), id.clone(), wt.to_string()]).map_err(err)?;
            }
        }
        w.flush().map_err(|e| Error::io("<weights>", e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::AssetRow;

    fn day() -> NaiveDate {
        NaiveDate::from_ymd_opt(2018, 1, 1).unwrap()
    }

    fn asset(id: &str, price: f64, mc: f64, vol: Option<f64>, high: f64, low: f64) -> RawAssetTable {
        RawAssetTable::new(
            id,
            vec![AssetRow {
                date: day(),
                price: Some(price),
                market_cap: Some(mc),
                volume: vol,
                high: Some(high),
                low: Some(low),
            }],
        )
        .unwrap()
    }

    #[test]
    fn weights_fixtures() {
        let one = [asset("a", 100.0, 5.0, Some(1.0), 101.0, 99.0)];
        assert_eq!(compute_weights(&one, day()).unwrap()["a"], 1.0);
        assert_eq!(index_price(&one, day()).unwrap(), 100.0);

        let two = [
            asset("a", 10.0, 3.0, Some(5.0), 11.0, 9.0),
            asset("b", 2.0, 1.0, Some(7.0), 3.0, 1.0),
        ];
        let w = compute_weights(&two, day()).unwrap();
        assert_eq!((w["a"], w["b"]), (0.75, 0.25));
        assert!((index_price(&two, day()).unwrap() - 8.0).abs() < 1e-15);
        assert_eq!(index_volume(&two, day(), VolumeMode::Strict).unwrap(), 12.0);

        let zero = [
            asset("a", 10.0, 0.0, None, 11.0, 9.0),
            asset("b", 2.0, 0.0, None, 3.0, 1.0),
        ];
        assert!(matches!(compute_weights(&zero, day()), Err(Error::DegenerateWeights(_))));
        assert_eq!(index_volume(&zero, day(), VolumeMode::Lenient).unwrap(), 0.0);
        assert!(index_volume(&zero, day(), VolumeMode::Strict).is_err());
    }

    #[test]
    fn absent_assets_leave_the_denominator() {
        let later = RawAssetTable::new(
            "late",
            vec![AssetRow {
                date: day() + chrono::Duration::weeks(1),
                price: Some(1.0),
                market_cap: Some(100.0),
                volume: Some(1.0),
                high: Some(1.0),
                low: Some(1.0),
            }],
        )
        .unwrap();
        let tables = [asset("a", 10.0, 3.0, Some(5.0), 11.0, 9.0), later];
        let w = compute_weights(&tables, day()).unwrap();
        assert_eq!(w.len(), 1);
        let idx = build_index(&tables, VolumeMode::Lenient).unwrap();
        assert_eq!(idx.index.len(), 2);
        assert_eq!(idx.marp, vec![10.0, 1.0]);
        assert_eq!(idx.mars[1], 0.0);
    }

    #[test]
    fn missing_price_for_weighted_asset_errors() {
        let mut t = asset("a", 10.0, 3.0, Some(5.0), 11.0, 9.0);
        t.rows[0].price = None;
        assert!(matches!(
            index_price(&[t], day()),
            Err(Error::MissingConstituentValue { field: "price", .. })
        ));
    }

    #[test]
    fn volatility_fixtures() {
        assert_eq!(index_volatility(5.0, 5.0).unwrap(), 0.0);
        assert!((index_volatility(std::f64::consts::E * 2.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((index_volatility(12.0, 10.0).unwrap() - 0.182_321_556_793_954_6).abs() < 1e-15);
        assert!(index_volatility(1.0, 0.0).is_err());
        assert!(index_volatility(1.0, 2.0).is_err());
    }

    #[test]
    fn csv_outputs() {
        let two = [
            asset("a", 10.0, 3.0, Some(5.0), 12.0, 10.0),
            asset("b", 2.0, 1.0, Some(7.0), 2.0, 2.0),
        ];
        let idx = build_index(&two, VolumeMode::Strict).unwrap();
        let mut buf = Vec::new();
        idx.write_weights_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "date,asset_id,weight\n2018-01-01,a,0.75\n2018-01-01,b,0.25\n"
        );
        let mut buf = Vec::new();
        idx.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("date,marp,marv,mars\n2018-01-01,8,12,"));
    }
}
