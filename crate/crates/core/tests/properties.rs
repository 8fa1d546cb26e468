use ardl_lab::ardl::{classify, long_run_multiplier, BoundLevel, BoundsTable, Case, Decision};
use ardl_lab::index::{compute_weights, index_price};
use ardl_lab::ingest::{AssetRow, RawAssetTable};
use ardl_lab::regression::{ols_fit, Design};
use ardl_lab::report::{num, stars};
use ardl_lab::unitroot::{adf_regression, Deterministic};
use chrono::NaiveDate;
use proptest::prelude::*;

fn day() -> NaiveDate {
    NaiveDate::from_ymd_opt(2018, 1, 1).unwrap()
}

fn tables(assets: &[(f64, f64)], cap_scale: f64, price_scale: f64) -> Vec<RawAssetTable> {
    assets
        .iter()
        .enumerate()
        .map(|(i, (price, cap))| {
            RawAssetTable::new(
                format!("a{i}"),
                vec![AssetRow {
                    date: day(),
                    price: Some(price * price_scale),
                    market_cap: Some(cap * cap_scale),
                    volume: Some(1.0),
                    high: Some(price * price_scale),
                    low: Some(price * price_scale),
                }],
            )
            .unwrap()
        })
        .collect()
}

fn rank(d: Decision) -> u8 {
    match d {
        Decision::NoCointegration => 0,
        Decision::Inconclusive => 1,
        Decision::Cointegrated => 2,
    }
}

proptest! {
    #[test]
    fn weights_normalize_and_ignore_cap_scale(
        assets in prop::collection::vec((0.01f64..1e4, 0.1f64..1e9), 1..12),
        c in 1e-3f64..1e3,
    ) {
        let base = tables(&assets, 1.0, 1.0);
        let w = compute_weights(&base, day()).unwrap();
        prop_assert!((w.values().sum::<f64>() - 1.0).abs() <= 1e-12);
        let ws = compute_weights(&tables(&assets, c, 1.0), day()).unwrap();
        for (k, v) in &w {
            prop_assert!((ws[k] - v).abs() <= 1e-12);
        }
        let p = index_price(&base, day()).unwrap();
        let ps = index_price(&tables(&assets, c, 1.0), day()).unwrap();
        prop_assert!((p - ps).abs() <= 1e-12 * p);
        let doubled = index_price(&tables(&assets, 1.0, 2.0), day()).unwrap();
        prop_assert!((doubled - 2.0 * p).abs() <= 1e-12 * p);
    }

    #[test]
    fn ols_is_equivariant_to_column_order(
        rows in prop::collection::vec(prop::collection::vec(-10f64..10.0, 3), 8..25),
        noise in prop::collection::vec(-1f64..1.0, 25),
    ) {
        let n = rows.len();
        let cols: Vec<Vec<f64>> = (0..3).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        let y: Vec<f64> = (0..n).map(|t| cols[0][t] - 2.0 * cols[1][t] + 0.5 * cols[2][t] + noise[t]).collect();
        let named = |order: [usize; 3]| {
            Design::from_columns(order.iter().map(|&j| (format!("c{j}"), cols[j].clone())).collect()).unwrap()
        };
        let (Ok(a), Ok(b)) = (ols_fit(&y, &named([0, 1, 2])), ols_fit(&y, &named([2, 0, 1]))) else {
            return Ok(());
        };
        for j in 0..3 {
            let name = format!("c{j}");
            let (ca, cb) = (a.coefficient(&name).unwrap(), b.coefficient(&name).unwrap());
            prop_assert!((ca - cb).abs() <= 1e-8 * (1.0 + ca.abs()));
        }
        prop_assert!((a.rss - b.rss).abs() <= 1e-9 * (1.0 + a.rss));
    }

    #[test]
    fn multiplier_times_minus_phi1_recovers_phi(phi_i in -10f64..10.0, phi1 in prop_oneof![-5f64..-1e-6, 1e-6f64..5.0]) {
        let m = long_run_multiplier(phi_i, phi1).unwrap();
        prop_assert!((-m * phi1 - phi_i).abs() <= 1e-12 * (1.0 + phi_i.abs()));
    }

    #[test]
    fn bound_decisions_are_monotone(f1 in 0f64..15.0, f2 in 0f64..15.0, case_ix in 0usize..4) {
        let case = Case::ALL[case_ix];
        let table = BoundsTable::embedded();
        let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
        let a = classify(lo, case, 8, &table).unwrap();
        let b = classify(hi, case, 8, &table).unwrap();
        for (da, db) in a.iter().zip(&b) {
            prop_assert!(rank(da.decision) <= rank(db.decision));
        }
        // stricter levels never classify more favourably
        let at = |level| a.iter().find(|d| d.level == level).unwrap().decision;
        prop_assert!(rank(at(BoundLevel::One)) <= rank(at(BoundLevel::Five)));
        prop_assert!(rank(at(BoundLevel::Five)) <= rank(at(BoundLevel::Ten)));
    }

    #[test]
    fn stars_are_monotone_and_zero_is_unsigned(p1 in 0f64..1.0, p2 in 0f64..1.0, x in -1e-5f64..1e-5) {
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        prop_assert!(stars(lo).len() >= stars(hi).len());
        prop_assert_ne!(num(x), "-0.0000".to_string());
    }

    #[test]
    fn adf_statistic_is_affine_invariant(
        steps in prop::collection::vec(-1f64..1.0, 40..80),
        a in prop_oneof![-50f64..-0.1, 0.1f64..50.0],
        b in -100f64..100.0,
    ) {
        let mut acc = 0.0;
        let y: Vec<f64> = steps.iter().map(|s| { acc += s; acc }).collect();
        let ys: Vec<f64> = y.iter().map(|v| a * v + b).collect();
        let (Ok((t1, _)), Ok((t2, _))) = (
            adf_regression(&y, 2, Deterministic::ConstantTrend),
            adf_regression(&ys, 2, Deterministic::ConstantTrend),
        ) else {
            return Ok(());
        };
        prop_assert!((t1 - t2).abs() <= 1e-7 * (1.0 + t1.abs()));
    }
}
