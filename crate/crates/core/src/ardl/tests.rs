use super::*;
use crate::synth::{self, generate, DgpConfig, DgpKind, NormalStream};
use crate::unitroot::{adf_test, AdfOptions, Deterministic, UnitRootDecision};

fn spec(data: &ArdlData, m: usize, n: Vec<usize>, case: Case, max_lag: usize) -> ArdlSpec {
    ArdlSpec {
        dep: data.dep_name.clone(),
        x_vars: data.reg_names.clone(),
        z_vars: vec![],
        dep_lags: m,
        reg_lags: n,
        case,
        max_lag,
    }
}

fn coint(seed: u64, n: usize, mu: f64) -> ArdlData {
    let kind = DgpKind::CointegratedPair {
        beta: 2.0,
        lambda: -0.25,
        mu,
    };
    let p = generate(&DgpConfig::new(kind, n, seed)).unwrap();
    ArdlData::from_panel(&p, "y", &["x"]).unwrap()
}

fn raw(dep: Vec<f64>, regs: Vec<(&str, Vec<f64>)>) -> ArdlData {
    ArdlData {
        dep_name: "P".into(),
        reg_names: regs.iter().map(|(n, _)| n.to_string()).collect(),
        dep,
        regs: regs.into_iter().map(|(_, v)| v).collect(),
    }
}

fn walk(z: &mut NormalStream<rand_chacha::ChaCha8Rng>, n: usize) -> Vec<f64> {
    let mut acc = 0.0;
    (0..n)
        .map(|_| {
            acc += z.next();
            acc
        })
        .collect()
}

fn share(hits: &[bool]) -> f64 {
    hits.iter().filter(|h| **h).count() as f64 / hits.len() as f64
}

#[test]
fn case_parsing_and_flags() {
    assert_eq!("iii".parse::<Case>().unwrap(), Case::III);
    assert_eq!("4".parse::<Case>().unwrap(), Case::IV);
    assert!("V".parse::<Case>().is_err());
    assert!(!Case::I.has_intercept() && Case::IV.has_trend() && !Case::III.has_trend());
}

#[test]
fn spec_validation() {
    let d = coint(1, 60, 0.0);
    assert!(spec(&d, 0, vec![0], Case::I, 4).validate().is_err());
    assert!(spec(&d, 1, vec![5], Case::I, 4).validate().is_err());
    assert!(spec(&d, 1, vec![0, 0], Case::I, 4).validate().is_err());
    assert_eq!(spec(&d, 3, vec![1], Case::I, 4).label(), "ARDL(3,1)");
}

#[test]
fn column_count_for_minimal_eight_regressor_spec() {
    let mut z = NormalStream::seeded(3);
    let regs: Vec<(String, Vec<f64>)> = (0..8).map(|j| (format!("X{j}"), walk(&mut z, 120))).collect();
    let data = ArdlData {
        dep_name: "P".into(),
        reg_names: regs.iter().map(|r| r.0.clone()).collect(),
        dep: walk(&mut z, 120),
        regs: regs.into_iter().map(|r| r.1).collect(),
    };
    for case in Case::ALL {
        let s = spec(&data, 1, vec![0; 8], case, 4);
        let fit = fit_unrestricted(&data, &s, 5).unwrap();
        let det = usize::from(case.has_intercept()) + usize::from(case.has_trend());
        assert_eq!(fit.fit.nparams, 1 + 8 + 9 + det);
        assert_eq!(fit.fit.nparams, s.design_width());
        assert_eq!(fit.fit.residuals.len(), 120 - 5);
        assert_eq!(fit.short_run().len(), 9);
    }
}

#[test]
fn exact_static_relation_is_rank_deficient() {
    let mut z = NormalStream::seeded(11);
    let x = walk(&mut z, 100);
    let p: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
    let data = raw(p, vec![("X", x)]);
    let err = fit_unrestricted(&data, &spec(&data, 1, vec![0], Case::I, 4), 5).unwrap_err();
    assert!(matches!(err, Error::RankDeficient { .. }), "{err}");
}

#[test]
fn near_static_relation_corrects_immediately() {
    let mut z = NormalStream::seeded(12);
    let x = walk(&mut z, 300);
    let p: Vec<f64> = x.iter().map(|v| 2.0 * v + 1e-3 * z.next()).collect();
    let data = raw(p, vec![("X", x)]);
    let s = spec(&data, 1, vec![0], Case::I, 4);
    let fit = fit_unrestricted(&data, &s, 5).unwrap();
    assert!((fit.phi1() + 1.0).abs() < 0.1, "phi1 {}", fit.phi1());
    assert!(fit.fit.rss < 1e-3);
    let lr = long_run(&fit).unwrap();
    assert!((lr.coefs[0].multiplier - 2.0).abs() < 1e-4);
    let ect = build_ect(&data, &fit).unwrap();
    assert!(ect.iter().all(|e| e.abs() < 1e-2));
    let ecm = fit_recm(&data, &s, &ect, 5).unwrap();
    assert!((ecm.lambda + 1.0).abs() < 0.15, "lambda {}", ecm.lambda);
}

#[test]
fn exact_ect_is_zero_and_zero_ect_is_rank_error() {
    let mut z = NormalStream::seeded(13);
    let x = walk(&mut z, 80);
    let p: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
    let data = raw(p, vec![("X", x)]);
    let lr = LongRunEstimates {
        phi1: -1.0,
        coefs: vec![LongRunCoef {
            name: "X".into(),
            multiplier: 2.0,
            std_error: 0.0,
            t_stat: 0.0,
            p_value: 1.0,
        }],
        intercept: None,
        trend: None,
        warning: None,
    };
    let ect = ect_from_long_run(&data, Case::I, &lr).unwrap();
    assert!(ect.iter().all(|e| *e == 0.0));
    let s = spec(&data, 1, vec![0], Case::I, 4);
    let err = fit_recm(&data, &s, &ect, 5).unwrap_err();
    assert!(matches!(err, Error::RankDeficient { ref columns } if columns.iter().any(|c| c == ECT)));
}

#[test]
fn exhaustive_search_matches_direct_sic() {
    for seed in 0..5 {
        let data = coint(seed, 120, 0.0);
        for case in Case::ALL {
            let sel = select_spec(&data, &["x"], &[], case, 1, Search::Full).unwrap();
            assert_eq!(sel.evaluated, 2);
            let mut best: Option<(f64, Vec<usize>)> = None;
            for n in 0..=1 {
                let s = spec(&data, 1, vec![n], case, 1);
                let fit = fit_unrestricted(&data, &s, 5).unwrap();
                if best.as_ref().is_none_or(|b| fit.fit.sic < b.0) {
                    best = Some((fit.fit.sic, s.lag_vector()));
                }
            }
            let (sic, lags) = best.unwrap();
            assert_eq!(sel.best.lags, lags);
            assert!((sel.best.sic - sic).abs() < 1e-10);
            let per = select_spec(&data, &["x"], &[], case, 1, Search::PerVariable).unwrap();
            assert_eq!(per.spec, sel.spec);
        }
    }
}

#[test]
fn per_variable_equals_full_on_small_spaces() {
    let mut agree = 0;
    for seed in 0..10 {
        let mut z = NormalStream::seeded(500 + seed);
        let n = 200;
        let x1 = walk(&mut z, n);
        let x2 = walk(&mut z, n);
        let mut y = vec![0.0; n];
        for t in 2..n {
            y[t] = y[t - 1] - 0.3 * (y[t - 1] - x1[t - 1] - 0.5 * x2[t - 1])
                + 0.4 * (y[t - 1] - y[t - 2])
                + 0.8 * (x1[t] - x1[t - 1])
                + z.next();
        }
        let data = raw(y, vec![("A", x1), ("B", x2)]);
        let full = select_spec(&data, &["A"], &["B"], Case::III, 2, Search::Full).unwrap();
        let per = select_spec(&data, &["A"], &["B"], Case::III, 2, Search::PerVariable).unwrap();
        assert_eq!(full.evaluated, 18);
        assert!(per.best.sic >= full.best.sic - 1e-12);
        if per.spec == full.spec {
            agree += 1;
        }
    }
    assert!(agree >= 8, "agree {agree}");
}

#[test]
fn monte_carlo_lag_selection_recovers_simple_dgp() {
    let hits = synth::monte_carlo(7000, 200, |s| {
        let mut z = NormalStream::seeded(s);
        let n = 300;
        let x = walk(&mut z, n + 50);
        let mut y = vec![0.0; n + 50];
        for t in 1..n + 50 {
            y[t] = 0.5 * y[t - 1] + x[t] + z.next();
        }
        let data = raw(y[50..].to_vec(), vec![("X", x[50..].to_vec())]);
        let sel = select_spec(&data, &["X"], &[], Case::III, 4, Search::PerVariable).unwrap();
        sel.spec.dep_lags == 1 && sel.spec.reg_lags[0] <= 1
    });
    assert!(share(&hits) >= 0.9, "rate {}", share(&hits));
}

#[test]
fn identical_sic_breaks_toward_smaller_lag_vector() {
    // With B_t = A_t + 0.3 t and no intercept, D(B) - D(A) is a constant
    // already in the span, so (1,1,0) and (1,0,1) fit identically and the
    // tie goes to (1,0,1).
    let mut z = NormalStream::seeded(21);
    let n = 220;
    let x1 = walk(&mut z, n);
    let x2: Vec<f64> = (0..n).map(|t| x1[t] + 0.3 * t as f64).collect();
    let mut y = vec![0.0; n];
    for t in 2..n {
        y[t] = y[t - 1] + 1.5 * (x1[t - 1] - x1[t - 2]) - 0.3 * (y[t - 1] - x1[t - 1]) + z.next();
    }
    let data = raw(y, vec![("A", x1), ("B", x2)]);
    let a = select_spec(&data, &["A", "B"], &[], Case::I, 1, Search::Full).unwrap();
    let fit_a = fit_unrestricted(&data, &spec(&data, 1, vec![1, 0], Case::I, 1), 5);
    let fit_b = fit_unrestricted(&data, &spec(&data, 1, vec![0, 1], Case::I, 1), 5);
    let (fa, fb) = (fit_a.unwrap(), fit_b.unwrap());
    assert!((fa.fit.sic - fb.fit.sic).abs() < 1e-9);
    assert_eq!(a.best.lags, vec![1, 0, 1]);
    assert_eq!(a.rank_deficient, 1);
}

#[test]
fn ordering_of_regressors_does_not_matter() {
    let mut z = NormalStream::seeded(31);
    let n = 150;
    let (a, b, c) = (walk(&mut z, n), walk(&mut z, n), walk(&mut z, n));
    let y: Vec<f64> = (0..n).map(|t| 0.5 * a[t] - b[t] + 0.2 * c[t] + z.next()).collect();
    let d1 = raw(y.clone(), vec![("A", a.clone()), ("B", b.clone()), ("C", c.clone())]);
    let d2 = raw(y, vec![("C", c), ("A", a), ("B", b)]);
    let s1 = spec(&d1, 2, vec![1, 0, 2], Case::III, 3);
    let s2 = spec(&d2, 2, vec![2, 1, 0], Case::III, 3);
    let f1 = fit_unrestricted(&d1, &s1, 5).unwrap();
    let f2 = fit_unrestricted(&d2, &s2, 5).unwrap();
    assert!((f1.fit.sic - f2.fit.sic).abs() < 1e-10);
    let t = BoundsTable::embedded();
    let mut t3 = t.clone();
    for level in BoundLevel::ALL {
        t3.insert(Case::III, 3, level, 1.0, 2.0).unwrap();
    }
    let b1 = bound_test(&f1, &t3).unwrap();
    let b2 = bound_test(&f2, &t3).unwrap();
    assert!((b1.f_stat - b2.f_stat).abs() < 1e-10 * b1.f_stat.max(1.0));
    for name in ["A(-1)", "B(-1)", "C(-1)", "D(B)", "D(C(-2))"] {
        let c1 = f1.fit.coefficient(name).unwrap();
        let c2 = f2.fit.coefficient(name).unwrap();
        assert!((c1 - c2).abs() < 1e-9, "{name}");
    }
}

#[test]
fn bound_f_matches_manual_restricted_fit() {
    let data = coint(41, 200, 1.0);
    for (case, q) in [(Case::I, 2), (Case::II, 3), (Case::III, 2), (Case::IV, 3)] {
        let fit = fit_unrestricted(&data, &spec(&data, 2, vec![1], case, 4), 5).unwrap();
        let res = bound_test(&fit, &BoundsTable::embedded()).unwrap();
        assert_eq!(res.num_restrictions, q);
        let keep: Vec<(String, Vec<f64>)> = fit
            .design
            .names
            .iter()
            .enumerate()
            .filter(|(_, n)| {
                !n.ends_with("(-1)") || n.starts_with("D(")
            })
            .filter(|(_, n)| !(case == Case::II && n.as_str() == INTERCEPT))
            .filter(|(_, n)| !(case == Case::IV && n.as_str() == TREND))
            .map(|(j, n)| (n.clone(), fit.design.x.column(j).iter().copied().collect()))
            .collect();
        let r = regression::ols_fit(&fit.response, &Design::from_columns(keep).unwrap()).unwrap();
        let df = (fit.fit.nobs - fit.fit.nparams) as f64;
        let manual = ((r.rss - fit.fit.rss) / q as f64) / (fit.fit.rss / df);
        assert!((manual - res.f_stat).abs() < 1e-9 * manual, "{case}");
        assert!(res.f_stat > res.at(BoundLevel::One).upper, "{case} F {}", res.f_stat);
    }
}

#[test]
fn ratio_identity_on_fitted_models() {
    for seed in 0..20 {
        let data = coint(seed, 150, 0.5);
        let fit = fit_unrestricted(&data, &spec(&data, 2, vec![2], Case::III, 4), 5).unwrap();
        let lr = long_run(&fit).unwrap();
        for (c, phi) in lr.coefs.iter().zip(fit.phi()) {
            assert!((c.multiplier * fit.phi1() + phi).abs() < 1e-12);
        }
        assert!(lr.intercept.is_some() && lr.trend.is_none());
    }
}

#[test]
fn phi1_recovered_on_cointegrated_pair() {
    let est = synth::monte_carlo(100, 200, |s| {
        let data = coint(s, 400, 0.0);
        fit_unrestricted(&data, &spec(&data, 1, vec![0], Case::I, 4), 5)
            .unwrap()
            .phi1()
    });
    let mean = est.iter().sum::<f64>() / est.len() as f64;
    assert!((mean + 0.25).abs() < 0.08, "mean phi1 {mean}");
}

#[test]
fn recm_recovers_lambda_and_beta() {
    let out = synth::monte_carlo(300, 200, |s| {
        let data = coint(s, 400, 0.0);
        let sp = spec(&data, 1, vec![0], Case::I, 4);
        let fit = fit_unrestricted(&data, &sp, 5).unwrap();
        let beta = long_run(&fit).unwrap().coefs[0].multiplier;
        let ect = build_ect(&data, &fit).unwrap();
        (fit_recm(&data, &sp, &ect, 5).unwrap().lambda, beta)
    });
    let n = out.len() as f64;
    let mean_l = out.iter().map(|o| o.0).sum::<f64>() / n;
    let mean_b = out.iter().map(|o| o.1).sum::<f64>() / n;
    let inside = out.iter().filter(|o| o.0 > -1.0 && o.0 < 0.0).count() as f64 / n;
    assert!((mean_l + 0.25).abs() < 0.05, "mean lambda {mean_l}");
    assert!((mean_b - 2.0).abs() < 0.1, "mean beta {mean_b}");
    assert!(inside >= 0.95, "inside {inside}");
}

fn ect_is_stationary(data: &ArdlData) -> bool {
    let fit = fit_unrestricted(data, &spec(data, 1, vec![0], Case::III, 4), 5).unwrap();
    let ect = build_ect(data, &fit).unwrap();
    let opts = AdfOptions {
        deterministic: Deterministic::Constant,
        ..AdfOptions::default()
    };
    adf_test(&ect, &opts).unwrap().decision == UnitRootDecision::Stationary
}

#[test]
fn ect_is_stationary_under_cointegration() {
    let hits = synth::monte_carlo(900, 200, |s| ect_is_stationary(&coint(s, 400, 0.0)));
    assert!(share(&hits) >= 0.9, "rate {}", share(&hits));
}

#[test]
fn ect_is_not_stationary_for_independent_walks() {
    let hits = synth::monte_carlo(1300, 200, |s| {
        let p = generate(&DgpConfig::new(DgpKind::IndependentWalks, 400, s)).unwrap();
        !ect_is_stationary(&ArdlData::from_panel(&p, "y", &["x"]).unwrap())
    });
    assert!(share(&hits) >= 0.7, "rate {}", share(&hits));
}

#[test]
fn choose_case_prefers_case_one_without_deterministics() {
    let cases = synth::monte_carlo(1700, 200, |s| {
        let data = coint(s, 400, 0.0);
        choose_case(&data, &spec(&data, 1, vec![0], Case::III, 4), 5).unwrap().case
    });
    let rate = cases.iter().filter(|c| **c == Case::I).count() as f64 / cases.len() as f64;
    assert!(rate >= 0.8, "Case I rate {rate}");
}

#[test]
fn choose_case_finds_restricted_intercept() {
    let cases = synth::monte_carlo(2100, 200, |s| {
        let data = coint(s, 400, 5.0);
        choose_case(&data, &spec(&data, 1, vec![0], Case::III, 4), 5).unwrap().case
    });
    let count = |c: Case| cases.iter().filter(|x| **x == c).count();
    let ii = count(Case::II);
    assert!(Case::ALL.iter().all(|&c| c == Case::II || count(c) < ii), "II {ii} of {}", cases.len());
}

#[test]
fn embedded_small_k_bound_has_nominal_size() {
    // Under no level relationship with an I(1) regressor, F exceeds the 5%
    // upper bound close to 5% of the time.
    let hits = synth::monte_carlo(2500, 400, |s| {
        let p = generate(&DgpConfig::new(DgpKind::IndependentWalks, 500, s)).unwrap();
        let data = ArdlData::from_panel(&p, "y", &["x"]).unwrap();
        let fit = fit_unrestricted(&data, &spec(&data, 1, vec![0], Case::III, 1), 5).unwrap();
        let res = bound_test(&fit, &BoundsTable::embedded()).unwrap();
        res.f_stat > res.at(BoundLevel::Five).upper
    });
    let rate = share(&hits);
    assert!((0.01..=0.09).contains(&rate), "rate {rate}");
}

#[test]
fn positive_phi1_warns() {
    let mut z = NormalStream::seeded(77);
    let n = 120;
    let x = walk(&mut z, n);
    let mut y = vec![1.0; n];
    for t in 1..n {
        y[t] = 1.02 * y[t - 1] + 0.1 * z.next();
    }
    let data = raw(y, vec![("X", x)]);
    let fit = fit_unrestricted(&data, &spec(&data, 1, vec![0], Case::I, 2), 5).unwrap();
    assert!(fit.phi1() > 0.0);
    let lr = long_run(&fit).unwrap();
    assert!(lr.warning.is_some());
}

#[test]
fn data_from_panel_checks_names() {
    let p = generate(&DgpConfig::new(DgpKind::IndependentWalks, 50, 1)).unwrap();
    assert!(matches!(
        ArdlData::from_panel(&p, "y", &["nope"]),
        Err(Error::UnknownVariable(_))
    ));
    assert!(ArdlData::from_panel(&p, "y", &["y"]).is_err());
}

