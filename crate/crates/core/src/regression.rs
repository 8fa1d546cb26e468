//! Least squares core: QR-based OLS, Newey-West HAC covariance, Wald F and
//! the residual diagnostics reported next to every ARDL table.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dist;
use crate::error::{Error, Result};

/// Relative tolerance on the diagonal of `R` below which a column is treated
/// as linearly dependent on the columns before it.
pub const RANK_TOL: f64 = 1e-10;

/// Default Bartlett bandwidth for HAC standard errors.
pub const DEFAULT_HAC_BANDWIDTH: usize = 5;

/// Regressor matrix with a name per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub x: DMatrix<f64>,
    pub names: Vec<String>,
}

impl Design {
    pub fn new(x: DMatrix<f64>, names: Vec<String>) -> Result<Self> {
        if names.len() != x.ncols() {
            return Err(Error::Dimension(format!(
                "{} column names for {} columns",
                names.len(),
                x.ncols()
            )));
        }
        Ok(Self { x, names })
    }

    /// Builds a design from column vectors of equal length.
    pub fn from_columns(columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let nrows = columns.first().map_or(0, |(_, c)| c.len());
        if let Some((name, c)) = columns.iter().find(|(_, c)| c.len() != nrows) {
            return Err(Error::Dimension(format!(
                "column `{name}` has {} rows, expected {nrows}",
                c.len()
            )));
        }
        let ncols = columns.len();
        let mut x = DMatrix::zeros(nrows, ncols);
        let mut names = Vec::with_capacity(ncols);
        for (j, (name, col)) in columns.into_iter().enumerate() {
            x.set_column(j, &DVector::from_vec(col));
            names.push(name);
        }
        Ok(Self { x, names })
    }

    pub fn nrows(&self) -> usize {
        self.x.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.x.ncols()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// True if some column is a nonzero constant.
    pub fn has_intercept(&self) -> bool {
        (0..self.ncols()).any(|j| is_constant_column(&self.x, j))
    }

    /// Copy of the design with the listed columns removed.
    pub fn without(&self, drop: &[usize]) -> Design {
        let keep: Vec<usize> = (0..self.ncols()).filter(|j| !drop.contains(j)).collect();
        let mut x = DMatrix::zeros(self.nrows(), keep.len());
        for (dst, &src) in keep.iter().enumerate() {
            x.set_column(dst, &self.x.column(src));
        }
        Design {
            x,
            names: keep.iter().map(|&j| self.names[j].clone()).collect(),
        }
    }

    /// Copy of the design with extra columns appended on the right.
    pub fn with_columns(&self, extra: &[(String, Vec<f64>)]) -> Result<Design> {
        let mut cols: Vec<(String, Vec<f64>)> = (0..self.ncols())
            .map(|j| (self.names[j].clone(), self.x.column(j).iter().copied().collect()))
            .collect();
        cols.extend(extra.iter().cloned());
        Design::from_columns(cols)
    }
}

fn is_constant_column(x: &DMatrix<f64>, j: usize) -> bool {
    let col = x.column(j);
    let first = col[0];
    first != 0.0 && col.iter().all(|&v| v == first)
}

/// Result of an ordinary least squares fit.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    pub nobs: usize,
    pub nparams: usize,
    pub xtx_inverse: DMatrix<f64>,
    pub r_squared: f64,
    pub durbin_watson: Option<f64>,
    pub sic: f64,
}

impl OlsFit {
    /// Residual variance `rss / (n - p)`.
    pub fn sigma2(&self) -> f64 {
        self.rss / (self.nobs - self.nparams) as f64
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|j| self.coefficients[j])
    }
}

/// Schwarz criterion `ln(rss/n) + p ln(n)/n`.
pub fn schwarz(rss: f64, nobs: usize, nparams: usize) -> f64 {
    let n = nobs as f64;
    (rss / n).ln() + nparams as f64 * n.ln() / n
}

/// Fits `y = X b + e` by Householder QR.
pub fn ols_fit(y: &[f64], design: &Design) -> Result<OlsFit> {
    let x = &design.x;
    let (n, p) = x.shape();
    if y.len() != n {
        return Err(Error::Dimension(format!(
            "y has {} rows but X has {n}",
            y.len()
        )));
    }
    if p == 0 {
        return Err(Error::InvalidArgument("design has no columns".into()));
    }
    if n <= p {
        return Err(Error::InsufficientData(format!(
            "{n} observations for {p} parameters"
        )));
    }
    let qr = x.clone().qr();
    let r = qr.r();
    check_rank(&r, &design.names)?;

    let mut qty = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut qty);
    let rhs = qty.rows(0, p).into_owned();
    let beta = r
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::RankDeficient {
            columns: design.names.clone(),
        })?;
    let rinv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| Error::RankDeficient {
            columns: design.names.clone(),
        })?;
    let xtx_inverse = &rinv * rinv.transpose();

    let fitted = x * &beta;
    let residuals: Vec<f64> = y.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();

    let tss = if design.has_intercept() {
        let mean = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r_squared = if tss > 0.0 {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    } else {
        0.0
    };

    Ok(OlsFit {
        names: design.names.clone(),
        coefficients: beta.iter().copied().collect(),
        durbin_watson: durbin_watson(&residuals).ok(),
        residuals,
        rss,
        nobs: n,
        nparams: p,
        xtx_inverse,
        r_squared,
        sic: schwarz(rss, n, p),
    })
}

fn check_rank(r: &DMatrix<f64>, names: &[String]) -> Result<()> {
    let p = r.ncols();
    let max_diag = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    let tol = RANK_TOL * max_diag;
    let bad: Vec<String> = (0..p)
        .filter(|&i| !(r[(i, i)].abs() > tol))
        .map(|i| names[i].clone())
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::RankDeficient { columns: bad })
    }
}

/// Residual sum of squares of every leading sub-design `X[:, ..j]` for
/// `j = 1..=p`, from a single QR factorization.
pub fn nested_rss(y: &[f64], design: &Design) -> Result<Vec<f64>> {
    let (n, p) = design.x.shape();
    if y.len() != n {
        return Err(Error::Dimension(format!(
            "y has {} rows but X has {n}",
            y.len()
        )));
    }
    if n <= p {
        return Err(Error::InsufficientData(format!(
            "{n} observations for {p} parameters"
        )));
    }
    let qr = design.x.clone().qr();
    check_rank(&qr.r(), &design.names)?;
    let mut z = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut z);
    // tail[j] = sum of z_i^2 for i >= j
    let mut tail = vec![0.0; n + 1];
    for i in (0..n).rev() {
        tail[i] = tail[i + 1] + z[i] * z[i];
    }
    Ok((1..=p).map(|j| tail[j]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceKind {
    Classical,
    HacBartlett,
}

#[derive(Debug, Clone)]
pub struct CovarianceEstimate {
    pub matrix: DMatrix<f64>,
    pub kind: CovarianceKind,
    pub bandwidth: usize,
}

impl CovarianceEstimate {
    pub fn std_errors(&self) -> Vec<f64> {
        (0..self.matrix.nrows())
            .map(|i| self.matrix[(i, i)].max(0.0).sqrt())
            .collect()
    }
}

/// `s^2 (X'X)^-1`.
pub fn classical_cov(fit: &OlsFit) -> CovarianceEstimate {
    CovarianceEstimate {
        matrix: &fit.xtx_inverse * fit.sigma2(),
        kind: CovarianceKind::Classical,
        bandwidth: 0,
    }
}

/// Newey-West sandwich with Bartlett weights `1 - l/(L+1)`, `L = bandwidth`.
/// No small-sample degrees-of-freedom scaling is applied.
pub fn newey_west_cov(fit: &OlsFit, x: &DMatrix<f64>, bandwidth: usize) -> Result<CovarianceEstimate> {
    let (n, p) = x.shape();
    if n != fit.residuals.len() {
        return Err(Error::Dimension(format!(
            "design has {n} rows, fit has {} residuals",
            fit.residuals.len()
        )));
    }
    if bandwidth >= n {
        return Err(Error::InvalidArgument(format!(
            "bandwidth {bandwidth} must be below the sample size {n}"
        )));
    }
    let mut u = x.clone();
    for (t, e) in fit.residuals.iter().enumerate() {
        u.row_mut(t).scale_mut(*e);
    }
    let mut meat = u.transpose() * &u;
    for lag in 1..=bandwidth {
        let w = 1.0 - lag as f64 / (bandwidth as f64 + 1.0);
        let lead = u.rows(lag, n - lag);
        let lagged = u.rows(0, n - lag);
        let gamma = lead.transpose() * lagged;
        meat += (&gamma + gamma.transpose()) * w;
    }
    let bread = &fit.xtx_inverse;
    let mut v = bread * meat * bread;
    symmetrize(&mut v);
    debug_assert_eq!(v.nrows(), p);
    Ok(CovarianceEstimate {
        matrix: v,
        kind: CovarianceKind::HacBartlett,
        bandwidth,
    })
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// `((rss_r - rss_u)/q) / (rss_u/(n - p))`.
pub fn wald_f(fit: &OlsFit, restricted_rss: f64, num_restrictions: usize) -> Result<f64> {
    if fit.nobs <= fit.nparams {
        return Err(Error::InsufficientData(format!(
            "{} observations for {} parameters",
            fit.nobs, fit.nparams
        )));
    }
    if num_restrictions == 0 {
        return Err(Error::InvalidArgument("at least one restriction required".into()));
    }
    let slack = 1e-12 * fit.rss.max(1.0);
    if restricted_rss < fit.rss - slack {
        return Err(Error::InvalidArgument(format!(
            "restricted rss {restricted_rss} below unrestricted rss {}",
            fit.rss
        )));
    }
    let num = (restricted_rss - fit.rss).max(0.0) / num_restrictions as f64;
    let den = fit.rss / (fit.nobs - fit.nparams) as f64;
    Ok(num / den)
}

/// Chi-square LM statistic with its upper-tail p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmTest {
    pub statistic: f64,
    pub p_value: f64,
    pub df: usize,
}

/// Breusch-Godfrey LM test. Pre-sample lagged residuals are set to zero.
pub fn breusch_godfrey_lm(fit: &OlsFit, x: &DMatrix<f64>, lags: usize) -> Result<LmTest> {
    let n = fit.nobs;
    if lags == 0 {
        return Err(Error::InvalidArgument("lag order must be positive".into()));
    }
    if lags >= n.saturating_sub(fit.nparams) {
        return Err(Error::InsufficientData(format!(
            "lag order {lags} too large for {n} observations and {} parameters",
            fit.nparams
        )));
    }
    let e = &fit.residuals;
    let ee: f64 = e.iter().map(|v| v * v).sum();
    if ee == 0.0 {
        return Ok(LmTest {
            statistic: 0.0,
            p_value: 1.0,
            df: lags,
        });
    }
    let p = x.ncols();
    let mut aux = DMatrix::zeros(n, p + lags);
    aux.columns_mut(0, p).copy_from(x);
    for l in 1..=lags {
        for t in l..n {
            aux[(t, p + l - 1)] = e[t - l];
        }
    }
    let names = (0..p + lags).map(|j| format!("aux{j}")).collect();
    let aux_fit = ols_fit(e, &Design { x: aux, names })?;
    // uncentered R^2 of the residual regression
    let r2 = (1.0 - aux_fit.rss / ee).max(0.0);
    let statistic = n as f64 * r2;
    Ok(LmTest {
        statistic,
        p_value: dist::chi2_sf(statistic, lags as f64),
        df: lags,
    })
}

/// Breusch-Pagan-Godfrey test: `n R^2` from regressing squared residuals on
/// the regressors (plus a constant if the design has none).
pub fn breusch_pagan_godfrey(fit: &OlsFit, x: &DMatrix<f64>) -> Result<LmTest> {
    let n = fit.nobs;
    if n <= fit.nparams + 1 {
        return Err(Error::InsufficientData(format!(
            "{n} observations for {} parameters",
            fit.nparams
        )));
    }
    let has_const = (0..x.ncols()).any(|j| is_constant_column(x, j));
    let aux_x = if has_const {
        x.clone()
    } else {
        let mut m = DMatrix::from_element(n, x.ncols() + 1, 1.0);
        m.columns_mut(1, x.ncols()).copy_from(x);
        m
    };
    let df = aux_x.ncols() - 1;
    if df == 0 {
        return Err(Error::NotApplicable(
            "heteroskedasticity test needs at least one non-constant regressor".into(),
        ));
    }
    let e2: Vec<f64> = fit.residuals.iter().map(|e| e * e).collect();
    let mean = e2.iter().sum::<f64>() / n as f64;
    let tss: f64 = e2.iter().map(|v| (v - mean).powi(2)).sum();
    if tss == 0.0 {
        return Ok(LmTest {
            statistic: 0.0,
            p_value: 1.0,
            df,
        });
    }
    let names = (0..aux_x.ncols()).map(|j| format!("aux{j}")).collect();
    let aux_fit = ols_fit(&e2, &Design { x: aux_x, names })?;
    let statistic = n as f64 * (1.0 - aux_fit.rss / tss).max(0.0);
    Ok(LmTest {
        statistic,
        p_value: dist::chi2_sf(statistic, df as f64),
        df,
    })
}

/// `sum (e_t - e_{t-1})^2 / sum e_t^2`.
pub fn durbin_watson(residuals: &[f64]) -> Result<f64> {
    if residuals.len() < 2 {
        return Err(Error::InsufficientData(
            "Durbin-Watson needs at least two residuals".into(),
        ));
    }
    let ss: f64 = residuals.iter().map(|e| e * e).sum();
    if ss == 0.0 {
        return Err(Error::Undefined(
            "Durbin-Watson statistic for all-zero residuals".into(),
        ));
    }
    let num: f64 = residuals.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    Ok(num / ss)
}

/// One row of a coefficient table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefInference {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
}

/// t-ratios and two-sided p-values on `n - p` degrees of freedom.
pub fn inference(fit: &OlsFit, cov: &CovarianceEstimate) -> Vec<CoefInference> {
    let df = (fit.nobs - fit.nparams) as f64;
    fit.names
        .iter()
        .zip(&fit.coefficients)
        .zip(cov.std_errors())
        .map(|((name, &b), se)| {
            let t = if se > 0.0 { b / se } else { f64::INFINITY * b.signum() };
            let p = if se > 0.0 { dist::t_two_sided(t, df) } else { 0.0 };
            CoefInference {
                name: name.clone(),
                estimate: b,
                std_error: se,
                t_stat: t,
                p_value: p,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::SeedableRng;

    use crate::synth::NormalStream;

    fn design(cols: Vec<Vec<f64>>) -> Design {
        Design::from_columns(
            cols.into_iter()
                .enumerate()
                .map(|(i, c)| (format!("x{i}"), c))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn exact_proportional_fit() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let fit = ols_fit(&y, &design(vec![x])).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-14);
        assert!(fit.rss < 1e-24);
    }

    #[test]
    fn duplicated_column_is_rank_deficient() {
        let x = vec![1.0, 2.0, 3.0, 5.0, 8.0];
        let err = ols_fit(&[1.0, 0.0, 2.0, 1.0, 3.0], &design(vec![x.clone(), x])).unwrap_err();
        match err {
            Error::RankDeficient { columns } => assert_eq!(columns, vec!["x1".to_string()]),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn residuals_orthogonal_and_rss_consistent() {
        let mut rng = NormalStream::new(ChaCha8Rng::seed_from_u64(3));
        let n = 40;
        let c: Vec<f64> = vec![1.0; n];
        let a: Vec<f64> = (0..n).map(|_| rng.next()).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.next() * 10.0).collect();
        let y: Vec<f64> = (0..n).map(|i| 1.0 + a[i] - 0.3 * b[i] + rng.next()).collect();
        let d = design(vec![c, a, b]);
        let fit = ols_fit(&y, &d).unwrap();
        let e = DVector::from_vec(fit.residuals.clone());
        let enorm = e.norm();
        for j in 0..3 {
            let col = d.x.column(j);
            assert!(col.dot(&e).abs() <= 1e-8 * col.norm() * enorm);
        }
        let ss: f64 = fit.residuals.iter().map(|v| v * v).sum();
        assert!((ss - fit.rss).abs() <= 1e-10 * ss);
        assert!(fit.r_squared > 0.0 && fit.r_squared < 1.0);
    }

    #[test]
    fn nested_rss_matches_separate_fits() {
        let mut rng = NormalStream::new(ChaCha8Rng::seed_from_u64(8));
        let n = 30;
        let cols: Vec<Vec<f64>> = (0..4).map(|_| (0..n).map(|_| rng.next()).collect()).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.next()).collect();
        let d = design(cols.clone());
        let nested = nested_rss(&y, &d).unwrap();
        for j in 1..=4 {
            let fit = ols_fit(&y, &design(cols[..j].to_vec())).unwrap();
            assert!((fit.rss - nested[j - 1]).abs() < 1e-10 * fit.rss);
        }
    }

    #[test]
    fn wald_f_formula() {
        let mut fit = ols_fit(&[1.0, 2.0, 2.5, 4.0, 5.5], &design(vec![vec![1.0, 2.0, 3.0, 4.0, 5.0]])).unwrap();
        fit.rss = 10.0;
        fit.nobs = 14;
        fit.nparams = 4;
        assert_eq!(wald_f(&fit, 10.0, 2).unwrap(), 0.0);
        assert!((wald_f(&fit, 20.0, 2).unwrap() - 5.0).abs() < 1e-12);
        assert!((wald_f(&fit, 20.0, 10).unwrap() - 1.0).abs() < 1e-12);
        fit.nobs = 4;
        assert!(wald_f(&fit, 20.0, 2).is_err());
    }

    #[test]
    fn durbin_watson_fixtures() {
        assert_eq!(durbin_watson(&[1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert!((durbin_watson(&[1.0, -1.0, 1.0, -1.0]).unwrap() - 3.0).abs() < 1e-15);
        assert!(matches!(durbin_watson(&[0.0, 0.0]), Err(Error::Undefined(_))));
        let mut rng = NormalStream::new(ChaCha8Rng::seed_from_u64(11));
        let e: Vec<f64> = (0..1000).map(|_| rng.next()).collect();
        assert!((durbin_watson(&e).unwrap() - 2.0).abs() < 0.2);
    }

    #[test]
    fn hac_bandwidth_zero_is_white() {
        let mut rng = NormalStream::new(ChaCha8Rng::seed_from_u64(5));
        let n = 25;
        let c = vec![1.0; n];
        let a: Vec<f64> = (0..n).map(|_| rng.next()).collect();
        let y: Vec<f64> = (0..n).map(|i| a[i] * (1.0 + rng.next().abs())).collect();
        let d = design(vec![c, a]);
        let fit = ols_fit(&y, &d).unwrap();
        let hac = newey_west_cov(&fit, &d.x, 0).unwrap();
        let mut meat = DMatrix::zeros(2, 2);
        for t in 0..n {
            let xt = d.x.row(t).transpose();
            meat += &xt * xt.transpose() * fit.residuals[t].powi(2);
        }
        let white = &fit.xtx_inverse * meat * &fit.xtx_inverse;
        assert!((hac.matrix - white).abs().max() < 1e-14);
    }

    #[test]
    fn hac_zero_residuals_is_zero() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let d = design(vec![x]);
        let mut fit = ols_fit(&y, &d).unwrap();
        fit.residuals.iter_mut().for_each(|e| *e = 0.0);
        let hac = newey_west_cov(&fit, &d.x, 2).unwrap();
        assert!(hac.matrix.iter().all(|v| *v == 0.0));
        assert!(newey_west_cov(&fit, &d.x, 6).is_err());
    }

    #[test]
    fn bg_zero_residuals() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let d = design(vec![x]);
        let mut fit = ols_fit(&y, &d).unwrap();
        fit.residuals.iter_mut().for_each(|e| *e = 0.0);
        let bg = breusch_godfrey_lm(&fit, &d.x, 2).unwrap();
        assert_eq!((bg.statistic, bg.p_value), (0.0, 1.0));
        assert!(breusch_godfrey_lm(&fit, &d.x, 6).is_err());
    }

    #[test]
    fn bg_pads_missing_lags_with_zero() {
        // With lag 1 the auxiliary column is (0, e_0, .., e_{n-2}).
        let mut rng = NormalStream::new(ChaCha8Rng::seed_from_u64(21));
        let n = 30;
        let c = vec![1.0; n];
        let a: Vec<f64> = (0..n).map(|_| rng.next()).collect();
        let y: Vec<f64> = (0..n).map(|i| a[i] + rng.next()).collect();
        let d = design(vec![c.clone(), a.clone()]);
        let fit = ols_fit(&y, &d).unwrap();
        let mut lagged = vec![0.0];
        lagged.extend_from_slice(&fit.residuals[..n - 1]);
        let aux = ols_fit(&fit.residuals, &design(vec![c, a, lagged])).unwrap();
        let ee: f64 = fit.residuals.iter().map(|e| e * e).sum();
        let expect = n as f64 * (1.0 - aux.rss / ee);
        let bg = breusch_godfrey_lm(&fit, &d.x, 1).unwrap();
        assert!((bg.statistic - expect).abs() < 1e-10);
    }

    #[test]
    fn bpg_constant_only_not_applicable() {
        let d = design(vec![vec![1.0; 6]]);
        let fit = ols_fit(&[1.0, 2.0, 0.5, 1.5, 1.0, 3.0], &d).unwrap();
        assert!(matches!(
            breusch_pagan_godfrey(&fit, &d.x),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn inference_p_values_bounded() {
        let mut rng = NormalStream::new(ChaCha8Rng::seed_from_u64(2));
        let n = 50;
        let a: Vec<f64> = (0..n).map(|_| rng.next()).collect();
        let y: Vec<f64> = (0..n).map(|i| 0.5 * a[i] + rng.next()).collect();
        let d = design(vec![vec![1.0; n], a]);
        let fit = ols_fit(&y, &d).unwrap();
        let rows = inference(&fit, &classical_cov(&fit));
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.p_value)));
    }
}
