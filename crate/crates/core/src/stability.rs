//! CUSUM test on recursive residuals.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::ardl::BoundLevel;
use crate::error::{Error, Result};
use crate::regression::RANK_TOL;

/// Brown-Durbin-Evans line constant for a two-sided test at `level`.
pub fn cusum_constant(level: BoundLevel) -> f64 {
    match level {
        BoundLevel::Ten => 0.850,
        BoundLevel::Five => 0.948,
        BoundLevel::One => 1.143,
    }
}

/// Standardised one-step-ahead prediction errors
/// `w_t = (y_t - x_t' b_{t-1}) / sqrt(1 + x_t' (X_{t-1}' X_{t-1})^-1 x_t)`
/// for `t = p+1..n`, where `b_{t-1}` is fitted to the first `t-1` rows.
/// The inverse is carried forward with rank-one updates.
pub fn recursive_residuals(y: &[f64], x: &DMatrix<f64>) -> Result<Vec<f64>> {
    let (n, p) = x.shape();
    if y.len() != n {
        return Err(Error::Dimension(format!("y has {} rows but X has {n}", y.len())));
    }
    if p == 0 || n <= p {
        return Err(Error::InsufficientData(format!(
            "{n} observations for {p} parameters"
        )));
    }
    let head = x.rows(0, p).into_owned();
    let qr = head.clone().qr();
    let r = qr.r();
    let scale = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..p).any(|i| r[(i, i)].abs() <= RANK_TOL * scale) || scale == 0.0 {
        return Err(Error::RankDeficient {
            columns: vec![format!(
                "leading {p} rows (time order is fixed, so rows cannot be reordered)"
            )],
        });
    }
    let head_inv = head
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient {
            columns: vec![format!("leading {p} rows")],
        })?;
    let mut pinv = &head_inv * head_inv.transpose();
    let mut b = &head_inv * DVector::from_column_slice(&y[..p]);

    let mut w = Vec::with_capacity(n - p);
    for t in p..n {
        let xt = x.row(t).transpose();
        let px = &pinv * &xt;
        let f = 1.0 + xt.dot(&px);
        let e = y[t] - xt.dot(&b);
        w.push(e / f.sqrt());
        b += &px * (e / f);
        pinv -= (&px * px.transpose()) / f;
    }
    Ok(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CusumResult {
    /// 1-based periods `k+1..n`.
    pub t: Vec<usize>,
    pub path: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub sigma: f64,
    pub level: BoundLevel,
    pub stable: bool,
    pub first_crossing: Option<usize>,
}

/// Cumulated recursive residuals scaled by their sample standard deviation,
/// against lines `+-a (sqrt(n-k) + 2 (t-k) / sqrt(n-k))`.
pub fn cusum_test(y: &[f64], x: &DMatrix<f64>, level: BoundLevel) -> Result<CusumResult> {
    let w = recursive_residuals(y, x)?;
    let m = w.len();
    if m < 2 {
        return Err(Error::InsufficientData("fewer than two recursive residuals".into()));
    }
    let mean = w.iter().sum::<f64>() / m as f64;
    let var = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    let sigma = var.sqrt();
    if !(sigma > 1e-300) || !sigma.is_finite() {
        return Err(Error::Undefined(
            "CUSUM scale: recursive residuals have zero variance".into(),
        ));
    }
    let a = cusum_constant(level);
    let root = (m as f64).sqrt();
    let k = x.ncols();
    let mut acc = 0.0;
    let mut path = Vec::with_capacity(m);
    let mut upper = Vec::with_capacity(m);
    let mut first_crossing = None;
    for (i, wi) in w.iter().enumerate() {
        acc += wi / sigma;
        let line = a * (root + 2.0 * (i + 1) as f64 / root);
        if first_crossing.is_none() && acc.abs() > line {
            first_crossing = Some(k + i + 1);
        }
        path.push(acc);
        upper.push(line);
    }
    Ok(CusumResult {
        t: (k + 1..=k + m).collect(),
        lower: upper.iter().map(|u| -u).collect(),
        path,
        upper,
        sigma,
        level,
        stable: first_crossing.is_none(),
        first_crossing,
    })
}

impl CusumResult {
    /// `t,cusum,lower,upper` rows.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::csv("<cusum>", e);
        wtr.write_record(["t", "cusum", "lower", "upper"]).map_err(io)?;
        for i in 0..self.t.len() {
            wtr.write_record([
                self.t[i].to_string(),
                format!("{:.6}", self.path[i]),
                format!("{:.6}", self.lower[i]),
                format!("{:.6}", self.upper[i]),
            ])
            .map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::io("<cusum>", e))?;
        Ok(())
    }
}
