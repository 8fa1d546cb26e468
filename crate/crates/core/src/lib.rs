//! Econometric toolkit for ARDL bounds testing on weekly crypto-asset panels.
//!
//! The crate covers the whole workflow: building a market-cap weighted index
//! from constituent price tables, screening series with augmented
//! Dickey-Fuller tests, selecting and estimating an ARDL model in
//! conditional error-correction form, the Pesaran-Shin-Smith bound test,
//! long-run multipliers, the restricted error-correction model and the
//! usual residual diagnostics (Durbin-Watson, Breusch-Godfrey, Breusch-Pagan-
//! Godfrey, CUSUM).
//!
//! Data-parallel loops (lag searches, Monte Carlo replications, per-period
//! index computation) run on rayon when the `parallel` feature is enabled and
//! fall back to plain iterators otherwise. Results are identical either way.

pub mod ardl;
pub mod dist;
pub mod error;
pub mod index;
pub mod ingest;
pub mod par;
pub mod pipeline;
pub mod regression;
pub mod report;
pub mod stability;
pub mod synth;
pub mod unitroot;

pub use error::{Error, Result};
