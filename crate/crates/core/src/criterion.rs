//! Herman's destruction criteria.
//!
//! With `m = min T` and `M = max T` the criterion reads
//! `1/(1 + m/2) > 1 + M/2 + sqrt(M + M^2/4)`. In dimension one `T = D phi`.
//! The inequality is sufficient for the absence of invariant Lipschitz
//! Lagrangian graphs; an unsatisfied criterion says nothing either way.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{laplacian, GridFunction};
use crate::scalar::Real;
use crate::twist::lipschitz_bound;

pub const SUFFICIENCY_NOTE: &str =
    "sufficient condition only: an unsatisfied criterion does not imply that invariant tori exist";

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport<T: Real> {
    pub d: usize,
    pub source: String,
    pub min_t: T,
    pub max_t: T,
    pub lhs: T,
    pub rhs: T,
    pub satisfied: bool,
    /// `-min T / 2 > sqrt(max T) + max T`.
    pub asymptotic_satisfied: bool,
    pub note: &'static str,
}

/// Column order of [`CriterionReport::csv_row`].
pub const REPORT_CSV_HEADER: &str = "d,source,min_t,max_t,lhs,rhs,satisfied,asymptotic_satisfied";

impl<T: Real> CriterionReport<T> {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{:e},{:e},{:e},{},{}",
            self.d,
            self.source.replace(',', ";"),
            self.min_t,
            self.max_t,
            self.lhs,
            self.rhs,
            self.satisfied,
            self.asymptotic_satisfied
        )
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    /// `(lhs - 1) / (rhs - 1)`; the criterion holds once this exceeds 1.
    pub fn margin_ratio(&self) -> T {
        (self.lhs - T::one()) / (self.rhs - T::one())
    }
}

/// Evaluates the criterion for the extrema of a test field.
pub fn check<T: Real>(d: usize, source: &str, min_t: T, max_t: T) -> Result<CriterionReport<T>> {
    if !min_t.is_finite() || !max_t.is_finite() {
        return Err(Error::Domain("non-finite extrema".into()));
    }
    if !(min_t > T::lit(-2.0)) {
        return Err(Error::Domain(format!("min T = {min_t} must exceed -2")));
    }
    if max_t < T::zero() {
        return Err(Error::Domain(format!("max T = {max_t} must be nonnegative")));
    }
    let lhs = (T::one() + min_t / T::lit(2.0)).recip();
    let rhs = lipschitz_bound(max_t)?;
    Ok(CriterionReport {
        d,
        source: source.to_string(),
        min_t,
        max_t,
        lhs,
        rhs,
        satisfied: lhs > rhs,
        asymptotic_satisfied: -min_t / T::lit(2.0) > max_t.sqrt() + max_t,
        note: SUFFICIENCY_NOTE,
    })
}

/// One-dimensional criterion from the extrema of `D phi`.
pub fn check_1d<T: Real>(min_d: T, max_d: T) -> Result<CriterionReport<T>> {
    check(1, "extrema of D phi", min_d, max_d)
}

/// Criterion from the grid extrema of a trace field.
pub fn check_multi<T: Real>(t: &GridFunction<T>) -> Result<CriterionReport<T>> {
    check(t.dims(), "grid extrema of T", t.min(), t.max())
}

/// `T = (1/d) Laplacian(Psi)`.
pub fn trace_field<T: Real>(psi: &GridFunction<T>) -> GridFunction<T> {
    laplacian(psi).scaled(T::of_usize(psi.dims()).recip())
}

/// [`trace_field`] followed by [`check_multi`].
pub fn verdict_pipeline<T: Real>(psi: &GridFunction<T>) -> Result<CriterionReport<T>> {
    let mut r = check_multi(&trace_field(psi))?;
    r.source = "trace field of Psi".into();
    Ok(r)
}
