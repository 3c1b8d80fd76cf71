use super::point::{dot, Point};
use super::polytope::Polytope;
use super::{EPS_FEAS, EPS_GEOM};
use crate::error::{check_dim, LabError, Result};

/// The norm carried by the base space X.
///
/// `PolyGauge` is the gauge of a centrally symmetric polytope with the origin
/// in its interior; it is validated once, in [`NormSpec::poly_gauge`].
#[derive(Clone, Debug, PartialEq)]
pub enum NormSpec {
    L1,
    L2,
    Linf,
    PolyGauge(Box<Polytope>),
}

impl NormSpec {
    pub fn poly_gauge(body: Polytope) -> Result<Self> {
        let body = body.synced()?.into_owned();
        let rows = body.hrep().expect("synchronized");
        if rows.iter().any(|h| h.offset <= EPS_FEAS) {
            return Err(LabError::NotInterior);
        }
        for v in body.vertices().expect("synchronized") {
            let neg = v.scale(-1.0);
            if !body.contains_point(&neg, EPS_GEOM) {
                return Err(LabError::InvalidParameter(
                    "gauge body is not centrally symmetric".into(),
                ));
            }
        }
        Ok(NormSpec::PolyGauge(Box::new(body)))
    }

    /// Dimension the norm is tied to, if any.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            NormSpec::PolyGauge(b) => Some(b.dim()),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if let Some(d) = self.fixed_dim() {
            check_dim(d, x.len())?;
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            NormSpec::L1 => x.iter().map(|v| v.abs()).sum(),
            NormSpec::L2 => dot(x, x).sqrt(),
            NormSpec::Linf => x.iter().fold(0.0, |m, v| m.max(v.abs())),
            NormSpec::PolyGauge(b) => b
                .hrep()
                .expect("validated gauge")
                .iter()
                .map(|h| h.normal.dot(x) / h.offset)
                .fold(0.0, f64::max),
        }
    }

    /// Dual norm `sup { a·x : ‖x‖ ≤ 1 }`.
    pub fn dual(&self, a: &[f64]) -> f64 {
        match self {
            NormSpec::L1 => a.iter().fold(0.0, |m, v| m.max(v.abs())),
            NormSpec::L2 => dot(a, a).sqrt(),
            NormSpec::Linf => a.iter().map(|v| v.abs()).sum(),
            NormSpec::PolyGauge(b) => b
                .vertices()
                .expect("validated gauge")
                .iter()
                .map(|v| v.dot(a))
                .fold(0.0, f64::max),
        }
    }
}

pub fn norm_eval(x: &Point, norm: &NormSpec) -> Result<f64> {
    norm.eval(x)
}

/// Norm on the lifted space E = ℝ × X: `|t| + ‖x‖`.
pub fn norm_e(t: f64, x: &Point, norm: &NormSpec) -> Result<f64> {
    if !t.is_finite() {
        return Err(LabError::NonFinite);
    }
    Ok(t.abs() + norm.eval(x)?)
}
