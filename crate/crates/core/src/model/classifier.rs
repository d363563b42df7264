use serde::{Deserialize, Serialize};

use super::{Model, Site};
use crate::tensor::{Term, WeightedTermList};
use crate::{Error, Result};

/// Closed interval the trained coefficients are confined to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightRange {
    pub lo: f64,
    pub hi: f64,
}

impl Default for WeightRange {
    fn default() -> Self {
        Self { lo: -1.0, hi: 1.0 }
    }
}

impl WeightRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("weight range [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// Parses `lo,hi`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("weight range `{s}` is not `lo,hi`"));
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let lo = a.trim().parse().map_err(|_| bad())?;
        let hi = b.trim().parse().map_err(|_| bad())?;
        Self::new(lo, hi)
    }

    pub fn contains(&self, w: f64) -> bool {
        w >= self.lo - 1e-12 && w <= self.hi + 1e-12
    }

    pub fn clamp(&self, w: f64) -> f64 {
        w.clamp(self.lo, self.hi)
    }

    /// Affine map of `[-1, 1]` onto the range.
    pub fn from_unit(&self, raw: f64) -> f64 {
        self.clamp(self.lo + (raw + 1.0) * 0.5 * (self.hi - self.lo))
    }

    /// Mirror image `lo + hi - w`; plain negation for a symmetric range.
    pub fn reflect(&self, w: f64) -> f64 {
        self.lo + self.hi - w
    }
}

/// Coupling coefficients for every term instance of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedClassifier {
    model: Model,
    coefficients: Vec<f64>,
    range: WeightRange,
}

/// Serializable view of one coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub site: Site,
    pub label: String,
    pub weight: f64,
}

impl TrainedClassifier {
    /// `coefficients[i]` belongs to instance `i`; every value must lie in `range`.
    pub fn new(model: Model, coefficients: Vec<f64>, range: WeightRange) -> Result<Self> {
        if coefficients.len() < model.n_terms() {
            return Err(Error::MissingCoefficient(coefficients.len()));
        }
        if coefficients.len() > model.n_terms() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {} terms",
                coefficients.len(),
                model.n_terms()
            )));
        }
        if let Some((i, w)) = coefficients
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || !range.contains(**w))
        {
            return Err(Error::InvalidArgument(format!(
                "coefficient {i} = {w} outside [{}, {}]",
                range.lo, range.hi
            )));
        }
        Ok(Self {
            model,
            coefficients,
            range,
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn range(&self) -> WeightRange {
        self.range
    }

    /// Coefficients rounded to `digits` decimals.
    pub fn rounded(&self, digits: i32) -> Vec<f64> {
        let p = 10f64.powi(digits);
        self.coefficients.iter().map(|w| (w * p).round() / p).collect()
    }

    pub fn entries(&self) -> Vec<CoefficientEntry> {
        self.model
            .instances()
            .iter()
            .zip(&self.coefficients)
            .map(|(inst, &weight)| CoefficientEntry {
                site: inst.site,
                label: inst.label.clone(),
                weight,
            })
            .collect()
    }

    /// `H = Σ a_i h_i` over the system register. Zero coefficients are dropped.
    pub fn hamiltonian(&self) -> WeightedTermList {
        assemble_hamiltonian(&self.model, &self.coefficients).expect("validated at construction")
    }
}

/// `H = Σ a_i h_i` with `coefficients[i]` on instance `i`.
pub fn assemble_hamiltonian(model: &Model, coefficients: &[f64]) -> Result<WeightedTermList> {
    if coefficients.len() < model.n_terms() {
        return Err(Error::MissingCoefficient(coefficients.len()));
    }
    let mut h = WeightedTermList::new();
    for (inst, &a) in model.instances().iter().zip(coefficients) {
        if a != 0.0 {
            h.push(Term::new(a, inst.operator.clone()))?;
        }
    }
    Ok(h)
}
