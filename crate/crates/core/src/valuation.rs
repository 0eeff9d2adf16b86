//! Valuations on the finite boolean algebras `Sub(X)`.
//!
//! `Sub(X)` is the powerset of the orbits of `X`, so a valuation is stored by its
//! values on atoms. The induced set function is additive by construction, which
//! makes modularity, `μ(∅) = 0`, monotonicity and preservation of directed
//! suprema (every directed family of a finite algebra has a largest member)
//! consequences rather than constraints; the tests pin them anyway.

use crate::groupoid::{FiniteAction, Subobject};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::iter::Sum;
use std::ops::Mul;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValuationError {
    #[error("no weight given for the orbit of `{0}`")]
    MissingOrbitWeight(String),
    #[error("`{0}` is not an orbit representative (least element id of an orbit)")]
    UnknownOrbit(String),
    #[error("negative weight {weight} on the orbit of `{orbit}`")]
    NegativeWeight { orbit: String, weight: f64 },
    #[error("non-finite weight on the orbit of `{0}`")]
    NonFiniteWeight(String),
    #[error("expected {expected} orbit values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("subobject is not closed under transport")]
    NotInvariant,
    #[error("values live on different actions")]
    CarrierMismatch,
    #[error("valuation vanishes on the orbit of `{0}`")]
    NotWellSupported(String),
}

/// A valuation on `Sub(X)`, by its (finite, nonnegative) value on each orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct Valuation {
    carrier: FiniteAction,
    weights: Vec<f64>,
}

impl Valuation {
    /// Weights keyed by orbit representative id; every orbit needs one.
    pub fn new(carrier: &FiniteAction, weights: &BTreeMap<String, f64>) -> Result<Self, ValuationError> {
        let values = orbit_values_from_map(carrier, weights)?;
        Self::from_orbit_weights(carrier, values)
    }

    pub fn from_orbit_weights(carrier: &FiniteAction, weights: Vec<f64>) -> Result<Self, ValuationError> {
        if weights.len() != carrier.num_orbits() {
            return Err(ValuationError::WrongLength {
                expected: carrier.num_orbits(),
                got: weights.len(),
            });
        }
        for (o, &w) in weights.iter().enumerate() {
            let orbit = || carrier.element_name(carrier.orbit_representative(o)).to_string();
            if !w.is_finite() {
                return Err(ValuationError::NonFiniteWeight(orbit()));
            }
            if w < 0.0 {
                return Err(ValuationError::NegativeWeight {
                    orbit: orbit(),
                    weight: w,
                });
            }
        }
        Ok(Valuation {
            carrier: carrier.clone(),
            weights,
        })
    }

    /// Counting measure: each orbit weighs its number of elements.
    pub fn counting(carrier: &FiniteAction) -> Self {
        let weights = carrier.orbits().iter().map(|o| o.len() as f64).collect();
        Valuation {
            carrier: carrier.clone(),
            weights,
        }
    }

    pub fn carrier(&self) -> &FiniteAction {
        &self.carrier
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, orbit: usize) -> f64 {
        self.weights[orbit]
    }

    /// `μ(S)` for an invariant subobject `S`.
    pub fn measure_of(&self, s: &Subobject) -> Result<f64, ValuationError> {
        if !self.carrier.is_invariant(s) {
            return Err(ValuationError::NotInvariant);
        }
        Ok(self.carrier.orbits_in(s).iter().map(|&o| self.weights[o]).sum())
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_well_supported(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }

    /// Always true: weights are finite.
    pub fn is_finite(&self) -> bool {
        true
    }

    /// Always true at finite scale.
    pub fn is_locally_finite(&self) -> bool {
        true
    }

    /// `f·μ`, i.e. `S ↦ ∫ f 1_S dμ`.
    pub fn scaled_by(&self, f: &OrbitFunction<f64>) -> Result<Valuation, ValuationError> {
        if f.carrier != self.carrier {
            return Err(ValuationError::CarrierMismatch);
        }
        let weights = self.weights.iter().zip(&f.values).map(|(w, v)| w * v).collect();
        Valuation::from_orbit_weights(&self.carrier, weights)
    }

    /// `μ / μ(X)`; `None` for the zero valuation.
    pub fn normalized(&self) -> Option<Valuation> {
        let t = self.total();
        (t > 0.0).then(|| Valuation {
            carrier: self.carrier.clone(),
            weights: self.weights.iter().map(|w| w / t).collect(),
        })
    }

    /// `{orbit representative id: weight}`.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        orbit_map(&self.carrier, &self.weights)
    }
}

/// A function on `X` that is constant on orbits, stored per orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitFunction<T = f64> {
    carrier: FiniteAction,
    values: Vec<T>,
}

impl<T: Copy> OrbitFunction<T> {
    pub fn from_values(carrier: &FiniteAction, values: Vec<T>) -> Result<Self, ValuationError> {
        if values.len() != carrier.num_orbits() {
            return Err(ValuationError::WrongLength {
                expected: carrier.num_orbits(),
                got: values.len(),
            });
        }
        Ok(OrbitFunction {
            carrier: carrier.clone(),
            values,
        })
    }

    pub fn constant(carrier: &FiniteAction, value: T) -> Self {
        OrbitFunction {
            carrier: carrier.clone(),
            values: vec![value; carrier.num_orbits()],
        }
    }

    pub fn carrier(&self) -> &FiniteAction {
        &self.carrier
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, orbit: usize) -> T {
        self.values[orbit]
    }

    /// Value at an element.
    pub fn at(&self, x: usize) -> T {
        self.values[self.carrier.orbit_of(x)]
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> OrbitFunction<U> {
        OrbitFunction {
            carrier: self.carrier.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two functions on the same carrier.
    pub fn zip_with<U: Copy, V: Copy>(
        &self,
        other: &OrbitFunction<U>,
        f: impl Fn(T, U) -> V,
    ) -> Result<OrbitFunction<V>, ValuationError> {
        if self.carrier != other.carrier {
            return Err(ValuationError::CarrierMismatch);
        }
        Ok(OrbitFunction {
            carrier: self.carrier.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }
}

impl OrbitFunction<f64> {
    /// `1_S` for an invariant subobject.
    pub fn indicator(carrier: &FiniteAction, s: &Subobject) -> Result<Self, ValuationError> {
        if !carrier.is_invariant(s) {
            return Err(ValuationError::NotInvariant);
        }
        let values = (0..carrier.num_orbits())
            .map(|o| if s.contains(carrier.orbit_representative(o)) { 1.0 } else { 0.0 })
            .collect();
        Ok(OrbitFunction {
            carrier: carrier.clone(),
            values,
        })
    }

    pub fn to_complex(&self) -> OrbitFunction<Complex64> {
        self.map(|v| Complex64::new(v, 0.0))
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        orbit_map(&self.carrier, &self.values)
    }
}

/// `∫ h dμ = Σ_orbits h(o) μ(o)`.
pub fn integrate<T>(h: &OrbitFunction<T>, mu: &Valuation) -> Result<T, ValuationError>
where
    T: Copy + Mul<f64, Output = T> + Sum<T>,
{
    if h.carrier != mu.carrier {
        return Err(ValuationError::CarrierMismatch);
    }
    Ok(h.values.iter().zip(&mu.weights).map(|(&v, &w)| v * w).sum())
}

/// The density `dμ/dν`, the unique positive orbit function with `μ = f·ν`.
pub fn radon_nikodym(mu: &Valuation, nu: &Valuation) -> Result<OrbitFunction<f64>, ValuationError> {
    if mu.carrier != nu.carrier {
        return Err(ValuationError::CarrierMismatch);
    }
    for (o, (&a, &b)) in mu.weights.iter().zip(&nu.weights).enumerate() {
        if a <= 0.0 || b <= 0.0 {
            let rep = mu.carrier.orbit_representative(o);
            return Err(ValuationError::NotWellSupported(mu.carrier.element_name(rep).to_string()));
        }
    }
    Ok(OrbitFunction {
        carrier: mu.carrier.clone(),
        values: mu.weights.iter().zip(&nu.weights).map(|(a, b)| a / b).collect(),
    })
}

pub(crate) fn orbit_values_from_map(
    carrier: &FiniteAction,
    values: &BTreeMap<String, f64>,
) -> Result<Vec<f64>, ValuationError> {
    for k in values.keys() {
        if carrier.orbit_by_representative(k).is_none() {
            return Err(ValuationError::UnknownOrbit(k.clone()));
        }
    }
    (0..carrier.num_orbits())
        .map(|o| {
            let rep = carrier.element_name(carrier.orbit_representative(o));
            values
                .get(rep)
                .copied()
                .ok_or_else(|| ValuationError::MissingOrbitWeight(rep.to_string()))
        })
        .collect()
}

pub(crate) fn orbit_map(carrier: &FiniteAction, values: &[f64]) -> BTreeMap<String, f64> {
    values
        .iter()
        .enumerate()
        .map(|(o, &v)| (carrier.element_name(carrier.orbit_representative(o)).to_string(), v))
        .collect()
}
