use super::extension::induced_valuation;
use super::{positive_or_err, InvariantMeasure, MeasureError};
use crate::groupoid::{pullback, slice_groupoid, EquivariantMap, FiniteAction};
use crate::tolerance::rel_close;
use crate::valuation::{orbit_map, orbit_values_from_map, radon_nikodym, OrbitFunction, Valuation};
use std::collections::BTreeMap;

/// A map `X → χ`: an invariant measure on the slice over `X`, given by its
/// (strictly positive) value on each orbit of `X`.
///
/// The mass of `p: V → X` is `Σ_o λ(o) · |p⁻¹(x_o)|` for any `x_o ∈ o`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSection {
    carrier: FiniteAction,
    values: Vec<f64>,
}

impl ChiSection {
    /// Values keyed by orbit representative id.
    pub fn new(carrier: &FiniteAction, values: &BTreeMap<String, f64>) -> Result<Self, MeasureError> {
        Self::from_values(carrier, orbit_values_from_map(carrier, values)?)
    }

    pub fn from_values(carrier: &FiniteAction, values: Vec<f64>) -> Result<Self, MeasureError> {
        if values.len() != carrier.num_orbits() {
            return Err(MeasureError::WrongLength {
                expected: carrier.num_orbits(),
                got: values.len(),
            });
        }
        for (o, &v) in values.iter().enumerate() {
            positive_or_err(|| carrier.element_name(carrier.orbit_representative(o)).to_string(), v)?;
        }
        Ok(ChiSection {
            carrier: carrier.clone(),
            values,
        })
    }

    pub fn carrier(&self) -> &FiniteAction {
        &self.carrier
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, orbit: usize) -> f64 {
        self.values[orbit]
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        orbit_map(&self.carrier, &self.values)
    }

    /// The slice measure on `Sub(X)`: orbit `o` as an object over `X` has mass `λ(o)`.
    pub fn as_valuation(&self) -> Valuation {
        Valuation::from_orbit_weights(&self.carrier, self.values.clone()).expect("positive values")
    }

    pub fn from_valuation(v: &Valuation) -> Result<Self, MeasureError> {
        Self::from_values(v.carrier(), v.weights().to_vec())
    }

    /// Mass of an object `p: V → X` of the slice.
    pub fn slice_mass(&self, p: &EquivariantMap) -> Result<f64, MeasureError> {
        if p.target() != &self.carrier {
            return Err(MeasureError::CarrierMismatch);
        }
        let sizes = p.fiber_profile().fiber_sizes;
        Ok((0..self.carrier.num_orbits())
            .map(|o| self.values[o] * sizes[self.carrier.orbit_representative(o)] as f64)
            .sum())
    }

    /// The same data as an invariant measure on the action groupoid `𝒢 ⋉ X`.
    pub fn to_slice_measure(&self) -> InvariantMeasure {
        let sg = slice_groupoid(&self.carrier);
        let mut weights = vec![0.0; sg.num_components()];
        for (o, &v) in self.values.iter().enumerate() {
            let rep = self.carrier.element_name(self.carrier.orbit_representative(o));
            weights[sg.component_by_representative(rep).expect("components are orbits")] = v;
        }
        InvariantMeasure::new(&sg, weights).expect("positive values")
    }

    pub fn from_slice_measure(carrier: &FiniteAction, mu: &InvariantMeasure) -> Result<Self, MeasureError> {
        if mu.groupoid() != &slice_groupoid(carrier) {
            return Err(MeasureError::GroupoidMismatch);
        }
        let values = (0..carrier.num_orbits())
            .map(|o| {
                let rep = carrier.element_name(carrier.orbit_representative(o));
                mu.weights()[mu.groupoid().component_by_representative(rep).expect("components are orbits")]
            })
            .collect();
        Self::from_values(carrier, values)
    }

    /// A global invariant measure as a section over the terminal object.
    pub fn from_global(mu: &InvariantMeasure) -> Self {
        let one = FiniteAction::terminal(mu.groupoid());
        let values = (0..one.num_orbits())
            .map(|o| mu.weights()[one.orbit_component(o)])
            .collect();
        Self::from_values(&one, values).expect("positive weights")
    }

    /// Inverse of [`from_global`](Self::from_global); the carrier must be terminal.
    pub fn to_global(&self) -> Result<InvariantMeasure, MeasureError> {
        let g = self.carrier.groupoid();
        if self.carrier != FiniteAction::terminal(g) {
            return Err(MeasureError::CarrierMismatch);
        }
        let mut weights = vec![0.0; g.num_components()];
        for (o, &v) in self.values.iter().enumerate() {
            weights[self.carrier.orbit_component(o)] = v;
        }
        InvariantMeasure::new(g, weights)
    }

    /// `f·λ`, the action of a positive internal real.
    pub fn principal_action(&self, f: &OrbitFunction<f64>) -> Result<ChiSection, MeasureError> {
        if f.carrier() != &self.carrier {
            return Err(MeasureError::CarrierMismatch);
        }
        for (o, &v) in f.values().iter().enumerate() {
            positive_or_err(|| self.orbit_name(o), v)?;
        }
        Self::from_values(&self.carrier, self.values.iter().zip(f.values()).map(|(a, b)| a * b).collect())
    }

    /// The unique positive `f` with `f·self = other`.
    pub fn principal_ratio(&self, other: &ChiSection) -> Result<OrbitFunction<f64>, MeasureError> {
        if other.carrier != self.carrier {
            return Err(MeasureError::CarrierMismatch);
        }
        Ok(radon_nikodym(&other.as_valuation(), &self.as_valuation())?)
    }

    /// Pointwise sum; there is no zero section.
    pub fn add(&self, other: &ChiSection) -> Result<ChiSection, MeasureError> {
        if other.carrier != self.carrier {
            return Err(MeasureError::CarrierMismatch);
        }
        Self::from_values(&self.carrier, self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect())
    }

    fn orbit_name(&self, o: usize) -> String {
        self.carrier.element_name(self.carrier.orbit_representative(o)).to_string()
    }
}

/// `f*λ` for `f: Y → X`, defined by `(f*λ)(V, q) = λ(V, f ∘ q)`.
pub fn pullback_measure(f: &EquivariantMap, lambda: &ChiSection) -> Result<ChiSection, MeasureError> {
    ChiSection::from_valuation(&induced_valuation(&lambda.as_valuation(), f)?)
}

/// Descend `λ` on `X` along an epimorphism `f: X ↠ Y`.
///
/// Requires `π₁*λ = π₂*λ` on `X ×_Y X` within `tol`; otherwise reports an orbit
/// of the fiber product where the two pullbacks differ.
pub fn glue_measures(f: &EquivariantMap, lambda: &ChiSection, tol: f64) -> Result<ChiSection, MeasureError> {
    if lambda.carrier() != f.source() {
        return Err(MeasureError::CarrierMismatch);
    }
    if !f.is_epi() {
        return Err(MeasureError::NotEpi);
    }
    let p = pullback(f, f)?;
    let left = pullback_measure(&p.first, lambda)?;
    let right = pullback_measure(&p.second, lambda)?;
    for o in 0..p.object.num_orbits() {
        if !rel_close(left.value(o), right.value(o), tol) {
            return Err(MeasureError::DescentFailure {
                orbit: p.object.element_name(p.object.orbit_representative(o)).to_string(),
                left: left.value(o),
                right: right.value(o),
            });
        }
    }
    let (x, y) = (f.source(), f.target());
    let mut values = vec![None; y.num_orbits()];
    for o in 0..x.num_orbits() {
        let r = x.orbit_representative(o);
        let target_orbit = y.orbit_of(f.apply(r));
        if values[target_orbit].is_none() {
            let n = x.orbits()[o].iter().filter(|&&e| f.apply(e) == f.apply(r)).count();
            values[target_orbit] = Some(lambda.value(o) / n as f64);
        }
    }
    let nu = ChiSection::from_values(y, values.into_iter().map(|v| v.expect("f is epi")).collect())?;
    let back = pullback_measure(f, &nu)?;
    for o in 0..x.num_orbits() {
        if !rel_close(back.value(o), lambda.value(o), tol) {
            return Err(MeasureError::DescentFailure {
                orbit: x.element_name(x.orbit_representative(o)).to_string(),
                left: back.value(o),
                right: lambda.value(o),
            });
        }
    }
    Ok(nu)
}
