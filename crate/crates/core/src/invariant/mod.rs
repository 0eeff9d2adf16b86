//! Invariant measures on the action topos of a finite groupoid.
//!
//! A candidate is anything that assigns a mass to every object
//! ([`ObjectMeasure`]); [`check_axioms`] re-verifies the axioms on a sample
//! instead of trusting how the candidate was built. The canonical candidates
//! are [`InvariantMeasure`]s, given by one positive weight per component:
//! `μ(X) = Σ_c |X|_c · w_c`.

mod chi;
mod extension;

pub use chi::{glue_measures, pullback_measure, ChiSection};
pub use extension::{extend_along, fiber_product_oracle, induced_valuation, ExtensionValue, FiberProductOracle, MeasureClass};

use crate::groupoid::{EquivariantMap, FiniteAction, FiniteGroupoid, GroupoidError, Subobject};
use crate::report::Check;
use crate::valuation::{integrate, OrbitFunction, Valuation, ValuationError};
use num_complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error("object lives over a different groupoid")]
    GroupoidMismatch,
    #[error("values live on different actions")]
    CarrierMismatch,
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("`{0}` is not a component representative (least object id of a component)")]
    UnknownComponent(String),
    #[error("no weight given for the component of `{0}`")]
    MissingComponentWeight(String),
    #[error("value {value} at `{at}` is not strictly positive")]
    NotPositive { at: String, value: f64 },
    #[error("pushforward is not constant on the orbit of `{0}`")]
    NotOrbitConstant(String),
    #[error("map is not an epimorphism")]
    NotEpi,
    #[error("no member of the class covers the object")]
    NoCover,
    #[error("`{object}` maps into class member `{member}` but is not in the class")]
    NotDownwardClosed { object: String, member: String },
    #[error("descent fails on the orbit of `{orbit}`: {left} ≠ {right}")]
    DescentFailure { orbit: String, left: f64, right: f64 },
}

/// Anything that assigns a mass to objects of the topos.
pub trait ObjectMeasure {
    fn measure(&self, x: &FiniteAction) -> f64;

    /// The induced set function on `Sub(X)`, read off on orbits.
    fn valuation_on(&self, x: &FiniteAction) -> Result<Valuation, MeasureError> {
        let weights = (0..x.num_orbits())
            .map(|o| Ok(self.measure(&x.restrict(&x.orbit_subobject(o))?)))
            .collect::<Result<Vec<_>, GroupoidError>>()?;
        Ok(Valuation::from_orbit_weights(x, weights)?)
    }
}

impl<F: Fn(&FiniteAction) -> f64> ObjectMeasure for F {
    fn measure(&self, x: &FiniteAction) -> f64 {
        self(x)
    }
}

/// `μ(X) = Σ_c |X|_c · w_c` with every `w_c > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantMeasure {
    groupoid: FiniteGroupoid,
    weights: Vec<f64>,
}

impl InvariantMeasure {
    pub fn new(groupoid: &FiniteGroupoid, weights: Vec<f64>) -> Result<Self, MeasureError> {
        if weights.len() != groupoid.num_components() {
            return Err(MeasureError::WrongLength {
                expected: groupoid.num_components(),
                got: weights.len(),
            });
        }
        for (c, &w) in weights.iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) {
                return Err(MeasureError::NotPositive {
                    at: groupoid.component_representative(c).to_string(),
                    value: w,
                });
            }
        }
        Ok(InvariantMeasure {
            groupoid: groupoid.clone(),
            weights,
        })
    }

    /// Weights keyed by component representative object id.
    pub fn from_map(groupoid: &FiniteGroupoid, weights: &BTreeMap<String, f64>) -> Result<Self, MeasureError> {
        for k in weights.keys() {
            if groupoid.component_by_representative(k).is_none() {
                return Err(MeasureError::UnknownComponent(k.clone()));
            }
        }
        let values = (0..groupoid.num_components())
            .map(|c| {
                let rep = groupoid.component_representative(c);
                weights
                    .get(rep)
                    .copied()
                    .ok_or_else(|| MeasureError::MissingComponentWeight(rep.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(groupoid, values)
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        self.weights
            .iter()
            .enumerate()
            .map(|(c, &w)| (self.groupoid.component_representative(c).to_string(), w))
            .collect()
    }

    pub fn evaluate(&self, x: &FiniteAction) -> Result<f64, MeasureError> {
        if x.groupoid() != &self.groupoid {
            return Err(MeasureError::GroupoidMismatch);
        }
        Ok(x.internal_cardinal().iter().zip(&self.weights).map(|(&n, &w)| n as f64 * w).sum())
    }

    /// Restriction to `Sub(X)`: an orbit over component `c` weighs `w_c` times its fiber size.
    pub fn restrict(&self, x: &FiniteAction) -> Result<Valuation, MeasureError> {
        if x.groupoid() != &self.groupoid {
            return Err(MeasureError::GroupoidMismatch);
        }
        let weights = (0..x.num_orbits())
            .map(|o| self.weights[x.orbit_component(o)] * x.orbit_fiber_size(o) as f64)
            .collect();
        Ok(Valuation::from_orbit_weights(x, weights)?)
    }
}

impl ObjectMeasure for InvariantMeasure {
    fn measure(&self, x: &FiniteAction) -> f64 {
        self.evaluate(x).expect("object over the measure's groupoid")
    }

    fn valuation_on(&self, x: &FiniteAction) -> Result<Valuation, MeasureError> {
        self.restrict(x)
    }
}

/// Verify the axioms of an invariant measure on a sample.
///
/// Entries are `IM1:<object>` (the restriction to `Sub(X)` is a finite
/// valuation), `IM2:<object of the groupoid>` (representables have positive
/// mass) and `IM3:<map>` (`μ(Y) = n·μ(X)` for an n-to-1 `f: Y → X`). Maps
/// that are not n-to-1 for a positive `n` get an n/a entry, and `IM3[n=∞]` is
/// always n/a because every map is finite.
pub fn check_axioms(
    candidate: &dyn ObjectMeasure,
    groupoid: &FiniteGroupoid,
    objects: &[(String, FiniteAction)],
    maps: &[(String, EquivariantMap)],
    tol: f64,
) -> Vec<Check> {
    let mut checks = Vec::new();
    for (name, x) in objects {
        checks.push(check_finite_valuation(candidate, name, x, tol));
    }
    for s in 0..groupoid.num_objects() {
        let name = format!("IM2:{}", groupoid.object_name(s));
        let m = candidate.measure(&FiniteAction::representable(groupoid, s));
        checks.push(if m > 0.0 && m.is_finite() {
            Check::pass(name)
        } else {
            Check::fail(name, format!("mass {m} on the representable"))
        });
    }
    for (name, f) in maps {
        let label = format!("IM3:{name}");
        let profile = f.fiber_profile();
        match profile.n_to_1 {
            Some(n) if n > 0 => {
                let (my, mx) = (candidate.measure(f.source()), candidate.measure(f.target()));
                checks.push(Check::compare(
                    label,
                    my,
                    n as f64 * mx,
                    tol,
                    format!("{name}: mu(source) = {my}, {n} * mu(target) = {}", n as f64 * mx),
                ));
            }
            Some(_) => checks.push(Check::not_applicable(label, "0-to-1 map from the empty object")),
            None if f.target().is_empty() => checks.push(Check::not_applicable(label, "empty codomain")),
            None => checks.push(Check::not_applicable(label, "fiber sizes are not constant")),
        }
    }
    checks.push(Check::not_applicable("IM3[n=∞]", "every map between finite actions is finite"));
    checks
}

fn check_finite_valuation(candidate: &dyn ObjectMeasure, name: &str, x: &FiniteAction, tol: f64) -> Check {
    let label = format!("IM1:{name}");
    let atoms: Vec<f64> = match (0..x.num_orbits())
        .map(|o| x.restrict(&x.orbit_subobject(o)).map(|sub| candidate.measure(&sub)))
        .collect::<Result<_, _>>()
    {
        Ok(a) => a,
        Err(e) => return Check::fail(label, e.to_string()),
    };
    if let Some(o) = atoms.iter().position(|a| !a.is_finite() || *a < 0.0) {
        let rep = x.element_name(x.orbit_representative(o));
        return Check::fail(label, format!("mass {} on the orbit of {rep}", atoms[o]));
    }
    let empty = candidate.measure(&x.restrict(&Subobject::empty()).expect("empty is invariant"));
    if empty != 0.0 {
        return Check::fail(label, format!("mass {empty} on the empty subobject"));
    }
    // additivity over atoms is equivalent to the modular law plus μ(∅) = 0
    let mut worst = 0.0f64;
    let mut witness = String::new();
    let subsets: Box<dyn Iterator<Item = Subobject>> = if x.num_orbits() <= 10 {
        Box::new(x.invariant_subobjects())
    } else {
        let n = x.num_orbits();
        Box::new((0..=n).map(move |k| (0..k).collect::<Vec<_>>()).map(|o| x.subobject_from_orbits(&o)))
    };
    for s in subsets {
        let direct = candidate.measure(&x.restrict(&s).expect("invariant"));
        let summed: f64 = x.orbits_in(&s).iter().map(|&o| atoms[o]).sum();
        let dev = crate::tolerance::rel_deviation(direct, summed);
        if dev > worst {
            worst = dev;
            let ids: Vec<&str> = s.members().iter().map(|&i| x.element_name(i)).collect();
            witness = format!("{{{}}}: {direct} vs {summed}", ids.join(","));
        }
    }
    Check::from_deviation(label, worst, tol, witness)
}

/// Both sides of `∫_Y h dμ = ∫_X (Σ_{f(y)=x} h(y)) dμ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeOfVariables {
    pub lhs: Complex64,
    pub rhs: Complex64,
}

impl ChangeOfVariables {
    pub fn relative_deviation(&self) -> f64 {
        let m = self.lhs.norm().max(self.rhs.norm());
        if m == 0.0 {
            0.0
        } else {
            (self.lhs - self.rhs).norm() / m
        }
    }
}

pub fn change_of_variables(
    f: &EquivariantMap,
    h: &OrbitFunction<Complex64>,
    mu: &InvariantMeasure,
) -> Result<ChangeOfVariables, MeasureError> {
    let (y, x) = (f.source(), f.target());
    if h.carrier() != y {
        return Err(MeasureError::CarrierMismatch);
    }
    let lhs = integrate(h, &mu.restrict(y)?)?;
    let g = pushforward(f, h)?;
    let rhs = integrate(&g, &mu.restrict(x)?)?;
    Ok(ChangeOfVariables { lhs, rhs })
}

/// `g(x) = Σ_{f(y)=x} h(y)`, checked constant on orbits.
pub fn pushforward(f: &EquivariantMap, h: &OrbitFunction<Complex64>) -> Result<OrbitFunction<Complex64>, MeasureError> {
    let x = f.target();
    let mut sums = vec![Complex64::new(0.0, 0.0); x.len()];
    for (e, &img) in f.images().iter().enumerate() {
        sums[img] += h.at(e);
    }
    let mut values = Vec::with_capacity(x.num_orbits());
    for (o, members) in x.orbits().iter().enumerate() {
        let v = sums[x.orbit_representative(o)];
        let scale = members.iter().map(|&e| sums[e].norm()).fold(0.0, f64::max);
        if members.iter().any(|&e| (sums[e] - v).norm() > 1e-12 * scale) {
            return Err(MeasureError::NotOrbitConstant(x.element_name(x.orbit_representative(o)).to_string()));
        }
        values.push(v);
    }
    Ok(OrbitFunction::from_values(x, values)?)
}

/// `∫_Y 1/|f⁻¹(f(y))| dμ` for an epimorphism `f: Y ↠ X`; equals `μ(X)`.
pub fn epi_mass(f: &EquivariantMap, mu: &dyn ObjectMeasure) -> Result<f64, MeasureError> {
    if !f.is_epi() {
        return Err(MeasureError::NotEpi);
    }
    let y = f.source();
    let sizes = f.fiber_profile().fiber_sizes;
    let h = OrbitFunction::from_values(
        y,
        (0..y.num_orbits())
            .map(|o| 1.0 / sizes[f.apply(y.orbit_representative(o))] as f64)
            .collect(),
    )?;
    Ok(integrate(&h, &mu.valuation_on(y)?)?)
}

/// Counting valuation on a nonzero object: nonzero and finite.
pub fn counting_valuation(x: &FiniteAction) -> Option<Valuation> {
    (!x.is_empty()).then(|| Valuation::counting(x))
}

pub(crate) fn positive_or_err(at: impl FnOnce() -> String, value: f64) -> Result<f64, MeasureError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(MeasureError::NotPositive { at: at(), value })
    }
}
