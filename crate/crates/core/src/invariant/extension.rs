use super::MeasureError;
use crate::groupoid::{equivariant_maps, pullback, EquivariantMap, FiniteAction};
use crate::tolerance::rel_deviation;
use crate::valuation::{integrate, OrbitFunction, Valuation};

/// Upper bound on the maps enumerated while searching for covers.
const MAP_SEARCH_LIMIT: usize = 4096;

/// A class of objects with a measure known on each member's `Sub(C)`.
#[derive(Debug, Clone)]
pub struct MeasureClass {
    members: Vec<(String, Valuation)>,
}

/// An extension value and the class member whose cover produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionValue {
    pub value: f64,
    pub cover: String,
}

impl MeasureClass {
    pub fn new(members: Vec<(String, Valuation)>) -> Self {
        MeasureClass { members }
    }

    pub fn members(&self) -> &[(String, Valuation)] {
        &self.members
    }

    fn contains(&self, x: &FiniteAction) -> bool {
        self.members.iter().any(|(_, v)| v.carrier() == x)
    }

    /// Every sample object that maps into a member must itself be a member.
    pub fn check_downward_closed(&self, sample: &[(String, FiniteAction)]) -> Result<(), MeasureError> {
        for (name, y) in sample {
            if self.contains(y) {
                continue;
            }
            for (member, v) in &self.members {
                if !equivariant_maps(y, v.carrier(), 1)?.is_empty() {
                    return Err(MeasureError::NotDownwardClosed {
                        object: name.clone(),
                        member: member.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// All epimorphisms from members onto `x`, as `(member index, map)`.
    pub fn covers(&self, x: &FiniteAction) -> Result<Vec<(usize, EquivariantMap)>, MeasureError> {
        let mut out = Vec::new();
        for (i, (_, v)) in self.members.iter().enumerate() {
            for f in equivariant_maps(v.carrier(), x, MAP_SEARCH_LIMIT)? {
                if f.is_epi() {
                    out.push((i, f));
                }
            }
        }
        Ok(out)
    }

    /// The extension `μ(X) = ∫_C 1/|f⁻¹f(c)| dμ` along the first available cover.
    /// A member equal to `x` is used through its identity.
    pub fn extend(&self, x: &FiniteAction, sample: &[(String, FiniteAction)]) -> Result<ExtensionValue, MeasureError> {
        self.check_downward_closed(sample)?;
        if let Some((name, v)) = self.members.iter().find(|(_, v)| v.carrier() == x) {
            return Ok(ExtensionValue {
                value: v.total(),
                cover: name.clone(),
            });
        }
        for (name, v) in &self.members {
            if let Some(f) = equivariant_maps(v.carrier(), x, MAP_SEARCH_LIMIT)?.into_iter().find(|f| f.is_epi()) {
                return Ok(ExtensionValue {
                    value: extend_along(v, &f)?,
                    cover: name.clone(),
                });
            }
        }
        Err(MeasureError::NoCover)
    }
}

/// `∫_C 1/|f⁻¹f(c)| dν` for an epimorphism `f: C ↠ X`.
pub fn extend_along(nu: &Valuation, f: &EquivariantMap) -> Result<f64, MeasureError> {
    if nu.carrier() != f.source() {
        return Err(MeasureError::CarrierMismatch);
    }
    if !f.is_epi() {
        return Err(MeasureError::NotEpi);
    }
    let c = f.source();
    let sizes = f.fiber_profile().fiber_sizes;
    let h = OrbitFunction::from_values(
        c,
        (0..c.num_orbits())
            .map(|o| 1.0 / sizes[f.apply(c.orbit_representative(o))] as f64)
            .collect(),
    )?;
    Ok(integrate(&h, nu)?)
}

/// The measure on `Sub(Y)` forced by a map `f: Y → C` into a measured object.
///
/// `f` restricted to an orbit `o` is n-to-1 onto the orbit it hits, so the
/// axioms force `μ(o) = n · ν(f(o))`.
pub fn induced_valuation(nu: &Valuation, f: &EquivariantMap) -> Result<Valuation, MeasureError> {
    if nu.carrier() != f.target() {
        return Err(MeasureError::CarrierMismatch);
    }
    let (y, c) = (f.source(), f.target());
    let weights = (0..y.num_orbits())
        .map(|o| {
            let r = y.orbit_representative(o);
            let n = y.orbits()[o].iter().filter(|&&e| f.apply(e) == f.apply(r)).count();
            n as f64 * nu.weight(c.orbit_of(f.apply(r)))
        })
        .collect();
    Ok(Valuation::from_orbit_weights(y, weights)?)
}

/// The well-definedness argument for two covers, executed.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberProductOracle {
    /// Extension value along the first cover.
    pub via_first: f64,
    /// Extension value along the second cover.
    pub via_second: f64,
    /// `∫_P 1/(|f⁻¹f(c)|·|f′⁻¹f′(c′)|) dμ` on `P = C ×_X C′`.
    pub fiber_product: f64,
    /// Relative disagreement between the two measures `P` inherits from `C` and `C′`.
    pub inherited_mismatch: f64,
    pub fiber_product_size: usize,
}

impl FiberProductOracle {
    pub fn max_deviation(&self) -> f64 {
        rel_deviation(self.via_first, self.via_second)
            .max(rel_deviation(self.via_first, self.fiber_product))
            .max(rel_deviation(self.via_second, self.fiber_product))
            .max(self.inherited_mismatch)
    }
}

pub fn fiber_product_oracle(
    f: &EquivariantMap,
    nu: &Valuation,
    g: &EquivariantMap,
    nu2: &Valuation,
) -> Result<FiberProductOracle, MeasureError> {
    let via_first = extend_along(nu, f)?;
    let via_second = extend_along(nu2, g)?;
    let p = pullback(f, g)?;
    let from_first = induced_valuation(nu, &p.first)?;
    let from_second = induced_valuation(nu2, &p.second)?;
    let inherited_mismatch = from_first
        .weights()
        .iter()
        .zip(from_second.weights())
        .map(|(&a, &b)| rel_deviation(a, b))
        .fold(0.0, f64::max);
    let (fs, gs) = (f.fiber_profile().fiber_sizes, g.fiber_profile().fiber_sizes);
    let obj = &p.object;
    let h = OrbitFunction::from_values(
        obj,
        (0..obj.num_orbits())
            .map(|o| {
                let r = obj.orbit_representative(o);
                let a = fs[f.apply(p.first.apply(r))] as f64;
                let b = gs[g.apply(p.second.apply(r))] as f64;
                1.0 / (a * b)
            })
            .collect(),
    )?;
    Ok(FiberProductOracle {
        via_first,
        via_second,
        fiber_product: integrate(&h, &from_first)?,
        inherited_mismatch,
        fiber_product_size: obj.len(),
    })
}
