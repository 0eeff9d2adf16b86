//! Operators on `l²(X)` that commute with the groupoid action.
//!
//! Entries are stored as `a[x][y] = ⟨e_x, a e_y⟩` and vanish unless `x` and `y`
//! lie over the same object. A transport `g: s → t` acts by the partial
//! isometry `ρ(g) e_x = e_{g·x}` on `l²(X_s)`, so `a` commutes with every `ρ(g)`
//! iff `a[g·x][g·y] = a[x][y]`.

mod flow;
mod state;

pub use flow::{
    kms_check, kms_function, modular_unitary, non_trace_witness, theta, trace_check, KmsPoint, KmsReport,
    LineBundleChar, NonTraceWitness,
};
pub use state::{measure_from_state, state_from_measure, VectorMap, VectorState};

use crate::groupoid::{FiniteAction, GroupoidError, Subobject};
use crate::invariant::ChiSection;
use crate::valuation::{Valuation, ValuationError};
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative slack for equalities that hold exactly in exact arithmetic.
const STRUCTURAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModularError {
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error("values live on different actions")]
    CarrierMismatch,
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    ShapeMismatch { expected: usize, rows: usize, cols: usize },
    #[error("entry ({x}, {y}) is nonzero but the elements lie over different objects")]
    NotBlockDiagonal { x: String, y: String },
    #[error("diagonal is not constant on the orbit of `{0}`")]
    NotEquivariant(String),
    #[error("`{which}` does not commute with the action")]
    NotInAlgebra { which: String },
    #[error("value {value} at `{at}` is not strictly positive")]
    NotPositive { at: String, value: f64 },
    #[error("density is not constant on the orbit of `{0}`")]
    NotOrbitConstant(String),
    #[error("density differs at `{x}` and `{y}`, which lie in the same component")]
    NotComponentConstant { x: String, y: String },
    #[error("Im z = {0} lies outside [-1, 0]")]
    DomainError(f64),
    #[error("vector map is not equivariant at `{0}`")]
    VectorNotEquivariant(String),
    #[error("state has total mass {0}, expected 1")]
    NotNormalized(f64),
}

/// One nonzero entry `(x, y, re, im)` in the JSON operator format.
pub type Entry = (String, String, f64, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub carrier: String,
    #[serde(default)]
    pub entries: Vec<Entry>,
}

/// A block-diagonal matrix on `l²(X)`, indexed by element indices of `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    carrier: FiniteAction,
    m: Array2<Complex64>,
}

impl OperatorMatrix {
    pub fn new(carrier: &FiniteAction, m: Array2<Complex64>) -> Result<Self, ModularError> {
        let n = carrier.len();
        if m.dim() != (n, n) {
            return Err(ModularError::ShapeMismatch {
                expected: n,
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        for ((x, y), v) in m.indexed_iter() {
            if *v != Complex64::new(0.0, 0.0) && carrier.object_of(x) != carrier.object_of(y) {
                return Err(ModularError::NotBlockDiagonal {
                    x: carrier.element_name(x).to_string(),
                    y: carrier.element_name(y).to_string(),
                });
            }
        }
        Ok(OperatorMatrix {
            carrier: carrier.clone(),
            m,
        })
    }

    pub fn zeros(carrier: &FiniteAction) -> Self {
        let n = carrier.len();
        OperatorMatrix {
            carrier: carrier.clone(),
            m: Array2::zeros((n, n)),
        }
    }

    pub fn identity(carrier: &FiniteAction) -> Self {
        let n = carrier.len();
        OperatorMatrix {
            carrier: carrier.clone(),
            m: Array2::eye(n),
        }
    }

    /// Matrix unit `E_xy`.
    pub fn unit(carrier: &FiniteAction, x: usize, y: usize) -> Result<Self, ModularError> {
        let mut a = Self::zeros(carrier);
        a.m[[x, y]] = Complex64::new(1.0, 0.0);
        Self::new(carrier, a.m)
    }

    /// `P_S e_x = e_x` for `x ∈ S`, else 0.
    pub fn projection(carrier: &FiniteAction, s: &Subobject) -> Self {
        let mut a = Self::zeros(carrier);
        for &x in s.members() {
            a.m[[x, x]] = Complex64::new(1.0, 0.0);
        }
        a
    }

    pub fn diagonal(carrier: &FiniteAction, d: &[Complex64]) -> Self {
        let mut a = Self::zeros(carrier);
        for (x, &v) in d.iter().enumerate() {
            a.m[[x, x]] = v;
        }
        a
    }

    pub fn from_entries(carrier: &FiniteAction, entries: &[Entry]) -> Result<Self, ModularError> {
        let mut m = Array2::zeros((carrier.len(), carrier.len()));
        for (x, y, re, im) in entries {
            m[[carrier.element_index(x)?, carrier.element_index(y)?]] += Complex64::new(*re, *im);
        }
        Self::new(carrier, m)
    }

    /// Nonzero entries in row-major order of element indices.
    pub fn to_entries(&self) -> Vec<Entry> {
        self.m
            .indexed_iter()
            .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
            .map(|((x, y), v)| {
                (
                    self.carrier.element_name(x).to_string(),
                    self.carrier.element_name(y).to_string(),
                    v.re,
                    v.im,
                )
            })
            .collect()
    }

    pub fn carrier(&self) -> &FiniteAction {
        &self.carrier
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.m
    }

    pub fn entry(&self, x: usize, y: usize) -> Complex64 {
        self.m[[x, y]]
    }

    pub fn matmul(&self, other: &OperatorMatrix) -> Result<OperatorMatrix, ModularError> {
        self.same_carrier(other)?;
        Ok(OperatorMatrix {
            carrier: self.carrier.clone(),
            m: self.m.dot(&other.m),
        })
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<OperatorMatrix, ModularError> {
        self.same_carrier(other)?;
        Ok(OperatorMatrix {
            carrier: self.carrier.clone(),
            m: &self.m + &other.m,
        })
    }

    pub fn scale(&self, c: Complex64) -> OperatorMatrix {
        OperatorMatrix {
            carrier: self.carrier.clone(),
            m: self.m.mapv(|v| v * c),
        }
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix {
            carrier: self.carrier.clone(),
            m: self.m.t().mapv(|v| v.conj()),
        }
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.m.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest `|a[g·x][g·y] − a[x][y]|` over transports and same-fiber pairs.
    pub fn commutator_defect(&self) -> f64 {
        let x = &self.carrier;
        let g = x.groupoid();
        let mut worst = 0.0f64;
        for (m, mor) in g.morphisms().iter().enumerate() {
            for &p in x.fiber(mor.src) {
                for &q in x.fiber(mor.src) {
                    worst = worst.max((self.m[[x.act(m, p), x.act(m, q)]] - self.m[[p, q]]).norm());
                }
            }
        }
        worst
    }

    /// Membership in the commutant, up to rounding.
    pub fn is_in_algebra(&self) -> bool {
        self.commutator_defect() <= STRUCTURAL_TOL * self.max_norm()
    }

    fn same_carrier(&self, other: &OperatorMatrix) -> Result<(), ModularError> {
        if self.carrier == other.carrier {
            Ok(())
        } else {
            Err(ModularError::CarrierMismatch)
        }
    }
}

/// Indicator matrices of the orbitals (orbits of same-fiber pairs), ordered by
/// their least pair. They form a basis of the commutant.
pub fn commutant_basis(x: &FiniteAction) -> Vec<OperatorMatrix> {
    orbitals(x)
        .into_iter()
        .map(|orbital| {
            let mut a = OperatorMatrix::zeros(x);
            for (p, q) in orbital {
                a.m[[p, q]] = Complex64::new(1.0, 0.0);
            }
            a
        })
        .collect()
}

/// Indicator of the orbital through `(p, q)`.
pub fn orbital_indicator(x: &FiniteAction, p: usize, q: usize) -> OperatorMatrix {
    let mut a = OperatorMatrix::zeros(x);
    for m in x.groupoid().out_morphisms(x.object_of(p)).iter().copied() {
        a.m[[x.act(m, p), x.act(m, q)]] = Complex64::new(1.0, 0.0);
    }
    a
}

fn orbitals(x: &FiniteAction) -> Vec<Vec<(usize, usize)>> {
    let g = x.groupoid();
    let n = x.len();
    let mut seen = vec![false; n * n];
    let mut out = Vec::new();
    for p in 0..n {
        for &q in x.fiber(x.object_of(p)) {
            if seen[p * n + q] {
                continue;
            }
            let mut orbital = Vec::new();
            for &m in g.out_morphisms(x.object_of(p)) {
                let (a, b) = (x.act(m, p), x.act(m, q));
                if !seen[a * n + b] {
                    seen[a * n + b] = true;
                    orbital.push((a, b));
                }
            }
            orbital.sort_unstable();
            out.push(orbital);
        }
    }
    out
}

/// `μ(a) = Σ_orbits μ(o) · a[x_o][x_o]`.
pub fn weight(a: &OperatorMatrix, mu: &Valuation) -> Result<Complex64, ModularError> {
    let x = a.carrier();
    if mu.carrier() != x {
        return Err(ModularError::CarrierMismatch);
    }
    let scale = (0..x.len()).map(|i| a.m[[i, i]].norm()).fold(0.0, f64::max);
    let mut total = Complex64::new(0.0, 0.0);
    for (o, members) in x.orbits().iter().enumerate() {
        let d = a.m[[members[0], members[0]]];
        if members.iter().any(|&i| (a.m[[i, i]] - d).norm() > STRUCTURAL_TOL * scale) {
            return Err(ModularError::NotEquivariant(x.element_name(members[0]).to_string()));
        }
        total += d * mu.weight(o);
    }
    Ok(total)
}

/// A positive function on the elements of `X`, used to weight and to flow.
///
/// Sections of the modular bundle give orbit-constant densities through
/// [`DensitySection::from_section`]; arbitrary positive values are accepted so
/// negative controls can be built.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySection {
    carrier: FiniteAction,
    values: Vec<f64>,
}

impl DensitySection {
    pub fn from_values(carrier: &FiniteAction, values: Vec<f64>) -> Result<Self, ModularError> {
        if values.len() != carrier.len() {
            return Err(ModularError::ShapeMismatch {
                expected: carrier.len(),
                rows: values.len(),
                cols: 1,
            });
        }
        for (x, &v) in values.iter().enumerate() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ModularError::NotPositive {
                    at: carrier.element_name(x).to_string(),
                    value: v,
                });
            }
        }
        Ok(DensitySection {
            carrier: carrier.clone(),
            values,
        })
    }

    /// `λ̂(x) = λ(o)/|o|` for the orbit `o` of `x`.
    pub fn from_section(lambda: &ChiSection) -> Self {
        let x = lambda.carrier();
        let values = (0..x.len())
            .map(|i| {
                let o = x.orbit_of(i);
                lambda.value(o) / x.orbits()[o].len() as f64
            })
            .collect();
        DensitySection {
            carrier: x.clone(),
            values,
        }
    }

    /// The density of a well-supported valuation, normalized the same way.
    pub fn from_valuation(mu: &Valuation) -> Result<Self, ModularError> {
        let x = mu.carrier();
        let values = (0..x.len())
            .map(|i| {
                let o = x.orbit_of(i);
                mu.weight(o) / x.orbits()[o].len() as f64
            })
            .collect();
        Self::from_values(x, values)
    }

    pub fn carrier(&self) -> &FiniteAction {
        &self.carrier
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn is_orbit_constant(&self) -> bool {
        self.first_difference(|x, y| self.carrier.orbit_of(x) == self.carrier.orbit_of(y)).is_none()
    }

    pub fn is_component_constant(&self) -> bool {
        self.component_difference().is_none()
    }

    /// A pair in one component where the density differs.
    pub fn component_difference(&self) -> Option<(usize, usize)> {
        let g = self.carrier.groupoid();
        let comp = |x: usize| g.component_of(self.carrier.object_of(x));
        self.first_difference(|x, y| comp(x) == comp(y))
    }

    /// The valuation whose density this is; meaningful when orbit-constant.
    pub fn to_valuation(&self) -> Valuation {
        let x = &self.carrier;
        let weights = x.orbits().iter().map(|o| o.iter().map(|&i| self.values[i]).sum()).collect();
        Valuation::from_orbit_weights(x, weights).expect("positive values")
    }

    /// `Σ_x λ̂(x) a[x][x]`.
    pub fn trace_weight(&self, a: &OperatorMatrix) -> Result<Complex64, ModularError> {
        if a.carrier() != &self.carrier {
            return Err(ModularError::CarrierMismatch);
        }
        Ok(self.values.iter().enumerate().map(|(x, &l)| a.m[[x, x]] * l).sum())
    }

    fn first_difference(&self, related: impl Fn(usize, usize) -> bool) -> Option<(usize, usize)> {
        let n = self.carrier.len();
        (0..n)
            .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
            .find(|&(x, y)| related(x, y) && self.values[x] != self.values[y])
    }
}
