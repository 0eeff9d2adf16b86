//! Vector states from measures, and measures back from states.

use super::{ModularError, OperatorMatrix, STRUCTURAL_TOL};
use crate::groupoid::FiniteAction;
use crate::valuation::Valuation;
use ndarray::{Array2, ArrayView1};
use num_complex::Complex64;

/// An equivariant family of vectors `v(x) ∈ l²(Y_s)` for `x ∈ X_s`, with
/// `v(g·x) = ρ(g) v(x)`. Column `x` of the matrix is `v(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorMap {
    source: FiniteAction,
    target: FiniteAction,
    columns: Array2<Complex64>,
}

impl VectorMap {
    pub fn new(source: &FiniteAction, target: &FiniteAction, columns: Array2<Complex64>) -> Result<Self, ModularError> {
        if source.groupoid() != target.groupoid() {
            return Err(ModularError::CarrierMismatch);
        }
        if columns.dim() != (target.len(), source.len()) {
            return Err(ModularError::ShapeMismatch {
                expected: target.len(),
                rows: columns.nrows(),
                cols: columns.ncols(),
            });
        }
        let g = source.groupoid();
        let scale = columns.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for x in 0..source.len() {
            let s = source.object_of(x);
            let name = || source.element_name(x).to_string();
            if (0..target.len()).any(|y| target.object_of(y) != s && columns[[y, x]] != Complex64::new(0.0, 0.0)) {
                return Err(ModularError::VectorNotEquivariant(name()));
            }
            for &m in g.out_morphisms(s) {
                let gx = source.act(m, x);
                for &y in target.fiber(s) {
                    if (columns[[target.act(m, y), gx]] - columns[[y, x]]).norm() > STRUCTURAL_TOL * scale {
                        return Err(ModularError::VectorNotEquivariant(name()));
                    }
                }
            }
        }
        Ok(VectorMap {
            source: source.clone(),
            target: target.clone(),
            columns,
        })
    }

    /// `v(x) = e_x`.
    pub fn basis(x: &FiniteAction) -> Self {
        VectorMap {
            source: x.clone(),
            target: x.clone(),
            columns: Array2::eye(x.len()),
        }
    }

    pub fn source(&self) -> &FiniteAction {
        &self.source
    }

    pub fn target(&self) -> &FiniteAction {
        &self.target
    }

    pub fn vector(&self, x: usize) -> ArrayView1<'_, Complex64> {
        self.columns.column(x)
    }

    pub fn scaled(&self, c: f64) -> VectorMap {
        VectorMap {
            columns: self.columns.mapv(|v| v * c),
            ..self.clone()
        }
    }
}

/// `η(h) = Σ_o μ(o) ⟨v(x_o), h v(x_o)⟩` on the commutant of `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorState {
    target: FiniteAction,
    vectors: Vec<(f64, Vec<Complex64>)>,
}

impl VectorState {
    pub fn carrier(&self) -> &FiniteAction {
        &self.target
    }

    pub fn evaluate(&self, h: &OperatorMatrix) -> Result<Complex64, ModularError> {
        if h.carrier() != &self.target {
            return Err(ModularError::CarrierMismatch);
        }
        if !h.is_in_algebra() {
            return Err(ModularError::NotInAlgebra { which: "h".into() });
        }
        let m = h.matrix();
        Ok(self
            .vectors
            .iter()
            .map(|(w, v)| {
                let hv = m.dot(&ArrayView1::from(v));
                let inner: Complex64 = v.iter().zip(hv.iter()).map(|(a, b)| a.conj() * b).sum();
                inner * *w
            })
            .sum())
    }
}

/// Requires `Σ_o μ(o) ‖v(x_o)‖² = 1` within rounding.
pub fn state_from_measure(v: &VectorMap, mu: &Valuation) -> Result<VectorState, ModularError> {
    let x = v.source();
    if mu.carrier() != x {
        return Err(ModularError::CarrierMismatch);
    }
    let vectors: Vec<(f64, Vec<Complex64>)> = (0..x.num_orbits())
        .map(|o| (mu.weight(o), v.vector(x.orbit_representative(o)).to_vec()))
        .collect();
    let total: f64 = vectors
        .iter()
        .map(|(w, vec)| w * vec.iter().map(|c| c.norm_sqr()).sum::<f64>())
        .sum();
    if (total - 1.0).abs() > STRUCTURAL_TOL {
        return Err(ModularError::NotNormalized(total));
    }
    Ok(VectorState {
        target: v.target().clone(),
        vectors,
    })
}

/// `μ(S) = η(P_S)`, read off on the orbits of the state's carrier.
pub fn measure_from_state(eta: &VectorState) -> Result<Valuation, ModularError> {
    let y = eta.carrier();
    let weights = (0..y.num_orbits())
        .map(|o| eta.evaluate(&OperatorMatrix::projection(y, &y.orbit_subobject(o))).map(|c| c.re.max(0.0)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Valuation::from_orbit_weights(y, weights)?)
}
