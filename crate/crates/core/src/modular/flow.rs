//! The modular flow `θ_t`, its unitaries, the KMS boundary function and the
//! trace test.
//!
//! Sign convention: `θ_t(a)[x][y] = (λ̂(x)/λ̂(y))^{-it} a[x][y]`, which is
//! `Ad(diag(λ̂)^{-it})`. The textbook Tomita flow `Δ^{it} · Δ^{-it}` runs the
//! other way; with this orientation the boundary values are
//! `F(t) = μ(θ_t(u)v)` and `F(t − i) = μ(vθ_t(u))`.

use super::{orbital_indicator, weight, DensitySection, ModularError, OperatorMatrix};
use crate::report::Check;
use crate::valuation::Valuation;
use num_complex::Complex64;

/// `r^{iz}` on the principal branch, `r > 0`.
fn pow_iz(r: f64, z: Complex64) -> Complex64 {
    (Complex64::i() * z * r.ln()).exp()
}

pub fn theta(a: &OperatorMatrix, t: f64, lambda: &DensitySection) -> Result<OperatorMatrix, ModularError> {
    if a.carrier() != lambda.carrier() {
        return Err(ModularError::CarrierMismatch);
    }
    let logs: Vec<f64> = lambda.values().iter().map(|v| v.ln()).collect();
    let mut out = a.clone();
    for ((x, y), v) in out.m.indexed_iter_mut() {
        if *v != Complex64::new(0.0, 0.0) {
            *v *= Complex64::from_polar(1.0, -t * (logs[x] - logs[y]));
        }
    }
    Ok(out)
}

/// `U_t = diag(λ̂^{it})`; `θ_t(a) = U_t* a U_t`.
pub fn modular_unitary(t: f64, lambda: &DensitySection) -> OperatorMatrix {
    let d: Vec<Complex64> = lambda
        .values()
        .iter()
        .map(|&v| Complex64::from_polar(1.0, t * v.ln()))
        .collect();
    OperatorMatrix::diagonal(lambda.carrier(), &d)
}

/// The character `r ↦ r^{-it}` of `ℝ^>0`, relative to a reference density.
#[derive(Debug, Clone, PartialEq)]
pub struct LineBundleChar {
    pub t: f64,
    pub reference: DensitySection,
}

impl LineBundleChar {
    pub fn new(t: f64, reference: &DensitySection) -> Self {
        LineBundleChar {
            t,
            reference: reference.clone(),
        }
    }

    /// `F_t ⊗ F_{t′} = F_{t+t′}`.
    pub fn tensor(&self, other: &LineBundleChar) -> Result<LineBundleChar, ModularError> {
        if self.reference != other.reference {
            return Err(ModularError::CarrierMismatch);
        }
        Ok(LineBundleChar::new(self.t + other.t, &self.reference))
    }

    /// `r^{-it}` for `r > 0`.
    pub fn character(&self, r: f64) -> Complex64 {
        Complex64::from_polar(1.0, -self.t * r.ln())
    }

    /// The trivialized isometry `φ_t`.
    pub fn unitary(&self) -> OperatorMatrix {
        modular_unitary(self.t, &self.reference)
    }
}

fn require_in_algebra(a: &OperatorMatrix, which: &str) -> Result<(), ModularError> {
    if a.is_in_algebra() {
        Ok(())
    } else {
        Err(ModularError::NotInAlgebra { which: which.into() })
    }
}

/// `F(z) = Σ_{x,y} m(x) · (λ̂(y)/λ̂(x))^{iz} · u[x][y] · v[y][x]`, with `m` the
/// density of `μ`, for `Im z ∈ [−1, 0]`.
pub fn kms_function(
    u: &OperatorMatrix,
    v: &OperatorMatrix,
    z: Complex64,
    lambda: &DensitySection,
    mu: &Valuation,
) -> Result<Complex64, ModularError> {
    if !(-1.0..=0.0).contains(&z.im) {
        return Err(ModularError::DomainError(z.im));
    }
    let x = u.carrier();
    if v.carrier() != x || lambda.carrier() != x || mu.carrier() != x {
        return Err(ModularError::CarrierMismatch);
    }
    require_in_algebra(u, "u")?;
    require_in_algebra(v, "v")?;
    let m = DensitySection::from_valuation(mu)?;
    Ok(kms_terms(u, v, z, lambda, &m).0)
}

/// The sum above and the sum of the moduli of its terms.
fn kms_terms(
    u: &OperatorMatrix,
    v: &OperatorMatrix,
    z: Complex64,
    lambda: &DensitySection,
    m: &DensitySection,
) -> (Complex64, f64) {
    let x = u.carrier();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for p in 0..x.len() {
        for &q in x.fiber(x.object_of(p)) {
            let c = u.entry(p, q) * v.entry(q, p);
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let term = c * pow_iz(lambda.value(q) / lambda.value(p), z) * m.value(p);
            scale += term.norm();
            sum += term;
        }
    }
    (sum, scale)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KmsPoint {
    pub t: f64,
    /// `F(t)` and `μ(θ_t(u)v)`.
    pub f_real: Complex64,
    pub weight_real: Option<Complex64>,
    /// `F(t − i)` and `μ(vθ_t(u))`.
    pub f_shifted: Complex64,
    pub weight_shifted: Option<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KmsReport {
    pub checks: Vec<Check>,
    pub points: Vec<KmsPoint>,
}

/// Verify on a grid: the weight is flow invariant, and both boundary values
/// of `F` match the weight computed by matrix products.
///
/// Deviations are `|F − μ(·)|` divided by the sum of moduli of the terms of
/// `F`. A weight that cannot be evaluated because the flowed product left the
/// algebra counts as a failure.
pub fn kms_check(
    u: &OperatorMatrix,
    v: &OperatorMatrix,
    ts: &[f64],
    lambda: &DensitySection,
    mu: &Valuation,
    tol: f64,
) -> Result<KmsReport, ModularError> {
    let x = u.carrier();
    if v.carrier() != x || lambda.carrier() != x || mu.carrier() != x {
        return Err(ModularError::CarrierMismatch);
    }
    require_in_algebra(u, "u")?;
    require_in_algebra(v, "v")?;
    let m = DensitySection::from_valuation(mu)?;
    let wu = weight(u, mu)?;

    let mut checks = Vec::new();
    checks.push(if lambda.is_orbit_constant() {
        Check::pass("kms:density_orbit_constant")
    } else {
        let (p, q) = x
            .orbits()
            .iter()
            .find_map(|o| o.iter().find(|&&q| lambda.value(q) != lambda.value(o[0])).map(|&q| (o[0], q)))
            .expect("some orbit is not constant");
        Check::fail(
            "kms:density_orbit_constant",
            format!("density {} at {} and {} at {}", lambda.value(p), x.element_name(p), lambda.value(q), x.element_name(q)),
        )
    });

    let mut points = Vec::new();
    let mut inv = Worst::default();
    let mut real = Worst::default();
    let mut shifted = Worst::default();
    for &t in ts {
        let th = theta(u, t, lambda)?;
        match weight(&th, mu) {
            Ok(w) => inv.record((w - wu).norm() / wu.norm().max(u.max_norm() * mu.total()).max(f64::MIN_POSITIVE), t),
            Err(_) => inv.fail(t, "theta_t(u) left the algebra"),
        }
        let (f_real, s_real) = kms_terms(u, v, Complex64::new(t, 0.0), lambda, &m);
        let (f_shifted, s_shifted) = kms_terms(u, v, Complex64::new(t, -1.0), lambda, &m);
        let weight_real = th.matmul(v).ok().and_then(|p| weight(&p, mu).ok());
        let weight_shifted = v.matmul(&th).ok().and_then(|p| weight(&p, mu).ok());
        match weight_real {
            Some(w) => real.record((f_real - w).norm() / s_real.max(f64::MIN_POSITIVE), t),
            None => real.fail(t, "theta_t(u)v is not in the algebra"),
        }
        match weight_shifted {
            Some(w) => shifted.record((f_shifted - w).norm() / s_shifted.max(f64::MIN_POSITIVE), t),
            None => shifted.fail(t, "v theta_t(u) is not in the algebra"),
        }
        points.push(KmsPoint {
            t,
            f_real,
            weight_real,
            f_shifted,
            weight_shifted,
        });
    }
    checks.push(inv.into_check("kms:weight_invariance", tol));
    checks.push(real.into_check("kms:boundary[t]", tol));
    checks.push(shifted.into_check("kms:boundary[t-i]", tol));
    Ok(KmsReport { checks, points })
}

#[derive(Default)]
struct Worst {
    deviation: f64,
    at: Option<f64>,
    broken: Option<String>,
}

impl Worst {
    fn record(&mut self, d: f64, t: f64) {
        if self.at.is_none() || d > self.deviation {
            self.deviation = d;
            self.at = Some(t);
        }
    }

    fn fail(&mut self, t: f64, why: &str) {
        if self.broken.is_none() {
            self.broken = Some(format!("t = {t}: {why}"));
        }
    }

    fn into_check(self, name: &str, tol: f64) -> Check {
        match self.broken {
            Some(why) => {
                let c = Check::fail(name, why);
                if self.at.is_some() {
                    c.with_deviation(self.deviation)
                } else {
                    c
                }
            }
            None => Check::from_deviation(name, self.deviation, tol, format!("t = {}", self.at.unwrap_or(0.0))),
        }
    }
}

/// A pair with `w(uv) ≠ w(vu)` for the weight `w(a) = Σ λ̂(x) a[x][x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonTraceWitness {
    pub u: OperatorMatrix,
    pub v: OperatorMatrix,
    pub weight_uv: Complex64,
    pub weight_vu: Complex64,
    /// `x` and `y`: same fiber, different density.
    pub pair: (String, String),
}

impl NonTraceWitness {
    pub fn relative_deviation(&self) -> f64 {
        (self.weight_uv - self.weight_vu).norm() / self.weight_uv.norm().max(self.weight_vu.norm())
    }
}

/// When `λ̂` differs at two elements `x, y` of one fiber, the orbital
/// indicators `u = [(x,y)]`, `v = [(y,x)]` satisfy `w(uv) = λ̂(x)·n` and
/// `w(vu) = λ̂(y)·n`, `n` the orbital size.
pub fn non_trace_witness(lambda: &DensitySection) -> Option<NonTraceWitness> {
    let x = lambda.carrier();
    let (p, q) = (0..x.len())
        .flat_map(|p| x.fiber(x.object_of(p)).iter().map(move |&q| (p, q)))
        .find(|&(p, q)| lambda.value(p) != lambda.value(q))?;
    let u = orbital_indicator(x, p, q);
    let v = orbital_indicator(x, q, p);
    let weight_uv = lambda.trace_weight(&u.matmul(&v).ok()?).ok()?;
    let weight_vu = lambda.trace_weight(&v.matmul(&u).ok()?).ok()?;
    Some(NonTraceWitness {
        u,
        v,
        weight_uv,
        weight_vu,
        pair: (x.element_name(p).to_string(), x.element_name(q).to_string()),
    })
}

/// For a component-constant density: `θ_t = id` exactly on the samples and
/// `w(uv) = w(vu)` within `tol`.
pub fn trace_check(
    lambda: &DensitySection,
    pairs: &[(OperatorMatrix, OperatorMatrix)],
    ts: &[f64],
    tol: f64,
) -> Result<Vec<Check>, ModularError> {
    let x = lambda.carrier();
    if let Some((p, q)) = lambda.component_difference() {
        return Err(ModularError::NotComponentConstant {
            x: x.element_name(p).to_string(),
            y: x.element_name(q).to_string(),
        });
    }
    let mut fixed = None;
    let mut worst = 0.0f64;
    let mut witness = String::new();
    for (k, (u, v)) in pairs.iter().enumerate() {
        for a in [u, v] {
            for &t in ts {
                if fixed.is_none() && theta(a, t, lambda)? != *a {
                    fixed = Some(format!("pair {k}, t = {t}"));
                }
            }
        }
        let wuv = lambda.trace_weight(&u.matmul(v)?)?;
        let wvu = lambda.trace_weight(&v.matmul(u)?)?;
        let scale = product_scale(lambda, u, v);
        let d = (wuv - wvu).norm() / scale.max(f64::MIN_POSITIVE);
        if d > worst {
            worst = d;
            witness = format!("pair {k}: w(uv) = {wuv}, w(vu) = {wvu}");
        }
    }
    let theta_id = match fixed {
        None => Check::pass("trace:theta_identity").with_deviation(0.0),
        Some(w) => Check::fail("trace:theta_identity", w),
    };
    Ok(vec![
        theta_id,
        Check::from_deviation("trace:cyclicity", worst, tol, witness),
    ])
}

/// `Σ_{x,y} λ̂(x)|u[x][y]||v[y][x]| + λ̂(y)|v[y][x]||u[x][y]|`.
fn product_scale(lambda: &DensitySection, u: &OperatorMatrix, v: &OperatorMatrix) -> f64 {
    let x = u.carrier();
    let mut s = 0.0;
    for p in 0..x.len() {
        for &q in x.fiber(x.object_of(p)) {
            let c = u.entry(p, q).norm() * v.entry(q, p).norm();
            s += c * (lambda.value(p) + lambda.value(q));
        }
    }
    s
}
