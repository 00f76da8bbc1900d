//! General-L coherent states on the sphere and the fuzzy-sphere structure.
//!
//! For every integer L ≥ 0 the (L+1)-dimensional representation space is
//! spanned inside L²(S²) by the functions
//!
//! ```text
//! Θ_k(θ,φ) = √binom(L,k) · cos^{L−k}(θ/2) · sin^k(θ/2) · e^{−ikφ} ,  k = 0..L,
//! ```
//!
//! indexed here by k = L/2 + i with i the half-integer label running from
//! −L/2 (k = 0) to L/2 (k = L). They satisfy Σ_k |Θ_k|² = 1 pointwise (the
//! binomial theorem) and share the squared norm 1/(L+1), so the frame family
//! is √(L+1)·Θ_k with constant weight L+1, and quantization reads
//!
//! ```text
//! [A_f]_{ab} = (L+1) ∫ f Θ_a conj(Θ_b) dμ .
//! ```
//!
//! Harmonics with ℓ > L quantize to zero (the product Θ_a conj(Θ_b) has
//! harmonic content of degree at most L), and the quantized harmonics
//! Ŷ^ℓ_m with ℓ ≤ L, assembled from the coefficient tensor
//! C[ℓ,m,i,j] = ∫ Y_ℓ^m conj(Θ_i) Θ_j dμ, form a basis of the full matrix
//! algebra. The Madore construction X^i = κJ^i uses the same spin matrices
//! the coordinates quantize onto: A_{x^i} equals 2/(L+2) times J_i after the
//! entrywise conjugation induced by the e^{−ikφ} phase convention. The CS
//! scale 2/(L+2) and the Madore scale κ = 2r/√(L²+2L) agree nowhere except
//! approximately at large L; both are reported.

use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::frames::{CoherentFrame, FamilyFn, FrameError, OrthoFamily};
use crate::harmonics::spherical_harmonic;
use crate::operator::{self, HermitianOperator, OperatorError};
use crate::quad::{self, Domain, Point, QuadError, QuadratureRule};
use crate::quantizer::{self, ClassicalObservable, QuantizeError};
use crate::{CMatrix, Complex64};

#[derive(Debug, Error)]
pub enum FuzzyError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Quantize(#[from] QuantizeError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("radius must be positive and finite, got {radius}")]
    BadRadius { radius: f64 },
    #[error("harmonic (ℓ = {ell}, m = {m}) outside the tensor range ℓ ≤ {max_ell}, |m| ≤ ℓ")]
    HarmonicOutOfRange { ell: usize, m: i64, max_ell: usize },
}

/// Exact binomial coefficient as a float (exact in f64 for n ≤ 55).
fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    let mut out = 1.0f64;
    for step in 0..k {
        out = out * (n - step) as f64 / (step + 1) as f64;
    }
    out.round()
}

/// The Θ_k component functions for one value of L.
#[derive(Clone, Debug)]
pub struct ThetaBasis {
    big_l: usize,
    root_binom: Vec<f64>,
}

impl ThetaBasis {
    pub fn new(big_l: usize) -> Self {
        let root_binom = (0..=big_l).map(|k| binomial(big_l, k).sqrt()).collect();
        ThetaBasis { big_l, root_binom }
    }

    pub fn big_l(&self) -> usize {
        self.big_l
    }

    pub fn dim(&self) -> usize {
        self.big_l + 1
    }

    /// Half-integer label i = k − L/2 of the k-th component.
    pub fn label(&self, k: usize) -> f64 {
        k as f64 - self.big_l as f64 / 2.0
    }

    pub fn eval(&self, k: usize, p: Point) -> Complex64 {
        let (s, c) = (p.theta / 2.0).sin_cos();
        let amp = self.root_binom[k]
            * c.powi((self.big_l - k) as i32)
            * s.powi(k as i32);
        Complex64::new(0.0, -(k as f64) * p.phi).exp() * amp
    }

    /// |Σ_k |Θ_k(p)|² − 1|; zero by the binomial theorem.
    pub fn partition_defect(&self, p: Point) -> f64 {
        let total: f64 = (0..self.dim()).map(|k| self.eval(k, p).norm_sqr()).sum();
        (total - 1.0).abs()
    }
}

/// Spin-L/2 angular momentum matrices, (L+1)×(L+1), with row 0 carrying the
/// highest magnetic number m = +L/2.
#[derive(Clone, Debug)]
pub struct SpinMatrices {
    big_l: usize,
    j: [HermitianOperator; 3],
}

impl SpinMatrices {
    pub fn new(big_l: usize) -> Self {
        let n = big_l + 1;
        let j_half = big_l as f64 / 2.0;
        let off = |r: usize| (((r + 1) * (big_l - r)) as f64).sqrt() / 2.0;

        let mut j1: CMatrix = DMatrix::zeros(n, n);
        let mut j2: CMatrix = DMatrix::zeros(n, n);
        let mut j3: CMatrix = DMatrix::zeros(n, n);
        for r in 0..n {
            j3[(r, r)] = Complex64::new(j_half - r as f64, 0.0);
            if r + 1 < n {
                let x = off(r);
                j1[(r, r + 1)] = Complex64::new(x, 0.0);
                j1[(r + 1, r)] = Complex64::new(x, 0.0);
                j2[(r, r + 1)] = Complex64::new(0.0, -x);
                j2[(r + 1, r)] = Complex64::new(0.0, x);
            }
        }
        let wrap = |m: CMatrix| HermitianOperator::new(m).expect("spin matrices are Hermitian");
        SpinMatrices {
            big_l,
            j: [wrap(j1), wrap(j2), wrap(j3)],
        }
    }

    pub fn big_l(&self) -> usize {
        self.big_l
    }

    pub fn get(&self, i: usize) -> &HermitianOperator {
        &self.j[i]
    }

    /// max over cyclic (i,j,k) of ‖[J_i, J_j] − iJ_k‖.
    pub fn commutation_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, j, k) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
            let c = operator::commutator(&self.j[i], &self.j[j])
                .expect("spin commutator");
            let expect = self.j[k].matrix() * Complex64::new(0.0, 1.0);
            worst = worst.max(operator::max_abs(&(c - expect)));
        }
        worst
    }

    /// ‖ΣJ_i² − (L/2)(L/2+1)·Id‖.
    pub fn casimir_residual(&self) -> f64 {
        let n = self.big_l + 1;
        let mut sum: CMatrix = DMatrix::zeros(n, n);
        for ji in &self.j {
            sum += ji.matrix() * ji.matrix();
        }
        let j_half = self.big_l as f64 / 2.0;
        let expect: CMatrix =
            DMatrix::identity(n, n) * Complex64::new(j_half * (j_half + 1.0), 0.0);
        operator::max_abs(&(sum - expect))
    }
}

/// Coefficient tensor C[ℓ][m][i][j] = ∫ Y_ℓ^m conj(Θ_i) Θ_j dμ for ℓ ≤ L.
///
/// The block for (ℓ, m) is exactly the matrix of the quantized harmonic
/// Ŷ^ℓ_m (up to the frame factor L+1), and the entry vanishes unless the
/// integrand's total φ-winding m − (j − i) is zero.
#[derive(Clone, Debug)]
pub struct CoefficientTensor {
    big_l: usize,
    blocks: Vec<Vec<CMatrix>>,
}

impl CoefficientTensor {
    pub fn big_l(&self) -> usize {
        self.big_l
    }

    pub fn entry(&self, ell: usize, m: i64, i: usize, j: usize) -> Complex64 {
        self.block(ell, m)[(i, j)]
    }

    /// The (L+1)×(L+1) matrix Ŷ^ℓ_m with [Ŷ]_{ij} = C[ℓ][m][i][j].
    pub fn yhat(&self, ell: usize, m: i64) -> &CMatrix {
        self.block(ell, m)
    }

    fn block(&self, ell: usize, m: i64) -> &CMatrix {
        assert!(
            ell <= self.big_l && m.unsigned_abs() as usize <= ell,
            "tensor block (ℓ = {ell}, m = {m}) out of range"
        );
        &self.blocks[ell][(m + ell as i64) as usize]
    }

    /// All (L+1)² blocks in (ℓ ascending, m ascending) order.
    pub fn yhat_list(&self) -> Vec<(usize, i64, &CMatrix)> {
        let mut out = Vec::new();
        for ell in 0..=self.big_l {
            for m in -(ell as i64)..=(ell as i64) {
                out.push((ell, m, self.block(ell, m)));
            }
        }
        out
    }

    /// Assembles the quantized operator of f = Σ f_{ℓm} Y_ℓ^m from the
    /// tensor: [A_f]_{ab} = (L+1) Σ f_{ℓm} C[ℓ][m][b][a].
    pub fn assemble(&self, coeffs: &[(usize, i64, Complex64)]) -> Result<CMatrix, FuzzyError> {
        let n = self.big_l + 1;
        let mut out: CMatrix = DMatrix::zeros(n, n);
        for &(ell, m, f) in coeffs {
            if ell > self.big_l || m.unsigned_abs() as usize > ell {
                return Err(FuzzyError::HarmonicOutOfRange {
                    ell,
                    m,
                    max_ell: self.big_l,
                });
            }
            let c = self.block(ell, m);
            for a in 0..n {
                for b in 0..n {
                    out[(a, b)] += f * c[(b, a)];
                }
            }
        }
        Ok(out * Complex64::new((self.big_l + 1) as f64, 0.0))
    }

    /// max |C[ℓ][m][i][j]| over entries the winding rule requires to vanish
    /// (those with m ≠ j − i).
    pub fn selection_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (ell, m, block) in self.yhat_list() {
            let _ = ell;
            for i in 0..block.nrows() {
                for j in 0..block.ncols() {
                    if j as i64 - i as i64 != m {
                        worst = worst.max(block[(i, j)].norm());
                    }
                }
            }
        }
        worst
    }

    /// Smallest singular value of the matrix whose columns are the
    /// vectorized Ŷ^ℓ_m, via the Gram matrix. Full rank (value > 0) is what
    /// makes the (L+1)² blocks an operator basis.
    pub fn smallest_singular_value(&self) -> Result<f64, FuzzyError> {
        let list = self.yhat_list();
        let k = list.len();
        let mut gram: CMatrix = DMatrix::zeros(k, k);
        for a in 0..k {
            for b in 0..k {
                let mut acc = Complex64::new(0.0, 0.0);
                for (x, y) in list[a].2.iter().zip(list[b].2.iter()) {
                    acc += x.conj() * y;
                }
                gram[(a, b)] = acc;
            }
        }
        let spec = operator::eig(&HermitianOperator::new(gram)?)?;
        Ok(spec.eigenvalues[0].max(0.0).sqrt())
    }
}

/// Proportionality report between the quantized coordinates and the spin
/// matrices: conj(A_{x^i}) = λ_i J_i, with the Madore scale κ alongside.
#[derive(Clone, Copy, Debug)]
pub struct MadoreReport {
    pub lambdas: [f64; 3],
    pub residuals: [f64; 3],
    /// 2r/√(L²+2L); undefined (None) at L = 0 where the spin matrices vanish.
    pub kappa: Option<f64>,
}

/// The L-indexed coherent-state model with its frame, spin matrices and
/// quadrature rule.
#[derive(Clone, Debug)]
pub struct FuzzySphere {
    big_l: usize,
    radius: f64,
    theta: ThetaBasis,
    frame: CoherentFrame,
    rule: QuadratureRule,
    spin: SpinMatrices,
}

impl FuzzySphere {
    pub fn new(big_l: usize) -> Result<Self, FuzzyError> {
        Self::with_radius(big_l, 1.0)
    }

    pub fn with_radius(big_l: usize, radius: f64) -> Result<Self, FuzzyError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(FuzzyError::BadRadius { radius });
        }
        let theta = ThetaBasis::new(big_l);
        let scale = ((big_l + 1) as f64).sqrt();
        let members: Vec<(String, FamilyFn)> = (0..=big_l)
            .map(|k| {
                let t = theta.clone();
                let label = format!("Θ[{}]", t.label(k));
                let f: FamilyFn = Arc::new(move |p: Point| t.eval(k, p) * scale);
                (label, f)
            })
            .collect();
        let family = OrthoFamily::new(Domain::Sphere, big_l + 1, members)?;
        let frame = CoherentFrame::from_family(family)?;
        // Wide enough for harmonics up to ℓ = L+2 against Θ products (both
        // the u-polynomial degree and the φ windings stay below 2L+4).
        let rule = quad::build_rule(Domain::Sphere, 4 * big_l + 8)?;
        let spin = SpinMatrices::new(big_l);
        Ok(FuzzySphere {
            big_l,
            radius,
            theta,
            frame,
            rule,
            spin,
        })
    }

    pub fn big_l(&self) -> usize {
        self.big_l
    }

    pub fn dim(&self) -> usize {
        self.big_l + 1
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn theta_basis(&self) -> &ThetaBasis {
        &self.theta
    }

    pub fn frame(&self) -> &CoherentFrame {
        &self.frame
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn spin(&self) -> &SpinMatrices {
        &self.spin
    }

    /// Madore scale 2r/√(L²+2L); None at L = 0.
    pub fn kappa(&self) -> Option<f64> {
        if self.big_l == 0 {
            None
        } else {
            let l = self.big_l as f64;
            Some(2.0 * self.radius / (l * l + 2.0 * l).sqrt())
        }
    }

    pub fn identity_residual(&self) -> Result<f64, FuzzyError> {
        Ok(self.frame.identity_residual(&self.rule)?)
    }

    /// Quantizes a real observable on this frame.
    pub fn quantize(&self, f: &ClassicalObservable) -> Result<HermitianOperator, FuzzyError> {
        Ok(quantizer::quantize(&self.frame, &self.rule, f)?)
    }

    /// Raw quantization of a possibly complex observable.
    pub fn quantize_complex(&self, f: &ClassicalObservable) -> Result<CMatrix, FuzzyError> {
        Ok(quantizer::quantize_matrix(&self.frame, &self.rule, f)?)
    }

    /// A_{Y_ℓ^m}; exactly zero (to quadrature accuracy) once ℓ > L.
    pub fn harmonic_operator(&self, ell: usize, m: i64) -> Result<CMatrix, FuzzyError> {
        if m.unsigned_abs() as usize > ell {
            return Err(FuzzyError::HarmonicOutOfRange {
                ell,
                m,
                max_ell: self.big_l,
            });
        }
        let f = ClassicalObservable::complex(format!("Y[{ell},{m}]"), move |p| {
            spherical_harmonic(ell, m, p)
        });
        self.quantize_complex(&f)
    }

    /// ‖A_{Y_ℓ^m}‖ (largest entry magnitude).
    pub fn truncation_norm(&self, ell: usize, m: i64) -> Result<f64, FuzzyError> {
        Ok(operator::max_abs(&self.harmonic_operator(ell, m)?))
    }

    /// Quantized Cartesian coordinates; proportional to the spin matrices
    /// after entrywise conjugation.
    pub fn coordinate_operators(&self) -> Result<[HermitianOperator; 3], FuzzyError> {
        let obs = [
            ClassicalObservable::real("x1", |p| p.theta.sin() * p.phi.cos()),
            ClassicalObservable::real("x2", |p| p.theta.sin() * p.phi.sin()),
            ClassicalObservable::real("x3", |p| p.theta.cos()),
        ];
        let mut out = Vec::with_capacity(3);
        for f in &obs {
            out.push(self.quantize(f)?);
        }
        Ok(out.try_into().expect("three coordinates"))
    }

    /// Builds the full coefficient tensor by quadrature.
    pub fn coefficient_tensor(&self) -> Result<CoefficientTensor, FuzzyError> {
        let n = self.dim();
        let mut blocks: Vec<Vec<CMatrix>> = (0..=self.big_l)
            .map(|ell| vec![DMatrix::zeros(n, n); 2 * ell + 1])
            .collect();
        for (node, &w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let thetas: Vec<Complex64> = (0..n).map(|k| self.theta.eval(k, *node)).collect();
            for (ell, row) in blocks.iter_mut().enumerate() {
                for (m_idx, block) in row.iter_mut().enumerate() {
                    let m = m_idx as i64 - ell as i64;
                    let yw = spherical_harmonic(ell, m, *node) * w;
                    for i in 0..n {
                        let left = yw * thetas[i].conj();
                        for j in 0..n {
                            block[(i, j)] += left * thetas[j];
                        }
                    }
                }
            }
        }
        Ok(CoefficientTensor {
            big_l: self.big_l,
            blocks,
        })
    }

    /// Compares conj(A_{x^i}) against J_i in Frobenius projection.
    pub fn madore_compare(&self) -> Result<MadoreReport, FuzzyError> {
        let coords = self.coordinate_operators()?;
        let mut lambdas = [0.0f64; 3];
        let mut residuals = [0.0f64; 3];
        for i in 0..3 {
            let b = coords[i].conjugated();
            let j = self.spin.get(i);
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0f64;
            for (jv, bv) in j.matrix().iter().zip(b.matrix().iter()) {
                num += jv.conj() * bv;
                den += jv.norm_sqr();
            }
            let lambda = if den > 0.0 { num.re / den } else { 0.0 };
            lambdas[i] = lambda;
            let diff = b.matrix() - j.matrix().scale(lambda);
            residuals[i] = operator::max_abs(&diff);
        }
        Ok(MadoreReport {
            lambdas,
            residuals,
            kappa: self.kappa(),
        })
    }

    /// ΣA_{x^i}² = ρ·Id: returns (ρ, distance from the nearest multiple of
    /// the identity).
    pub fn radius_relation(&self) -> Result<(f64, f64), FuzzyError> {
        let coords = self.coordinate_operators()?;
        let n = self.dim();
        let mut sum: CMatrix = DMatrix::zeros(n, n);
        for a in &coords {
            sum += a.matrix() * a.matrix();
        }
        let rho = (0..n).map(|i| sum[(i, i)].re).sum::<f64>() / n as f64;
        let eye: CMatrix = DMatrix::identity(n, n);
        let residual = operator::max_abs(&(sum - eye * Complex64::new(rho, 0.0)));
        Ok((rho, residual))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SphereSpinHalfModel;
    use std::f64::consts::PI;

    fn grid_points() -> Vec<Point> {
        let mut pts = Vec::new();
        for a in 0..10 {
            for b in 0..10 {
                pts.push(Point::sphere(
                    PI * (a as f64 + 0.5) / 10.0,
                    2.0 * PI * (b as f64 + 0.21) / 10.0,
                ));
            }
        }
        pts
    }

    #[test]
    fn binomials_are_exact() {
        assert_eq!(binomial(0, 0), 1.0);
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(10, 3), 120.0);
        assert_eq!(binomial(12, 6), 924.0);
    }

    #[test]
    fn low_l_components_match_the_half_angle_forms() {
        let t1 = ThetaBasis::new(1);
        let p = Point::sphere(0.9, 1.7);
        let (s, c) = (0.45f64).sin_cos();
        assert!((t1.eval(0, p) - Complex64::new(c, 0.0)).norm() < 1e-15);
        let expect = Complex64::new(0.0, -1.7).exp() * s;
        assert!((t1.eval(1, p) - expect).norm() < 1e-15);

        let t2 = ThetaBasis::new(2);
        let expect = Complex64::new(0.0, -1.7).exp() * (2.0f64.sqrt() * c * s);
        assert!((t2.eval(1, p) - expect).norm() < 1e-15);
        assert_eq!(t2.label(0), -1.0);
        assert_eq!(t2.label(2), 1.0);
    }

    #[test]
    fn components_partition_unity() {
        for big_l in [1usize, 4, 8] {
            let basis = ThetaBasis::new(big_l);
            for p in grid_points() {
                assert!(basis.partition_defect(p) < 1e-12);
            }
        }
    }

    #[test]
    fn component_norms_are_the_inverse_dimension() {
        for big_l in 0..=5usize {
            let basis = ThetaBasis::new(big_l);
            let rule = quad::build_rule(Domain::Sphere, 2 * big_l + 4).unwrap();
            for k in 0..=big_l {
                let n = quad::integrate(&rule, |p| {
                    let v = basis.eval(k, p);
                    v * v.conj()
                })
                .unwrap();
                assert!((n.re - 1.0 / (big_l + 1) as f64).abs() < 1e-12);
            }
            // One representative off-diagonal pair per L.
            if big_l >= 1 {
                let ip = quad::integrate(&rule, |p| {
                    basis.eval(0, p) * basis.eval(1, p).conj()
                })
                .unwrap();
                assert!(ip.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn spin_half_and_spin_one_matrices_are_the_references() {
        let half = SpinMatrices::new(1);
        for i in 0..3 {
            assert!(half.get(i).max_abs_diff(&operator::pauli(i + 1).scale(0.5)) < 1e-15);
        }
        let one = SpinMatrices::new(2);
        let r = 2.0f64.sqrt() / 2.0;
        assert!((one.get(0).entry(0, 1).re - r).abs() < 1e-15);
        assert!((one.get(1).entry(0, 1) - Complex64::new(0.0, -r)).norm() < 1e-15);
        assert!((one.get(2).entry(0, 0).re - 1.0).abs() < 1e-15);
        assert!((one.get(2).entry(2, 2).re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn spin_algebra_holds_through_l_twelve() {
        for big_l in 0..=12usize {
            let spin = SpinMatrices::new(big_l);
            assert!(spin.commutation_residual() < 1e-12, "L = {big_l}");
            assert!(spin.casimir_residual() < 1e-12, "L = {big_l}");
        }
    }

    #[test]
    fn frames_resolve_the_identity() {
        for big_l in [0usize, 1, 2, 5] {
            let fs = FuzzySphere::new(big_l).unwrap();
            assert!(fs.identity_residual().unwrap() < 1e-10, "L = {big_l}");
        }
    }

    #[test]
    fn constant_quantizes_to_identity() {
        let fs = FuzzySphere::new(3).unwrap();
        let one = ClassicalObservable::real("1", |_| 1.0);
        let a = fs.quantize(&one).unwrap();
        assert!(a.max_abs_diff(&HermitianOperator::identity(4)) < 1e-13);
    }

    #[test]
    fn scalar_model_averages_the_observable() {
        let fs = FuzzySphere::new(0).unwrap();
        let x3 = ClassicalObservable::real("x3", |p| p.theta.cos());
        assert!(operator::max_abs(fs.quantize(&x3).unwrap().matrix()) < 1e-15);
        let x3sq = ClassicalObservable::real("x3²", |p| p.theta.cos().powi(2));
        let a = fs.quantize(&x3sq).unwrap();
        assert!((a.entry(0, 0).re - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn l_one_reproduces_the_spin_half_model_up_to_conjugation() {
        let fs = FuzzySphere::new(1).unwrap();
        let fuzzy = fs.coordinate_operators().unwrap();
        let sphere = SphereSpinHalfModel::new()
            .unwrap()
            .coordinate_operators()
            .unwrap();
        for i in 0..3 {
            assert!(fuzzy[i].conjugated().max_abs_diff(&sphere[i]) < 1e-12);
            assert!(
                fuzzy[i]
                    .conjugated()
                    .max_abs_diff(&operator::pauli(i + 1).scale(1.0 / 3.0))
                    < 1e-12
            );
        }
    }

    #[test]
    fn l_two_coordinates_match_the_beta_integral_values() {
        let fs = FuzzySphere::new(2).unwrap();
        let [x1, _, x3] = fs.coordinate_operators().unwrap();
        let expect = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!(x3.max_abs_diff_matrix(&expect) < 1e-13);
        assert!((x1.entry(0, 1).re - 1.0 / (2.0 * 2.0f64.sqrt())).abs() < 1e-13);
    }

    #[test]
    fn madore_comparison_recovers_the_cs_scale() {
        for big_l in [1usize, 2, 4] {
            let fs = FuzzySphere::new(big_l).unwrap();
            let report = fs.madore_compare().unwrap();
            let expect = 2.0 / (big_l + 2) as f64;
            for i in 0..3 {
                assert!((report.lambdas[i] - expect).abs() < 1e-12, "L = {big_l}");
                assert!(report.residuals[i] < 1e-12);
            }
        }
    }

    #[test]
    fn kappa_follows_the_madore_formula() {
        assert!(FuzzySphere::new(0).unwrap().kappa().is_none());
        let k1 = FuzzySphere::new(1).unwrap().kappa().unwrap();
        assert!((k1 - 2.0 / 3.0f64.sqrt()).abs() < 1e-15);
        let k2 = FuzzySphere::new(2).unwrap().kappa().unwrap();
        assert!((k2 - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);
        let k2r = FuzzySphere::with_radius(2, 3.0).unwrap().kappa().unwrap();
        assert!((k2r - 3.0 / 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn nonpositive_radius_is_rejected() {
        assert!(matches!(
            FuzzySphere::with_radius(1, 0.0),
            Err(FuzzyError::BadRadius { .. })
        ));
        assert!(matches!(
            FuzzySphere::with_radius(1, f64::NAN),
            Err(FuzzyError::BadRadius { .. })
        ));
    }

    #[test]
    fn coordinate_squares_sum_to_a_multiple_of_identity() {
        for big_l in 1..=4usize {
            let fs = FuzzySphere::new(big_l).unwrap();
            let (rho, residual) = fs.radius_relation().unwrap();
            let expect = big_l as f64 / (big_l + 2) as f64;
            assert!((rho - expect).abs() < 1e-12, "L = {big_l}: ρ = {rho}");
            assert!(residual < 1e-12);
        }
    }

    #[test]
    fn harmonics_above_l_quantize_to_zero() {
        let fs = FuzzySphere::new(1).unwrap();
        for m in -2i64..=2 {
            assert!(fs.truncation_norm(2, m).unwrap() < 1e-12);
        }
        assert!(fs.truncation_norm(1, 0).unwrap() > 1e-2);
        let scalar = FuzzySphere::new(0).unwrap();
        assert!(scalar.truncation_norm(1, 1).unwrap() < 1e-14);
    }

    #[test]
    fn tensor_scalar_block_is_diagonal_with_the_component_norm() {
        let fs = FuzzySphere::new(2).unwrap();
        let tensor = fs.coefficient_tensor().unwrap();
        let block = tensor.yhat(0, 0);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 / 3.0 } else { 0.0 };
                assert!((block[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn tensor_respects_the_winding_selection_rule() {
        for big_l in [1usize, 3] {
            let fs = FuzzySphere::new(big_l).unwrap();
            let tensor = fs.coefficient_tensor().unwrap();
            assert!(tensor.selection_defect() < 1e-13, "L = {big_l}");
        }
    }

    #[test]
    fn tensor_entry_matches_the_hand_value_at_l_one() {
        // C[1][0][0][0] = √3 ∫ cosθ cos²(θ/2) dμ = √3/6.
        let fs = FuzzySphere::new(1).unwrap();
        let tensor = fs.coefficient_tensor().unwrap();
        let got = tensor.entry(1, 0, 0, 0);
        assert!((got - Complex64::new(3.0f64.sqrt() / 6.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn assembled_operators_match_direct_quantization() {
        let fs = FuzzySphere::new(2).unwrap();
        let tensor = fs.coefficient_tensor().unwrap();
        // A real function: f = 0.7 + 0.3 Y₁⁰ + c Y₁¹ − conj(c) Y₁⁻¹-style pairing.
        let c = Complex64::new(0.4, -0.9);
        let coeffs = vec![
            (0usize, 0i64, Complex64::new(0.7, 0.0)),
            (1, 0, Complex64::new(0.3, 0.0)),
            (1, 1, c),
            (1, -1, -c.conj()),
        ];
        let assembled = tensor.assemble(&coeffs).unwrap();
        let f = ClassicalObservable::complex("harmonic sum", move |p| {
            Complex64::new(0.7, 0.0)
                + spherical_harmonic(1, 0, p) * 0.3
                + spherical_harmonic(1, 1, p) * c
                + spherical_harmonic(1, -1, p) * (-c.conj())
        });
        let direct = fs.quantize_complex(&f).unwrap();
        assert!(operator::max_abs(&(assembled - direct)) < 1e-12);
    }

    #[test]
    fn assembly_rejects_out_of_range_harmonics() {
        let fs = FuzzySphere::new(2).unwrap();
        let tensor = fs.coefficient_tensor().unwrap();
        assert!(matches!(
            tensor.assemble(&[(3, 0, Complex64::new(1.0, 0.0))]),
            Err(FuzzyError::HarmonicOutOfRange { ell: 3, .. })
        ));
    }

    #[test]
    fn yhat_blocks_span_the_matrix_algebra() {
        for big_l in [0usize, 1, 2] {
            let fs = FuzzySphere::new(big_l).unwrap();
            let tensor = fs.coefficient_tensor().unwrap();
            let sigma = tensor.smallest_singular_value().unwrap();
            assert!(sigma > 1e-3, "L = {big_l}: σ_min = {sigma:.3e}");
        }
    }

    #[test]
    fn random_matrix_reconstructs_in_the_yhat_basis() {
        let fs = FuzzySphere::new(2).unwrap();
        let tensor = fs.coefficient_tensor().unwrap();
        let list = tensor.yhat_list();
        let k = list.len();
        let n = fs.dim();
        // Deterministic "random" target.
        let target: CMatrix = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(((3 * i + j) as f64).sin(), ((i + 7 * j) as f64).cos())
        });
        // Least squares through the Gram system.
        let mut gram: CMatrix = DMatrix::zeros(k, k);
        let mut rhs = nalgebra::DVector::<Complex64>::zeros(k);
        for a in 0..k {
            for b in 0..k {
                let mut acc = Complex64::new(0.0, 0.0);
                for (x, y) in list[a].2.iter().zip(list[b].2.iter()) {
                    acc += x.conj() * y;
                }
                gram[(a, b)] = acc;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, y) in list[a].2.iter().zip(target.iter()) {
                acc += x.conj() * y;
            }
            rhs[a] = acc;
        }
        let spec = operator::eig(&HermitianOperator::new(gram).unwrap()).unwrap();
        let mut coeffs = nalgebra::DVector::<Complex64>::zeros(k);
        for (idx, &lambda) in spec.eigenvalues.iter().enumerate() {
            let v = spec.eigenvectors.column(idx);
            let mut proj = Complex64::new(0.0, 0.0);
            for a in 0..k {
                proj += v[a].conj() * rhs[a];
            }
            let s = proj / Complex64::new(lambda, 0.0);
            for a in 0..k {
                coeffs[a] += v[a] * s;
            }
        }
        let mut fit: CMatrix = DMatrix::zeros(n, n);
        for a in 0..k {
            fit += list[a].2 * coeffs[a];
        }
        assert!(operator::max_abs(&(fit - target)) < 1e-8);
    }
}
