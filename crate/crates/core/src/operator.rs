//! Dense Hermitian operators on the finite quantization space.
//!
//! Construction symmetrizes and rejects matrices whose deviation from
//! Hermiticity exceeds 1e-10, so everything downstream can rely on a real
//! spectrum. Eigendecomposition uses cyclic Jacobi with complex plane
//! rotations; at the dimensions this crate works at (a few hundred at most)
//! it is simple, accurate to a few ulps, and free of external solvers.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::{CMatrix, Complex64};

/// Asymmetry beyond which a would-be Hermitian matrix is rejected.
pub const HERMITICITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("matrix deviates from Hermitian symmetry by {asymmetry:.3e} (limit {limit:.3e})")]
    NotHermitian { asymmetry: f64, limit: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },
    #[error("Jacobi sweep limit reached with off-diagonal norm {off:.3e}")]
    EigNonConvergence { off: f64 },
    #[error("spectral function returned a non-finite value at eigenvalue {eigenvalue:.6e}")]
    NonFiniteFunction { eigenvalue: f64 },
}

/// Hermitian matrix with enforced symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    /// Symmetrize-and-check constructor. The stored matrix is (M + M†)/2;
    /// inputs with asymmetry above [`HERMITICITY_TOL`] are rejected.
    pub fn new(m: CMatrix) -> Result<Self, OperatorError> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(OperatorError::BadShape {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let asymmetry = hermitian_defect(&m);
        if asymmetry > HERMITICITY_TOL {
            return Err(OperatorError::NotHermitian {
                asymmetry,
                limit: HERMITICITY_TOL,
            });
        }
        let adj = m.adjoint();
        let sym = (m + adj).scale(0.5);
        Ok(HermitianOperator { m: sym })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self, OperatorError> {
        Self::new(DMatrix::from_fn(dim, dim, f))
    }

    /// 2x2 real symmetric matrix ((a, b), (b, d)).
    pub fn symmetric2(a: f64, b: f64, d: f64) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        Self::new(DMatrix::from_row_slice(2, 2, &[c(a), c(b), c(b), c(d)])).expect("symmetric")
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    /// Real trace (the diagonal of a symmetrized matrix is exactly real).
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianOperator {
            m: self.m.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, OperatorError> {
        check_dims(self, other)?;
        Ok(HermitianOperator {
            m: &self.m + &other.m,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, OperatorError> {
        check_dims(self, other)?;
        Ok(HermitianOperator {
            m: &self.m - &other.m,
        })
    }

    /// Largest entrywise distance to another operator.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs(&(&self.m - &other.m))
    }

    /// Largest entrywise distance to an arbitrary matrix.
    pub fn max_abs_diff_matrix(&self, other: &CMatrix) -> f64 {
        max_abs(&(&self.m - other))
    }

    /// Entrywise complex conjugate (equals the transpose for Hermitian
    /// matrices, so the result is Hermitian again).
    pub fn conjugated(&self) -> Self {
        HermitianOperator {
            m: self.m.map(|z| z.conj()),
        }
    }
}

fn check_dims(a: &HermitianOperator, b: &HermitianOperator) -> Result<(), OperatorError> {
    if a.dim() != b.dim() {
        return Err(OperatorError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// max_ij |M_ij - conj(M_ji)|.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// [A, B] = AB - BA. Anti-Hermitian for Hermitian inputs; that is asserted
/// within 1e-10 before returning.
pub fn commutator(a: &HermitianOperator, b: &HermitianOperator) -> Result<CMatrix, OperatorError> {
    check_dims(a, b)?;
    let c = &a.m * &b.m - &b.m * &a.m;
    let defect = anti_hermitian_defect(&c);
    if defect > 1e-10 {
        return Err(OperatorError::NotHermitian {
            asymmetry: defect,
            limit: 1e-10,
        });
    }
    Ok(c)
}

/// max_ij |M_ij + conj(M_ji)|.
pub fn anti_hermitian_defect(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] + m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors (columns).
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    /// max |A v_k - λ_k v_k| over all pairs, for reconstruction checks.
    pub fn residual(&self, a: &HermitianOperator) -> f64 {
        let av = a.matrix() * &self.eigenvectors;
        let mut worst: f64 = 0.0;
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            for i in 0..a.dim() {
                worst = worst.max((av[(i, k)] - self.eigenvectors[(i, k)] * lambda).norm());
            }
        }
        worst
    }
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
pub fn eig(a: &HermitianOperator) -> Result<Spectrum, OperatorError> {
    let n = a.dim();
    let mut m = a.m.clone();
    let mut v: CMatrix = DMatrix::identity(n, n);
    let scale = max_abs(&m).max(1.0);
    let target = 1e-15 * scale;

    let mut converged = false;
    for _sweep in 0..60 {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off > 1e-12 * scale {
            return Err(OperatorError::EigNonConvergence { off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, dst)] = v[(i, src)];
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// One complex Jacobi rotation annihilating the (p, q) entry.
///
/// With β the phase of m_pq, the plane rotation is the real Jacobi rotation
/// conjugated by diag(1, e^{-iβ}), which first makes the pivot real.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let mpq = m[(p, q)];
    let r = mpq.norm();
    if r <= f64::MIN_POSITIVE {
        return;
    }
    let phase = mpq / r;
    let tau = (m[(q, q)].re - m[(p, p)].re) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Column update: (col_p, col_q) <- (c col_p - s conj(phase)... ) expressed
    // with J_pp = c, J_pq = s, J_qp = -s e^{-iβ}, J_qq = c e^{-iβ}.
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;
    let n = m.nrows();
    for i in 0..n {
        let a = m[(i, p)];
        let b = m[(i, q)];
        m[(i, p)] = a * c + b * jqp;
        m[(i, q)] = a * s + b * jqq;
        let a = v[(i, p)];
        let b = v[(i, q)];
        v[(i, p)] = a * c + b * jqp;
        v[(i, q)] = a * s + b * jqq;
    }
    // Row update with the adjoint factors.
    for j in 0..n {
        let a = m[(p, j)];
        let b = m[(q, j)];
        m[(p, j)] = a * c + b * jqp.conj();
        m[(q, j)] = a * s + b * jqq.conj();
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
}

/// g(A) through the spectral decomposition: V g(Λ) V†.
pub fn apply_function(
    a: &HermitianOperator,
    g: impl Fn(f64) -> f64,
) -> Result<HermitianOperator, OperatorError> {
    let spec = eig(a)?;
    let n = a.dim();
    let mut out: CMatrix = DMatrix::zeros(n, n);
    for (k, &lambda) in spec.eigenvalues.iter().enumerate() {
        let g_val = g(lambda);
        if !g_val.is_finite() {
            return Err(OperatorError::NonFiniteFunction { eigenvalue: lambda });
        }
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] +=
                    spec.eigenvectors[(i, k)] * spec.eigenvectors[(j, k)].conj() * g_val;
            }
        }
    }
    // Rounding is the only possible asymmetry here; fold it away.
    let adj = out.adjoint();
    Ok(HermitianOperator {
        m: (out + adj).scale(0.5),
    })
}

/// Tr g(A).
pub fn trace_function(a: &HermitianOperator, g: impl Fn(f64) -> f64) -> Result<f64, OperatorError> {
    let spec = eig(a)?;
    let mut t = 0.0;
    for &lambda in &spec.eigenvalues {
        let g_val = g(lambda);
        if !g_val.is_finite() {
            return Err(OperatorError::NonFiniteFunction { eigenvalue: lambda });
        }
        t += g_val;
    }
    Ok(t)
}

/// Pauli matrices σ_0..σ_3 (σ_0 is the identity).
pub fn pauli(k: usize) -> HermitianOperator {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match k {
        0 => [one, z, z, one],
        1 => [z, one, one, z],
        2 => [z, -i, i, z],
        3 => [one, z, z, -one],
        _ => panic!("Pauli index {k} out of range"),
    };
    HermitianOperator::new(DMatrix::from_row_slice(2, 2, &entries)).expect("Pauli")
}

/// Coefficients c_k with M = Σ c_k σ_k for an arbitrary 2x2 matrix:
/// c_k = Tr(σ_k M)/2.
pub fn pauli_components(m: &CMatrix) -> [Complex64; 4] {
    assert_eq!((m.nrows(), m.ncols()), (2, 2), "Pauli split needs 2x2");
    let half = Complex64::new(0.5, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        (m[(0, 0)] + m[(1, 1)]) * half,
        (m[(0, 1)] + m[(1, 0)]) * half,
        (m[(0, 1)] - m[(1, 0)]) * half * i,
        (m[(0, 0)] - m[(1, 1)]) * half,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn constructor_rejects_visible_asymmetry() {
        let z = Complex64::new(0.0, 0.0);
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[z, Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0), z],
        );
        match HermitianOperator::new(m) {
            Err(OperatorError::NotHermitian { asymmetry, .. }) => {
                assert!((asymmetry - 0.5).abs() < 1e-15)
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn constructor_folds_roundoff_asymmetry() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.25, 1e-13),
                Complex64::new(0.25, 0.0),
                Complex64::new(2.0, 0.0),
            ],
        );
        let h = HermitianOperator::new(m).unwrap();
        assert!((h.entry(0, 1) - h.entry(1, 0).conj()).norm() < 1e-16);
    }

    #[test]
    fn pauli_commutator_is_antihermitian_and_correct() {
        // [σ_2, σ_3] = 2i σ_1.
        let c = commutator(&pauli(2), &pauli(3)).unwrap();
        let expect = pauli(1).matrix().scale(2.0) * Complex64::new(0.0, 1.0);
        assert!(max_abs(&(&c - expect)) < 1e-15);
        assert!(anti_hermitian_defect(&c) < 1e-15);
    }

    #[test]
    fn commutator_checks_dimensions() {
        let a = pauli(1);
        let b = HermitianOperator::identity(3);
        assert!(matches!(
            commutator(&a, &b),
            Err(OperatorError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eigenvalues_of_sigma3_are_plus_minus_one() {
        let spec = eig(&pauli(3)).unwrap();
        assert!((spec.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_scaled_diagonal() {
        let a = HermitianOperator::symmetric2(3.0 * PI / 8.0, 0.0, 5.0 * PI / 8.0);
        let spec = eig(&a).unwrap();
        assert!((spec.eigenvalues[0] - 3.0 * PI / 8.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 5.0 * PI / 8.0).abs() < 1e-14);
    }

    #[test]
    fn spectrum_is_invariant_under_unitary_conjugation() {
        // Conjugate a fixed Hermitian matrix by the rotation exp(iθσ₂/...),
        // here just a handwritten unitary, and compare spectra.
        let a = HermitianOperator::from_fn(2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(0.3, 0.0),
            (1, 1) => Complex64::new(-1.2, 0.0),
            (0, 1) => Complex64::new(0.4, 0.7),
            (1, 0) => Complex64::new(0.4, -0.7),
            _ => unreachable!(),
        })
        .unwrap();
        let t = 0.63f64;
        let u = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(t.cos(), 0.0),
                Complex64::new(-t.sin(), 0.0),
                Complex64::new(t.sin(), 0.0),
                Complex64::new(t.cos(), 0.0),
            ],
        );
        let b = HermitianOperator::new(&u * a.matrix() * u.adjoint()).unwrap();
        let sa = eig(&a).unwrap();
        let sb = eig(&b).unwrap();
        for (x, y) in sa.eigenvalues.iter().zip(&sb.eigenvalues) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn apply_function_squares_sigma1_to_identity() {
        let sq = apply_function(&pauli(1), |x| x * x).unwrap();
        assert!(sq.max_abs_diff(&HermitianOperator::identity(2)) < 1e-14);
    }

    #[test]
    fn apply_function_rejects_non_finite_values() {
        let a = HermitianOperator::symmetric2(0.0, 0.0, 1.0);
        assert!(matches!(
            apply_function(&a, |x| 1.0 / x),
            Err(OperatorError::NonFiniteFunction { .. })
        ));
    }

    #[test]
    fn pauli_split_roundtrips() {
        let m = pauli(1).matrix().scale(0.5) + pauli(2).matrix().scale(-1.5)
            + pauli(3).matrix().scale(0.25)
            + pauli(0).matrix().scale(2.0);
        let c = pauli_components(&m);
        assert!((c[0].re - 2.0).abs() < 1e-15);
        assert!((c[1].re - 0.5).abs() < 1e-15);
        assert!((c[2].re + 1.5).abs() < 1e-15);
        assert!((c[3].re - 0.25).abs() < 1e-15);
        for ck in c {
            assert!(ck.im.abs() < 1e-15);
        }
    }

    fn hermitian_from_seed(dim: usize, vals: &[f64]) -> HermitianOperator {
        let mut m = DMatrix::zeros(dim, dim);
        let mut it = vals.iter().cycle();
        let mut next = || *it.next().unwrap();
        for i in 0..dim {
            m[(i, i)] = Complex64::new(next(), 0.0);
            for j in (i + 1)..dim {
                let z = Complex64::new(next(), next());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        HermitianOperator::new(m).unwrap()
    }

    proptest! {
        #[test]
        fn jacobi_reconstructs_random_hermitian_matrices(
            vals in proptest::collection::vec(-3.0f64..3.0, 36..48),
        ) {
            let a = hermitian_from_seed(6, &vals);
            let spec = eig(&a).unwrap();
            prop_assert!(spec.residual(&a) < 1e-9);
            // Orthonormal eigenvectors.
            let vtv = spec.eigenvectors.adjoint() * &spec.eigenvectors;
            let eye: CMatrix = DMatrix::identity(6, 6);
            prop_assert!(max_abs(&(vtv - eye)) < 1e-12);
            // Ascending order.
            for w in spec.eigenvalues.windows(2) {
                prop_assert!(w[0] <= w[1] + 1e-12);
            }
        }

        #[test]
        fn identity_function_reproduces_operator(
            vals in proptest::collection::vec(-2.0f64..2.0, 16..20),
        ) {
            let a = hermitian_from_seed(4, &vals);
            let b = apply_function(&a, |x| x).unwrap();
            prop_assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }
}
