//! Coherent-state frames over a measured set.
//!
//! An [`OrthoFamily`] is a finite list of functions φ_i that is orthonormal
//! under the domain measure; orthonormality is verified numerically at
//! construction. The associated frame uses unit states
//!
//! ```text
//! |x⟩ = N(x)^{-1/2} Σ_i φ_i(x) |i⟩ ,      N(x) = Σ_i |φ_i(x)|² ,
//! ```
//!
//! so ⟨x|x⟩ = 1 pointwise while the weight N(x) rides along in the
//! resolution of the identity, ∫ N(x) |x⟩⟨x| μ(dx) = Id. The overlap kernel
//! K(x, y) = ⟨x|y⟩ reproduces any function of the form x ↦ ⟨x|ψ⟩ against the
//! weighted measure.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::quad::{self, Domain, Point, QuadError, QuadratureRule};
use crate::{CMatrix, CVector, Complex64};

/// Largest allowed deviation of the numerical Gram matrix from the identity.
pub const GRAM_TOL: f64 = 1e-8;

/// Weights below this (relative to the largest observed) mark a point where
/// the state direction is undefined.
const DEGENERATE_WEIGHT: f64 = 1e-13;

pub type FamilyFn = Arc<dyn Fn(Point) -> Complex64 + Send + Sync>;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("family is not orthonormal: Gram residual {residual:.3e} exceeds {limit:.3e}")]
    NotOrthonormal { residual: f64, limit: f64 },
    #[error("family is empty")]
    Empty,
    #[error("labels and functions disagree in length: {labels} vs {functions}")]
    LabelMismatch { labels: usize, functions: usize },
    #[error("weight N(x) vanishes at θ = {theta:.6e}, φ = {phi:.6e}; the state is undefined there")]
    DegenerateWeight { theta: f64, phi: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Finite family of functions, orthonormal under the domain measure.
#[derive(Clone)]
pub struct OrthoFamily {
    domain: Domain,
    functions: Vec<FamilyFn>,
    labels: Vec<String>,
    degree: usize,
    rule: QuadratureRule,
}

impl fmt::Debug for OrthoFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrthoFamily")
            .field("domain", &self.domain)
            .field("labels", &self.labels)
            .field("degree", &self.degree)
            .finish()
    }
}

impl OrthoFamily {
    /// Builds the family and verifies its Gram matrix against the identity.
    ///
    /// `degree` is the trigonometric degree of the members (used to size the
    /// verification rule; products of two members must be integrated
    /// exactly).
    pub fn new(
        domain: Domain,
        degree: usize,
        members: Vec<(String, FamilyFn)>,
    ) -> Result<Self, FrameError> {
        if members.is_empty() {
            return Err(FrameError::Empty);
        }
        let (labels, functions): (Vec<_>, Vec<_>) = members.into_iter().unzip();
        let rule = quad::build_rule(domain, 2 * degree + 2)?;
        let family = OrthoFamily {
            domain,
            functions,
            labels,
            degree,
            rule,
        };
        let residual = family.gram_residual(&family.rule)?;
        if residual > GRAM_TOL {
            return Err(FrameError::NotOrthonormal {
                residual,
                limit: GRAM_TOL,
            });
        }
        Ok(family)
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Verification rule sized for products of two members.
    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn eval(&self, i: usize, x: Point) -> Complex64 {
        (self.functions[i])(x)
    }

    /// Raw component vector (φ_1(x), ..., φ_n(x)).
    pub fn components(&self, x: Point) -> CVector {
        CVector::from_iterator(self.len(), self.functions.iter().map(|f| f(x)))
    }

    /// Pointwise weight N(x) = Σ |φ_i(x)|².
    pub fn weight(&self, x: Point) -> f64 {
        self.functions.iter().map(|f| f(x).norm_sqr()).sum()
    }

    /// max_ij |∫ conj(φ_i) φ_j dμ - δ_ij| under the given rule.
    pub fn gram_residual(&self, rule: &QuadratureRule) -> Result<f64, QuadError> {
        let n = self.len();
        let mut gram: CMatrix = DMatrix::zeros(n, n);
        for (node, &w) in rule.nodes.iter().zip(&rule.weights) {
            let v = self.components(*node);
            for i in 0..n {
                for j in 0..n {
                    gram[(i, j)] += v[i].conj() * v[j] * w;
                }
            }
        }
        for z in gram.iter() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(QuadError::NonFinite {
                    theta: f64::NAN,
                    phi: f64::NAN,
                });
            }
        }
        let eye: CMatrix = DMatrix::identity(n, n);
        Ok(crate::operator::max_abs(&(gram - eye)))
    }
}

/// Family of unit coherent states |x⟩ with weight N(x).
#[derive(Clone, Debug)]
pub struct CoherentFrame {
    family: OrthoFamily,
}

impl CoherentFrame {
    /// Wraps a family after checking that no quadrature node is degenerate
    /// (N(x) = 0 leaves the state direction undefined there).
    pub fn from_family(family: OrthoFamily) -> Result<Self, FrameError> {
        let weights: Vec<f64> = family
            .rule
            .nodes
            .iter()
            .map(|&x| family.weight(x))
            .collect();
        let peak = weights.iter().cloned().fold(0.0, f64::max);
        if let Some(pos) = weights.iter().position(|&w| w <= DEGENERATE_WEIGHT * peak) {
            let node = family.rule.nodes[pos];
            return Err(FrameError::DegenerateWeight {
                theta: node.theta,
                phi: node.phi,
            });
        }
        Ok(CoherentFrame { family })
    }

    pub fn family(&self) -> &OrthoFamily {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.family.len()
    }

    pub fn domain(&self) -> Domain {
        self.family.domain
    }

    /// Unit state vector ⟨i|x⟩ = φ_i(x)/√N(x).
    pub fn state(&self, x: Point) -> CVector {
        let mut v = self.family.components(x);
        let n = v.norm();
        v /= Complex64::new(n, 0.0);
        v
    }

    pub fn weight(&self, x: Point) -> f64 {
        self.family.weight(x)
    }

    /// N(x) |x⟩⟨x|, whose (i, j) entry is φ_i(x) conj(φ_j(x)).
    pub fn weighted_projector(&self, x: Point) -> CMatrix {
        let v = self.family.components(x);
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    /// ⟨x| M |x⟩ for an arbitrary matrix M.
    pub fn expectation(&self, m: &CMatrix, x: Point) -> Complex64 {
        let s = self.state(x);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += s[i].conj() * m[(i, j)] * s[j];
            }
        }
        acc
    }

    /// max_ij |∫ N(x) |x⟩⟨x| μ(dx) - Id| under the given rule.
    pub fn identity_residual(&self, rule: &QuadratureRule) -> Result<f64, QuadError> {
        self.family.gram_residual(rule)
    }

    pub fn kernel(&self) -> Kernel {
        Kernel {
            frame: self.clone(),
        }
    }

    /// Projection of ψ onto the reproducing subspace:
    /// x ↦ ∫ N(y) K(x, y) ψ(y) μ(dy), precomputed against the rule.
    ///
    /// Functions of the form y ↦ ⟨y|v⟩ = Σ_i conj(state_i(y)) v_i come back
    /// unchanged; anything outside that span is altered.
    pub fn reproduce(
        &self,
        rule: &QuadratureRule,
        psi: impl Fn(Point) -> Complex64,
    ) -> Result<impl Fn(Point) -> Complex64, QuadError> {
        // With N(y) |y⟩⟨y| written in components, the integral collapses to
        // v_i = ∫ φ_i(y) √N(y) ψ(y) μ(dy) and result(x) = Σ_i conj(state_i(x)) v_i.
        let n = self.dim();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (node, &w) in rule.nodes.iter().zip(&rule.weights) {
            let val = psi(*node);
            if !val.re.is_finite() || !val.im.is_finite() {
                return Err(QuadError::NonFinite {
                    theta: node.theta,
                    phi: node.phi,
                });
            }
            let comps = self.family.components(*node);
            let root_n = self.family.weight(*node).sqrt();
            for i in 0..n {
                coeffs[i] += comps[i] * val * (root_n * w);
            }
        }
        let frame = self.clone();
        Ok(move |x: Point| {
            let s = frame.state(x);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..frame.dim() {
                acc += s[i].conj() * coeffs[i];
            }
            acc
        })
    }
}

/// Overlap kernel K(x, y) = ⟨x|y⟩.
#[derive(Clone, Debug)]
pub struct Kernel {
    frame: CoherentFrame,
}

impl Kernel {
    pub fn eval(&self, x: Point, y: Point) -> Complex64 {
        let sx = self.frame.state(x);
        let sy = self.frame.state(y);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.frame.dim() {
            acc += sx[i].conj() * sy[i];
        }
        acc
    }
}
