//! The quantization map and Berezin symbol calculus.
//!
//! A classical observable f on the measured set becomes the operator
//!
//! ```text
//! A_f = ∫ μ(dx) N(x) f(x) |x⟩⟨x| ,   [A_f]_{ij} = ∫ μ(dx) f(x) φ_i(x) conj(φ_j(x)) ,
//! ```
//!
//! Hermitian whenever f is real. The lower symbol Ǎ(x) = ⟨x|A|x⟩ evaluates an
//! operator back to a function; an upper symbol Â is any function whose
//! quantization returns A, found here by least squares over a caller-supplied
//! candidate basis (it is genuinely non-unique, and flagged as such when the
//! candidate set is linearly dependent after quantization).
//!
//! The weighted Berezin-Lieb inequalities compare the three numbers
//! ∫ g(Ǎ) dν ≤ Tr g(A) ≤ ∫ g(Â) dν for convex g, with dν = N dμ, whose total
//! mass equals the space dimension.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::frames::CoherentFrame;
use crate::operator::{self, HermitianOperator, OperatorError};
use crate::quad::{self, Point, QuadError, QuadratureRule};
use crate::{CMatrix, Complex64};

/// Imaginary parts beyond this fail the `is_real` contract of an observable.
pub const REALITY_TOL: f64 = 1e-12;

/// Residual beyond which no upper symbol exists in the candidate span.
pub const UPPER_SYMBOL_TOL: f64 = 1e-8;

/// Slack allowed when asserting the Berezin-Lieb ordering.
pub const BEREZIN_LIEB_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum QuantizeError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(
        "observable declared real has imaginary part {imag:.3e} at θ = {theta:.6e}, φ = {phi:.6e}"
    )]
    NotReal { theta: f64, phi: f64, imag: f64 },
    #[error("operator dimension {operator} does not match frame dimension {frame}")]
    DimensionMismatch { operator: usize, frame: usize },
    #[error("no upper symbol in the candidate span: best residual {residual:.3e}")]
    NoUpperSymbol { residual: f64 },
    #[error(
        "Berezin-Lieb ordering violated beyond slack: lower {lower:.12e}, trace {trace:.12e}, upper {upper:.12e}"
    )]
    OrderingViolated { lower: f64, trace: f64, upper: f64 },
}

/// A function on the measured set, tagged with whether it is real-valued.
#[derive(Clone)]
pub struct ClassicalObservable {
    eval: Arc<dyn Fn(Point) -> Complex64 + Send + Sync>,
    description: String,
    is_real: bool,
}

impl std::fmt::Debug for ClassicalObservable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClassicalObservable")
            .field("description", &self.description)
            .field("is_real", &self.is_real)
            .finish()
    }
}

impl ClassicalObservable {
    pub fn real(
        description: impl Into<String>,
        f: impl Fn(Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ClassicalObservable {
            eval: Arc::new(move |p| Complex64::new(f(p), 0.0)),
            description: description.into(),
            is_real: true,
        }
    }

    pub fn complex(
        description: impl Into<String>,
        f: impl Fn(Point) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        ClassicalObservable {
            eval: Arc::new(f),
            description: description.into(),
            is_real: false,
        }
    }

    pub fn eval(&self, x: Point) -> Complex64 {
        (self.eval)(x)
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }
}

/// Lower or upper Berezin symbol as an evaluatable function.
#[derive(Clone)]
pub struct SymbolFunction {
    eval: Arc<dyn Fn(Point) -> Complex64 + Send + Sync>,
    kind: SymbolKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Lower,
    /// Upper symbols are non-unique whenever the quantized candidate basis is
    /// linearly dependent; the flag records that the returned one was a
    /// minimum-norm choice among equally valid solutions.
    Upper {
        non_unique: bool,
    },
}

impl std::fmt::Debug for SymbolFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymbolFunction")
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

impl SymbolFunction {
    /// Wraps a closed-form symbol known analytically (the models ship
    /// several); symbols produced numerically come from [`lower_symbol`] and
    /// [`upper_symbol`].
    pub fn from_closure(
        kind: SymbolKind,
        f: impl Fn(Point) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        SymbolFunction {
            eval: Arc::new(f),
            kind,
        }
    }

    pub fn eval(&self, x: Point) -> Complex64 {
        (self.eval)(x)
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }
}

/// Quantizes a general (possibly complex) observable to a raw matrix.
pub fn quantize_matrix(
    frame: &CoherentFrame,
    rule: &QuadratureRule,
    f: &ClassicalObservable,
) -> Result<CMatrix, QuantizeError> {
    let n = frame.dim();
    let mut acc: CMatrix = DMatrix::zeros(n, n);
    for (node, &w) in rule.nodes.iter().zip(&rule.weights) {
        let fv = observe(f, *node)?;
        let comps = frame.family().components(*node);
        for i in 0..n {
            for j in 0..n {
                acc[(i, j)] += comps[i] * comps[j].conj() * fv * w;
            }
        }
    }
    Ok(acc)
}

/// Quantizes a real observable to a Hermitian operator.
///
/// The raw matrix of a real observable is Hermitian up to quadrature noise;
/// the result is symmetrized, and an asymmetry above 1e-10 is logged as a
/// warning that the rule is inadequate for this integrand.
pub fn quantize(
    frame: &CoherentFrame,
    rule: &QuadratureRule,
    f: &ClassicalObservable,
) -> Result<HermitianOperator, QuantizeError> {
    let raw = quantize_matrix(frame, rule, f)?;
    hermitize(raw, f.description())
}

/// Adaptive-quadrature variant of [`quantize`] for observables that no fixed
/// rule integrates exactly (for example the bare coordinate functions).
pub fn quantize_adaptive(
    frame: &CoherentFrame,
    f: &ClassicalObservable,
    tol: f64,
) -> Result<HermitianOperator, QuantizeError> {
    let n = frame.dim();
    let mut reality_defect: Option<(Point, f64)> = None;
    let entries = quad::integrate_adaptive_many(
        frame.domain(),
        n * n,
        |p, buf| {
            let fv = f.eval(p);
            if f.is_real() && fv.im.abs() > REALITY_TOL && reality_defect.is_none() {
                reality_defect = Some((p, fv.im));
            }
            let comps = frame.family().components(p);
            for i in 0..n {
                for j in 0..n {
                    buf[i * n + j] = comps[i] * comps[j].conj() * fv;
                }
            }
        },
        tol,
    )?;
    if let Some((p, imag)) = reality_defect {
        return Err(QuantizeError::NotReal {
            theta: p.theta,
            phi: p.phi,
            imag,
        });
    }
    let raw = DMatrix::from_fn(n, n, |i, j| entries[i * n + j]);
    hermitize(raw, f.description())
}

fn observe(f: &ClassicalObservable, node: Point) -> Result<Complex64, QuantizeError> {
    let fv = f.eval(node);
    if f.is_real() && fv.im.abs() > REALITY_TOL {
        return Err(QuantizeError::NotReal {
            theta: node.theta,
            phi: node.phi,
            imag: fv.im,
        });
    }
    Ok(fv)
}

fn hermitize(raw: CMatrix, what: &str) -> Result<HermitianOperator, QuantizeError> {
    let defect = operator::hermitian_defect(&raw);
    if defect > operator::HERMITICITY_TOL {
        log::warn!(
            "quantization of `{what}` came back asymmetric by {defect:.3e}; \
             symmetrizing, but the quadrature rule looks inadequate"
        );
    }
    let adj = raw.adjoint();
    Ok(HermitianOperator::new((raw + adj).scale(0.5))?)
}

/// Lower symbol Ǎ(x) = ⟨x|A|x⟩.
pub fn lower_symbol(
    frame: &CoherentFrame,
    op: &HermitianOperator,
) -> Result<SymbolFunction, QuantizeError> {
    if op.dim() != frame.dim() {
        return Err(QuantizeError::DimensionMismatch {
            operator: op.dim(),
            frame: frame.dim(),
        });
    }
    let frame = frame.clone();
    let m = op.matrix().clone();
    Ok(SymbolFunction {
        eval: Arc::new(move |x| frame.expectation(&m, x)),
        kind: SymbolKind::Lower,
    })
}

/// Least-squares upper symbol of `op` over the span of `basis`.
///
/// Each candidate is quantized with `rule`; the coefficient vector minimizing
/// the entrywise distance to `op` is found through the spectral pseudoinverse
/// of the normal matrix. A residual above [`UPPER_SYMBOL_TOL`] means `op` has
/// no upper symbol in this span.
pub fn upper_symbol(
    frame: &CoherentFrame,
    rule: &QuadratureRule,
    op: &HermitianOperator,
    basis: &[ClassicalObservable],
) -> Result<SymbolFunction, QuantizeError> {
    if op.dim() != frame.dim() {
        return Err(QuantizeError::DimensionMismatch {
            operator: op.dim(),
            frame: frame.dim(),
        });
    }
    let n = frame.dim();
    let k = basis.len();
    let mut quantized = Vec::with_capacity(k);
    for b in basis {
        quantized.push(quantize_matrix(frame, rule, b)?);
    }

    // Normal equations over vectorized matrices: N c = rhs.
    let mut normal: CMatrix = DMatrix::zeros(k, k);
    let mut rhs: DVector<Complex64> = DVector::zeros(k);
    for a in 0..k {
        for b in 0..k {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    acc += quantized[a][(i, j)].conj() * quantized[b][(i, j)];
                }
            }
            normal[(a, b)] = acc;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += quantized[a][(i, j)].conj() * op.entry(i, j);
            }
        }
        rhs[a] = acc;
    }

    let normal_op = HermitianOperator::new(normal)?;
    let spec = operator::eig(&normal_op)?;
    let lambda_max = spec
        .eigenvalues
        .iter()
        .cloned()
        .fold(0.0f64, |m, l| m.max(l.abs()));
    let cutoff = 1e-12 * lambda_max.max(1e-300);
    let mut non_unique = false;
    let mut coeffs: DVector<Complex64> = DVector::zeros(k);
    for (idx, &lambda) in spec.eigenvalues.iter().enumerate() {
        if lambda <= cutoff {
            non_unique = true;
            continue;
        }
        let v = spec.eigenvectors.column(idx);
        let mut proj = Complex64::new(0.0, 0.0);
        for a in 0..k {
            proj += v[a].conj() * rhs[a];
        }
        let scale = proj / Complex64::new(lambda, 0.0);
        for a in 0..k {
            coeffs[a] += v[a] * scale;
        }
    }

    let mut residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut fit = Complex64::new(0.0, 0.0);
            for a in 0..k {
                fit += quantized[a][(i, j)] * coeffs[a];
            }
            residual = residual.max((fit - op.entry(i, j)).norm());
        }
    }
    if residual > UPPER_SYMBOL_TOL {
        return Err(QuantizeError::NoUpperSymbol { residual });
    }

    let basis: Vec<ClassicalObservable> = basis.to_vec();
    let coeff_vec: Vec<Complex64> = coeffs.iter().cloned().collect();
    Ok(SymbolFunction {
        eval: Arc::new(move |x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (b, c) in basis.iter().zip(&coeff_vec) {
                acc += b.eval(x) * c;
            }
            acc
        }),
        kind: SymbolKind::Upper { non_unique },
    })
}

/// The three Berezin-Lieb values for a convex g, plus the unweighted
/// integrals kept for comparison (they do not bracket the trace, since the
/// bare measure mass differs from the space dimension).
#[derive(Clone, Copy, Debug)]
pub struct BerezinLieb {
    pub lower: f64,
    pub trace: f64,
    pub upper: f64,
    pub unweighted_lower: f64,
    pub unweighted_upper: f64,
}

impl BerezinLieb {
    /// Worst violation of lower ≤ trace ≤ upper (0 when properly ordered).
    pub fn ordering_defect(&self) -> f64 {
        (self.lower - self.trace).max(self.trace - self.upper).max(0.0)
    }
}

/// Checks ∫ g(Ǎ) dν ≤ Tr g(A) ≤ ∫ g(Â) dν with dν = N dμ.
///
/// The upper symbol is taken over `basis`; its absence is an error, as is an
/// ordering violation beyond [`BEREZIN_LIEB_SLACK`].
pub fn berezin_lieb_check(
    frame: &CoherentFrame,
    rule: &QuadratureRule,
    op: &HermitianOperator,
    basis: &[ClassicalObservable],
    g: impl Fn(f64) -> f64,
) -> Result<BerezinLieb, QuantizeError> {
    let lower_sym = lower_symbol(frame, op)?;
    let upper_sym = upper_symbol(frame, rule, op, basis)?;

    let integrate_symbol = |sym: &SymbolFunction, weighted: bool| -> Result<f64, QuantizeError> {
        let v = quad::integrate(rule, |p| {
            let s = sym.eval(p);
            let w = if weighted { frame.weight(p) } else { 1.0 };
            Complex64::new(g(s.re) * w, 0.0)
        })?;
        Ok(v.re)
    };

    let lower = integrate_symbol(&lower_sym, true)?;
    let upper = integrate_symbol(&upper_sym, true)?;
    let unweighted_lower = integrate_symbol(&lower_sym, false)?;
    let unweighted_upper = integrate_symbol(&upper_sym, false)?;
    let trace = operator::trace_function(op, &g)?;

    let out = BerezinLieb {
        lower,
        trace,
        upper,
        unweighted_lower,
        unweighted_upper,
    };
    if out.ordering_defect() > BEREZIN_LIEB_SLACK {
        return Err(QuantizeError::OrderingViolated {
            lower,
            trace,
            upper,
        });
    }
    Ok(out)
}
