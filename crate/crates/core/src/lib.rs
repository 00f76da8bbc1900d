//! Coherent-state quantization of measured observation sets.
//!
//! Starting from a finite family of functions that is orthonormal under a
//! normalized measure on a compact set X, this crate builds the associated
//! family of unit coherent states |x⟩, checks the weighted resolution of the
//! identity ∫ N(x) |x⟩⟨x| μ(dx) = Id, and turns classical observables
//! f : X → ℂ into finite Hermitian matrices
//!
//! ```text
//! [A_f]_{ij} = ∫ μ(dx) N(x) f(x) ⟨i|x⟩⟨x|j⟩ .
//! ```
//!
//! Lower (covariant) and upper (contravariant) Berezin symbols invert the map
//! up to ordering effects, and the weighted Berezin-Lieb inequalities bracket
//! Tr g(A) between integrals of g over the two symbols.
//!
//! Three concrete models ship with the crate:
//!
//! * [`circle`]: the real family {cos θ, sin θ} under dθ/π, quantizing 2x2
//!   symmetric matrices,
//! * [`sphere`]: the spin-1/2 family {√2 cos(θ/2), √2 sin(θ/2) e^{iφ}} under
//!   the normalized area measure of S², quantizing functions on the sphere
//!   into 2x2 Hermitian matrices,
//! * [`fuzzy`]: the (L+1)-dimensional fuzzy sphere built from the half-angle
//!   monomial family Θ^{L/2}_i, together with spin matrices, the triple
//!   product coefficient tensor, and the degree-L truncation property.
//!
//! Everything is checked numerically: quadrature rules are exact on the
//! trigonometric polynomials they claim, and [`verification`] runs the whole
//! invariant suite with named residuals and tolerances.

pub mod circle;
pub mod frames;
pub mod fuzzy;
pub mod harmonics;
pub mod operator;
pub mod quad;
pub mod quantizer;
pub mod sphere;
pub mod verification;

/// Complex scalar used throughout.
pub type Complex64 = nalgebra::Complex<f64>;

/// Dense complex matrix used for operator storage.
pub type CMatrix = nalgebra::DMatrix<Complex64>;

/// Dense complex vector (coherent-state components).
pub type CVector = nalgebra::DVector<Complex64>;

pub use frames::{CoherentFrame, Kernel, OrthoFamily};
pub use operator::{HermitianOperator, Spectrum};
pub use quad::{Domain, Point, QuadratureRule};
pub use quantizer::{ClassicalObservable, SymbolFunction};
