//! Quantization of the circle into a two-dimensional real Hilbert space.
//!
//! The measure is dθ/π on [0, 2π) (total mass 2) and the orthonormal family
//! is {cosθ, sinθ}, so the coherent states are |θ⟩ = (cosθ, sinθ) with
//! weight N(θ) ≡ 1: the weighted and unweighted resolutions of the identity
//! coincide here. Quantization reaches exactly the real symmetric 2×2
//! matrices
//!
//! ```text
//! A = ((a, b), (b, d)) = (a+d)/2 σ₀ + b σ₁ + (a−d)/2 σ₃ ,
//! ```
//!
//! with closed-form symbols
//!
//! ```text
//! Ǎ(θ) = (a+d)/2 + (a−d)/2 · cos2θ + b · sin2θ ,
//! Â(θ) = (a+d)/2 + (a−d)  · cos2θ + 2b · sin2θ .
//! ```
//!
//! The upper symbol doubles both deviation coefficients because the pure
//! waves quantize with a factor 1/2 (∫ cos²2θ dθ/π = 1/2, and likewise for
//! sin2θ); quantizing Â returns A exactly, which is the defining property.
//! The imaginary parts of everything are pinned to zero by construction and
//! asserted below 1e-14, so no separate real-matrix stack is needed.

use std::sync::Arc;

use thiserror::Error;

use crate::frames::{CoherentFrame, FamilyFn, FrameError, OrthoFamily};
use crate::operator::{self, HermitianOperator};
use crate::quad::{self, Domain, Point, QuadratureRule};
use crate::quantizer::{ClassicalObservable, QuantizeError, SymbolFunction, SymbolKind};
use crate::Complex64;

/// Largest imaginary contamination tolerated in the real model.
pub const REAL_PIN_TOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum CircleError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Quantize(#[from] QuantizeError),
    #[error("operator is not real symmetric: off-plane component {magnitude:.3e}")]
    NotRealSymmetric { magnitude: f64 },
    #[error("circle operators are 2-dimensional, got {dim}")]
    Dimension { dim: usize },
}

/// The orthonormal family {cosθ, sinθ} under dθ/π.
pub fn circle_family() -> Result<OrthoFamily, FrameError> {
    OrthoFamily::new(
        Domain::Circle,
        1,
        vec![
            (
                "cos".to_string(),
                Arc::new(|p: Point| Complex64::new(p.theta.cos(), 0.0)) as FamilyFn,
            ),
            (
                "sin".to_string(),
                Arc::new(|p: Point| Complex64::new(p.theta.sin(), 0.0)) as FamilyFn,
            ),
        ],
    )
}

/// Circle model: frame plus a quadrature rule wide enough for products of
/// the family with degree-2 observables.
#[derive(Clone, Debug)]
pub struct CircleModel {
    frame: CoherentFrame,
    rule: QuadratureRule,
}

impl CircleModel {
    pub fn new() -> Result<Self, CircleError> {
        let frame = CoherentFrame::from_family(circle_family()?)?;
        let rule = quad::build_rule(Domain::Circle, 8).map_err(FrameError::Quad)?;
        Ok(CircleModel { frame, rule })
    }

    pub fn frame(&self) -> &CoherentFrame {
        &self.frame
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// The real symmetric matrix ((a, b), (b, d)).
    pub fn operator(&self, a: f64, b: f64, d: f64) -> HermitianOperator {
        HermitianOperator::symmetric2(a, b, d)
    }

    /// Closed-form lower and upper symbols of ((a, b), (b, d)).
    pub fn symbols(&self, a: f64, b: f64, d: f64) -> (SymbolFunction, SymbolFunction) {
        let mean = (a + d) / 2.0;
        let dev = (a - d) / 2.0;
        let lower = SymbolFunction::from_closure(SymbolKind::Lower, move |p: Point| {
            Complex64::new(
                mean + dev * (2.0 * p.theta).cos() + b * (2.0 * p.theta).sin(),
                0.0,
            )
        });
        let upper = SymbolFunction::from_closure(
            SymbolKind::Upper { non_unique: false },
            move |p: Point| {
                Complex64::new(
                    mean + 2.0 * dev * (2.0 * p.theta).cos() + 2.0 * b * (2.0 * p.theta).sin(),
                    0.0,
                )
            },
        );
        (lower, upper)
    }

    /// Coefficients (c₀, c₁, c₃) with A = c₀σ₀ + c₁σ₁ + c₃σ₃.
    ///
    /// Fails when A has a σ₂ (imaginary off-diagonal) component: such
    /// operators are Hermitian but outside the real quantization range.
    pub fn decompose(&self, a: &HermitianOperator) -> Result<(f64, f64, f64), CircleError> {
        if a.dim() != 2 {
            return Err(CircleError::Dimension { dim: a.dim() });
        }
        let comps = operator::pauli_components(a.matrix());
        let off_plane = comps[2]
            .norm()
            .max(comps.iter().map(|c| c.im.abs()).fold(0.0, f64::max));
        if off_plane > REAL_PIN_TOL {
            return Err(CircleError::NotRealSymmetric {
                magnitude: off_plane,
            });
        }
        Ok((comps[0].re, comps[1].re, comps[3].re))
    }

    /// Quantizes the closed-form upper symbol; returns A again by
    /// construction, which the tests pin down.
    pub fn quantize_upper(&self, a: f64, b: f64, d: f64) -> Result<HermitianOperator, CircleError> {
        let (_, upper) = self.symbols(a, b, d);
        let f = ClassicalObservable::real("upper symbol", move |p| upper.eval(p).re);
        Ok(crate::quantizer::quantize(&self.frame, &self.rule, &f)?)
    }

    /// max over rule nodes of |N(θ) − 1|; the circle weight is constant.
    pub fn weight_flatness(&self) -> f64 {
        self.rule
            .nodes
            .iter()
            .map(|&p| (self.frame.weight(p) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn identity_residual(&self) -> Result<f64, CircleError> {
        Ok(self
            .frame
            .identity_residual(&self.rule)
            .map_err(FrameError::Quad)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantizer::{self, ClassicalObservable};
    use std::f64::consts::PI;

    fn sample_angles(n: usize) -> Vec<f64> {
        (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
    }

    #[test]
    fn pure_waves_quantize_with_a_half_factor() {
        let model = CircleModel::new().unwrap();
        let cos2 = ClassicalObservable::real("cos2θ", |p| (2.0 * p.theta).cos());
        let sin2 = ClassicalObservable::real("sin2θ", |p| (2.0 * p.theta).sin());
        let a_cos = quantizer::quantize(model.frame(), model.rule(), &cos2).unwrap();
        let a_sin = quantizer::quantize(model.frame(), model.rule(), &sin2).unwrap();
        assert!(a_cos.max_abs_diff(&operator::pauli(3).scale(0.5)) < 1e-14);
        assert!(a_sin.max_abs_diff(&operator::pauli(1).scale(0.5)) < 1e-14);
    }

    #[test]
    fn closed_lower_symbol_matches_the_quantizer() {
        let model = CircleModel::new().unwrap();
        for &(a, b, d) in &[(1.0, 0.0, 1.0), (1.0, 0.0, -1.0), (0.3, -1.1, 2.7)] {
            let (lower, _) = model.symbols(a, b, d);
            let op = model.operator(a, b, d);
            let derived = quantizer::lower_symbol(model.frame(), &op).unwrap();
            for theta in sample_angles(64) {
                let p = Point::circle(theta);
                assert!((lower.eval(p) - derived.eval(p)).norm() < 1e-10);
                assert!(lower.eval(p).im.abs() < REAL_PIN_TOL);
            }
        }
    }

    #[test]
    fn closed_upper_symbol_quantizes_back_to_the_matrix() {
        let model = CircleModel::new().unwrap();
        for &(a, b, d) in &[(1.0, 0.0, 1.0), (2.0, -0.7, -0.4), (0.0, 1.0, 0.0)] {
            let back = model.quantize_upper(a, b, d).unwrap();
            assert!(back.max_abs_diff(&model.operator(a, b, d)) < 1e-12);
        }
    }

    #[test]
    fn least_squares_upper_symbol_agrees_with_the_closed_form() {
        let model = CircleModel::new().unwrap();
        let basis = vec![
            ClassicalObservable::real("1", |_| 1.0),
            ClassicalObservable::real("cos2θ", |p| (2.0 * p.theta).cos()),
            ClassicalObservable::real("sin2θ", |p| (2.0 * p.theta).sin()),
        ];
        let (a, b, d) = (0.9, 1.4, -0.2);
        let op = model.operator(a, b, d);
        let fitted = quantizer::upper_symbol(model.frame(), model.rule(), &op, &basis).unwrap();
        let (_, closed) = model.symbols(a, b, d);
        for theta in sample_angles(64) {
            let p = Point::circle(theta);
            assert!((fitted.eval(p) - closed.eval(p)).norm() < 1e-10);
        }
    }

    #[test]
    fn identity_matrix_has_constant_symbols() {
        let model = CircleModel::new().unwrap();
        let (lower, upper) = model.symbols(1.0, 0.0, 1.0);
        for theta in sample_angles(16) {
            let p = Point::circle(theta);
            assert!((lower.eval(p).re - 1.0).abs() < 1e-15);
            assert!((upper.eval(p).re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn printed_symbol_values_at_reference_angles() {
        let model = CircleModel::new().unwrap();
        let (lower, _) = model.symbols(1.0, 0.0, -1.0);
        assert!((lower.eval(Point::circle(0.0)).re - 1.0).abs() < 1e-15);
        let (lower, _) = model.symbols(0.0, 1.0, 0.0);
        assert!((lower.eval(Point::circle(PI / 4.0)).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decomposition_of_reference_matrices() {
        let model = CircleModel::new().unwrap();
        let (c0, c1, c3) = model
            .decompose(&HermitianOperator::symmetric2(3.0, 0.0, 5.0))
            .unwrap();
        assert!((c0 - 4.0).abs() < 1e-15 && c1.abs() < 1e-15 && (c3 + 1.0).abs() < 1e-15);

        let (c0, c1, c3) = model.decompose(&operator::pauli(1)).unwrap();
        assert!(c0.abs() < 1e-15 && (c1 - 1.0).abs() < 1e-15 && c3.abs() < 1e-15);

        let (c0, c1, c3) = model
            .decompose(&HermitianOperator::symmetric2(0.0, 0.0, 0.0))
            .unwrap();
        assert!(c0 == 0.0 && c1 == 0.0 && c3 == 0.0);
    }

    #[test]
    fn decomposition_reconstructs_the_matrix() {
        let model = CircleModel::new().unwrap();
        let op = model.operator(0.8, -1.9, 0.1);
        let (c0, c1, c3) = model.decompose(&op).unwrap();
        let rebuilt = operator::pauli(0)
            .scale(c0)
            .add(&operator::pauli(1).scale(c1))
            .unwrap()
            .add(&operator::pauli(3).scale(c3))
            .unwrap();
        assert!(rebuilt.max_abs_diff(&op) < 1e-15);
    }

    #[test]
    fn sigma2_component_is_rejected() {
        let model = CircleModel::new().unwrap();
        match model.decompose(&operator::pauli(2)) {
            Err(CircleError::NotRealSymmetric { magnitude }) => {
                assert!((magnitude - 1.0).abs() < 1e-14)
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        assert!(matches!(
            model.decompose(&HermitianOperator::identity(3)),
            Err(CircleError::Dimension { dim: 3 })
        ));
    }

    #[test]
    fn weight_is_identically_one() {
        let model = CircleModel::new().unwrap();
        assert!(model.weight_flatness() < REAL_PIN_TOL);
        assert!(model.identity_residual().unwrap() < 1e-12);
    }
}
