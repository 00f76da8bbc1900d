//! Named verification checks spanning every model in the crate.
//!
//! Each check computes a single scalar (a residual, a defect, or a singular
//! value) and compares it against a threshold. The full battery is what the
//! command-line `verify` subcommand runs; shipping it inside the library
//! keeps the checks usable from tests as well.
//!
//! `VerifyOptions::tolerance_override` replaces the default threshold of
//! every residual (less-than) check; floor (greater-than) checks such as the
//! basis-rank test keep their own thresholds, since tightening a residual
//! bound and tightening a rank floor pull in opposite directions.

use std::f64::consts::PI;

use thiserror::Error;

use crate::circle::{CircleError, CircleModel};
use crate::frames::FrameError;
use crate::fuzzy::{FuzzyError, FuzzySphere, SpinMatrices, ThetaBasis};
use crate::harmonics::spherical_harmonic;
use crate::operator::{self, HermitianOperator, OperatorError};
use crate::quad::{self, Domain, Point, QuadError};
use crate::quantizer::{self, ClassicalObservable, QuantizeError};
use crate::sphere::{self, SphereSpinHalfModel, SphereError};
use crate::{CMatrix, Complex64};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Quantize(#[from] QuantizeError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Direction of the comparison a check performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// Residual checks: pass when value < threshold.
    LessThan,
    /// Floor checks (rank, nondegeneracy): pass when value > threshold.
    GreaterThan,
}

/// Outcome of one named check.
#[derive(Clone, Debug)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

/// Options controlling a verification run.
#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    /// Replaces the default threshold of every less-than check.
    pub tolerance_override: Option<f64>,
    /// Substring filter on check names; unmatched checks are skipped.
    pub filter: Option<String>,
}

/// SplitMix64 step; deterministic stand-in for an RNG dependency.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Uniform draw in [0, 1) from the same generator.
pub fn uniform(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

struct Checker<'a> {
    opts: &'a VerifyOptions,
    records: Vec<CheckRecord>,
}

impl<'a> Checker<'a> {
    fn new(opts: &'a VerifyOptions) -> Self {
        Checker {
            opts,
            records: Vec::new(),
        }
    }

    fn wants(&self, name: &str) -> bool {
        match &self.opts.filter {
            Some(f) => name.contains(f.as_str()),
            None => true,
        }
    }

    fn wants_any(&self, names: &[&str]) -> bool {
        names.iter().any(|n| self.wants(n))
    }

    fn less(
        &mut self,
        name: &str,
        default_tol: f64,
        body: impl FnOnce() -> Result<f64, VerifyError>,
    ) -> Result<(), VerifyError> {
        if !self.wants(name) {
            return Ok(());
        }
        let threshold = self.opts.tolerance_override.unwrap_or(default_tol);
        let value = body()?;
        self.records.push(CheckRecord {
            name: name.to_owned(),
            value,
            threshold,
            comparison: Comparison::LessThan,
            pass: value.is_finite() && value < threshold,
        });
        Ok(())
    }

    fn greater(
        &mut self,
        name: &str,
        threshold: f64,
        body: impl FnOnce() -> Result<f64, VerifyError>,
    ) -> Result<(), VerifyError> {
        if !self.wants(name) {
            return Ok(());
        }
        let value = body()?;
        self.records.push(CheckRecord {
            name: name.to_owned(),
            value,
            threshold,
            comparison: Comparison::GreaterThan,
            pass: value.is_finite() && value > threshold,
        });
        Ok(())
    }
}

fn seeded_triples(count: usize, seed: u64) -> Vec<(f64, f64, f64)> {
    let mut state = seed;
    (0..count)
        .map(|_| {
            (
                4.0 * uniform(&mut state) - 2.0,
                4.0 * uniform(&mut state) - 2.0,
                4.0 * uniform(&mut state) - 2.0,
            )
        })
        .collect()
}

fn seeded_sphere_points(count: usize, seed: u64) -> Vec<Point> {
    let mut state = seed;
    (0..count)
        .map(|_| {
            Point::sphere(
                PI * uniform(&mut state),
                2.0 * PI * uniform(&mut state),
            )
        })
        .collect()
}

fn pauli_scaled(k: usize, s: f64) -> CMatrix {
    operator::pauli(k).matrix().scale(s)
}

/// Runs every check selected by `opts` and returns the records in execution
/// order.
pub fn run_all(opts: &VerifyOptions) -> Result<Vec<CheckRecord>, VerifyError> {
    let mut c = Checker::new(opts);

    let circle = CircleModel::new()?;
    let sph = SphereSpinHalfModel::new()?;

    // Resolution of the identity on every model.
    c.less("identity.circle", 1e-10, || Ok(circle.identity_residual()?))?;
    c.less("identity.sphere", 1e-10, || Ok(sph.identity_residual()?))?;
    for big_l in 0..=8usize {
        let name = format!("identity.fuzzy.L{big_l}");
        c.less(&name, 1e-10, || {
            Ok(FuzzySphere::new(big_l)?.identity_residual()?)
        })?;
    }

    // Kernel symmetry and bound: K(x,y) = conj(K(y,x)), |K| ≤ 1, K(x,x) = 1.
    c.less("kernel.circle", 1e-12, || {
        let kernel = circle.frame().kernel();
        let mut worst: f64 = 0.0;
        let mut state = 11u64;
        for _ in 0..20 {
            let x = Point::circle(2.0 * PI * uniform(&mut state));
            let y = Point::circle(2.0 * PI * uniform(&mut state));
            let k_xy = kernel.eval(x, y);
            let k_yx = kernel.eval(y, x);
            worst = worst
                .max((k_xy - k_yx.conj()).norm())
                .max((k_xy.norm() - 1.0).max(0.0))
                .max((kernel.eval(x, x) - Complex64::new(1.0, 0.0)).norm());
        }
        Ok(worst)
    })?;
    c.less("kernel.sphere", 1e-12, || {
        let kernel = sph.frame().kernel();
        let mut worst: f64 = 0.0;
        let points = seeded_sphere_points(40, 12);
        for pair in points.chunks(2) {
            let (x, y) = (pair[0], pair[1]);
            let k_xy = kernel.eval(x, y);
            let k_yx = kernel.eval(y, x);
            worst = worst
                .max((k_xy - k_yx.conj()).norm())
                .max((k_xy.norm() - 1.0).max(0.0))
                .max((kernel.eval(x, x) - Complex64::new(1.0, 0.0)).norm());
        }
        Ok(worst)
    })?;

    // Basic quantizer behaviour.
    let one = ClassicalObservable::real("1", |_| 1.0);
    c.less("quantizer.constant.circle", 1e-12, || {
        let a = quantizer::quantize(circle.frame(), circle.rule(), &one)?;
        Ok(a.max_abs_diff(&HermitianOperator::identity(2)))
    })?;
    c.less("quantizer.constant.sphere", 1e-12, || {
        let a = quantizer::quantize(sph.frame(), sph.rule(), &one)?;
        Ok(a.max_abs_diff(&HermitianOperator::identity(2)))
    })?;
    c.less("quantizer.constant.fuzzy", 1e-12, || {
        let fs = FuzzySphere::new(3)?;
        let a = fs.quantize(&one)?;
        Ok(a.max_abs_diff(&HermitianOperator::identity(4)))
    })?;
    c.less("quantizer.linearity.circle", 1e-12, || {
        let mut state = 13u64;
        let (alpha, beta) = (2.0 * uniform(&mut state) - 1.0, 2.0 * uniform(&mut state) - 1.0);
        let f = ClassicalObservable::real("cos2θ", |p| (2.0 * p.theta).cos());
        let g = ClassicalObservable::real("sin2θ", |p| (2.0 * p.theta).sin());
        let combo = ClassicalObservable::real("combo", move |p| {
            alpha * (2.0 * p.theta).cos() + beta * (2.0 * p.theta).sin()
        });
        let a = quantizer::quantize(circle.frame(), circle.rule(), &combo)?;
        let af = quantizer::quantize(circle.frame(), circle.rule(), &f)?;
        let ag = quantizer::quantize(circle.frame(), circle.rule(), &g)?;
        let expect = af.matrix().scale(alpha) + ag.matrix().scale(beta);
        Ok(a.max_abs_diff_matrix(&expect))
    })?;
    c.less("quantizer.hermiticity.sphere", 1e-12, || {
        let f = ClassicalObservable::real("x1 + x3/2", |p| {
            p.theta.sin() * p.phi.cos() + 0.5 * p.theta.cos()
        });
        let raw = quantizer::quantize_matrix(sph.frame(), sph.rule(), &f)?;
        Ok(operator::hermitian_defect(&raw))
    })?;

    // Circle symbols.
    c.less("circle.symbols.lower", 1e-10, || {
        let mut worst: f64 = 0.0;
        for &(a, b, d) in &seeded_triples(5, 21) {
            let op = circle.operator(a, b, d);
            let (closed, _) = circle.symbols(a, b, d);
            let numeric = quantizer::lower_symbol(circle.frame(), &op)?;
            for k in 0..64 {
                let p = Point::circle(2.0 * PI * k as f64 / 64.0);
                worst = worst.max((closed.eval(p) - numeric.eval(p)).norm());
            }
        }
        Ok(worst)
    })?;
    c.less("circle.symbols.upper", 1e-10, || {
        let mut worst: f64 = 0.0;
        for &(a, b, d) in &seeded_triples(5, 22) {
            let back = circle.quantize_upper(a, b, d)?;
            worst = worst.max(back.max_abs_diff(&circle.operator(a, b, d)));
        }
        Ok(worst)
    })?;
    c.less("circle.decompose", 1e-12, || {
        let op = HermitianOperator::symmetric2(3.0, 0.0, 5.0);
        let (c0, c1, c3) = circle.decompose(&op)?;
        Ok((c0 - 4.0).abs().max(c1.abs()).max((c3 + 1.0).abs()))
    })?;

    // Sphere structure.
    c.less("sphere.projector", 1e-10, || {
        Ok(sph.projector_decomposition_residual())
    })?;
    c.less("sphere.sigma.lower", 1e-10, || {
        let mut worst: f64 = 0.0;
        let points = seeded_sphere_points(25, 31);
        for table in sph.sigma_symbols() {
            let op = operator::pauli(table.index);
            let numeric = quantizer::lower_symbol(sph.frame(), &op)?;
            for &p in &points {
                worst = worst.max((table.lower.eval(p) - numeric.eval(p)).norm());
            }
        }
        Ok(worst)
    })?;
    c.less("sphere.sigma.upper", 1e-10, || {
        let mut worst: f64 = 0.0;
        for table in sph.sigma_symbols() {
            let upper = table.upper;
            let obs = ClassicalObservable::complex("σ̂", move |p| upper.eval(p));
            let back = quantizer::quantize_matrix(sph.frame(), sph.rule(), &obs)?;
            worst = worst.max(operator::max_abs(
                &(back - operator::pauli(table.index).into_matrix()),
            ));
        }
        Ok(worst)
    })?;
    c.less("sphere.coordinates", 1e-10, || {
        let coords = sph.coordinate_operators()?;
        let mut worst: f64 = 0.0;
        for (i, a) in coords.iter().enumerate() {
            worst = worst.max(a.max_abs_diff_matrix(&pauli_scaled(i + 1, 1.0 / 3.0)));
        }
        Ok(worst)
    })?;
    c.less("sphere.coordinate-commutators", 1e-12, || {
        let coords = sph.coordinate_operators()?;
        let mut worst: f64 = 0.0;
        for (i, j, k) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
            let comm = operator::commutator(&coords[i], &coords[j])?;
            let expect = operator::pauli(k + 1)
                .matrix()
                .scale(2.0 / 9.0)
                * Complex64::new(0.0, 1.0);
            worst = worst.max(operator::max_abs(&(comm - expect)));
        }
        Ok(worst)
    })?;
    c.less("sphere.phase", 1e-10, || {
        let check = sph.phase_alternative()?;
        Ok(check
            .projector_residual
            .max(check.operator_residual)
            .max(check.identity_residual))
    })?;

    // Angle operators are the one expensive computation; build them once and
    // only when some check in the group survives the filter.
    let angle_group = [
        "sphere.golden.theta",
        "sphere.golden.phi",
        "sphere.eigenvalues.theta",
        "sphere.commutator.structure",
        "sphere.commutator.constant",
        "sphere.commutator.match",
        "sphere.commutator.symbol",
    ];
    if c.wants_any(&angle_group) {
        let (a_theta, a_phi) = sph.angle_operators()?;
        c.less("sphere.golden.theta", 1e-8, || {
            let expect = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                Complex64::new(3.0 * PI / 8.0, 0.0),
                Complex64::new(5.0 * PI / 8.0, 0.0),
            ]));
            Ok(a_theta.max_abs_diff_matrix(&expect))
        })?;
        c.less("sphere.golden.phi", 1e-8, || {
            let expect = nalgebra::dmatrix![
                Complex64::new(PI, 0.0), Complex64::new(0.0, PI / 4.0);
                Complex64::new(0.0, -PI / 4.0), Complex64::new(PI, 0.0)
            ];
            Ok(a_phi.max_abs_diff_matrix(&expect))
        })?;
        c.less("sphere.eigenvalues.theta", 1e-8, || {
            let spec = operator::eig(&a_theta)?;
            Ok((spec.eigenvalues[0] - 3.0 * PI / 8.0)
                .abs()
                .max((spec.eigenvalues[1] - 5.0 * PI / 8.0).abs()))
        })?;
        let report = sph.commutator_report_from(&a_theta, &a_phi)?;
        c.less("sphere.commutator.structure", 1e-10, || {
            Ok(report.structure_residual)
        })?;
        c.less("sphere.commutator.constant", 1e-7, || {
            Ok((report.constant - PI * PI / 16.0).abs())
        })?;
        c.less("sphere.commutator.match", 1e-10, || {
            let expect = pauli_scaled(1, report.constant) * Complex64::new(0.0, 1.0);
            Ok(operator::max_abs(&(&report.matrix - expect)))
        })?;
        c.less("sphere.commutator.symbol", 1e-10, || {
            let mut worst: f64 = 0.0;
            for &p in &seeded_sphere_points(20, 41) {
                let expect = Complex64::new(0.0, report.constant * p.theta.sin() * p.phi.cos());
                worst = worst.max((report.commutator_symbol.eval(p) - expect).norm());
                let sq = report.square_symbol.eval(p);
                let expect_sq = Complex64::new(-report.constant * report.constant, 0.0);
                worst = worst.max((sq - expect_sq).norm());
            }
            Ok(worst)
        })?;
    }

    // Component functions and spin matrices for general L.
    c.less("theta.partition", 1e-12, || {
        let basis = ThetaBasis::new(6);
        let mut worst: f64 = 0.0;
        for p in seeded_sphere_points(1000, 51) {
            worst = worst.max(basis.partition_defect(p));
        }
        Ok(worst)
    })?;
    c.less("theta.norms", 1e-12, || {
        let basis = ThetaBasis::new(4);
        let rule = quad::build_rule(Domain::Sphere, 12)?;
        let mut worst: f64 = 0.0;
        for k in 0..basis.dim() {
            let n = quad::integrate(&rule, |p| {
                let v = basis.eval(k, p);
                v * v.conj()
            })?;
            worst = worst.max((n.re - 0.2).abs()).max(n.im.abs());
        }
        Ok(worst)
    })?;
    c.less("spin.commutation", 1e-12, || {
        let mut worst: f64 = 0.0;
        for big_l in 0..=12usize {
            worst = worst.max(SpinMatrices::new(big_l).commutation_residual());
        }
        Ok(worst)
    })?;
    c.less("spin.casimir", 1e-12, || {
        let mut worst: f64 = 0.0;
        for big_l in 0..=12usize {
            worst = worst.max(SpinMatrices::new(big_l).casimir_residual());
        }
        Ok(worst)
    })?;

    // Fuzzy-sphere structure.
    c.less("fuzzy.bridge", 1e-10, || {
        let fs = FuzzySphere::new(1)?;
        let fuzzy = fs.coordinate_operators()?;
        let sphere_ops = sph.coordinate_operators()?;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            let conj = fuzzy[i].conjugated();
            worst = worst
                .max(conj.max_abs_diff(&sphere_ops[i]))
                .max(conj.max_abs_diff_matrix(&pauli_scaled(i + 1, 1.0 / 3.0)));
        }
        Ok(worst)
    })?;
    c.less("fuzzy.madore", 1e-10, || {
        let mut worst: f64 = 0.0;
        for big_l in 1..=6usize {
            let report = FuzzySphere::new(big_l)?.madore_compare()?;
            let expect = 2.0 / (big_l + 2) as f64;
            for i in 0..3 {
                worst = worst
                    .max((report.lambdas[i] - expect).abs())
                    .max(report.residuals[i]);
            }
        }
        Ok(worst)
    })?;
    c.less("fuzzy.radius", 1e-10, || {
        let mut worst: f64 = 0.0;
        for big_l in 1..=6usize {
            let (rho, residual) = FuzzySphere::new(big_l)?.radius_relation()?;
            let expect = big_l as f64 / (big_l + 2) as f64;
            worst = worst.max((rho - expect).abs()).max(residual);
        }
        Ok(worst)
    })?;
    c.less("fuzzy.tensor.selection", 1e-12, || {
        let tensor = FuzzySphere::new(3)?.coefficient_tensor()?;
        Ok(tensor.selection_defect())
    })?;
    c.less("fuzzy.tensor.assembly", 1e-10, || {
        let fs = FuzzySphere::new(2)?;
        let tensor = fs.coefficient_tensor()?;
        let z = Complex64::new(-0.6, 0.35);
        let coeffs = [
            (0usize, 0i64, Complex64::new(1.1, 0.0)),
            (1, 0, Complex64::new(-0.4, 0.0)),
            (2, 1, z),
            (2, -1, -z.conj()),
        ];
        let assembled = tensor.assemble(&coeffs)?;
        let f = ClassicalObservable::complex("harmonic sum", move |p| {
            Complex64::new(1.1, 0.0) + spherical_harmonic(1, 0, p) * (-0.4)
                + spherical_harmonic(2, 1, p) * z
                + spherical_harmonic(2, -1, p) * (-z.conj())
        });
        let direct = fs.quantize_complex(&f)?;
        Ok(operator::max_abs(&(assembled - direct)))
    })?;
    for big_l in 0..=6usize {
        let name = format!("fuzzy.truncation.L{big_l}");
        c.less(&name, 1e-10, || {
            let fs = FuzzySphere::new(big_l)?;
            let mut worst: f64 = 0.0;
            for ell in [big_l + 1, big_l + 2] {
                for m in -(ell as i64)..=(ell as i64) {
                    worst = worst.max(fs.truncation_norm(ell, m)?);
                }
            }
            Ok(worst)
        })?;
    }
    for big_l in 0..=6usize {
        let name = format!("fuzzy.yhat.rank.L{big_l}");
        c.greater(&name, 1e-8, || {
            let tensor = FuzzySphere::new(big_l)?.coefficient_tensor()?;
            Ok(tensor.smallest_singular_value()?)
        })?;
    }

    // Berezin-Lieb ordering across a small convex family.
    let convex: [(&str, fn(f64) -> f64); 3] = [
        ("x²", |x| x * x),
        ("x⁴", |x| x.powi(4)),
        ("exp", f64::exp),
    ];
    c.less("berezin.circle", 1e-9, || {
        let op = circle.operator(1.3, 0.4, -0.7);
        let basis = [
            ClassicalObservable::real("1", |_| 1.0),
            ClassicalObservable::real("cos2θ", |p| (2.0 * p.theta).cos()),
            ClassicalObservable::real("sin2θ", |p| (2.0 * p.theta).sin()),
        ];
        let mut worst: f64 = 0.0;
        for (_, g) in convex {
            worst = worst.max(ordering_defect_of(
                quantizer::berezin_lieb_check(circle.frame(), circle.rule(), &op, &basis, g),
            )?);
        }
        Ok(worst)
    })?;
    c.less("berezin.sphere", 1e-9, || {
        let x3 = ClassicalObservable::real("x3", |p| p.theta.cos());
        let op = quantizer::quantize(sph.frame(), sph.rule(), &x3)?;
        let basis = sphere::coordinate_basis();
        let mut worst: f64 = 0.0;
        for (_, g) in convex {
            worst = worst.max(ordering_defect_of(
                quantizer::berezin_lieb_check(sph.frame(), sph.rule(), &op, &basis, g),
            )?);
        }
        Ok(worst)
    })?;

    Ok(c.records)
}

/// Maps an ordering violation into its defect instead of aborting the run;
/// other failures still propagate.
fn ordering_defect_of(
    outcome: Result<quantizer::BerezinLieb, QuantizeError>,
) -> Result<f64, VerifyError> {
    match outcome {
        Ok(bl) => Ok(bl.ordering_defect()),
        Err(QuantizeError::OrderingViolated {
            lower,
            trace,
            upper,
        }) => Ok((lower - trace).max(trace - upper)),
        Err(e) => Err(e.into()),
    }
}
