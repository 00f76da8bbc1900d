//! Quadrature on the circle and the 2-sphere.
//!
//! The circle carries dθ/π on [0, 2π), total mass 2. The sphere carries the
//! normalized area measure sin θ dθ dφ / 4π on [0, π] × [0, 2π), total mass 1.
//!
//! Fixed rules are built per degree: a uniform midpoint grid in each angular
//! coordinate, and Gauss-Legendre in u = cos θ for the polar direction. Every
//! integrand produced by the shipped models is a polynomial in cos θ, sin θ
//! and e^{±iφ}, which such a rule integrates exactly once its degree is high
//! enough. The coordinate functions θ and φ themselves are different: θ is
//! not polynomial in u (square-root endpoint behaviour) and φ jumps at the
//! 0/2π seam, so for those the adaptive path refines the two axes
//! independently until the estimate stops moving. The φ grids are offset by
//! half a step, which keeps the seam of φ-dependent integrands between nodes.
//!
//! Node ordering and summation order are fixed, so equal inputs give
//! bit-equal results.

use std::collections::HashMap;
use std::f64::consts::PI;

use thiserror::Error;

use crate::Complex64;

/// Measured set the quadrature runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// [0, 2π) with dθ/π.
    Circle,
    /// [0, π] × [0, 2π) with sin θ dθ dφ / 4π.
    Sphere,
}

impl Domain {
    /// Total mass of the measure (2 on the circle, 1 on the sphere).
    pub fn measure_mass(self) -> f64 {
        match self {
            Domain::Circle => 2.0,
            Domain::Sphere => 1.0,
        }
    }
}

/// A point of the measured set. Circle points use `theta` only (`phi` is 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub theta: f64,
    pub phi: f64,
}

impl Point {
    pub fn circle(theta: f64) -> Self {
        Point { theta, phi: 0.0 }
    }

    pub fn sphere(theta: f64, phi: f64) -> Self {
        Point { theta, phi }
    }
}

/// Default tolerance for the adaptive path.
pub const DEFAULT_ADAPTIVE_TOL: f64 = 1e-10;

/// Hard cap on Gauss-Legendre node counts. Past this the O(n²) Newton build
/// dominates and f64 has nothing left to gain.
const MAX_GAUSS_NODES: usize = 16_384;

/// Hard cap on uniform-grid node counts (circle grid and sphere φ grid).
const MAX_UNIFORM_NODES: usize = 1 << 21;

/// Refinement limit per axis of the adaptive path.
const MAX_DOUBLINGS: usize = 20;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("degree {degree} needs more than {max} nodes on the {axis} axis")]
    Capacity {
        degree: usize,
        max: usize,
        axis: &'static str,
    },
    #[error("integrand is not finite at θ = {theta:.17e}, φ = {phi:.17e}")]
    NonFinite { theta: f64, phi: f64 },
    #[error(
        "adaptive integration stalled at change {last_change:.3e} (target {tol:.3e}); \
         last two estimates had max magnitudes {last_norm:.6e} and {prev_norm:.6e}"
    )]
    NonConvergence {
        last_change: f64,
        tol: f64,
        last_norm: f64,
        prev_norm: f64,
    },
}

/// Nodes and positive weights summing to the measure mass, exact on
/// trigonometric polynomials up to `exact_degree`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub domain: Domain,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Deviation of the weight sum from the measure mass.
    pub fn mass_residual(&self) -> f64 {
        let mut sum = Kahan::default();
        for &w in &self.weights {
            sum.add(w);
        }
        (sum.value() - self.domain.measure_mass()).abs()
    }
}

/// Builds the fixed rule of the requested degree.
///
/// Circle: degree+1 midpoints, weight 2/(degree+1) each. Sphere: the tensor
/// product of ⌈(degree+2)/2⌉ Gauss-Legendre nodes in u = cos θ and degree+1
/// midpoints in φ.
pub fn build_rule(domain: Domain, degree: usize) -> Result<QuadratureRule, QuadError> {
    match domain {
        Domain::Circle => {
            let m = degree + 1;
            if m > MAX_UNIFORM_NODES {
                return Err(QuadError::Capacity {
                    degree,
                    max: MAX_UNIFORM_NODES,
                    axis: "θ",
                });
            }
            Ok(circle_grid(m))
        }
        Domain::Sphere => {
            let n_u = (degree + 2).div_ceil(2);
            let n_phi = degree + 1;
            if n_u > MAX_GAUSS_NODES {
                return Err(QuadError::Capacity {
                    degree,
                    max: MAX_GAUSS_NODES,
                    axis: "u",
                });
            }
            if n_phi > MAX_UNIFORM_NODES {
                return Err(QuadError::Capacity {
                    degree,
                    max: MAX_UNIFORM_NODES,
                    axis: "φ",
                });
            }
            let (u, gw) = gauss_legendre(n_u);
            Ok(sphere_grid(&u, &gw, n_phi))
        }
    }
}

/// Σ w_i f(x_i). Fails if f is not finite at some node.
pub fn integrate(
    rule: &QuadratureRule,
    mut f: impl FnMut(Point) -> Complex64,
) -> Result<Complex64, QuadError> {
    let mut re = Kahan::default();
    let mut im = Kahan::default();
    for (node, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(*node);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(QuadError::NonFinite {
                theta: node.theta,
                phi: node.phi,
            });
        }
        re.add(w * v.re);
        im.add(w * v.im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// Adaptive integration of a scalar integrand to tolerance `tol`.
pub fn integrate_adaptive(
    domain: Domain,
    mut f: impl FnMut(Point) -> Complex64,
    tol: f64,
) -> Result<Complex64, QuadError> {
    let out = integrate_adaptive_many(domain, 1, |p, buf| buf[0] = f(p), tol)?;
    Ok(out[0])
}

/// Adaptive integration of `dim` integrands evaluated in one pass.
///
/// `fill` writes the integrand values at a point into the provided buffer.
/// Each axis is refined by doubling; on the sphere the axis whose refinement
/// moves the estimate most is doubled first, and once both one-axis
/// refinements move it by less than `tol` combined, the two trial estimates
/// are merged (two-direction Richardson step) and returned. Convergence is
/// judged on the maximum change over all components.
pub fn integrate_adaptive_many(
    domain: Domain,
    dim: usize,
    mut fill: impl FnMut(Point, &mut [Complex64]),
    tol: f64,
) -> Result<Vec<Complex64>, QuadError> {
    match domain {
        Domain::Circle => {
            let mut m = 16usize;
            let mut cur = sum_on_grid(&circle_grid(m), dim, &mut fill)?;
            let mut prev = cur.clone();
            for _ in 0..MAX_DOUBLINGS {
                if m * 2 > MAX_UNIFORM_NODES {
                    break;
                }
                m *= 2;
                let next = sum_on_grid(&circle_grid(m), dim, &mut fill)?;
                let change = max_abs_diff(&next, &cur);
                if change < tol {
                    return Ok(next);
                }
                prev = std::mem::replace(&mut cur, next);
            }
            Err(stall(&cur, &prev, tol))
        }
        Domain::Sphere => {
            let mut gauss_cache: HashMap<usize, (Vec<f64>, Vec<f64>)> = HashMap::new();
            let mut eval = |n_u: usize,
                            n_phi: usize,
                            fill: &mut dyn FnMut(Point, &mut [Complex64])|
             -> Result<Vec<Complex64>, QuadError> {
                let (u, gw) = gauss_cache
                    .entry(n_u)
                    .or_insert_with(|| gauss_legendre(n_u))
                    .clone();
                sum_on_grid(&sphere_grid(&u, &gw, n_phi), dim, fill)
            };

            let (mut n_u, mut n_phi) = (8usize, 16usize);
            let (mut splits_u, mut splits_phi) = (0usize, 0usize);
            let mut cur = eval(n_u, n_phi, &mut fill)?;
            let mut prev = cur.clone();
            loop {
                let can_u = splits_u < MAX_DOUBLINGS && 2 * n_u <= MAX_GAUSS_NODES;
                let can_phi = splits_phi < MAX_DOUBLINGS && 2 * n_phi <= MAX_UNIFORM_NODES;
                match (can_u, can_phi) {
                    (true, true) => {
                        let trial_u = eval(2 * n_u, n_phi, &mut fill)?;
                        let trial_phi = eval(n_u, 2 * n_phi, &mut fill)?;
                        let du = max_abs_diff(&trial_u, &cur);
                        let dphi = max_abs_diff(&trial_phi, &cur);
                        if du + dphi < tol {
                            // Both axes are converged; merge the two one-axis
                            // refinements, which cancels their leading errors.
                            let merged: Vec<Complex64> = (0..dim)
                                .map(|k| trial_u[k] + trial_phi[k] - cur[k])
                                .collect();
                            return Ok(merged);
                        }
                        if du >= dphi {
                            n_u *= 2;
                            splits_u += 1;
                            prev = std::mem::replace(&mut cur, trial_u);
                        } else {
                            n_phi *= 2;
                            splits_phi += 1;
                            prev = std::mem::replace(&mut cur, trial_phi);
                        }
                    }
                    (true, false) => {
                        let trial = eval(2 * n_u, n_phi, &mut fill)?;
                        let change = max_abs_diff(&trial, &cur);
                        if change < tol {
                            return Ok(trial);
                        }
                        n_u *= 2;
                        splits_u += 1;
                        prev = std::mem::replace(&mut cur, trial);
                    }
                    (false, true) => {
                        let trial = eval(n_u, 2 * n_phi, &mut fill)?;
                        let change = max_abs_diff(&trial, &cur);
                        if change < tol {
                            return Ok(trial);
                        }
                        n_phi *= 2;
                        splits_phi += 1;
                        prev = std::mem::replace(&mut cur, trial);
                    }
                    (false, false) => {
                        return Err(stall(&cur, &prev, tol));
                    }
                }
            }
        }
    }
}

fn stall(last: &[Complex64], prev: &[Complex64], tol: f64) -> QuadError {
    QuadError::NonConvergence {
        last_change: max_abs_diff(last, prev),
        tol,
        last_norm: last.iter().map(|z| z.norm()).fold(0.0, f64::max),
        prev_norm: prev.iter().map(|z| z.norm()).fold(0.0, f64::max),
    }
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn sum_on_grid(
    rule: &QuadratureRule,
    dim: usize,
    fill: &mut dyn FnMut(Point, &mut [Complex64]),
) -> Result<Vec<Complex64>, QuadError> {
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    let mut acc_re = vec![Kahan::default(); dim];
    let mut acc_im = vec![Kahan::default(); dim];
    for (node, &w) in rule.nodes.iter().zip(&rule.weights) {
        fill(*node, &mut buf);
        for k in 0..dim {
            let v = buf[k];
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(QuadError::NonFinite {
                    theta: node.theta,
                    phi: node.phi,
                });
            }
            acc_re[k].add(w * v.re);
            acc_im[k].add(w * v.im);
        }
    }
    Ok((0..dim)
        .map(|k| Complex64::new(acc_re[k].value(), acc_im[k].value()))
        .collect())
}

fn circle_grid(m: usize) -> QuadratureRule {
    let h = 2.0 * PI / m as f64;
    let nodes = (0..m)
        .map(|j| Point::circle((j as f64 + 0.5) * h))
        .collect();
    QuadratureRule {
        domain: Domain::Circle,
        nodes,
        weights: vec![2.0 / m as f64; m],
        exact_degree: m - 1,
    }
}

fn sphere_grid(u: &[f64], gw: &[f64], n_phi: usize) -> QuadratureRule {
    let h = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(u.len() * n_phi);
    let mut weights = Vec::with_capacity(u.len() * n_phi);
    for (&uk, &wk) in u.iter().zip(gw) {
        let theta = uk.clamp(-1.0, 1.0).acos();
        let w = wk / (2.0 * n_phi as f64);
        for j in 0..n_phi {
            nodes.push(Point::sphere(theta, (j as f64 + 0.5) * h));
            weights.push(w);
        }
    }
    QuadratureRule {
        domain: Domain::Sphere,
        nodes,
        weights,
        exact_degree: (2 * u.len() - 1).min(n_phi - 1),
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-15 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// P_n(z) and P_n'(z) from the three-term recurrence.
fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    if n == 0 {
        return (p0, 0.0);
    }
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Compensated accumulator; keeps long node sums at O(ε) error.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub(crate) fn add(&mut self, term: f64) {
        let y = term - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum
    }
}
