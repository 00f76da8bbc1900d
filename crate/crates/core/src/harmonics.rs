//! Spherical harmonics, orthonormal for the probability measure
//! μ(dx) = sinθ dθ dφ / 4π used throughout this crate:
//!
//! ```text
//! Y_ℓ^m(θ,φ) = √((2ℓ+1)·(ℓ−m)!/(ℓ+m)!) · P_ℓ^m(cosθ) · e^{imφ} ,  m ≥ 0,
//! Y_ℓ^{−m}  = (−1)^m · conj(Y_ℓ^m) ,
//! ```
//!
//! so that ∫ Y_ℓ^m conj(Y_{ℓ'}^{m'}) dμ = δ_{ℓℓ'} δ_{mm'} and Y_0^0 ≡ 1.
//! This rescales the unit-sphere-area convention by √(4π). The associated
//! Legendre functions carry the Condon-Shortley sign (−1)^m.

use crate::quad::Point;
use crate::Complex64;

/// Associated Legendre P_ℓ^m(x) for 0 ≤ m ≤ ℓ, Condon-Shortley phase included.
pub fn associated_legendre(ell: usize, m: usize, x: f64) -> f64 {
    assert!(m <= ell, "order m = {m} exceeds degree ℓ = {ell}");
    // Seed P_m^m = (−1)^m (2m−1)!! (1−x²)^{m/2}, then raise the degree.
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= -fact * somx2;
        fact += 2.0;
    }
    if ell == m {
        return pmm;
    }
    let mut pmmp1 = x * (2.0 * m as f64 + 1.0) * pmm;
    if ell == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=ell {
        let llf = ll as f64;
        let mf = m as f64;
        pll = (x * (2.0 * llf - 1.0) * pmmp1 - (llf + mf - 1.0) * pmm) / (llf - mf);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

/// Legendre polynomial P_ℓ(x) = P_ℓ^0(x).
pub fn legendre(ell: usize, x: f64) -> f64 {
    associated_legendre(ell, 0, x)
}

/// Normalization √((2ℓ+1)·(ℓ−m)!/(ℓ+m)!) for m ≥ 0, as a stable product.
fn norm_factor(ell: usize, m: usize) -> f64 {
    let mut ratio = 1.0f64;
    for k in (ell - m + 1)..=(ell + m) {
        ratio /= k as f64;
    }
    ((2 * ell + 1) as f64 * ratio).sqrt()
}

/// μ-orthonormal spherical harmonic Y_ℓ^m at a sphere point.
pub fn spherical_harmonic(ell: usize, m: i64, p: Point) -> Complex64 {
    let mabs = m.unsigned_abs() as usize;
    assert!(
        mabs <= ell,
        "order m = {m} out of range for degree ℓ = {ell}"
    );
    let plm = associated_legendre(ell, mabs, p.theta.cos());
    let amp = norm_factor(ell, mabs) * plm;
    let phase = Complex64::new(0.0, mabs as f64 * p.phi).exp();
    if m >= 0 {
        phase * amp
    } else {
        // Y_ℓ^{−m} = (−1)^m conj(Y_ℓ^m).
        let sign = if mabs % 2 == 0 { 1.0 } else { -1.0 };
        phase.conj() * (amp * sign)
    }
}
