use std::f64::consts::PI;

use num_complex::Complex64;

use super::hypergeometric::cardy_f;
use super::quadrature::integrate_complex;
use super::gamma::gamma_pos;
use crate::error::{Error, Result};

/// Cross-ratio `x ∈ (0, 1)` of the four corners of an `L × l` rectangle (width L,
/// height l) under the map to the upper half-plane that sends the corners to
/// `0, 1 − x, 1, ∞`, so that the left–right crossing probability of the rectangle is
/// `cardy_f(x)`.
///
/// Computed as the elliptic modular function λ(iL/l) = (θ₂/θ₃)⁴ with nome
/// q = e^{−πL/l} (for L ≥ l, and 1 − x(l, L) otherwise). Values within 1e-15 of 0
/// or 1 are clamped with a warning.
pub fn rectangle_cross_ratio(width: f64, height: f64) -> Result<f64> {
    for (what, v) in [("rectangle width", width), ("rectangle height", height)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain { what, value: v });
        }
    }
    let x = if width >= height {
        modular_lambda(width / height)
    } else {
        1.0 - modular_lambda(height / width)
    };
    if x < 1e-15 {
        log::warn!("rectangle {width}x{height}: cross-ratio underflows, clamped to 0");
        return Ok(0.0);
    }
    if x > 1.0 - 1e-15 {
        log::warn!("rectangle {width}x{height}: cross-ratio clamped to 1");
        return Ok(1.0);
    }
    Ok(x)
}

/// λ(iτ) for τ ≥ 1, via logarithms of the theta series so the nome may underflow.
fn modular_lambda(tau: f64) -> f64 {
    let ln_q = -PI * tau;
    // θ₂ = 2 q^{1/4} Σ_{n≥0} q^{n(n+1)},  θ₃ = 1 + 2 Σ_{n≥1} q^{n²}
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    for n in 0..30u32 {
        let n = n as f64;
        s2 += (ln_q * n * (n + 1.0)).exp();
        if n > 0.0 {
            s3 += (ln_q * n * n).exp();
        }
    }
    let ln_theta2 = 2f64.ln() + 0.25 * ln_q + s2.ln();
    let ln_theta3 = (1.0 + 2.0 * s3).ln();
    (4.0 * (ln_theta2 - ln_theta3)).exp()
}

/// Left–right crossing probability of an `L × l` rectangle predicted by Cardy's formula.
pub fn rectangle_crossing_prediction(width: f64, height: f64) -> Result<f64> {
    cardy_f(rectangle_cross_ratio(width, height)?)
}

/// Equilateral triangle vertices: `A = 0`, `B = e^{2πi/3}`, `C = e^{πi/3}`.
pub const TRIANGLE_A: Complex64 = Complex64::new(0.0, 0.0);
pub const TRIANGLE_B: Complex64 = Complex64::new(-0.5, 0.866_025_403_784_438_6);
pub const TRIANGLE_C: Complex64 = Complex64::new(0.5, 0.866_025_403_784_438_6);

/// Schwarz–Christoffel map Φ from the closed upper half-plane onto the unit
/// equilateral triangle with Φ(0) = A, Φ(1) = C and Φ(∞) = B:
///
/// Φ(z) = −B(1/3, 1/3)⁻¹ ∫₀^z w^{−2/3} (w − 1)^{−2/3} dw.
///
/// The integral is taken from the prevertex nearest to z with the substitution
/// w − p = (z − p)u³, which removes the endpoint singularity. For |z| > 2 the
/// rotation symmetry Φ(1/(1 − z)) = R(Φ(z)), with R cycling A → C → B, moves the
/// evaluation next to the prevertex 1.
pub fn triangle_map(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain {
            what: "triangle_map argument",
            value: if z.re.is_finite() { z.im } else { z.re },
        });
    }
    if z.im < 0.0 {
        return Err(Error::Domain {
            what: "triangle_map imaginary part",
            value: z.im,
        });
    }
    // Normalise −0.0 so that principal arguments stay in [0, π].
    let z = Complex64::new(z.re, z.im.abs());
    if z.norm() > 2.0 {
        let zp = Complex64::new(1.0, 0.0) - z.inv();
        let zp = Complex64::new(zp.re, zp.im.abs());
        return Ok(rotate(near_finite(zp)));
    }
    Ok(near_finite(z))
}

fn beta_third() -> f64 {
    gamma_pos(1.0 / 3.0).powi(2) / gamma_pos(2.0 / 3.0)
}

fn near_finite(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let b = beta_third();
    let tol = 1e-14;
    if z == Complex64::new(0.0, 0.0) {
        return TRIANGLE_A;
    }
    if z == one {
        return TRIANGLE_C;
    }
    if z.norm() <= (z - one).norm() {
        // w = z u³: Φ(z) = −(3/B) z^{1/3} ∫₀¹ (z u³ − 1)^{−2/3} du
        let s = integrate_complex(|u| (z * (u * u * u) - one).powf(-2.0 / 3.0), 0.0, 1.0, tol);
        -z.powf(1.0 / 3.0) * s * (3.0 / b)
    } else {
        // w = 1 + (z − 1)u³: Φ(z) = C − (3/B)(z − 1)^{1/3} ∫₀¹ (1 + (z − 1)u³)^{−2/3} du
        let d = z - one;
        let s = integrate_complex(|u| (one + d * (u * u * u)).powf(-2.0 / 3.0), 0.0, 1.0, tol);
        TRIANGLE_C - d.powf(1.0 / 3.0) * s * (3.0 / b)
    }
}

/// Rotation about the centroid taking A → C → B → A.
fn rotate(p: Complex64) -> Complex64 {
    let g = (TRIANGLE_A + TRIANGLE_B + TRIANGLE_C) / 3.0;
    let rho = (TRIANGLE_C - g) / (TRIANGLE_A - g);
    g + (p - g) * rho
}

/// Position along the side from B to C (as a fraction of its length) of the image
/// of a boundary point x ≥ 1. Equals `cardy_f(1/x)`.
pub fn triangle_side_position(x: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(Error::Domain {
            what: "triangle_side_position",
            value: x,
        });
    }
    let p = triangle_map(Complex64::new(x, 0.0))?;
    Ok((p - TRIANGLE_B).re.clamp(0.0, 1.0))
}
