use super::gamma::gamma_pos;
use crate::error::{Error, Result};

const A: f64 = 1.0 / 3.0;
const B: f64 = 2.0 / 3.0;
const C: f64 = 4.0 / 3.0;

/// Gauss series of ₂F₁(a, b; c; x), summed until terms fall below 1e-17.
fn gauss_series(a: f64, b: f64, c: f64, x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..2000 {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Direct power series for ₂F₁(1/3, 2/3; 4/3; x); converges for |x| < 1 and
/// is used for x ≤ 1/2.
pub fn hyp2f1_113_series(x: f64) -> f64 {
    gauss_series(A, B, C, x)
}

/// Connection formula about x = 1 (c − a − b = 1/3 is not an integer):
///
/// ₂F₁(a,b;c;x) = Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b)) · x^{−1/3}
///              + (1−x)^{1/3} Γ(c)Γ(a+b−c)/(Γ(a)Γ(b)) · ₂F₁(1, 2/3; 4/3; 1−x)
///
/// where the first series collapsed because ₂F₁(a, b; b; y) = (1 − y)^{−a}.
pub fn hyp2f1_113_reflected(x: f64) -> f64 {
    let y = 1.0 - x;
    let g_c = gamma_pos(C);
    // Γ(c−a) = Γ(1) = 1.
    let first = g_c * gamma_pos(C - A - B) / gamma_pos(C - B) * x.powf(-1.0 / 3.0);
    // Γ(−1/3) = Γ(2/3) / (−1/3).
    let gamma_neg_third = -3.0 * gamma_pos(2.0 / 3.0);
    let second = y.powf(1.0 / 3.0) * g_c * gamma_neg_third / (gamma_pos(A) * gamma_pos(B))
        * gauss_series(C - A, C - B, C - A - B + 1.0, y);
    first + second
}

/// ₂F₁(1/3, 2/3; 4/3; x) for 0 ≤ x < 1.
pub fn hyp2f1_113(x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain {
            what: "hyp2f1_113",
            value: x,
        });
    }
    Ok(if x <= 0.5 {
        hyp2f1_113_series(x)
    } else {
        hyp2f1_113_reflected(x)
    })
}

/// Cardy's crossing function F(x) = 3Γ(2/3)/Γ(1/3)² · x^{1/3} ₂F₁(1/3, 2/3; 4/3; x)
/// for 0 ≤ x ≤ 1, with F(0) = 0 and F(1) = 1.
pub fn cardy_f(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            what: "cardy_f",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let norm = 3.0 * gamma_pos(2.0 / 3.0) / gamma_pos(1.0 / 3.0).powi(2);
    Ok((norm * x.cbrt() * hyp2f1_113(x)?).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quadrature::integrate;

    /// Independent oracle: F(x) is the regularized incomplete beta I_x(1/3, 1/3),
    /// evaluated by quadrature with the endpoint singularities removed by
    /// t = s³ near 0 and 1 − t = s³ near 1.
    fn cardy_by_quadrature(x: f64) -> f64 {
        let from_zero = |u: f64| {
            // ∫_0^u t^{-2/3}(1-t)^{-2/3} dt with t = s³
            integrate(|s| 3.0 * (1.0 - s * s * s).powf(-2.0 / 3.0), 0.0, u.cbrt(), 1e-14)
        };
        let total = 2.0 * from_zero(0.5);
        let part = if x <= 0.5 {
            from_zero(x)
        } else {
            // ∫_0^x = total − ∫_x^1, and ∫_x^1 with 1 − t = s³.
            total - integrate(|s| 3.0 * (1.0 - s * s * s).powf(-2.0 / 3.0), 0.0, (1.0 - x).cbrt(), 1e-14)
        };
        part / total
    }

    #[test]
    fn endpoints_and_symmetry() {
        assert_eq!(cardy_f(0.0).unwrap(), 0.0);
        assert_eq!(cardy_f(1.0).unwrap(), 1.0);
        assert!((cardy_f(0.5).unwrap() - 0.5).abs() < 1e-12);
        for x in [0.01, 0.2, 0.37, 0.49] {
            let s = cardy_f(x).unwrap() + cardy_f(1.0 - x).unwrap();
            assert!((s - 1.0).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn matches_quadrature_oracle() {
        for i in 1..40 {
            let x = i as f64 / 40.0;
            let f = cardy_f(x).unwrap();
            let o = cardy_by_quadrature(x);
            assert!((f - o).abs() < 1e-10, "x={x}: {f} vs {o}");
        }
    }

    #[test]
    fn branches_agree_on_overlap() {
        for i in 0..=20 {
            let x = 0.45 + 0.005 * i as f64;
            let d = hyp2f1_113_series(x) - hyp2f1_113_reflected(x);
            assert!(d.abs() < 1e-10, "x={x}: {d}");
        }
    }

    #[test]
    fn strictly_increasing() {
        let mut prev = 0.0;
        for i in 1..=1000 {
            let f = cardy_f(i as f64 / 1000.0).unwrap();
            assert!(f > prev);
            prev = f;
        }
    }

    #[test]
    fn domain() {
        assert!(cardy_f(-0.1).is_err());
        assert!(cardy_f(1.1).is_err());
        assert!(hyp2f1_113(1.0).is_err());
        assert!((hyp2f1_113(0.0).unwrap() - 1.0).abs() < 1e-15);
    }
}
