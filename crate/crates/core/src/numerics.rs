//! Tolerances, integer and root-of-unity detection, and the square-root
//! branch shared by every other module.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

pub type CMatrix = DMatrix<Complex>;

/// Comparison thresholds.
///
/// `eq_tol` bounds `|x - y|` for complex equality, `int_tol` bounds the
/// distance to the nearest integer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eq_tol: f64,
    pub int_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eq_tol: 1e-9,
            int_tol: 1e-6,
        }
    }
}

impl Tolerance {
    pub fn new(eq_tol: f64, int_tol: f64) -> Result<Self> {
        if !(eq_tol > 0.0 && eq_tol <= int_tol && int_tol < 0.5) {
            return Err(Error::InvalidTolerance(format!(
                "need 0 < eq_tol <= int_tol < 0.5, got eq_tol={eq_tol}, int_tol={int_tol}"
            )));
        }
        Ok(Tolerance { eq_tol, int_tol })
    }
}

pub fn approx_eq(x: Complex, y: Complex, pol: &Tolerance) -> bool {
    (x - y).norm() <= pol.eq_tol
}

/// The integer nearest to `x`, if `x` is within `int_tol` of it.
pub fn as_integer(x: Complex, pol: &Tolerance) -> Option<i64> {
    if !x.re.is_finite() || x.im.abs() > pol.int_tol {
        return None;
    }
    let r = x.re.round();
    if (x.re - r).abs() <= pol.int_tol {
        Some(r as i64)
    } else {
        None
    }
}

pub fn is_phase(z: Complex, pol: &Tolerance) -> bool {
    z.is_finite() && (z.norm() - 1.0).abs() <= pol.eq_tol
}

/// Argument in `(-π, π]`. Values within `eq_tol` of the negative real axis
/// are put on the `+π` side of the cut so that rounding noise in the
/// imaginary part cannot flip the branch.
pub fn principal_arg(z: Complex, pol: &Tolerance) -> f64 {
    if z.re < 0.0 && z.im.abs() <= pol.eq_tol {
        PI
    } else {
        z.im.atan2(z.re)
    }
}

/// `e^{iφ/2}` for `ω = e^{iφ}` with `φ ∈ (-π, π]`.
pub fn principal_sqrt(w: Complex, pol: &Tolerance) -> Result<Complex> {
    if !is_phase(w, pol) {
        return Err(Error::NotAPhase(format!("{w}")));
    }
    Ok(Complex::from_polar(1.0, principal_arg(w, pol) / 2.0))
}

/// `e^{iφ/3}` for `ω = e^{iφ}` with `φ ∈ (-π, π]`.
pub fn principal_cbrt(w: Complex, pol: &Tolerance) -> Result<Complex> {
    if !is_phase(w, pol) {
        return Err(Error::NotAPhase(format!("{w}")));
    }
    Ok(Complex::from_polar(1.0, principal_arg(w, pol) / 3.0))
}

/// `e^{2πi p/q}`, reducing `p` modulo `q` first so large numerators keep
/// full precision.
pub fn root_of_unity(p: i64, q: i64) -> Complex {
    debug_assert!(q > 0);
    let r = p.rem_euclid(q);
    let (r, q) = (r as f64, q as f64);
    // cos/sin of exact multiples of π/2 are not exact in floating point
    if 4.0 * r == q {
        return Complex::new(0.0, 1.0);
    }
    if 2.0 * r == q {
        return Complex::new(-1.0, 0.0);
    }
    if 4.0 * r == 3.0 * q {
        return Complex::new(0.0, -1.0);
    }
    if r == 0.0 {
        return Complex::new(1.0, 0.0);
    }
    Complex::from_polar(1.0, TAU * r / q)
}

/// Nearest turn fraction `p/q` with `0 < q <= max_den`, `p/q ∈ (-1/2, 1/2]`,
/// such that `z` equals `e^{2πi p/q}` within `tol` (measured in turns).
pub fn nearest_turns(z: Complex, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !z.is_finite() || (z.norm() - 1.0).abs() > tol {
        return None;
    }
    let turns = z.im.atan2(z.re) / TAU;
    for q in 1..=max_den {
        let p = (turns * q as f64).round();
        if (turns - p / q as f64).abs() <= tol {
            let (mut p, q) = (p as i64, q);
            if 2 * p == -q {
                p = -p;
            }
            return Some((p, q));
        }
    }
    None
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// All distinct roots of unity of order at most `max_order`, as reduced
/// fractions `p/q` with `0 <= p < q`, sorted by angle.
pub fn roots_up_to(max_order: u32) -> Vec<(i64, i64)> {
    let mut roots: Vec<(i64, i64)> = (1..=max_order as i64)
        .flat_map(|q| (0..q).filter(move |&p| gcd(p, q) == 1).map(move |p| (p, q)))
        .collect();
    roots.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    roots
}

pub fn matrix_max_dev(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn diag(entries: &[Complex]) -> CMatrix {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn approx_eq_examples() {
        let pol = Tolerance::default();
        assert!(approx_eq(c(1.0, 0.0), c(1.0, 0.0), &pol));
        assert!(approx_eq(c(1.0, 0.0), c(1.0, 1e-12), &pol));
        assert!(!approx_eq(c(1.0, 0.0), c(-1.0, 0.0), &pol));
    }

    #[test]
    fn as_integer_examples() {
        let pol = Tolerance::default();
        assert_eq!(as_integer(c(2.0000000001, 0.0), &pol), Some(2));
        assert_eq!(as_integer(c(0.5, 0.0), &pol), None);
        assert_eq!(as_integer(c(1.0, 0.01), &pol), None);
        assert_eq!(as_integer(c(-3.0, 1e-8), &pol), Some(-3));
    }

    #[test]
    fn principal_sqrt_examples() {
        let pol = Tolerance::default();
        assert!(approx_eq(principal_sqrt(c(1.0, 0.0), &pol).unwrap(), c(1.0, 0.0), &pol));
        assert!(approx_eq(
            principal_sqrt(c(-1.0, 0.0), &pol).unwrap(),
            c(0.0, 1.0),
            &pol
        ));
        // -1 reached with a negative zero or tiny negative imaginary part
        assert!(approx_eq(
            principal_sqrt(c(-1.0, -0.0), &pol).unwrap(),
            c(0.0, 1.0),
            &pol
        ));
        assert!(approx_eq(
            principal_sqrt(c(-1.0, -1e-15), &pol).unwrap(),
            c(0.0, 1.0),
            &pol
        ));
        let w = Complex::from_polar(1.0, PI / 4.0);
        let r = Complex::from_polar(1.0, PI / 8.0);
        assert!(approx_eq(principal_sqrt(w, &pol).unwrap(), r, &pol));
    }

    #[test]
    fn principal_sqrt_rejects_non_phase() {
        let pol = Tolerance::default();
        assert!(matches!(principal_sqrt(c(2.0, 0.0), &pol), Err(Error::NotAPhase(_))));
        assert!(principal_sqrt(c(f64::NAN, 0.0), &pol).is_err());
    }

    #[test]
    fn tolerance_invariants() {
        assert!(Tolerance::new(1e-9, 1e-6).is_ok());
        assert!(Tolerance::new(0.0, 1e-6).is_err());
        assert!(Tolerance::new(1e-5, 1e-6).is_err());
        assert!(Tolerance::new(1e-9, 0.5).is_err());
    }

    #[test]
    fn turn_fractions() {
        assert_eq!(nearest_turns(root_of_unity(1, 16), 240, 1e-9), Some((1, 16)));
        assert_eq!(nearest_turns(root_of_unity(-7, 60), 240, 1e-9), Some((-7, 60)));
        assert_eq!(nearest_turns(c(-1.0, 0.0), 240, 1e-9), Some((1, 2)));
        assert_eq!(nearest_turns(Complex::from_polar(1.0, 1.0), 240, 1e-9), None);
    }

    #[test]
    fn roots_count_matches_totient_sum() {
        // 1+1+2+2+4+2+6+4+6+4 for q = 1..10
        assert_eq!(roots_up_to(10).len(), 32);
        assert_eq!(roots_up_to(16).len(), 80);
        assert_eq!(roots_up_to(1), vec![(0, 1)]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn principal_sqrt_squares_back(theta in -PI..PI) {
            let pol = Tolerance::default();
            let w = Complex::from_polar(1.0, theta);
            let r = principal_sqrt(w, &pol).unwrap();
            prop_assert!(approx_eq(r * r, w, &pol));
            prop_assert!(r.re >= -1e-12);
        }

        #[test]
        fn as_integer_idempotent(n in -1_000_000i64..=1_000_000) {
            let pol = Tolerance::default();
            let once = as_integer(c(n as f64, 0.0), &pol);
            prop_assert_eq!(once, Some(n));
            prop_assert_eq!(as_integer(c(once.unwrap() as f64, 0.0), &pol), once);
        }
    }
}
