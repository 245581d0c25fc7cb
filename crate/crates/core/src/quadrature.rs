//! Floating-point cross-check of the exact positive part.
//!
//! For a Laurent polynomial `A` and any radius `r > 1`,
//!
//! ```text
//! sum of coefficients of x^e, e > 0  =  (1/2πi) ∮_{|x|=r} A(x) / (x(x-1)) dx
//! ```
//!
//! because `1/(x(x-1)) = Σ_{m≥0} x^{-m-2}` on `|x| > 1`. The contour must lie
//! strictly outside the unit circle: on `|x| = 1` the integrand has a pole at
//! `x = 1`.
//!
//! The integral is evaluated with the trapezoid rule on `N` equally spaced
//! points, i.e. `(1/N) Σ_k A(x_k)/(x_k - 1)` with `x_k = r·e^{2πik/N}`. That
//! sum is exact except for aliasing of order `Σ|c| · r^{-N}` (provided
//! `N` exceeds the largest exponent) and rounding of order
//! `ε · Σ|c| r^e / (r - 1)`. For long polynomials the second term explodes
//! at moderate `r`, so the radius actually used is chosen to balance the two
//! and may be smaller than the one requested.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;

pub const DEFAULT_RADIUS: f64 = 2.0;
/// Largest imaginary residue accepted in the result.
pub const MAX_IMAGINARY: f64 = 1e-10;
/// Error estimates below this are good enough to keep the requested radius.
const TARGET_ERROR: f64 = 1e-12;
/// Error estimates above this are reported as a numerical failure.
const MAX_ERROR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    radius: f64,
    samples: usize,
}

impl ContourSpec {
    pub fn new(radius: f64, samples: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 1.0) {
            return Err(Error::Domain(format!(
                "contour radius must be a finite number greater than 1, got {radius}"
            )));
        }
        if !samples.is_power_of_two() {
            return Err(Error::Domain(format!(
                "sample count must be a power of two, got {samples}"
            )));
        }
        Ok(Self { radius, samples })
    }

    /// Radius `radius` with the smallest sample count that satisfies the
    /// span and aliasing requirements for `a`.
    pub fn for_poly(a: &LaurentPoly, radius: f64) -> Result<Self> {
        let probe = Self::new(radius, 1)?;
        let need_span = 2 * a.span() as usize;
        let need_max = a.max_exponent().map_or(0, |m| m.max(0) as usize + 1);
        let abs_sum: f64 = a.coefficients_f64().iter().map(|c| c.abs()).sum();
        let need_alias = ((abs_sum.max(1.0) / TARGET_ERROR).ln() / radius.ln()).ceil() as usize;
        let samples = need_span.max(need_max).max(need_alias).max(16);
        Self::new(probe.radius, samples.next_power_of_two())
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn samples(&self) -> usize {
        self.samples
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourResult {
    pub value: f64,
    pub imaginary: f64,
    /// radius actually used, at most the requested one
    pub radius: f64,
    pub samples: usize,
    /// a priori bound on rounding plus aliasing error
    pub error_estimate: f64,
}

/// Strict positive part of `a` by contour quadrature.
pub fn contour_positive_part(a: &LaurentPoly, spec: &ContourSpec) -> Result<f64> {
    Ok(contour_positive_part_detailed(a, spec)?.value)
}

pub fn contour_positive_part_detailed(a: &LaurentPoly, spec: &ContourSpec) -> Result<ContourResult> {
    let (Some(min_exp), Some(max_exp)) = (a.min_exponent(), a.max_exponent()) else {
        return Err(Error::Domain("contour integral of the zero polynomial".into()));
    };
    let n = spec.samples;
    let span = a.span() as usize;
    if n < 2 * span {
        return Err(Error::Domain(format!(
            "sample count {n} is below twice the exponent span {span}"
        )));
    }
    if max_exp >= n as i64 {
        return Err(Error::Domain(format!(
            "sample count {n} must exceed the largest exponent {max_exp}"
        )));
    }

    let coeffs = a.coefficients_f64();
    let log_abs: Vec<f64> = coeffs.iter().map(|c| c.abs().ln()).collect();
    let estimate = |r: f64| error_estimate(&log_abs, min_exp, n, r);

    let mut radius = spec.radius;
    let mut err = estimate(radius);
    if !(err <= TARGET_ERROR) {
        // shrink toward 1 on a log grid of r - 1
        for t in 1..=240 {
            let r = 1.0 + (spec.radius - 1.0) * 10f64.powf(-(t as f64) / 20.0);
            let e = estimate(r);
            if e < err {
                radius = r;
                err = e;
            }
        }
    }
    if !(err <= MAX_ERROR) {
        return Err(Error::NumericalFailure(format!(
            "no radius in (1, {}] keeps the estimated error below {MAX_ERROR:e} with {n} samples (best {err:e})",
            spec.radius
        )));
    }
    log::debug!("contour: radius {radius}, {n} samples, error estimate {err:e}");

    // g_j = c_j r^{e_j}, built in the log domain so huge r^e never overflows
    let ln_r = radius.ln();
    let scaled: Vec<f64> = coeffs
        .iter()
        .zip(&log_abs)
        .enumerate()
        .map(|(j, (c, la))| {
            let l = la + (min_exp + j as i64) as f64 * ln_r;
            if c.is_nan() || *c == 0.0 {
                0.0
            } else {
                l.exp().copysign(*c)
            }
        })
        .collect();

    let sum = trapezoid_sum(&scaled, min_exp, radius, n);
    let value = sum.re / n as f64;
    let imaginary = sum.im / n as f64;
    if !(imaginary.abs() <= MAX_IMAGINARY) {
        return Err(Error::NumericalFailure(format!(
            "imaginary residue {imaginary:e} exceeds {MAX_IMAGINARY:e}"
        )));
    }
    Ok(ContourResult {
        value,
        imaginary,
        radius,
        samples: n,
        error_estimate: err,
    })
}

fn error_estimate(log_abs: &[f64], min_exp: i64, n: usize, r: f64) -> f64 {
    let ln_r = r.ln();
    let log_m = log_sum_exp(log_abs.iter().enumerate().map(|(j, la)| la + (min_exp + j as i64) as f64 * ln_r));
    let log_sum = log_sum_exp(log_abs.iter().copied());
    let rounding = f64::EPSILON * (log_abs.len() as f64).sqrt() * log_m.exp() / (r - 1.0);
    let nl = n as f64 * ln_r;
    let aliasing = (log_sum - nl - (-(-nl).exp()).ln_1p()).exp();
    rounding + aliasing
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max == f64::INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `Σ_k A(x_k)/(x_k - 1)` with `A(x_k) = ω^{k·min_exp} Σ_j g_j ω^{kj}`.
fn trapezoid_sum(scaled: &[f64], min_exp: i64, radius: f64, n: usize) -> Complex64 {
    let unit = |m: i64| Complex64::from_polar(1.0, std::f64::consts::TAU * m.rem_euclid(n as i64) as f64 / n as f64);
    let term = |k: usize| {
        let z = unit(k as i64);
        let mut h = Complex64::new(0.0, 0.0);
        for g in scaled.iter().rev() {
            h = h * z + g;
        }
        let a = h * unit(k as i64 * min_exp);
        a / (z * radius - 1.0)
    };
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get()).min(n / 256).max(1);
    if workers == 1 {
        return (0..n).map(term).sum();
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let term = &term;
                s.spawn(move || (n * w / workers..n * (w + 1) / workers).map(term).sum::<Complex64>())
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("quadrature worker panicked"))
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamble::{g_family_table, st_pete_table};
    use crate::laurent::pgf;
    use crate::rational::to_f64;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn check(a: &LaurentPoly, radius: f64) -> f64 {
        let spec = ContourSpec::for_poly(a, radius).unwrap();
        contour_positive_part(a, &spec).unwrap()
    }

    #[test]
    fn monomials() {
        let x = LaurentPoly::monomial(q(1, 1), 1);
        assert!((check(&x, 2.0) - 1.0).abs() < 1e-10);
        let inv = LaurentPoly::monomial(q(1, 1), -1);
        assert!(check(&inv, 2.0).abs() < 1e-10);
        let c = LaurentPoly::monomial(q(3, 1), 0);
        assert!(check(&c, 2.0).abs() < 1e-10);
    }

    #[test]
    fn spec_validation() {
        assert!(ContourSpec::new(1.0, 64).is_err());
        assert!(ContourSpec::new(f64::NAN, 64).is_err());
        assert!(ContourSpec::new(2.0, 100).is_err());
        let a = LaurentPoly::from_terms([(-20, q(1, 2)), (20, q(1, 2))]);
        let spec = ContourSpec::new(2.0, 64).unwrap();
        assert!(matches!(contour_positive_part(&a, &spec), Err(Error::Domain(_))));
        let b = LaurentPoly::monomial(q(1, 1), 70);
        assert!(matches!(contour_positive_part(&b, &spec), Err(Error::Domain(_))));
        assert!(contour_positive_part(&LaurentPoly::zero(), &spec).is_err());
    }

    #[test]
    fn st_petersburg_hundredth_power() {
        let a = pgf(&st_pete_table(5, 5).unwrap()).power(100);
        let spec = ContourSpec::for_poly(&a, DEFAULT_RADIUS).unwrap();
        let r = contour_positive_part_detailed(&a, &spec).unwrap();
        assert!((r.value - 0.908_828_627_455_963).abs() < 1e-8, "{r:?}");
        assert!(r.radius < DEFAULT_RADIUS);
    }

    #[test]
    fn g10_power_matches_exact() {
        let a = pgf(&g_family_table(10).unwrap()).power(300);
        let exact = to_f64(&a.positive_part(true));
        assert!((check(&a, DEFAULT_RADIUS) - exact).abs() < 1e-8);
    }

    #[test]
    fn too_few_samples_for_a_long_polynomial_fails() {
        // span 3000 at radius 1.0001 would need far more than 8192 samples
        let a = pgf(&st_pete_table(5, 5).unwrap()).power(100);
        let spec = ContourSpec::new(1.0001, 8192).unwrap();
        assert!(matches!(
            contour_positive_part(&a, &spec),
            Err(Error::NumericalFailure(_))
        ));
    }

    fn small_poly() -> impl Strategy<Value = LaurentPoly> {
        (-6i64..=0, prop::collection::vec((-20i64..=20, 1i64..=12), 1..10)).prop_map(|(lo, cs)| {
            LaurentPoly::from_coefficients(lo, cs.into_iter().map(|(n, d)| q(n, d)).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn agrees_with_exact(a in small_poly()) {
            prop_assume!(!a.is_zero());
            let exact = to_f64(&a.positive_part(true));
            prop_assert!((check(&a, DEFAULT_RADIUS) - exact).abs() < 1e-8);
        }

        #[test]
        fn invariant_under_radius_and_doubling(a in small_poly()) {
            prop_assume!(!a.is_zero());
            let base = check(&a, DEFAULT_RADIUS);
            for r in [1.5, 4.0] {
                prop_assert!((check(&a, r) - base).abs() < 1e-8);
            }
            let spec = ContourSpec::for_poly(&a, DEFAULT_RADIUS).unwrap();
            let doubled = ContourSpec::new(spec.radius(), spec.samples() * 2).unwrap();
            prop_assert!((contour_positive_part(&a, &doubled).unwrap() - base).abs() < 1e-8);
        }
    }
}
