//! Exact Laurent polynomials over the rationals.
//!
//! Coefficients sit on a dense, contiguous exponent range starting at
//! `min_exponent`. Internally every coefficient is an integer numerator over
//! one shared positive denominator, which keeps the convolution loop in pure
//! integer arithmetic. The stored form is canonical: the end coefficients are
//! nonzero and the numerators and denominator share no common factor, so
//! structural equality is value equality.

mod mul;
mod powers;

pub use powers::Powers;

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::gamble::GambleTable;
use crate::rational::{lcm_of_denominators, to_f64};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    pub(crate) min_exp: i64,
    pub(crate) numer: Vec<BigInt>,
    pub(crate) denom: BigInt,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self { min_exp: 0, numer: Vec::new(), denom: BigInt::one() }
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::one(), 0)
    }

    pub fn monomial(coeff: BigRational, exp: i64) -> Self {
        Self::from_coefficients(exp, vec![coeff])
    }

    /// `coeffs[j]` is the coefficient of `x^(min_exp + j)`.
    pub fn from_coefficients(min_exp: i64, coeffs: Vec<BigRational>) -> Self {
        let denom = lcm_of_denominators(&coeffs);
        let numer = coeffs
            .iter()
            .map(|c| c.numer() * (&denom / c.denom()))
            .collect();
        Self::from_parts(min_exp, numer, denom)
    }

    /// Sums `(exponent, coefficient)` terms; repeated exponents accumulate.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, BigRational)>) -> Self {
        let terms: Vec<(i64, BigRational)> = terms.into_iter().collect();
        let (Some(lo), Some(hi)) = (
            terms.iter().map(|t| t.0).min(),
            terms.iter().map(|t| t.0).max(),
        ) else {
            return Self::zero();
        };
        let mut coeffs = vec![BigRational::zero(); (hi - lo) as usize + 1];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        Self::from_coefficients(lo, coeffs)
    }

    pub(crate) fn from_parts(min_exp: i64, numer: Vec<BigInt>, denom: BigInt) -> Self {
        let mut p = Self { min_exp, numer, denom };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        let lead = self.numer.iter().position(|c| !c.is_zero());
        let Some(lead) = lead else {
            *self = Self::zero();
            return;
        };
        let tail = self.numer.iter().rposition(|c| !c.is_zero()).expect("nonzero exists");
        self.numer.truncate(tail + 1);
        self.numer.drain(..lead);
        self.min_exp += lead as i64;

        if self.denom.is_negative() {
            self.denom = -std::mem::take(&mut self.denom);
            self.numer.iter_mut().for_each(|c| *c = -std::mem::take(c));
        }
        // Ends first: for probability generating functions the extreme
        // coefficients usually settle the content quickly.
        let mut g = self.denom.clone();
        let last = self.numer.len() - 1;
        for idx in [last, 0].into_iter().chain(1..last) {
            if g.is_one() {
                break;
            }
            g = g.gcd(&self.numer[idx]);
        }
        if !g.is_one() {
            self.denom /= &g;
            for c in &mut self.numer {
                *c /= &g;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_empty()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.min_exp)
    }

    pub fn max_exponent(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.min_exp + self.numer.len() as i64 - 1)
    }

    /// `max_exponent - min_exponent`, or 0 for the zero polynomial.
    pub fn span(&self) -> u64 {
        self.numer.len().saturating_sub(1) as u64
    }

    pub fn coefficient(&self, exp: i64) -> BigRational {
        let idx = exp - self.min_exp;
        if self.is_zero() || idx < 0 || idx as usize >= self.numer.len() {
            return BigRational::zero();
        }
        BigRational::new(self.numer[idx as usize].clone(), self.denom.clone())
    }

    /// Dense coefficient list starting at [`Self::min_exponent`].
    pub fn coefficients(&self) -> Vec<BigRational> {
        self.numer
            .iter()
            .map(|c| BigRational::new(c.clone(), self.denom.clone()))
            .collect()
    }

    /// Nonzero `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, BigRational)> + '_ {
        self.numer
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (self.min_exp + j as i64, BigRational::new(c.clone(), self.denom.clone())))
    }

    /// Nearest `f64` of each dense coefficient.
    pub fn coefficients_f64(&self) -> Vec<f64> {
        self.numer
            .iter()
            .map(|c| to_f64(&BigRational::new(c.clone(), self.denom.clone())))
            .collect()
    }

    /// Value at `x = 1`, i.e. the sum of all coefficients.
    pub fn eval_at_one(&self) -> BigRational {
        let sum: BigInt = self.numer.iter().sum();
        BigRational::new(sum, self.denom.clone())
    }

    pub fn multiply(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let numer = mul::convolve(&self.numer, &other.numer);
        let product = Self::from_parts(
            self.min_exp + other.min_exp,
            numer,
            &self.denom * &other.denom,
        );
        debug_assert_eq!(product.span(), self.span() + other.span(), "degree additivity");
        product
    }

    /// `self^n` by binary exponentiation, `self^0 = 1`.
    ///
    /// When all exponents lie on a common stride (e.g. `x^-1` and `x^10`
    /// differ by 11), the power is taken on the compressed polynomial in
    /// `x^stride` and expanded afterwards.
    pub fn power(&self, n: u64) -> LaurentPoly {
        if n == 0 {
            return Self::one();
        }
        if self.is_zero() {
            return Self::zero();
        }
        let stride = self
            .numer
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(0usize, |g, (j, _)| g.gcd(&j));
        let min_exp = self
            .min_exp
            .checked_mul(n as i64)
            .expect("exponent range overflows i64");
        if stride == 0 {
            // single term
            let c = self.numer[0].pow(n as u32);
            return Self::from_parts(min_exp, vec![c], self.denom.pow(n as u32));
        }
        let compressed: Vec<BigInt> = self.numer.iter().step_by(stride).cloned().collect();
        let powered = int_power(&compressed, n);
        let numer = if stride == 1 {
            powered
        } else {
            let mut dense = vec![BigInt::zero(); (powered.len() - 1) * stride + 1];
            for (j, c) in powered.into_iter().enumerate() {
                dense[j * stride] = c;
            }
            dense
        };
        let exp = u32::try_from(n).expect("power exponent fits in u32");
        Self::from_parts(min_exp, numer, self.denom.pow(exp))
    }

    /// Sum of the coefficients of `x^e` with `e > 0` (strict) or `e >= 0`.
    pub fn positive_part(&self, strict: bool) -> BigRational {
        BigRational::new(positive_numer_sum(self.min_exp, &self.numer, strict), self.denom.clone())
    }

    /// Iterator over `self, self^2, self^3, ...` by repeated multiplication
    /// with `self`. Cheaper than [`Self::power`] when every power is needed.
    pub fn powers(&self) -> Powers {
        Powers::new(self)
    }
}

pub(crate) fn positive_numer_sum(min_exp: i64, numer: &[BigInt], strict: bool) -> BigInt {
    let first = if strict { 1 - min_exp } else { -min_exp };
    let start = first.max(0) as usize;
    numer.iter().skip(start).sum()
}

fn int_power(base: &[BigInt], n: u64) -> Vec<BigInt> {
    // Left-to-right: each step squares, then multiplies by the (short) base.
    let mut acc = base.to_vec();
    for bit in (0..63 - n.leading_zeros()).rev() {
        acc = mul::convolve(&acc, &acc);
        if (n >> bit) & 1 == 1 {
            acc = mul::schoolbook(&acc, base);
        }
    }
    acc
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.multiply(rhs)
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        self.multiply(&rhs)
    }
}

/// `c*x^e` terms in ascending exponent order, e.g. `1/2*x^-3 + 1/4*x^-1`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*x^{e}")?;
        }
        Ok(())
    }
}

/// Probability generating function `sum p_i x^(M_i)` of a gamble table.
pub fn pgf(table: &GambleTable) -> LaurentPoly {
    LaurentPoly::from_terms(
        table
            .entries()
            .iter()
            .map(|e| (e.outcome, e.probability.clone())),
    )
}
