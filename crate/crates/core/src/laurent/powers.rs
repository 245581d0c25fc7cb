//! Successive powers `P, P^2, P^3, ...` of a fixed Laurent polynomial.
//!
//! Each step multiplies the running power by the (short) base. Exponents are
//! stored compressed by the base's stride, so a base like `x^-1, x^10` keeps
//! no zero slots. When the base numerators are nonnegative and fit in a
//! machine word (every generating function of a gamble table qualifies) the
//! running power lives in a flat array of fixed-width limbs and each step is
//! an allocation-free multiply-accumulate; otherwise big integers are used.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::LaurentPoly;

#[derive(Debug, Clone)]
pub struct Powers {
    exponent: u64,
    base_min: i64,
    stride: i64,
    base_denom: BigInt,
    /// exponent of slot 0
    min_exp: i64,
    denom: BigInt,
    state: State,
}

#[derive(Debug, Clone)]
enum State {
    Flat(Flat),
    Big(Big),
}

#[derive(Debug, Clone)]
struct Flat {
    base: Vec<(usize, u64)>,
    base_len: usize,
    base_sum: u64,
    /// `base_sum^n`, an upper bound for every coefficient
    bound: BigUint,
    width: usize,
    len: usize,
    data: Vec<u64>,
    scratch: Vec<u64>,
}

#[derive(Debug, Clone)]
struct Big {
    base: Vec<(usize, BigInt)>,
    base_len: usize,
    numer: Vec<BigInt>,
}

impl Powers {
    pub(super) fn new(base: &LaurentPoly) -> Self {
        let nonzero: Vec<(usize, &BigInt)> = base
            .numer
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let stride = nonzero.iter().fold(0usize, |g, (j, _)| g.gcd(j)).max(1);
        let base_len = base.numer.len().saturating_sub(1) / stride;

        let small: Option<Vec<(usize, u64)>> = nonzero
            .iter()
            .map(|(j, c)| c.to_u64().map(|v| (j / stride, v)))
            .collect();
        let base_sum = small
            .as_ref()
            .and_then(|b| b.iter().try_fold(0u64, |acc, (_, v)| acc.checked_add(*v)));

        let state = match (small, base_sum) {
            (Some(b), Some(sum)) if !b.is_empty() => State::Flat(Flat {
                base: b,
                base_len,
                base_sum: sum,
                bound: BigUint::one(),
                width: 1,
                len: 1,
                data: vec![1],
                scratch: Vec::new(),
            }),
            _ => State::Big(Big {
                base: nonzero.iter().map(|(j, c)| (j / stride, (*c).clone())).collect(),
                base_len,
                numer: vec![BigInt::one()],
            }),
        };
        Self {
            exponent: 0,
            base_min: base.min_exp,
            stride: stride as i64,
            base_denom: base.denom.clone(),
            min_exp: 0,
            denom: BigInt::one(),
            state,
        }
    }

    /// Exponent of the current power (0 before the first step).
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Advances to the next power and returns its exponent.
    pub fn step(&mut self) -> u64 {
        match &mut self.state {
            State::Flat(f) => f.step(),
            State::Big(b) => b.step(),
        }
        self.min_exp += self.base_min;
        self.denom *= &self.base_denom;
        self.exponent += 1;
        self.exponent
    }

    /// First slot whose exponent is `> 0` (strict) or `>= 0`.
    fn first_positive_slot(&self, strict: bool) -> usize {
        let target = if strict { 1 } else { 0 };
        Integer::div_ceil(&(target - self.min_exp), &self.stride).max(0) as usize
    }

    pub fn positive_part(&self, strict: bool) -> BigRational {
        let start = self.first_positive_slot(strict);
        let sum = match &self.state {
            State::Flat(f) => f.sum_from(start),
            State::Big(b) => b.numer.iter().skip(start).sum(),
        };
        BigRational::new(sum, self.denom.clone())
    }

    pub fn current(&self) -> LaurentPoly {
        let slots: Vec<BigInt> = match &self.state {
            State::Flat(f) => (0..f.len).map(|k| f.coefficient(k)).collect(),
            State::Big(b) => b.numer.clone(),
        };
        let stride = self.stride as usize;
        let mut numer = vec![BigInt::zero(); (slots.len() - 1) * stride + 1];
        for (k, c) in slots.into_iter().enumerate() {
            numer[k * stride] = c;
        }
        LaurentPoly::from_parts(self.min_exp, numer, self.denom.clone())
    }
}

impl Iterator for Powers {
    type Item = LaurentPoly;

    fn next(&mut self) -> Option<LaurentPoly> {
        self.step();
        Some(self.current())
    }
}

impl Flat {
    fn step(&mut self) {
        self.bound *= self.base_sum;
        let width = (self.bound.bits().div_ceil(64) as usize).max(1);
        let len = self.len + self.base_len;
        let mut next = std::mem::take(&mut self.scratch);
        next.clear();
        next.resize(len * width, 0);
        for j in 0..self.len {
            let src = &self.data[j * self.width..(j + 1) * self.width];
            // coefficients near the ends are far smaller than the bound
            let used = match src.iter().rposition(|&w| w != 0) {
                Some(i) => i + 1,
                None => continue,
            };
            for &(offset, b) in &self.base {
                let k = j + offset;
                mul_add(&mut next[k * width..(k + 1) * width], &src[..used], b);
            }
        }
        self.scratch = std::mem::replace(&mut self.data, next);
        self.width = width;
        self.len = len;
    }

    fn coefficient(&self, k: usize) -> BigInt {
        limbs_to_bigint(&self.data[k * self.width..(k + 1) * self.width])
    }

    fn sum_from(&self, start: usize) -> BigInt {
        // The total of all slots is bounded by `bound`, so `width` limbs hold it.
        let mut acc = vec![0u64; self.width];
        for k in start..self.len {
            let src = &self.data[k * self.width..(k + 1) * self.width];
            let mut carry = false;
            for (a, s) in acc.iter_mut().zip(src) {
                let (v, c1) = a.overflowing_add(*s);
                let (v, c2) = v.overflowing_add(carry as u64);
                *a = v;
                carry = c1 || c2;
            }
            debug_assert!(!carry);
        }
        limbs_to_bigint(&acc)
    }
}

/// `dst += src * b` over little-endian limbs; `dst` is at least as wide as
/// `src` and the caller guarantees the result fits.
#[inline]
fn mul_add(dst: &mut [u64], src: &[u64], b: u64) {
    let mut carry: u128 = 0;
    let (head, tail) = dst.split_at_mut(src.len());
    for (d, s) in head.iter_mut().zip(src) {
        let t = *d as u128 + (*s as u128) * (b as u128) + carry;
        *d = t as u64;
        carry = t >> 64;
    }
    for d in tail {
        if carry == 0 {
            break;
        }
        let t = *d as u128 + carry;
        *d = t as u64;
        carry = t >> 64;
    }
    debug_assert_eq!(carry, 0, "coefficient bound violated");
}

fn limbs_to_bigint(limbs: &[u64]) -> BigInt {
    let digits: Vec<u32> = limbs
        .iter()
        .flat_map(|w| [*w as u32, (*w >> 32) as u32])
        .collect();
    BigInt::from_biguint(Sign::Plus, BigUint::new(digits))
}

impl Big {
    fn step(&mut self) {
        if self.base.is_empty() {
            self.numer = vec![BigInt::zero()];
            return;
        }
        let mut next = vec![BigInt::zero(); self.numer.len() + self.base_len];
        for (offset, b) in &self.base {
            for (j, c) in self.numer.iter().enumerate() {
                if !c.is_zero() {
                    next[j + offset] += c * b;
                }
            }
        }
        self.numer = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamble::{g_family_table, st_pete_table};
    use crate::laurent::pgf;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn flat_and_big_paths_agree() {
        let p = pgf(&st_pete_table(4, 3).unwrap());
        let mut flat = p.powers();
        assert!(matches!(flat.state, State::Flat(_)));
        let mut big = flat.clone();
        if let State::Flat(f) = &flat.state {
            big.state = State::Big(Big {
                base: f.base.iter().map(|&(j, b)| (j, BigInt::from(b))).collect(),
                base_len: f.base_len,
                numer: vec![BigInt::one()],
            });
        }
        for _ in 0..60 {
            flat.step();
            big.step();
            assert_eq!(flat.current(), big.current());
            assert_eq!(flat.positive_part(true), big.positive_part(true));
            assert_eq!(flat.positive_part(false), big.positive_part(false));
        }
    }

    #[test]
    fn signed_base_uses_big_integers() {
        let p = LaurentPoly::from_coefficients(-1, vec![q(1, 1), q(0, 1), q(-1, 1)]);
        let mut it = p.powers();
        assert!(matches!(it.state, State::Big(_)));
        it.step();
        it.step();
        assert_eq!(it.current(), p.power(2));
    }

    #[test]
    fn stride_is_compressed() {
        let p = pgf(&g_family_table(10).unwrap());
        let it = p.powers();
        assert_eq!(it.stride, 11);
        let mut it = it;
        for _ in 0..40 {
            it.step();
        }
        assert_eq!(it.current(), p.power(40));
        let State::Flat(f) = &it.state else { panic!() };
        assert_eq!(f.len, 41);
    }

    #[test]
    fn limbs_grow_across_word_boundaries() {
        // 1/3 x^-1 + 2/3 x: base sum 3, so widths cross 64-bit limbs quickly.
        let p = LaurentPoly::from_terms([(-1, q(1, 3)), (1, q(2, 3))]);
        let mut it = p.powers();
        for _ in 0..150 {
            it.step();
        }
        assert_eq!(it.current(), p.power(150));
        assert_eq!(it.current().eval_at_one(), q(1, 1));
    }

    #[test]
    fn monomial_and_zero_bases() {
        let p = LaurentPoly::monomial(q(1, 2), 3);
        let mut it = p.powers();
        it.step();
        it.step();
        assert_eq!(it.current(), LaurentPoly::monomial(q(1, 4), 6));
        assert_eq!(it.positive_part(true), q(1, 4));
        let mut z = LaurentPoly::zero().powers();
        z.step();
        assert!(z.current().is_zero());
    }
}
