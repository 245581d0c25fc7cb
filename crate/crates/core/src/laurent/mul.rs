//! Integer polynomial multiplication kernels.
//!
//! Short operands use schoolbook convolution. Long operands are packed into a
//! single big integer (Kronecker substitution) so that the convolution rides
//! on the big-integer multiplier's Karatsuba/Toom-3 paths.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;

/// Below this many terms in the shorter operand, schoolbook wins.
const KRONECKER_THRESHOLD: usize = 24;

pub(crate) fn convolve(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len().min(b.len()) < KRONECKER_THRESHOLD {
        schoolbook(a, b)
    } else {
        kronecker(a, b)
    }
}

pub(crate) fn schoolbook(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    // Iterate over the shorter operand in the outer loop.
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    for (i, s) in short.iter().enumerate() {
        if s.is_zero() {
            continue;
        }
        for (j, l) in long.iter().enumerate() {
            if !l.is_zero() {
                out[i + j] += s * l;
            }
        }
    }
    out
}

pub(crate) fn kronecker(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let (a_pos, a_neg) = split_signs(a);
    let (b_pos, b_neg) = split_signs(b);
    let len = a.len() + b.len() - 1;
    let mut out = vec![BigInt::zero(); len];
    let mut accumulate = |x: &Option<Vec<BigUint>>, y: &Option<Vec<BigUint>>, sign: Sign| {
        if let (Some(x), Some(y)) = (x, y) {
            for (slot, v) in out.iter_mut().zip(kronecker_unsigned(x, y)) {
                if !v.is_zero() {
                    *slot += BigInt::from_biguint(sign, v);
                }
            }
        }
    };
    accumulate(&a_pos, &b_pos, Sign::Plus);
    accumulate(&a_neg, &b_neg, Sign::Plus);
    accumulate(&a_pos, &b_neg, Sign::Minus);
    accumulate(&a_neg, &b_pos, Sign::Minus);
    out
}

/// Splits into positive and negative magnitude parts; `None` when a part is
/// identically zero.
fn split_signs(a: &[BigInt]) -> (Option<Vec<BigUint>>, Option<Vec<BigUint>>) {
    let mut pos = Vec::with_capacity(a.len());
    let mut neg = Vec::with_capacity(a.len());
    let (mut any_pos, mut any_neg) = (false, false);
    for c in a {
        match c.sign() {
            Sign::Plus => {
                any_pos = true;
                pos.push(c.magnitude().clone());
                neg.push(BigUint::zero());
            }
            Sign::Minus => {
                any_neg = true;
                pos.push(BigUint::zero());
                neg.push(c.magnitude().clone());
            }
            Sign::NoSign => {
                pos.push(BigUint::zero());
                neg.push(BigUint::zero());
            }
        }
    }
    (any_pos.then_some(pos), any_neg.then_some(neg))
}

fn kronecker_unsigned(a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
    let max_bits = |v: &[BigUint]| v.iter().map(|c| c.bits()).max().unwrap_or(0);
    let len_bits = (a.len().min(b.len()) as u64).next_power_of_two().trailing_zeros() as u64 + 1;
    let slot_bits = max_bits(a) + max_bits(b) + len_bits;
    let width = slot_bits.div_ceil(32).max(1) as usize;

    let packed_a = pack(a, width);
    let packed_b = pack(b, width);
    let product = packed_a * packed_b;
    let digits = product.to_u32_digits();

    (0..a.len() + b.len() - 1)
        .map(|i| {
            let start = i * width;
            if start >= digits.len() {
                return BigUint::zero();
            }
            let end = (start + width).min(digits.len());
            BigUint::new(digits[start..end].to_vec())
        })
        .collect()
}

fn pack(values: &[BigUint], width: usize) -> BigUint {
    let mut digits = vec![0u32; values.len() * width];
    for (i, v) in values.iter().enumerate() {
        let d = v.to_u32_digits();
        digits[i * width..i * width + d.len()].copy_from_slice(&d);
    }
    BigUint::new(digits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_products() {
        assert_eq!(schoolbook(&ints(&[1, 1]), &ints(&[1, 1])), ints(&[1, 2, 1]));
        assert_eq!(kronecker(&ints(&[1, 1]), &ints(&[1, 1])), ints(&[1, 2, 1]));
        assert_eq!(kronecker(&ints(&[1, -1]), &ints(&[1, 1])), ints(&[1, 0, -1]));
        assert_eq!(kronecker(&ints(&[0, 0, 3]), &ints(&[2])), ints(&[0, 0, 6]));
    }

    proptest! {
        #[test]
        fn kronecker_matches_schoolbook(
            a in proptest::collection::vec(-1_000_000_000_000i64..1_000_000_000_000, 1..60),
            b in proptest::collection::vec(-1_000_000_000_000i64..1_000_000_000_000, 1..60),
            scale in 0u32..200,
        ) {
            let big = BigInt::from(3).pow(scale);
            let a: Vec<BigInt> = a.into_iter().map(|x| BigInt::from(x) * &big).collect();
            let b = ints(&b);
            prop_assert_eq!(kronecker(&a, &b), schoolbook(&a, &b));
        }
    }
}
