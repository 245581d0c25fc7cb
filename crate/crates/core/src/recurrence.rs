//! Linear recurrences with polynomial coefficients, guessed from exact terms.
//!
//! A recurrence of order `r` and degree `d` is
//!
//! ```text
//! c_0(n) a(n) + c_1(n) a(n+1) + ... + c_r(n) a(n+r) = 0,   deg c_j ≤ d,
//! ```
//!
//! holding for every `n ≥ offset`. Given enough exact terms the unknown
//! coefficients of the `c_j` form the kernel of a linear system with one row
//! per index `n`. Cells `(r, d)` are searched in lexicographic order; the
//! first one whose kernel produces a recurrence that holds exactly on every
//! supplied term, including `verify_count` terms held out of the fit, wins.
//!
//! Kernels are computed over `Z/pZ` for word-sized primes, combined by the
//! Chinese remainder theorem and lifted with rational reconstruction. The
//! lift is accepted only after exact verification in big-integer arithmetic,
//! so modular bad luck can cost time but never correctness.
//!
//! A recurrence found this way is empirically verified, not proven.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exact::ProbSeries;
use crate::laurent::pgf;
use crate::rational::to_fraction_string;

pub const DEFAULT_MAX_ORDER: usize = 8;
pub const DEFAULT_MAX_DEGREE: usize = 8;
pub const DEFAULT_VERIFY_COUNT: usize = 20;

/// Rows beyond the number of unknowns used in the modular systems.
const EXTRA_ROWS: usize = 8;
/// Upper limit on primes spent lifting one kernel.
const MAX_PRIMES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    /// `coeffs[j][k]` is the coefficient of `n^k` in `c_j(n)`
    coeffs: Vec<Vec<BigInt>>,
    /// `a(offset), ..., a(offset + order - 1)`
    initial_values: Vec<BigRational>,
    offset: u64,
    fit_terms: usize,
    verified_through: u64,
}

impl Recurrence {
    /// Builds a recurrence from integer coefficient polynomials, ascending
    /// in powers of `n`.
    pub fn new(coeffs: Vec<Vec<BigInt>>, initial_values: Vec<BigRational>, offset: u64) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::Domain("a recurrence needs at least two coefficient polynomials".into()));
        }
        if coeffs.last().unwrap().iter().all(Zero::is_zero) {
            return Err(Error::Domain("leading coefficient polynomial is zero".into()));
        }
        if initial_values.len() != coeffs.len() - 1 {
            return Err(Error::Domain(format!(
                "order {} recurrence needs {} initial values, got {}",
                coeffs.len() - 1,
                coeffs.len() - 1,
                initial_values.len()
            )));
        }
        let degree = coeffs.iter().map(Vec::len).max().unwrap_or(1);
        let coeffs = coeffs
            .into_iter()
            .map(|mut c| {
                c.resize(degree, BigInt::zero());
                c
            })
            .collect();
        let verified_through = offset + initial_values.len() as u64 - 1;
        Ok(Self {
            coeffs,
            initial_values,
            offset,
            fit_terms: 0,
            verified_through,
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Common bound on the degree of the coefficient polynomials.
    pub fn degree(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    pub fn coeffs(&self) -> &[Vec<BigInt>] {
        &self.coeffs
    }

    pub fn initial_values(&self) -> &[BigRational] {
        &self.initial_values
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    /// Number of leading terms the coefficients were solved from.
    pub fn fit_terms(&self) -> usize {
        self.fit_terms
    }

    /// Last index at which the recurrence was checked exactly.
    pub fn verified_through(&self) -> u64 {
        self.verified_through
    }

    pub fn status(&self) -> &'static str {
        "empirically verified"
    }

    /// `c_j(n)`.
    pub fn coefficient_at(&self, j: usize, n: u64) -> BigInt {
        let n = BigInt::from(n);
        self.coeffs[j]
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * &n + c)
    }

    /// `Σ_j c_j(n) a(n+j)` for `window = [a(n), ..., a(n+r)]`.
    pub fn residual(&self, n: u64, window: &[BigRational]) -> BigRational {
        let scale = window.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
        let sum: BigInt = window
            .iter()
            .enumerate()
            .map(|(j, v)| self.coefficient_at(j, n) * (v.numer() * (&scale / v.denom())))
            .sum();
        BigRational::new(sum, scale)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "order": self.order(),
            "degree": self.degree(),
            "offset": self.offset,
            "coefficients": self
                .coeffs
                .iter()
                .map(|c| c.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "initial_values": self.initial_values.iter().map(to_fraction_string).collect::<Vec<_>>(),
            "verification": {
                "status": self.status(),
                "fit_terms": self.fit_terms,
                "verified_through": self.verified_through,
            },
        })
    }
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                write!(f, " + ")?;
            }
            write!(f, "(")?;
            let mut first = true;
            for (k, x) in c.iter().enumerate().rev() {
                if x.is_zero() {
                    continue;
                }
                if !first {
                    f.write_str(if x.is_negative() { " - " } else { " + " })?;
                } else if x.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
                match k {
                    0 => write!(f, "{}", x.abs())?,
                    1 => write!(f, "{}*n", x.abs())?,
                    _ => write!(f, "{}*n^{k}", x.abs())?,
                }
            }
            if first {
                write!(f, "0")?;
            }
            match j {
                0 => write!(f, ")*a(n)")?,
                _ => write!(f, ")*a(n+{j})")?,
            }
        }
        write!(f, " = 0  for n >= {}", self.offset)
    }
}

/// Smallest recurrence, by order and then degree, that reproduces the series.
///
/// The last `verify_count` terms are not used to solve for the coefficients
/// but must satisfy the result exactly. Fails with [`Error::NotFound`] when no
/// cell within the bounds works.
pub fn guess_recurrence(
    series: &ProbSeries,
    max_order: usize,
    max_degree: usize,
    verify_count: usize,
) -> Result<Recurrence> {
    if max_order == 0 || verify_count == 0 {
        return Err(Error::Domain("max_order and verify_count must be at least 1".into()));
    }
    let required = (max_order + 1) * (max_degree + 1) + max_order + verify_count;
    if series.len() < required {
        return Err(Error::InsufficientTerms {
            required,
            available: series.len(),
        });
    }
    let values = series.values();
    let first = series.first();
    let fit_len = values.len() - verify_count;

    let mut primes = PrimeStream::new();
    let (p0, residues0) = primes.next_usable(values);
    for order in 1..=max_order {
        let has_kernel = |degree: usize| {
            let cell = Cell::new(order, degree, fit_len);
            cell.kernel_mod(&residues0, first, p0).is_some()
        };
        if !has_kernel(max_degree) {
            log::debug!("order {order}: no kernel up to degree {max_degree}");
            continue;
        }
        // kernel existence is monotone in the degree
        let (mut lo, mut hi) = (0, max_degree);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if has_kernel(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        for degree in lo..=max_degree {
            let cell = Cell::new(order, degree, fit_len);
            log::debug!("trying order {order}, degree {degree}");
            let Some(kernel) = cell.exact_kernel(values, first, &mut primes) else {
                continue;
            };
            let coeffs: Vec<Vec<BigInt>> = kernel.chunks(degree + 1).map(<[BigInt]>::to_vec).collect();
            if coeffs[order].iter().all(Zero::is_zero) {
                continue;
            }
            let mut rec = Recurrence {
                coeffs,
                initial_values: values[..order].to_vec(),
                offset: first,
                fit_terms: fit_len,
                verified_through: first + values.len() as u64 - 1,
            };
            if holds_on(&rec, values, first) {
                normalize_sign(&mut rec.coeffs);
                return Ok(rec);
            }
        }
    }
    Err(Error::NotFound(format!(
        "no recurrence of order <= {max_order} and degree <= {max_degree} fits {fit_len} terms and verifies on {verify_count} more"
    )))
}

fn holds_on(rec: &Recurrence, values: &[BigRational], first: u64) -> bool {
    let r = rec.order();
    values
        .windows(r + 1)
        .enumerate()
        .all(|(i, w)| rec.residual(first + i as u64, w).is_zero())
}

/// Makes the top nonzero coefficient of `c_r` positive.
fn normalize_sign(coeffs: &mut [Vec<BigInt>]) {
    let lead = coeffs.last().and_then(|c| c.iter().rev().find(|x| !x.is_zero())).cloned();
    if lead.is_some_and(|x| x.is_negative()) {
        for c in coeffs.iter_mut().flatten() {
            *c = -&*c;
        }
    }
}

/// Extends `series` to `n_target` by running the recurrence forward.
pub fn extend(rec: &Recurrence, series: &ProbSeries, n_target: u64) -> Result<ProbSeries> {
    let r = rec.order();
    let first = series.first();
    if series.last() >= n_target {
        return Ok(series.truncated(n_target));
    }
    if rec.offset() < first || series.len() < r || series.last() + 1 < rec.offset() + r as u64 {
        return Err(Error::Domain(format!(
            "series covering n = {}..{} cannot seed a recurrence of order {r} starting at n = {}",
            first,
            series.last(),
            rec.offset()
        )));
    }
    let start = (rec.offset() - first) as usize;
    if !holds_on(rec, &series.values()[start..], rec.offset()) {
        return Err(Error::Domain("the recurrence does not hold on the supplied series".into()));
    }

    let mut values = series.values().to_vec();
    let remaining = (n_target - series.last()) as usize;
    values.reserve(remaining);
    let scale = integer_scale(series);
    let mut lattice = scale.as_ref().map(|s| Lattice::new(s, &values, first));
    let mut n = series.last() + 1;
    while n <= n_target {
        let base = n - r as u64;
        let lead = rec.coefficient_at(r, base);
        if lead.is_zero() {
            return Err(Error::Singularity { n: base as i64 });
        }
        let next = match lattice.as_mut().and_then(|l| l.step(rec, base, &lead)) {
            Some(v) => v,
            None => {
                lattice = None;
                let window = &values[values.len() - r..];
                let partial: BigRational = window
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * BigRational::from_integer(rec.coefficient_at(j, base)))
                    .sum();
                -partial / BigRational::from_integer(lead)
            }
        };
        if next.is_negative() || next > BigRational::one() {
            return Err(Error::NumericalFailure(format!(
                "extended value at n = {n} is {}, outside [0, 1]; the fitted recurrence is wrong",
                crate::rational::to_f64(&next)
            )));
        }
        values.push(next);
        n += 1;
    }
    ProbSeries::new(series.gamble().clone(), series.strict(), first, values)
}

/// `s` such that every known `a(n)·s^n` is an integer, taken from the
/// denominator of the gamble's generating function.
fn integer_scale(series: &ProbSeries) -> Option<BigInt> {
    let s = pgf(series.gamble()).denom.clone();
    let ok = series.iter().all(|(n, v)| {
        let pow = num_traits::pow(s.clone(), n as usize);
        (pow % v.denom()).is_zero()
    });
    ok.then_some(s)
}

/// Runs the recurrence on `b(n) = a(n)·s^n`, which stays integral:
/// `c_r(n) b(n+r) = -Σ_{j<r} c_j(n) s^{r-j} b(n+j)`.
struct Lattice {
    scale: BigInt,
    scale_primes: Option<Vec<BigInt>>,
    /// last `r` scaled values (all of them, before trimming)
    window: Vec<BigInt>,
    /// `s^n` for the most recent index
    power: BigInt,
    n: u64,
}

impl Lattice {
    fn new(scale: &BigInt, values: &[BigRational], first: u64) -> Self {
        let last = first + values.len() as u64 - 1;
        let window = values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let pow = num_traits::pow(scale.clone(), (first + i as u64) as usize);
                v.numer() * (pow / v.denom())
            })
            .collect();
        Self {
            scale: scale.clone(),
            scale_primes: small_prime_factors(scale),
            window,
            power: num_traits::pow(scale.clone(), last as usize),
            n: last,
        }
    }

    fn step(&mut self, rec: &Recurrence, base: u64, lead: &BigInt) -> Option<BigRational> {
        let r = rec.order();
        let w = &self.window[self.window.len() - r..];
        let mut sum = BigInt::zero();
        let mut s_pow = BigInt::one();
        for j in (0..r).rev() {
            s_pow *= &self.scale;
            sum += rec.coefficient_at(j, base) * &s_pow * &w[j];
        }
        let (q, rem) = (-sum).div_rem(lead);
        if !rem.is_zero() {
            return None;
        }
        self.power *= &self.scale;
        self.n += 1;
        let value = reduce_over_power(&q, &self.power, self.scale_primes.as_deref());
        self.window.push(q);
        if self.window.len() > 2 * r + 64 {
            self.window.drain(..self.window.len() - r);
        }
        Some(value)
    }
}

/// Prime factors of `s` when it factors by trial division up to 10^6.
fn small_prime_factors(s: &BigInt) -> Option<Vec<BigInt>> {
    let mut m = s.to_u64()?;
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= m {
        if q > 1_000_000 {
            return None;
        }
        if m % q == 0 {
            out.push(BigInt::from(q));
            while m % q == 0 {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        out.push(BigInt::from(m));
    }
    Some(out)
}

/// `b / s^n` in lowest terms. Dividing out the few shared prime factors is
/// much cheaper than a full gcd of two long integers.
fn reduce_over_power(b: &BigInt, power: &BigInt, primes: Option<&[BigInt]>) -> BigRational {
    let Some(primes) = primes else {
        return BigRational::new(b.clone(), power.clone());
    };
    if b.is_zero() {
        return BigRational::zero();
    }
    let (mut num, mut den) = (b.clone(), power.clone());
    for q in primes {
        loop {
            let (nq, nr) = num.div_rem(q);
            if !nr.is_zero() {
                break;
            }
            let (dq, dr) = den.div_rem(q);
            if !dr.is_zero() {
                break;
            }
            num = nq;
            den = dq;
        }
    }
    BigRational::new_raw(num, den)
}

/// One `(order, degree)` cell of the search grid.
struct Cell {
    order: usize,
    degree: usize,
    unknowns: usize,
    rows: usize,
}

impl Cell {
    fn new(order: usize, degree: usize, fit_len: usize) -> Self {
        let unknowns = (order + 1) * (degree + 1);
        let rows = (fit_len - order).min(unknowns + EXTRA_ROWS);
        Self {
            order,
            degree,
            unknowns,
            rows,
        }
    }

    /// Kernel vector mod `p` normalized by its last free column, together
    /// with the pivot columns, or `None` when the kernel is trivial.
    fn kernel_mod(&self, residues: &[u64], first: u64, p: u64) -> Option<(Vec<usize>, Vec<u64>)> {
        let cols = self.unknowns;
        let md = Modulus::new(p);
        let mut m = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            let n = (first + i as u64) % p;
            for j in 0..=self.order {
                let mut x = residues[i + j];
                for _ in 0..=self.degree {
                    m.push(x);
                    x = md.mul(x, n);
                }
            }
        }
        let pivots = echelon_mod(&mut m, self.rows, cols, md);
        if pivots.len() == cols {
            return None;
        }
        let free = (0..cols).rev().find(|c| !pivots.contains(c)).unwrap();
        // back substitution with the other free columns set to zero
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for (i, &pc) in pivots.iter().enumerate().rev() {
            let row = &m[i * cols..(i + 1) * cols];
            let mut acc = 0u64;
            for k in pc + 1..cols {
                acc = md.reduce(acc + md.mul(row[k], v[k]));
            }
            v[pc] = (p - acc) % p;
        }
        Some((pivots, v))
    }

    /// Integer kernel vector with content 1, lifted from modular images.
    ///
    /// A lift is attempted whenever the number of primes has grown by a
    /// quarter; it is accepted once the next prime's image agrees with it and
    /// it holds exactly on the fitting rows.
    fn exact_kernel(&self, values: &[BigRational], first: u64, primes: &mut PrimeStream) -> Option<Vec<BigInt>> {
        let mut modulus = BigInt::one();
        let mut combined: Vec<BigInt> = Vec::new();
        let mut reference: Option<Vec<usize>> = None;
        let mut candidate: Option<Vec<BigInt>> = None;
        let mut used = 0usize;
        let mut next_attempt = 1usize;
        while used < MAX_PRIMES {
            let (p, residues) = primes.next_usable(values);
            let Some((pivots, v)) = self.kernel_mod(&residues, first, p) else {
                // full rank mod p means full rank over Q
                return None;
            };
            match &reference {
                // more pivots than before: the earlier primes were unlucky
                Some(r) if pivots.len() > r.len() || (pivots.len() == r.len() && &pivots != r) => {
                    modulus = BigInt::one();
                    combined.clear();
                    candidate = None;
                    used = 0;
                    next_attempt = 1;
                }
                Some(r) if pivots.len() < r.len() => continue,
                _ => {}
            }
            let free = (0..v.len()).rev().find(|c| !pivots.contains(c)).unwrap();
            reference = Some(pivots);
            if let Some(lift) = candidate.take() {
                if agrees_mod(&lift, &v, free, p) && self.holds_on_fit(&lift, values, first) {
                    return Some(lift);
                }
            }
            let pb = BigInt::from(p);
            if combined.is_empty() {
                combined = v.iter().map(|&x| BigInt::from(x)).collect();
            } else {
                // x ≡ combined (mod M), x ≡ v (mod p)
                let m_inv = BigInt::from(inv_mod((&modulus % &pb).to_u64().unwrap(), p));
                for (c, &vi) in combined.iter_mut().zip(&v) {
                    let diff = (BigInt::from(vi) - (&*c % &pb)).mod_floor(&pb);
                    let t = (diff * &m_inv) % &pb;
                    *c += &modulus * t;
                }
            }
            modulus *= &pb;
            used += 1;
            if used >= next_attempt {
                next_attempt = used + used.div_ceil(4);
                candidate = lift_kernel(&combined, &modulus);
            }
        }
        log::warn!(
            "order {} degree {}: kernel did not stabilize within {MAX_PRIMES} primes",
            self.order,
            self.degree
        );
        None
    }

    fn holds_on_fit(&self, kernel: &[BigInt], values: &[BigRational], first: u64) -> bool {
        let coeffs: Vec<Vec<BigInt>> = kernel.chunks(self.degree + 1).map(<[BigInt]>::to_vec).collect();
        let rec = Recurrence {
            coeffs,
            initial_values: Vec::new(),
            offset: first,
            fit_terms: 0,
            verified_through: 0,
        };
        values[..self.rows + self.order]
            .windows(self.order + 1)
            .enumerate()
            .all(|(i, w)| rec.residual(first + i as u64, w).is_zero())
    }
}

/// Whether `lift` is proportional to the kernel image `v` (normalized to 1 at
/// `free`) modulo `p`.
fn agrees_mod(lift: &[BigInt], v: &[u64], free: usize, p: u64) -> bool {
    let pb = BigInt::from(p);
    let md = Modulus::new(p);
    let scale = lift[free].mod_floor(&pb).to_u64().unwrap();
    lift.iter()
        .zip(v)
        .all(|(l, &vi)| l.mod_floor(&pb).to_u64().unwrap() == md.mul(scale, vi))
}

/// Rational reconstruction of every entry, then cleared denominators and
/// content removed.
fn lift_kernel(residues: &[BigInt], modulus: &BigInt) -> Option<Vec<BigInt>> {
    let bound = (modulus >> 1u32).sqrt();
    let mut fracs = Vec::with_capacity(residues.len());
    for a in residues {
        fracs.push(rational_reconstruction(a, modulus, &bound)?);
    }
    let lcm = fracs.iter().fold(BigInt::one(), |l, (_, d)| l.lcm(d));
    let mut ints: Vec<BigInt> = fracs.into_iter().map(|(n, d)| n * (&lcm / d)).collect();
    let content = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if content.is_zero() {
        return None;
    }
    for x in &mut ints {
        *x /= &content;
    }
    Some(ints)
}

/// `n/d ≡ a (mod m)` with `|n|, d ≤ bound`, if it exists.
fn rational_reconstruction(a: &BigInt, m: &BigInt, bound: &BigInt) -> Option<(BigInt, BigInt)> {
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || &t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

/// A prime below `2^30` with a precomputed Barrett constant.
#[derive(Debug, Clone, Copy)]
struct Modulus {
    p: u64,
    /// `floor(2^64 / p)`
    m: u64,
}

impl Modulus {
    fn new(p: u64) -> Self {
        Self {
            p,
            m: (u128::from(u64::MAX) + 1).div_euclid(u128::from(p)) as u64,
        }
    }

    /// `x mod p` for any `x < 2^64`.
    #[inline]
    fn reduce(self, x: u64) -> u64 {
        let q = ((u128::from(x) * u128::from(self.m)) >> 64) as u64;
        let r = x - q * self.p;
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    #[inline]
    fn mul(self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }
}

/// Row echelon form in place with unit pivots; returns the pivot column of
/// each nonzero row, in order.
///
/// Updates below the pivot are accumulated unreduced: with `p < 2^30` a
/// `u64` absorbs 16 products before it has to be reduced.
fn echelon_mod(m: &mut [u64], rows: usize, cols: usize, md: Modulus) -> Vec<usize> {
    const LAZY: usize = 16;
    let p = md.p;
    debug_assert!(p < 1 << 30);
    let mut pivots = Vec::new();
    let mut pivot_row = vec![0u32; cols];
    let mut pending = 0;
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        if pending == LAZY {
            for x in &mut m[row * cols..] {
                *x = md.reduce(*x);
            }
            pending = 0;
        }
        let Some(pr) = (row..rows).find(|&i| {
            let x = &mut m[i * cols + col];
            *x = md.reduce(*x);
            *x != 0
        }) else {
            continue;
        };
        if pr != row {
            for k in 0..cols {
                m.swap(pr * cols + k, row * cols + k);
            }
        }
        let inv = inv_mod(m[row * cols + col], p);
        for k in col..cols {
            let x = md.mul(md.reduce(m[row * cols + k]), inv);
            m[row * cols + k] = x;
            pivot_row[k] = x as u32;
        }
        let (_, below) = m.split_at_mut((row + 1) * cols);
        for other in below.chunks_mut(cols) {
            let f = md.reduce(other[col]);
            if f == 0 {
                continue;
            }
            let g = (p - f) as u32;
            for (o, &pv) in other[col..].iter_mut().zip(&pivot_row[col..]) {
                *o += u64::from(g) * u64::from(pv);
            }
        }
        pending += 1;
        pivots.push(col);
        row += 1;
    }
    pivots
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Primes below `2^30` in decreasing order, so sixteen products of residues
/// fit in a `u64`.
struct PrimeStream {
    next: u64,
}

impl PrimeStream {
    fn new() -> Self {
        Self { next: (1 << 30) - 1 }
    }

    fn next_prime(&mut self) -> u64 {
        loop {
            let c = self.next;
            self.next -= 2;
            if is_prime(c) {
                return c;
            }
        }
    }

    /// Next prime dividing no denominator, with the residues of `values`.
    fn next_usable(&mut self, values: &[BigRational]) -> (u64, Vec<u64>) {
        'primes: loop {
            let p = self.next_prime();
            let pb = BigInt::from(p);
            let mut out = Vec::with_capacity(values.len());
            for v in values {
                let d = (v.denom() % &pb).to_u64().unwrap();
                if d == 0 {
                    continue 'primes;
                }
                let n = v.numer().mod_floor(&pb).to_u64().unwrap();
                out.push(n * inv_mod(d, p) % p);
            }
            return (p, out);
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
