//! Exact arithmetic in the residue ring `Z/2^d` for arbitrary `d`.
//!
//! Residues are always stored fully reduced. Besides the ring operations the
//! module provides the 2-adic valuation, division by non-units and three
//! algorithms for inverting odd residues, each able to report an estimate of
//! the work it performed through an [`OpCounter`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Largest operand accepted by [`inv_small`]; its Newton step works with
/// `2a` bits of precision.
pub const SMALL_INVERSE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("the 2-adic valuation of zero is undefined")]
    ZeroValuation,
    #[error("{value} is even and has no inverse modulo 2^{width}")]
    NotInvertible { value: BigUint, width: u32 },
    #[error("{dividend} is not divisible by {divisor} modulo 2^{width}")]
    NotDivisible {
        dividend: BigUint,
        divisor: BigUint,
        width: u32,
    },
    #[error("width mismatch: 2^{0} vs 2^{1}")]
    WidthMismatch(u32, u32),
    #[error("operand {0} exceeds the small-operand inverse limit")]
    OperandTooLarge(BigUint),
}

/// An element of `Z/2^width`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueInt {
    value: BigUint,
    width: u32,
}

fn mask_to(value: BigUint, width: u32) -> BigUint {
    if value.bits() <= u64::from(width) {
        value
    } else {
        value & ((BigUint::one() << width) - 1u32)
    }
}

/// `2^width` as an integer.
pub fn modulus(width: u32) -> BigUint {
    BigUint::one() << width
}

impl ResidueInt {
    pub fn new(value: BigUint, width: u32) -> Self {
        assert!(width > 0, "residue width must be positive");
        ResidueInt {
            value: mask_to(value, width),
            width,
        }
    }

    pub fn from_u64(value: u64, width: u32) -> Self {
        Self::new(BigUint::from(value), width)
    }

    /// Reduces an arbitrary (possibly negative) integer.
    pub fn from_bigint(value: &BigInt, width: u32) -> Self {
        let m = BigInt::from(modulus(width));
        let r = value.mod_floor(&m);
        Self::new(r.to_biguint().expect("mod_floor is nonnegative"), width)
    }

    pub fn from_i64(value: i64, width: u32) -> Self {
        Self::from_bigint(&BigInt::from(value), width)
    }

    pub fn zero(width: u32) -> Self {
        Self::new(BigUint::zero(), width)
    }

    pub fn one(width: u32) -> Self {
        Self::new(BigUint::one(), width)
    }

    /// `2^k` reduced modulo `2^width` (zero once `k >= width`).
    pub fn pow2(k: u32, width: u32) -> Self {
        if k >= width {
            Self::zero(width)
        } else {
            Self::new(BigUint::one() << k, width)
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn into_value(self) -> BigUint {
        self.value
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    pub fn is_odd(&self) -> bool {
        self.value.bit(0)
    }

    /// The representative in `(-2^(d-1), 2^(d-1)]`.
    pub fn to_signed(&self) -> BigInt {
        let half = BigUint::one() << (self.width - 1);
        if self.value > half {
            BigInt::from(self.value.clone()) - BigInt::from(modulus(self.width))
        } else {
            BigInt::from(self.value.clone())
        }
    }

    /// Largest `k` with `2^k | self`.
    pub fn nu2(&self) -> Result<u32, RingError> {
        self.value
            .trailing_zeros()
            .map(|k| k as u32)
            .ok_or(RingError::ZeroValuation)
    }

    /// Splits a nonzero residue as `2^k * s` with `s` odd.
    pub fn split_odd(&self) -> Result<(u32, ResidueInt), RingError> {
        let k = self.nu2()?;
        Ok((k, ResidueInt::new(&self.value >> k, self.width)))
    }

    pub fn shl(&self, k: u32) -> ResidueInt {
        if k >= self.width {
            ResidueInt::zero(self.width)
        } else {
            ResidueInt::new(&self.value << k, self.width)
        }
    }

    pub fn pow(&self, mut e: u32) -> ResidueInt {
        let mut base = self.clone();
        let mut acc = ResidueInt::one(self.width);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn checked_add(&self, other: &ResidueInt) -> Result<ResidueInt, RingError> {
        self.same_width(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &ResidueInt) -> Result<ResidueInt, RingError> {
        self.same_width(other)?;
        Ok(self * other)
    }

    fn same_width(&self, other: &ResidueInt) -> Result<(), RingError> {
        if self.width == other.width {
            Ok(())
        } else {
            Err(RingError::WidthMismatch(self.width, other.width))
        }
    }
}

impl fmt::Debug for ResidueInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[2^{}]", self.value, self.width)
    }
}

impl fmt::Display for ResidueInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl<'a> Add<&'a ResidueInt> for &'a ResidueInt {
    type Output = ResidueInt;
    fn add(self, rhs: &ResidueInt) -> ResidueInt {
        assert_eq!(self.width, rhs.width, "residue width mismatch");
        ResidueInt::new(&self.value + &rhs.value, self.width)
    }
}

impl<'a> Sub<&'a ResidueInt> for &'a ResidueInt {
    type Output = ResidueInt;
    fn sub(self, rhs: &ResidueInt) -> ResidueInt {
        assert_eq!(self.width, rhs.width, "residue width mismatch");
        if self.value >= rhs.value {
            ResidueInt::new(&self.value - &rhs.value, self.width)
        } else {
            ResidueInt::new(modulus(self.width) + &self.value - &rhs.value, self.width)
        }
    }
}

impl<'a> Mul<&'a ResidueInt> for &'a ResidueInt {
    type Output = ResidueInt;
    fn mul(self, rhs: &ResidueInt) -> ResidueInt {
        assert_eq!(self.width, rhs.width, "residue width mismatch");
        ResidueInt::new(&self.value * &rhs.value, self.width)
    }
}

impl Neg for &ResidueInt {
    type Output = ResidueInt;
    fn neg(self) -> ResidueInt {
        if self.value.is_zero() {
            self.clone()
        } else {
            ResidueInt::new(modulus(self.width) - &self.value, self.width)
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<ResidueInt> for ResidueInt {
            type Output = ResidueInt;
            fn $m(self, rhs: ResidueInt) -> ResidueInt {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ResidueInt {
    type Output = ResidueInt;
    fn neg(self) -> ResidueInt {
        -&self
    }
}

/// Operation tally for the inverse algorithms.
///
/// `bin_ops` follows a schoolbook model: multiplying or dividing two `b`-bit
/// numbers costs `2 b^2`, adding or subtracting costs `2 b`, a shift costs `b`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub arith_ops: u64,
    pub bin_ops: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    fn mul(&mut self, bits: u64) {
        self.arith_ops += 1;
        self.bin_ops += 2 * bits * bits;
    }

    fn div(&mut self, bits: u64) {
        self.mul(bits);
    }

    fn add(&mut self, bits: u64) {
        self.arith_ops += 1;
        self.bin_ops += 2 * bits;
    }

    fn binary(&mut self, ops: u64) {
        self.bin_ops += ops;
    }
}

fn require_odd(a: &ResidueInt) -> Result<(), RingError> {
    if a.is_odd() {
        Ok(())
    } else {
        Err(RingError::NotInvertible {
            value: a.value.clone(),
            width: a.width,
        })
    }
}

/// Extended Euclid on integers: returns `(g, s, t)` with `s*x + t*y = g`.
fn ext_gcd(x: &BigInt, y: &BigInt, counter: &mut OpCounter) -> (BigInt, BigInt, BigInt) {
    let bits = x.bits().max(y.bits()).max(1);
    let (mut r0, mut r1) = (x.clone(), y.clone());
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = r0.div_floor(&r1);
        counter.div(bits);
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        let t2 = &t0 - &q * &t1;
        // one division, two multiplications, two subtractions per round
        counter.mul(bits);
        counter.mul(bits);
        counter.add(bits);
        counter.add(bits);
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    (r0, s0, t0)
}

/// Inverse of an odd residue through the extended Euclidean algorithm on
/// `(a, 2^d)`.
pub fn inv_euclid(a: &ResidueInt) -> Result<ResidueInt, RingError> {
    inv_euclid_counted(a, &mut OpCounter::new())
}

pub fn inv_euclid_counted(
    a: &ResidueInt,
    counter: &mut OpCounter,
) -> Result<ResidueInt, RingError> {
    require_odd(a)?;
    let (g, s, _) = ext_gcd(
        &BigInt::from(a.value.clone()),
        &BigInt::from(modulus(a.width)),
        counter,
    );
    debug_assert!(g.is_one());
    Ok(ResidueInt::from_bigint(&s, a.width))
}

/// Inverse of an odd residue via the product `(2 - a) * prod (1 + (a-1)^(2^i))`.
pub fn inv_hensel(a: &ResidueInt) -> Result<ResidueInt, RingError> {
    inv_hensel_counted(a, &mut OpCounter::new())
}

pub fn inv_hensel_counted(
    a: &ResidueInt,
    counter: &mut OpCounter,
) -> Result<ResidueInt, RingError> {
    require_odd(a)?;
    let d = a.width;
    let bits = u64::from(d);
    let one = ResidueInt::one(d);
    let b = &a.clone() - &one;
    if b.is_zero() {
        return Ok(one);
    }
    // (1 - b)(1 + b^2)(1 + b^4)... = (1 - b^(2^n)) / (1 + b); stop once
    // nu2(b) * 2^n >= d.
    let s = b.nu2()?;
    let mut acc = &one - &b;
    counter.add(bits);
    let mut power = b;
    let mut reach = u64::from(s);
    while reach < u64::from(d) {
        power = &power * &power;
        counter.mul(bits);
        counter.binary(bits);
        let factor = &one + &power;
        counter.add(bits);
        acc = &acc * &factor;
        counter.mul(bits);
        counter.binary(bits);
        reach *= 2;
    }
    Ok(acc)
}

/// Inverse of a small odd residue `a` by inverting `2^d` modulo `a`.
///
/// Works over `Z_a` for everything except the final combination, so the cost
/// is dominated by `log a` rather than by `d`.
pub fn inv_small(a: &ResidueInt, counter: &mut OpCounter) -> Result<ResidueInt, RingError> {
    require_odd(a)?;
    if a.is_one() {
        return Ok(a.clone());
    }
    let av = a
        .value
        .to_u64()
        .filter(|&v| v < SMALL_INVERSE_LIMIT)
        .ok_or_else(|| RingError::OperandTooLarge(a.value.clone()))?;
    let d = a.width;

    let r = pow2_mod(d, av, counter);
    let f = floor_pow2_div(d, av, counter);
    let (k1, k2) = bezout_minus_one(r, av, counter);

    // a * (k1*f - k2) = k1*(2^d - r) - k2*a = k1*2^d + 1
    let bits = u64::from(d);
    let combined = BigInt::from(k1) * BigInt::from(f) - BigInt::from(k2);
    counter.mul(bits);
    counter.add(bits);
    Ok(ResidueInt::from_bigint(&combined, d))
}

/// `2^d mod a` by square-and-multiply over `Z_a`.
fn pow2_mod(d: u32, a: u64, counter: &mut OpCounter) -> u64 {
    let bits = u64::from(64 - a.leading_zeros());
    let mut r: u64 = 1 % a;
    for i in (0..32 - d.leading_zeros()).rev() {
        r = r * r;
        counter.mul(bits);
        r %= a;
        counter.div(bits);
        if (d >> i) & 1 == 1 {
            r <<= 1;
            counter.binary(bits);
            if r >= a {
                r -= a;
                counter.add(bits);
            }
        }
    }
    r
}

/// `floor(2^d / a)` for odd `a >= 3`: Newton iteration for `1/a` to `2a`
/// fractional bits, repetend detection, then extension of the repetend to `d`
/// bits.
fn floor_pow2_div(d: u32, a: u64, counter: &mut OpCounter) -> BigUint {
    let precision = 2 * a;
    let ceil_log = u64::from(64 - (a - 1).leading_zeros());
    let pbits = precision + 2;
    let a_big = BigUint::from(a);
    let two_p1 = BigUint::one() << (precision + 1);

    // x_{n+1} = x_n (2 - a x_n), in fixed point with `precision` bits.
    let mut x = BigUint::one() << (precision - ceil_log);
    for _ in 0..=ceil_log {
        let ax = &x * &a_big;
        counter.mul(pbits);
        let correction = &two_p1 - &ax;
        counter.add(pbits);
        x = (&x * &correction) >> precision;
        counter.mul(pbits);
        counter.binary(pbits);
    }
    // Truncation keeps x at or just below 2^P / a; settle on the floor.
    let target = BigUint::one() << precision;
    while &x * &a_big > target {
        x -= 1u32;
        counter.mul(pbits);
        counter.add(pbits);
    }
    while (&x + 1u32) * &a_big <= target {
        x += 1u32;
        counter.mul(pbits);
        counter.add(pbits);
    }

    if u64::from(d) <= precision {
        counter.binary(pbits);
        return x >> (precision - u64::from(d));
    }

    let period = repetend_length(&x, precision, counter);
    let block = &x >> (precision - period);
    counter.binary(pbits);
    let mut repeated = block.clone();
    let mut len = period;
    while len < u64::from(d) {
        repeated = (&repeated << len) | &repeated;
        len *= 2;
        counter.binary(2 * len);
    }
    counter.binary(len);
    repeated >> (len - u64::from(d))
}

/// Smallest `i` such that the `len`-bit expansion in `bits` is `i`-periodic,
/// found by comparing the expansion with its own shift.
fn repetend_length(bits: &BigUint, len: u64, counter: &mut OpCounter) -> u64 {
    for i in 1..len {
        let tail = bits >> i;
        let head = bits & ((BigUint::one() << (len - i)) - 1u32);
        counter.binary(2 * len);
        if tail == head {
            return i;
        }
    }
    len
}

/// Integers `k1, k2` with `k1*r + k2*a = -1`.
fn bezout_minus_one(r: u64, a: u64, counter: &mut OpCounter) -> (i64, i64) {
    let (g, s, t) = ext_gcd(&BigInt::from(r), &BigInt::from(a), counter);
    debug_assert!(g.is_one());
    let to_i64 = |v: BigInt| v.to_i64().expect("Bezout coefficients are bounded by a");
    (-to_i64(s), -to_i64(t))
}

/// Which inverse routine [`ring_div_with`] uses for the odd part of the divisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisionConfig {
    /// Odd parts below this bound are candidates for [`inv_small`].
    pub small_limit: u64,
    /// ... provided the width is at least this multiple of their bit length.
    pub width_factor: u32,
}

impl Default for DivisionConfig {
    fn default() -> Self {
        DivisionConfig {
            small_limit: 1 << 16,
            width_factor: 4,
        }
    }
}

impl DivisionConfig {
    pub fn prefers_small(&self, odd: &ResidueInt) -> bool {
        match odd.value.to_u64() {
            Some(v) => {
                let bitlen = 64 - v.leading_zeros();
                v < self.small_limit && odd.width >= self.width_factor * bitlen
            }
            None => false,
        }
    }
}

/// Inverse of an odd residue, dispatching on [`DivisionConfig`].
pub fn inverse_with(a: &ResidueInt, config: &DivisionConfig) -> Result<ResidueInt, RingError> {
    if config.prefers_small(a) {
        inv_small(a, &mut OpCounter::new())
    } else {
        inv_hensel(a)
    }
}

/// Some `q` with `q * b = a`, if one exists.
pub fn ring_div(a: &ResidueInt, b: &ResidueInt) -> Result<ResidueInt, RingError> {
    ring_div_with(a, b, &DivisionConfig::default())
}

pub fn ring_div_with(
    a: &ResidueInt,
    b: &ResidueInt,
    config: &DivisionConfig,
) -> Result<ResidueInt, RingError> {
    a.same_width(b)?;
    if a.is_zero() {
        return Ok(a.clone());
    }
    let not_divisible = || RingError::NotDivisible {
        dividend: a.value.clone(),
        divisor: b.value.clone(),
        width: a.width,
    };
    if b.is_zero() {
        return Err(not_divisible());
    }
    let (ka, sa) = a.split_odd()?;
    let (kb, sb) = b.split_odd()?;
    if kb > ka {
        return Err(not_divisible());
    }
    let inv = inverse_with(&sb, config)?;
    Ok((&sa * &inv).shl(ka - kb))
}
