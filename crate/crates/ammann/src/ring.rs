//! Exact arithmetic in `Z[ψ]`, where `ψ⁴ + ψ² = 1`, and its fraction field.
//!
//! Every coordinate and length in a tiling is an element of `Z[ψ]`: the
//! positive root `ψ ≈ 0.7861513778` is a unit (`ψ⁻¹ = ψ + ψ³`), so scaling by
//! any power of `ψ` stays inside the ring. Signs are decided exactly, so every
//! geometric predicate built on top of this module is free of rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;

/// `c0 + c1·ψ + c2·ψ² + c3·ψ³` in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RingElem {
    c: [BigInt; 4],
}

/// Sign of `p + q·g` with `g = (√5 − 1)/2`.
fn sign_golden(p: &BigInt, q: &BigInt) -> i32 {
    // 2(p + q g) = (2p − q) + q √5
    let a: BigInt = p * 2 - q;
    sign_sqrt5(&a, q)
}

/// Sign of `a + b·√5`.
fn sign_sqrt5(a: &BigInt, b: &BigInt) -> i32 {
    let sa = signum(a);
    let sb = signum(b);
    if sa == 0 {
        return sb;
    }
    if sb == 0 || sa == sb {
        return sa;
    }
    let lhs = a * a;
    let rhs = b * b * 5;
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => 0,
    }
}

fn signum(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl RingElem {
    pub fn new(c0: impl Into<BigInt>, c1: impl Into<BigInt>, c2: impl Into<BigInt>, c3: impl Into<BigInt>) -> Self {
        RingElem {
            c: [c0.into(), c1.into(), c2.into(), c3.into()],
        }
    }

    pub fn from_coeffs(c: [BigInt; 4]) -> Self {
        RingElem { c }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        RingElem::new(n, 0, 0, 0)
    }

    /// The generator `ψ`.
    pub fn psi() -> Self {
        RingElem::new(0, 1, 0, 0)
    }

    /// `ψᵏ` for any integer `k`.
    pub fn psi_pow(k: i64) -> Self {
        Self::one().scale_pow(k)
    }

    pub fn coeffs(&self) -> &[BigInt; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// True when the value is a rational integer (no `ψ` terms).
    pub fn as_integer(&self) -> Option<&BigInt> {
        if self.c[1..].iter().all(Zero::is_zero) {
            Some(&self.c[0])
        } else {
            None
        }
    }

    /// Multiplication by `ψ`.
    fn mul_psi(&self) -> Self {
        // ψ·(c0 + c1ψ + c2ψ² + c3ψ³) = c0ψ + c1ψ² + c2ψ³ + c3ψ⁴, ψ⁴ = 1 − ψ²
        let [c0, c1, c2, c3] = &self.c;
        RingElem::from_coeffs([c3.clone(), c0.clone(), c1 - c3, c2.clone()])
    }

    /// Multiplication by `ψ⁻¹ = ψ + ψ³`.
    fn div_psi(&self) -> Self {
        // Solve ψ·y = x for y = (y0, y1, y2, y3): x = (y3, y0, y1 − y3, y2).
        let [x0, x1, x2, x3] = &self.c;
        let y3 = x0.clone();
        let y0 = x1.clone();
        let y1 = x2 + &y3;
        let y2 = x3.clone();
        RingElem::from_coeffs([y0, y1, y2, y3])
    }

    /// `x·ψᵏ`, exact for negative `k` as well.
    pub fn scale_pow(&self, k: i64) -> Self {
        let mut out = self.clone();
        if k >= 0 {
            for _ in 0..k {
                out = out.mul_psi();
            }
        } else {
            for _ in 0..(-k) {
                out = out.div_psi();
            }
        }
        out
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        RingElem::from_coeffs([&self.c[0] * n, &self.c[1] * n, &self.c[2] * n, &self.c[3] * n])
    }

    /// Sign of the real value at `ψ ≈ 0.786`, decided exactly.
    pub fn sign(&self) -> i32 {
        // x = A + Bψ with A = c0 + c2 g, B = c1 + c3 g and g = ψ².
        let [c0, c1, c2, c3] = &self.c;
        let sa = sign_golden(c0, c2);
        let sb = sign_golden(c1, c3);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // Mixed signs: compare A² with g·B², both in Z[g].
        let (a2p, a2q) = golden_square(c0, c2);
        let (b2p, b2q) = golden_square(c1, c3);
        // g·(p + q g) = q + (p − q) g   since g² = 1 − g
        let gb_p = b2q.clone();
        let gb_q = &b2p - &b2q;
        let diff = sign_golden(&(a2p - gb_p), &(a2q - gb_q));
        match diff {
            1 => sa,
            -1 => sb,
            _ => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    /// Exact comparison of real values.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match (self - other).sign() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn min_value(a: &Self, b: &Self) -> Self {
        if a.cmp_value(b) == Ordering::Greater {
            b.clone()
        } else {
            a.clone()
        }
    }

    pub fn max_value(a: &Self, b: &Self) -> Self {
        if a.cmp_value(b) == Ordering::Less {
            b.clone()
        } else {
            a.clone()
        }
    }

    /// Value at `-ψ`, one of the Galois conjugates.
    fn conj_neg_psi(&self) -> Self {
        let [c0, c1, c2, c3] = &self.c;
        RingElem::from_coeffs([c0.clone(), -c1, c2.clone(), -c3])
    }

    /// `(N, y)` with `x·y = N`, `N` a non-zero integer. None for zero.
    pub(crate) fn rationalizer(&self) -> Option<(BigInt, RingElem)> {
        if self.is_zero() {
            return None;
        }
        let conj = self.conj_neg_psi();
        // x·x(−ψ) = A² − g B² lies in Z[g] = span{1, ψ²}.
        let c = self * &conj;
        debug_assert!(c.c[1].is_zero() && c.c[3].is_zero());
        let (p, q) = (c.c[0].clone(), c.c[2].clone());
        // σ(p + q g) = (p − q) − q g,  g' = −1 − g
        let sp = &p - &q;
        let sq = -q.clone();
        let sigma = RingElem::from_coeffs([sp, BigInt::zero(), sq, BigInt::zero()]);
        let y = &conj * &sigma;
        let n = &c * &sigma;
        let n = n.as_integer().cloned().expect("norm is rational");
        Some((n, y))
    }

    /// Floating point estimate; predicates never rely on it.
    pub fn to_f64(&self) -> f64 {
        let psi = psi_f64();
        let mut acc = 0.0;
        let mut p = 1.0;
        for c in &self.c {
            acc += bigint_to_f64(c) * p;
            p *= psi;
        }
        acc
    }

    /// `floor(x)` as an integer, computed exactly.
    pub fn floor(&self) -> BigInt {
        let bound: BigInt = self.c.iter().map(|c| c.abs()).sum::<BigInt>() + 1;
        let mut lo = -bound.clone();
        let mut hi = bound;
        // invariant: lo <= x < hi
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
            if (self - &RingElem::from_coeffs([mid.clone(), Zero::zero(), Zero::zero(), Zero::zero()])).sign() >= 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Decimal string correctly rounded to `digits` places after the point.
    pub fn approx(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let scale = num_traits::pow(BigInt::from(10), digits);
        // round(x·10^d) = floor(floor(2·x·10^d + 1) / 2)
        let twice = self.mul_int(&(scale.clone() * 2)) + RingElem::one();
        let n = twice.floor().div_floor(&BigInt::from(2));
        format_fixed(&n, digits)
    }
}

pub(crate) fn format_fixed(n: &BigInt, digits: usize) -> String {
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let body = if digits == 0 {
        s
    } else if s.len() <= digits {
        format!("0.{}{}", "0".repeat(digits - s.len()), s)
    } else {
        let (int, frac) = s.split_at(s.len() - digits);
        format!("{int}.{frac}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// `(p + q g)²` in Z[g], returned as `(p', q')`.
fn golden_square(p: &BigInt, q: &BigInt) -> (BigInt, BigInt) {
    // (p + q g)² = p² + 2pq g + q² g², g² = 1 − g
    let q2 = q * q;
    (p * p + &q2, p * q * 2 - q2)
}

pub(crate) fn bigint_to_f64(x: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn psi_f64() -> f64 {
    ((5.0_f64.sqrt() - 1.0) / 2.0).sqrt()
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (≈{:.6})", self.to_f64())
    }
}

/// Textual form `a+b*p+c*p^2+d*p^3`; all four terms are always written.
impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [c0, c1, c2, c3] = &self.c;
        write!(f, "{c0}")?;
        for (c, suffix) in [(c1, "*p"), (c2, "*p^2"), (c3, "*p^3")] {
            if c.is_negative() {
                write!(f, "{c}{suffix}")?;
            } else {
                write!(f, "+{c}{suffix}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for RingElem {
    type Err = ParseError;

    /// Accepts any sum of terms `n`, `n*p`, `n*p^k`, `p^k` (0 ≤ k ≤ 3), e.g.
    /// `1-2*p^2` or `0+1*p+0*p^2+0*p^3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || ParseError::new(format!("bad ring element `{s}`"));
        if text.is_empty() {
            return Err(bad());
        }
        let mut coeffs: [BigInt; 4] = Default::default();
        let mut rest = text.as_str();
        while !rest.is_empty() {
            let (negative, body) = match rest.as_bytes()[0] {
                b'-' => (true, &rest[1..]),
                b'+' => (false, &rest[1..]),
                _ => (false, rest),
            };
            let end = body.find(['+', '-']).unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            let (coef, power) = match term.split_once('p') {
                None => (term, "^0"),
                Some((c, pow)) => (c.strip_suffix('*').unwrap_or(c), if pow.is_empty() { "^1" } else { pow }),
            };
            let mut value: BigInt = if coef.is_empty() {
                BigInt::one()
            } else {
                coef.parse().map_err(|_| bad())?
            };
            if negative {
                value = -value;
            }
            let k = match power {
                "^0" => 0,
                "^1" => 1,
                "^2" => 2,
                "^3" => 3,
                _ => return Err(bad()),
            };
            if term.is_empty() {
                return Err(bad());
            }
            coeffs[k] += value;
        }
        Ok(RingElem::from_coeffs(coeffs))
    }
}

impl From<i64> for RingElem {
    fn from(n: i64) -> Self {
        RingElem::from_int(n)
    }
}

impl<'a> Add<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn add(self, rhs: &RingElem) -> RingElem {
        RingElem::from_coeffs([
            &self.c[0] + &rhs.c[0],
            &self.c[1] + &rhs.c[1],
            &self.c[2] + &rhs.c[2],
            &self.c[3] + &rhs.c[3],
        ])
    }
}

impl Add for RingElem {
    type Output = RingElem;
    fn add(self, rhs: RingElem) -> RingElem {
        &self + &rhs
    }
}

impl AddAssign<&RingElem> for RingElem {
    fn add_assign(&mut self, rhs: &RingElem) {
        for i in 0..4 {
            self.c[i] += &rhs.c[i];
        }
    }
}

impl<'a> Sub<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn sub(self, rhs: &RingElem) -> RingElem {
        RingElem::from_coeffs([
            &self.c[0] - &rhs.c[0],
            &self.c[1] - &rhs.c[1],
            &self.c[2] - &rhs.c[2],
            &self.c[3] - &rhs.c[3],
        ])
    }
}

impl Sub for RingElem {
    type Output = RingElem;
    fn sub(self, rhs: RingElem) -> RingElem {
        &self - &rhs
    }
}

impl SubAssign<&RingElem> for RingElem {
    fn sub_assign(&mut self, rhs: &RingElem) {
        for i in 0..4 {
            self.c[i] -= &rhs.c[i];
        }
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem::from_coeffs([-&self.c[0], -&self.c[1], -&self.c[2], -&self.c[3]])
    }
}

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        -&self
    }
}

impl<'a> Mul<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn mul(self, rhs: &RingElem) -> RingElem {
        let mut p: [BigInt; 7] = Default::default();
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if !b.is_zero() {
                    p[i + j] += a * b;
                }
            }
        }
        // ψ⁶ = 2ψ² − 1, ψ⁵ = ψ − ψ³, ψ⁴ = 1 − ψ²
        let [p0, p1, p2, p3, p4, p5, p6] = p;
        RingElem::from_coeffs([
            p0 + &p4 - &p6,
            p1 + &p5,
            p2 - &p4 + &p6 * 2,
            p3 - p5,
        ])
    }
}

impl Mul for RingElem {
    type Output = RingElem;
    fn mul(self, rhs: RingElem) -> RingElem {
        &self * &rhs
    }
}

/// An element of `Q(ψ)`, kept as `num / den` with `den` a positive integer
/// coprime to the content of `num`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    num: RingElem,
    den: RingElem,
}

impl FieldElem {
    /// `num / den`; `None` when `den` is zero.
    pub fn new(num: RingElem, den: RingElem) -> Option<Self> {
        let (n, y) = den.rationalizer()?;
        Some(Self::normalized(&num * &y, n))
    }

    fn normalized(num: RingElem, den: BigInt) -> Self {
        let mut g = den.clone();
        for c in num.coeffs() {
            g = g.gcd(c);
        }
        if den.is_negative() {
            g = -g;
        }
        let num = RingElem::from_coeffs(num.c.map(|c| c / &g));
        let den = den / &g;
        FieldElem {
            num,
            den: RingElem::from_coeffs([den, Zero::zero(), Zero::zero(), Zero::zero()]),
        }
    }

    pub fn from_ring(x: RingElem) -> Self {
        FieldElem { num: x, den: RingElem::one() }
    }

    pub fn zero() -> Self {
        Self::from_ring(RingElem::zero())
    }

    pub fn num(&self) -> &RingElem {
        &self.num
    }

    pub fn den(&self) -> &RingElem {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn sign(&self) -> i32 {
        self.num.sign() * self.den.sign()
    }

    /// Equality decided by cross-multiplication; agrees with `==` on
    /// normalized values.
    pub fn same_value(&self, other: &Self) -> bool {
        (&self.num * &other.den) == (&other.num * &self.den)
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match (self - other).sign() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }

    pub fn recip(&self) -> Option<Self> {
        FieldElem::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        Some(self * &other.recip()?)
    }

    pub fn halve(&self) -> Self {
        Self::normalized(self.num.clone(), self.den.as_integer().unwrap() * 2)
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64() / self.den.to_f64()
    }

    /// The value as a ring element when the denominator is one.
    pub fn as_ring(&self) -> Option<&RingElem> {
        (self.den == RingElem::one()).then_some(&self.num)
    }

    pub fn approx(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let d = self.den.as_integer().unwrap();
        let scale = num_traits::pow(BigInt::from(10), digits);
        let twice = self.num.mul_int(&(scale * 2)) + RingElem::from_coeffs([d.clone(), Zero::zero(), Zero::zero(), Zero::zero()]);
        // round(num·10^k / d) = floor((2·num·10^k + d) / (2d))
        let n = twice.floor_div(&(d * 2));
        format_fixed(&n, digits)
    }
}

impl RingElem {
    /// `floor(x / d)` for a positive integer `d`.
    fn floor_div(&self, d: &BigInt) -> BigInt {
        let f = self.floor();
        // x/d lies in [f/d, (f+1)/d); refine exactly.
        let mut q = f.div_floor(d);
        loop {
            let next = &q + 1;
            let probe = self - &RingElem::from_coeffs([&next * d, Zero::zero(), Zero::zero(), Zero::zero()]);
            if probe.sign() >= 0 {
                q = next;
            } else {
                break;
            }
        }
        q
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (≈{:.6})", self.to_f64())
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == RingElem::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/{}", self.num, self.den.coeffs()[0])
        }
    }
}

impl FromStr for FieldElem {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('(') {
            let (num, den) = rest
                .split_once(")/")
                .ok_or_else(|| ParseError::new(format!("bad field element `{s}`")))?;
            let num: RingElem = num.parse()?;
            let den: BigInt = den
                .parse()
                .map_err(|_| ParseError::new(format!("bad denominator in `{s}`")))?;
            FieldElem::new(num, RingElem::from_coeffs([den, Zero::zero(), Zero::zero(), Zero::zero()]))
                .ok_or_else(|| ParseError::new(format!("zero denominator in `{s}`")))
        } else {
            Ok(FieldElem::from_ring(s.parse()?))
        }
    }
}

impl From<RingElem> for FieldElem {
    fn from(x: RingElem) -> Self {
        FieldElem::from_ring(x)
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = (&self.den * &rhs.den).as_integer().unwrap().clone();
        FieldElem::normalized(num, den)
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self + &(-rhs)
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem { num: -&self.num, den: self.den.clone() }
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        let num = &self.num * &rhs.num;
        let den = (&self.den * &rhs.den).as_integer().unwrap().clone();
        FieldElem::normalized(num, den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64, c: i64, d: i64) -> RingElem {
        RingElem::new(a, b, c, d)
    }

    #[test]
    fn psi_squared_squared_reduces() {
        let p2 = RingElem::psi_pow(2);
        assert_eq!(&p2 * &p2, r(1, 0, -1, 0));
    }

    #[test]
    fn psi_is_a_unit() {
        assert_eq!(&RingElem::psi() * &r(0, 1, 0, 1), RingElem::one());
        assert_eq!(RingElem::one().scale_pow(-1), r(0, 1, 0, 1));
        assert_eq!(r(0, 0, 0, 1).scale_pow(2), r(0, 1, 0, -1));
    }

    #[test]
    fn defining_identity_has_sign_zero() {
        let x = &(&RingElem::psi_pow(2) + &RingElem::psi_pow(4)) - &RingElem::one();
        assert!(x.is_zero());
        assert_eq!(x.sign(), 0);
        assert_eq!(RingElem::zero().sign(), 0);
    }

    #[test]
    fn sign_of_small_positive_value() {
        // -1 + ψ² + ψ³ ≈ 0.104
        assert_eq!(r(-1, 0, 1, 1).sign(), 1);
        assert_eq!(r(1, 0, -1, -1).sign(), -1);
    }

    #[test]
    fn approx_is_correctly_rounded() {
        assert_eq!(RingElem::psi().approx(10), "0.7861513778");
        assert_eq!(RingElem::psi_pow(2).approx(10), "0.6180339887");
        assert_eq!(RingElem::zero().approx(10), "0");
        assert_eq!(r(-1, 0, 0, 0).approx(3), "-1.000");
        assert_eq!(r(-1, 0, 1, 1).approx(3), "0.104");
    }

    #[test]
    fn text_form_round_trips() {
        let x = r(3, -2, 0, 17);
        assert_eq!(x.to_string(), "3-2*p+0*p^2+17*p^3");
        assert_eq!(x.to_string().parse::<RingElem>().unwrap(), x);
        assert_eq!("1-p^2".parse::<RingElem>().unwrap(), r(1, 0, -1, 0));
        assert_eq!("p".parse::<RingElem>().unwrap(), RingElem::psi());
        assert_eq!("-p^3+2".parse::<RingElem>().unwrap(), r(2, 0, 0, -1));
        assert!("1+q".parse::<RingElem>().is_err());
        assert!("".parse::<RingElem>().is_err());
    }

    #[test]
    fn floor_matches_value() {
        assert_eq!(r(3, 0, 0, 0).floor(), BigInt::from(3));
        assert_eq!(r(0, 1, 0, 0).floor(), BigInt::from(0));
        assert_eq!(r(0, -1, 0, 0).floor(), BigInt::from(-1));
        assert_eq!(r(0, 0, 0, 0).scale_pow(-5).floor(), BigInt::from(0));
        assert_eq!(RingElem::psi_pow(-5).floor(), BigInt::from(3));
    }

    #[test]
    fn field_inverse_and_normalization() {
        let x = r(2, -1, 3, 1);
        let inv = FieldElem::from_ring(x.clone()).recip().unwrap();
        let prod = &inv * &FieldElem::from_ring(x);
        assert_eq!(prod, FieldElem::from_ring(RingElem::one()));
        let half = FieldElem::from_ring(RingElem::from_int(3)).halve();
        assert_eq!(half.to_string(), "(3+0*p+0*p^2+0*p^3)/2");
        assert_eq!(half.to_string().parse::<FieldElem>().unwrap(), half);
        assert!(FieldElem::new(RingElem::one(), RingElem::zero()).is_none());
        assert_eq!(FieldElem::from_ring(r(1, 0, 0, 0)).halve().approx(3), "0.500");
    }
}
