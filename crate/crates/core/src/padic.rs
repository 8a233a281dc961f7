//! Exact arithmetic on Q_p and Q_p^n.
//!
//! Scalars are elements of the subring Z[1/p] (rationals whose denominator
//! is a power of p), stored in the canonical form `p^valuation * unit` with
//! the unit an arbitrary-precision integer coprime to p. Every grid point,
//! coset center and polynomial value the crate manipulates lives in this
//! ring, so the p-adic side of the computation never rounds.

use crate::error::{Error, Result};
use crate::real::Real;
use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// p^e as a big integer (e >= 0).
pub fn pow_p(prime: u32, exp: u64) -> BigInt {
    BigInt::from(prime).pow(exp as u32)
}

/// p^e as an exact rational, any sign of e.
pub fn pow_p_rational(prime: u32, exp: i64) -> BigRational {
    if exp >= 0 {
        BigRational::from_integer(pow_p(prime, exp as u64))
    } else {
        BigRational::new(BigInt::one(), pow_p(prime, (-exp) as u64))
    }
}

/// An exact element of Q_p restricted to Z[1/p].
///
/// `repr` is `None` for zero, otherwise `(valuation, unit)` with the unit a
/// nonzero signed integer not divisible by p. The sign lives on the unit:
/// differences of representable values must stay representable, which rules
/// out a non-negative unit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    prime: u32,
    repr: Option<(i64, BigInt)>,
}

impl PadicScalar {
    pub fn zero(prime: u32) -> Self {
        PadicScalar { prime, repr: None }
    }

    pub fn one(prime: u32) -> Self {
        PadicScalar {
            prime,
            repr: Some((0, BigInt::one())),
        }
    }

    /// Canonical form of `p^valuation * unit`; strips p-factors of `unit`.
    pub fn from_parts(prime: u32, valuation: i64, unit: impl Into<BigInt>) -> Self {
        let unit: BigInt = unit.into();
        if unit.is_zero() {
            return Self::zero(prime);
        }
        let p = BigInt::from(prime);
        let mut v = valuation;
        let mut u = unit;
        loop {
            let (q, r) = u.div_rem(&p);
            if r.is_zero() {
                u = q;
                v += 1;
            } else {
                break;
            }
        }
        PadicScalar {
            prime,
            repr: Some((v, u)),
        }
    }

    pub fn from_integer(prime: u32, value: impl Into<BigInt>) -> Self {
        Self::from_parts(prime, 0, value)
    }

    /// Exact conversion of `num/den`; fails unless the reduced denominator
    /// is a power of p.
    pub fn from_ratio(prime: u32, num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let num: BigInt = num.into();
        let mut den: BigInt = den.into();
        if den.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        let mut num = num;
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        let num = &num / &g;
        let den = &den / &g;
        let p = BigInt::from(prime);
        let mut k = 0i64;
        let mut rest = den.clone();
        while rest > BigInt::one() {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                return Err(Error::InvalidParameter(format!(
                    "denominator {den} is not a power of {prime}"
                )));
            }
            rest = q;
            k += 1;
        }
        Ok(Self::from_parts(prime, -k, num))
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.repr.is_none()
    }

    /// ord_p(x); `None` encodes +infinity (x = 0).
    pub fn valuation(&self) -> Option<i64> {
        self.repr.as_ref().map(|(v, _)| *v)
    }

    /// Angular component as a signed p-free integer (None for zero).
    pub fn unit(&self) -> Option<&BigInt> {
        self.repr.as_ref().map(|(_, u)| u)
    }

    /// |x|_p = p^{-ord(x)} as an exact rational; 0 for x = 0.
    pub fn norm(&self) -> BigRational {
        match &self.repr {
            None => BigRational::zero(),
            Some((v, _)) => pow_p_rational(self.prime, -v),
        }
    }

    /// The exact rational value p^v * u.
    pub fn to_rational(&self) -> BigRational {
        match &self.repr {
            None => BigRational::zero(),
            Some((v, u)) => pow_p_rational(self.prime, *v) * BigRational::from_integer(u.clone()),
        }
    }

    pub fn to_real<R: Real>(&self) -> R {
        R::from_big_rational(&self.to_rational())
    }

    /// {x}_p, the p-adic fractional part, as an exact rational in [0, 1).
    ///
    /// Zero when ord(x) >= 0; otherwise the digits at negative positions,
    /// i.e. (u mod p^{-v}) / p^{-v}.
    pub fn fractional_part(&self) -> BigRational {
        match &self.repr {
            None => BigRational::zero(),
            Some((v, u)) => {
                if *v >= 0 {
                    BigRational::zero()
                } else {
                    let modulus = pow_p(self.prime, (-v) as u64);
                    let m = u.mod_floor(&modulus);
                    BigRational::new(m, modulus)
                }
            }
        }
    }

    /// chi_p(x) = exp(2*pi*i*{x}_p).
    pub fn character(&self) -> UnitPhase {
        UnitPhase::from_angle(self.fractional_part())
    }

    /// x * p^k (exact rescaling).
    pub fn mul_pow_p(&self, k: i64) -> Self {
        match &self.repr {
            None => self.clone(),
            Some((v, u)) => PadicScalar {
                prime: self.prime,
                repr: Some((v + k, u.clone())),
            },
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        match &self.repr {
            None => {
                if e == 0 {
                    Self::one(self.prime)
                } else {
                    self.clone()
                }
            }
            Some((v, u)) => PadicScalar {
                prime: self.prime,
                repr: Some((v * e as i64, u.pow(e))),
            },
        }
    }

    fn assert_same_prime(&self, other: &Self) {
        assert_eq!(self.prime, other.prime, "mixed primes in p-adic arithmetic");
    }
}

impl Add for &PadicScalar {
    type Output = PadicScalar;
    fn add(self, rhs: &PadicScalar) -> PadicScalar {
        self.assert_same_prime(rhs);
        match (&self.repr, &rhs.repr) {
            (None, _) => rhs.clone(),
            (_, None) => self.clone(),
            (Some((va, ua)), Some((vb, ub))) => {
                let v = (*va).min(*vb);
                let pa = pow_p(self.prime, (va - v) as u64);
                let pb = pow_p(self.prime, (vb - v) as u64);
                PadicScalar::from_parts(self.prime, v, ua * pa + ub * pb)
            }
        }
    }
}

impl Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        PadicScalar {
            prime: self.prime,
            repr: self.repr.as_ref().map(|(v, u)| (*v, -u)),
        }
    }
}

impl Sub for &PadicScalar {
    type Output = PadicScalar;
    fn sub(self, rhs: &PadicScalar) -> PadicScalar {
        self + &(-rhs)
    }
}

impl Mul for &PadicScalar {
    type Output = PadicScalar;
    fn mul(self, rhs: &PadicScalar) -> PadicScalar {
        self.assert_same_prime(rhs);
        match (&self.repr, &rhs.repr) {
            (None, _) | (_, None) => PadicScalar::zero(self.prime),
            (Some((va, ua)), Some((vb, ub))) => PadicScalar {
                prime: self.prime,
                repr: Some((va + vb, ua * ub)),
            },
        }
    }
}

impl Ord for PadicScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        // Any deterministic total order works; used for canonical sorting.
        self.prime
            .cmp(&other.prime)
            .then_with(|| match (&self.repr, &other.repr) {
                (None, None) => Ordering::Equal,
                (None, Some(_)) => Ordering::Less,
                (Some(_), None) => Ordering::Greater,
                (Some((va, ua)), Some((vb, ub))) => va.cmp(vb).then_with(|| ua.cmp(ub)),
            })
    }
}

impl PartialOrd for PadicScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.to_rational();
        if q.denom().is_one() {
            write!(f, "{}", q.numer())
        } else {
            write!(f, "{}/{}", q.numer(), q.denom())
        }
    }
}

macro_rules! impl_owned_ops {
    ($op:ident, $f:ident, $t:ty) => {
        impl $op for $t {
            type Output = $t;
            fn $f(self, rhs: $t) -> $t {
                (&self).$f(&rhs)
            }
        }
    };
}
impl_owned_ops!(Add, add, PadicScalar);
impl_owned_ops!(Sub, sub, PadicScalar);
impl_owned_ops!(Mul, mul, PadicScalar);

/// Element of Q_p^n with the max norm.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PadicVector {
    prime: u32,
    coords: Vec<PadicScalar>,
}

impl PadicVector {
    pub fn new(prime: u32, coords: Vec<PadicScalar>) -> Self {
        assert!(!coords.is_empty(), "dimension must be at least 1");
        for c in &coords {
            assert_eq!(c.prime(), prime, "coordinate prime mismatch");
        }
        PadicVector { prime, coords }
    }

    pub fn zero(prime: u32, n: usize) -> Self {
        Self::new(prime, vec![PadicScalar::zero(prime); n])
    }

    pub fn from_integers(prime: u32, values: &[i64]) -> Self {
        Self::new(
            prime,
            values
                .iter()
                .map(|&v| PadicScalar::from_integer(prime, v))
                .collect(),
        )
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[PadicScalar] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// ord(x) = min_i ord(x_i); `None` is +infinity (x = 0).
    pub fn ord(&self) -> Option<i64> {
        self.coords.iter().filter_map(|c| c.valuation()).min()
    }

    /// ||x||_p = max_i |x_i|_p as an exact rational.
    pub fn norm(&self) -> BigRational {
        match self.ord() {
            None => BigRational::zero(),
            Some(v) => pow_p_rational(self.prime, -v),
        }
    }

    /// log_p ||x||_p, `None` for the zero vector.
    pub fn norm_exponent(&self) -> Option<i64> {
        self.ord().map(|v| -v)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        PadicVector {
            prime: self.prime,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul_pow_p(&self, k: i64) -> Self {
        PadicVector {
            prime: self.prime,
            coords: self.coords.iter().map(|c| c.mul_pow_p(k)).collect(),
        }
    }

    /// Exact dot product sum_i x_i y_i.
    pub fn dot(&self, rhs: &Self) -> PadicScalar {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in dot product");
        let mut acc = PadicScalar::zero(self.prime);
        for (a, b) in self.coords.iter().zip(&rhs.coords) {
            acc = &acc + &(a * b);
        }
        acc
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&PadicScalar, &PadicScalar) -> PadicScalar) -> Self {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        PadicVector {
            prime: self.prime,
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }
}

impl fmt::Debug for PadicVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The ball `center + B_{radius_exp}^n`, i.e. all y with
/// ||y - center||_p <= p^radius_exp. Constructors reduce the center to the
/// canonical representative (digits strictly below the radius scale), so
/// equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    radius_exp: i64,
    center: PadicVector,
}

/// Outcome of comparing two cosets; balls are nested or disjoint.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CosetRelation {
    Disjoint,
    Equal,
    FirstInsideSecond,
    SecondInsideFirst,
}

impl Coset {
    pub fn new(center: PadicVector, radius_exp: i64) -> Self {
        let reduced = Self::reduce_center(&center, radius_exp);
        Coset {
            radius_exp,
            center: reduced,
        }
    }

    /// B_r^n(0).
    pub fn centered(prime: u32, n: usize, radius_exp: i64) -> Self {
        Coset {
            radius_exp,
            center: PadicVector::zero(prime, n),
        }
    }

    fn reduce_center(center: &PadicVector, radius_exp: i64) -> PadicVector {
        let prime = center.prime();
        let coords = center
            .coords()
            .iter()
            .map(|c| {
                // Keep the digits at positions < -radius_exp: the canonical
                // representative of c modulo p^{-r} Z_p.
                let shifted = c.mul_pow_p(radius_exp);
                let frac = shifted.fractional_part();
                if frac.is_zero() {
                    PadicScalar::zero(prime)
                } else {
                    PadicScalar::from_ratio(prime, frac.numer().clone(), frac.denom().clone())
                        .expect("fractional part has p-power denominator")
                        .mul_pow_p(-radius_exp)
                }
            })
            .collect();
        PadicVector::new(prime, coords)
    }

    pub fn prime(&self) -> u32 {
        self.center.prime()
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn center(&self) -> &PadicVector {
        &self.center
    }

    pub fn radius_exp(&self) -> i64 {
        self.radius_exp
    }

    /// Haar volume p^{r n} (vol(Z_p^n) = 1).
    pub fn volume(&self) -> BigRational {
        pow_p_rational(self.prime(), self.radius_exp * self.dim() as i64)
    }

    pub fn contains(&self, x: &PadicVector) -> bool {
        let diff = x.sub(&self.center);
        match diff.ord() {
            None => true,
            Some(v) => -v <= self.radius_exp,
        }
    }

    /// The p^n disjoint sub-cosets of radius exponent r - 1 partitioning self.
    pub fn children(&self) -> Vec<Coset> {
        let p = self.prime();
        let n = self.dim();
        let count = (p as u64).pow(n as u32);
        let mut out = Vec::with_capacity(count as usize);
        let mut digits = vec![0u32; n];
        loop {
            let offset = PadicVector::new(
                p,
                digits
                    .iter()
                    .map(|&d| PadicScalar::from_integer(p, d as i64).mul_pow_p(-self.radius_exp))
                    .collect(),
            );
            out.push(Coset::new(self.center.add(&offset), self.radius_exp - 1));
            // odometer over base-p digit tuples
            let mut i = 0;
            loop {
                if i == n {
                    return out;
                }
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }

    /// The unique coset of radius exponent r + 1 containing self.
    pub fn parent(&self) -> Coset {
        Coset::new(self.center.clone(), self.radius_exp + 1)
    }

    pub fn translate(&self, a: &PadicVector) -> Coset {
        Coset::new(self.center.add(a), self.radius_exp)
    }

    pub fn relation(&self, other: &Coset) -> CosetRelation {
        match self.radius_exp.cmp(&other.radius_exp) {
            Ordering::Equal => {
                if self == other {
                    CosetRelation::Equal
                } else {
                    CosetRelation::Disjoint
                }
            }
            Ordering::Less => {
                if other.contains(&self.center) {
                    CosetRelation::FirstInsideSecond
                } else {
                    CosetRelation::Disjoint
                }
            }
            Ordering::Greater => {
                if self.contains(&other.center) {
                    CosetRelation::SecondInsideFirst
                } else {
                    CosetRelation::Disjoint
                }
            }
        }
    }
}

impl fmt::Debug for Coset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + B({})", self.center, self.radius_exp)
    }
}

/// A point on the unit circle, e^{2 pi i q} with q an exact rational in [0,1).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UnitPhase {
    angle: BigRational,
}

impl UnitPhase {
    pub fn one() -> Self {
        UnitPhase {
            angle: BigRational::zero(),
        }
    }

    /// Reduces the angle mod 1 into [0, 1).
    pub fn from_angle(angle: BigRational) -> Self {
        let floor = angle.floor();
        UnitPhase {
            angle: angle - floor,
        }
    }

    pub fn angle(&self) -> &BigRational {
        &self.angle
    }

    pub fn is_one(&self) -> bool {
        self.angle.is_zero()
    }

    /// Product of phases: angles add mod 1.
    pub fn mul(&self, rhs: &UnitPhase) -> UnitPhase {
        Self::from_angle(&self.angle + &rhs.angle)
    }

    pub fn conj(&self) -> UnitPhase {
        Self::from_angle(-&self.angle)
    }

    pub fn to_complex<R: Real>(&self) -> Complex<R> {
        let theta = R::from_big_rational(&self.angle) * R::TAU();
        Complex::new(theta.cos(), theta.sin())
    }
}

/// Uniform random exact scalar with ord in [min_ord, min_ord + digits):
/// p^min_ord * (uniform integer below p^digits).
pub fn random_scalar(prime: u32, min_ord: i64, digits: u32, rng: &mut impl Rng) -> PadicScalar {
    let bound = (prime as u128).pow(digits);
    let raw = rng.gen_range(0..bound);
    PadicScalar::from_parts(prime, min_ord, BigInt::from(raw))
}

/// Uniform random point of the ball B_{radius_exp}^n.
pub fn random_in_ball(
    prime: u32,
    n: usize,
    radius_exp: i64,
    digits: u32,
    rng: &mut impl Rng,
) -> PadicVector {
    PadicVector::new(
        prime,
        (0..n)
            .map(|_| random_scalar(prime, -radius_exp, digits, rng))
            .collect(),
    )
}

/// Uniform random point with ||x||_p exactly p^radius_exp.
pub fn random_on_sphere(
    prime: u32,
    n: usize,
    radius_exp: i64,
    digits: u32,
    rng: &mut impl Rng,
) -> PadicVector {
    loop {
        let x = random_in_ball(prime, n, radius_exp, digits, rng);
        if x.norm_exponent() == Some(radius_exp) {
            return x;
        }
    }
}
