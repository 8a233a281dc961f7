//! Elliptic polynomials and their symbols.
//!
//! A homogeneous f with integer coefficients is elliptic when it vanishes
//! only at the origin; then |f| is squeezed between C0*||xi||^d and
//! C1*||xi||^d. Certification works entirely in residue arithmetic: on the
//! unit sphere, a residue class mod p^m with f not divisible by p^m pins
//! |f| exactly, and classes where f keeps vanishing are either refined one
//! digit deeper or, when a partial derivative is small enough relative to
//! the achieved depth, Hensel-lifted into an exact root witness.

use crate::error::{Error, Result};
use crate::padic::{pow_p, pow_p_rational, PadicScalar, PadicVector};
use crate::real::Real;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

/// Pending-class budget for certification; refinement past this aborts as
/// inconclusive instead of exhausting memory on singular root sets.
const CLASS_BUDGET: usize = 2_000_000;

/// Hensel witnesses are lifted to at least this many digits.
const WITNESS_DIGITS: u32 = 12;

pub const DEFAULT_MAX_DEPTH: u32 = 24;

/// Homogeneous polynomial of degree d in n variables with integer
/// coefficients, evaluated exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticPolynomial {
    prime: u32,
    n: usize,
    degree: u32,
    monomials: Vec<(Vec<u32>, BigInt)>,
}

impl EllipticPolynomial {
    pub fn new(
        prime: u32,
        n: usize,
        degree: u32,
        monomials: Vec<(Vec<u32>, BigInt)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if monomials.is_empty() {
            return Err(Error::InvalidParameter("empty polynomial".into()));
        }
        for (exps, coeff) in &monomials {
            if exps.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: exps.len(),
                });
            }
            let total: u32 = exps.iter().sum();
            if total != degree {
                return Err(Error::InvalidParameter(format!(
                    "monomial {exps:?} has degree {total}, expected {degree} (homogeneity)"
                )));
            }
            if coeff.is_zero() {
                return Err(Error::InvalidParameter(
                    "zero coefficient in monomial list".into(),
                ));
            }
        }
        Ok(EllipticPolynomial {
            prime,
            n,
            degree,
            monomials,
        })
    }

    /// The paper's two-variable family xi_1^d + p xi_2^d.
    pub fn power_family(prime: u32, degree: u32) -> Self {
        Self::new(
            prime,
            2,
            degree,
            vec![
                (vec![degree, 0], BigInt::one()),
                (vec![0, degree], BigInt::from(prime)),
            ],
        )
        .expect("valid family polynomial")
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn monomials(&self) -> &[(Vec<u32>, BigInt)] {
        &self.monomials
    }

    /// Exact evaluation at a point of Q_p^n.
    pub fn eval(&self, xi: &PadicVector) -> Result<PadicScalar> {
        if xi.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: xi.dim(),
            });
        }
        let mut acc = PadicScalar::zero(self.prime);
        for (exps, coeff) in &self.monomials {
            let mut term = PadicScalar::from_integer(self.prime, coeff.clone());
            for (c, &e) in xi.coords().iter().zip(exps) {
                if e > 0 {
                    term = &term * &c.pow(e);
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Evaluation at an integer point (residue representatives).
    pub fn eval_bigint(&self, coords: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (exps, coeff) in &self.monomials {
            let mut term = coeff.clone();
            for (c, &e) in coords.iter().zip(exps) {
                for _ in 0..e {
                    term *= c;
                }
            }
            acc += term;
        }
        acc
    }

    /// d f / d xi_i at an integer point.
    pub fn eval_partial_bigint(&self, i: usize, coords: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (exps, coeff) in &self.monomials {
            if exps[i] == 0 {
                continue;
            }
            let mut term = coeff * BigInt::from(exps[i]);
            for (j, (c, &e)) in coords.iter().zip(exps).enumerate() {
                let e = if j == i { e - 1 } else { e };
                for _ in 0..e {
                    term *= c;
                }
            }
            acc += term;
        }
        acc
    }

    /// |f(xi)|_p as an exact rational.
    pub fn symbol_norm(&self, xi: &PadicVector) -> Result<BigRational> {
        Ok(self.eval(xi)?.norm())
    }

    /// Certify ellipticity by unit-sphere residue refinement.
    pub fn certify(&self, max_depth: u32) -> Result<EllipticityCertificate> {
        if max_depth < 1 {
            return Err(Error::InvalidParameter("max_depth must be >= 1".into()));
        }
        let mut min_ord: Option<u32> = None;
        let mut max_ord: Option<u32> = None;
        let mut pending: Vec<Vec<BigInt>> = Vec::new();

        // Depth 1: all unit-sphere residues mod p.
        for residue in unit_sphere_residues(self.prime, self.n, 1) {
            self.classify(&residue, 1, &mut min_ord, &mut max_ord, &mut pending);
        }

        let mut m = 1u32;
        while !pending.is_empty() {
            // A pending class carries f = 0 mod p^m; if some partial
            // derivative has valuation k with m > 2k the class contains an
            // exact root by Hensel's lemma.
            for class in &pending {
                if let Some((coord, grad_ord)) = self.liftable_coordinate(class, m) {
                    let witness = self.hensel_lift(class, coord, grad_ord, WITNESS_DIGITS);
                    return Ok(EllipticityCertificate {
                        status: CertificateStatus::NotElliptic { witness },
                    });
                }
            }
            if m >= max_depth {
                return Ok(EllipticityCertificate {
                    status: CertificateStatus::Inconclusive { reached_depth: m },
                });
            }
            let blowup = pending.len() * (self.prime as usize).pow(self.n as u32);
            if blowup > CLASS_BUDGET {
                return Ok(EllipticityCertificate {
                    status: CertificateStatus::Inconclusive { reached_depth: m },
                });
            }
            // Refine each pending class one digit deeper.
            let step = pow_p(self.prime, m as u64);
            let old = std::mem::take(&mut pending);
            m += 1;
            let tuples = digit_tuples(self.prime, self.n);
            for class in old {
                for digits in &tuples {
                    let lift: Vec<BigInt> = class
                        .iter()
                        .zip(digits)
                        .map(|(c, &d)| c + BigInt::from(d) * &step)
                        .collect();
                    self.classify(&lift, m, &mut min_ord, &mut max_ord, &mut pending);
                }
            }
        }

        let m0 = max_ord.expect("at least one determined class");
        let min_ord = min_ord.expect("at least one determined class");
        Ok(EllipticityCertificate {
            status: CertificateStatus::Certified {
                c0: pow_p_rational(self.prime, -(m0 as i64)),
                c1: pow_p_rational(self.prime, -(min_ord as i64)),
                min_ord,
                max_ord: m0,
                depth: m0 + 1,
            },
        })
    }

    fn classify(
        &self,
        residue: &[BigInt],
        m: u32,
        min_ord: &mut Option<u32>,
        max_ord: &mut Option<u32>,
        pending: &mut Vec<Vec<BigInt>>,
    ) {
        let value = self.eval_bigint(residue);
        match vp_capped(&value, self.prime, m) {
            Some(k) => {
                *min_ord = Some(min_ord.map_or(k, |v| v.min(k)));
                *max_ord = Some(max_ord.map_or(k, |v| v.max(k)));
            }
            None => pending.push(residue.to_vec()),
        }
    }

    /// Coordinate along which a pending class (f = 0 mod p^m) Hensel-lifts:
    /// needs m > 2 * ord(partial).
    fn liftable_coordinate(&self, class: &[BigInt], m: u32) -> Option<(usize, u32)> {
        let mut best: Option<(usize, u32)> = None;
        for i in 0..self.n {
            let g = self.eval_partial_bigint(i, class);
            if let Some(k) = vp_capped(&g, self.prime, m) {
                if best.map_or(true, |(_, bk)| k < bk) {
                    best = Some((i, k));
                }
            }
        }
        best.filter(|&(_, k)| m > 2 * k)
    }

    /// Newton iteration on one coordinate, working mod p^N.
    fn hensel_lift(
        &self,
        class: &[BigInt],
        coord: usize,
        grad_ord: u32,
        target_digits: u32,
    ) -> HenselWitness {
        let work_digits = target_digits + 2 * grad_ord + 4;
        let modulus = pow_p(self.prime, work_digits as u64);
        let mut x: Vec<BigInt> = class.iter().map(|c| c.mod_floor(&modulus)).collect();
        for _ in 0..64 {
            let fx = self.eval_bigint(&x).mod_floor(&modulus);
            let vf = match vp_capped(&fx, self.prime, work_digits) {
                None => break, // f = 0 mod p^N: done
                Some(v) => v,
            };
            if vf >= target_digits + grad_ord {
                break;
            }
            let g = self.eval_bigint_partial_mod(coord, &x, &modulus);
            let vg = vp_capped(&g, self.prime, work_digits).expect("gradient stays a p^k unit");
            debug_assert_eq!(vg, grad_ord);
            // delta = f(x) / g(x) in Z_p, to the available precision
            let pk = pow_p(self.prime, vg as u64);
            let g_unit = (&g / &pk).mod_floor(&modulus);
            let reduced_modulus = pow_p(self.prime, (work_digits - vg) as u64);
            let inv = mod_inverse(&g_unit, &reduced_modulus);
            let delta = ((&fx / &pk) * inv).mod_floor(&reduced_modulus);
            x[coord] = (&x[coord] - delta).mod_floor(&modulus);
        }
        let trunc = pow_p(self.prime, target_digits as u64);
        let root: Vec<BigInt> = x.iter().map(|c| c.mod_floor(&trunc)).collect();
        let achieved =
            vp_capped(&self.eval_bigint(&root), self.prime, target_digits).unwrap_or(target_digits);
        HenselWitness {
            prime: self.prime,
            root,
            digits: target_digits,
            value_ord: achieved,
        }
    }

    fn eval_bigint_partial_mod(&self, i: usize, coords: &[BigInt], modulus: &BigInt) -> BigInt {
        self.eval_partial_bigint(i, coords).mod_floor(modulus)
    }
}

/// ord_p of an integer, `None` when divisible by p^cap (treated as
/// "vanishes to the working depth").
pub fn vp_capped(value: &BigInt, prime: u32, cap: u32) -> Option<u32> {
    if value.is_zero() {
        return None;
    }
    let p = BigInt::from(prime);
    let mut v = 0u32;
    let mut m = value.abs();
    while v < cap {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
    None
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> BigInt {
    let e = a.extended_gcd(modulus);
    debug_assert!(e.gcd.is_one(), "inverse of a non-unit");
    e.x.mod_floor(modulus)
}

/// All base-p digit tuples of length n, in odometer order.
pub fn digit_tuples(prime: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity((prime as usize).pow(n as u32));
    let mut cur = vec![0u32; n];
    loop {
        out.push(cur.clone());
        let mut i = 0;
        while i < n {
            cur[i] += 1;
            if cur[i] < prime {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        if i == n {
            return out;
        }
    }
}

/// Unit-sphere residue representatives mod p^m: integer tuples in
/// [0, p^m)^n with at least one coordinate not divisible by p.
pub fn unit_sphere_residues(prime: u32, n: usize, m: u32) -> Vec<Vec<BigInt>> {
    let total = pow_p(prime, m as u64);
    let p = BigInt::from(prime);
    let mut out = Vec::new();
    let mut cur = vec![BigInt::zero(); n];
    loop {
        if cur.iter().any(|c| !c.mod_floor(&p).is_zero()) {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            cur[i] += 1u32;
            if cur[i] < total {
                break;
            }
            cur[i] = BigInt::zero();
            i += 1;
        }
    }
}

/// Exact nontrivial root witness for a non-elliptic polynomial.
#[derive(Clone, Debug)]
pub struct HenselWitness {
    pub prime: u32,
    /// Root coordinates mod p^digits; on the unit sphere by construction.
    pub root: Vec<BigInt>,
    pub digits: u32,
    /// Verified ord_p(f(root)); >= digits when the lift succeeded.
    pub value_ord: u32,
}

#[derive(Clone, Debug)]
pub enum CertificateStatus {
    Certified {
        /// C0 = p^{-max_ord}: exact lower constant of the two-sided bound.
        c0: BigRational,
        /// C1 = p^{-min_ord}: exact upper constant (<= 1 for integer f).
        c1: BigRational,
        min_ord: u32,
        max_ord: u32,
        /// Residues mod p^depth on the unit sphere determine |f| exactly.
        depth: u32,
    },
    NotElliptic {
        witness: HenselWitness,
    },
    Inconclusive {
        reached_depth: u32,
    },
}

#[derive(Clone, Debug)]
pub struct EllipticityCertificate {
    status: CertificateStatus,
}

impl EllipticityCertificate {
    pub fn status(&self) -> &CertificateStatus {
        &self.status
    }

    pub fn is_certified(&self) -> bool {
        matches!(self.status, CertificateStatus::Certified { .. })
    }

    pub fn witness(&self) -> Option<&HenselWitness> {
        match &self.status {
            CertificateStatus::NotElliptic { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn c0(&self) -> Result<BigRational> {
        match &self.status {
            CertificateStatus::Certified { c0, .. } => Ok(c0.clone()),
            other => Err(Error::NotCertified(format!("{other:?}"))),
        }
    }

    pub fn c1(&self) -> Result<BigRational> {
        match &self.status {
            CertificateStatus::Certified { c1, .. } => Ok(c1.clone()),
            other => Err(Error::NotCertified(format!("{other:?}"))),
        }
    }

    /// Largest ord of |f| over the unit sphere (m0 with C0 = p^{-m0}).
    pub fn max_ord(&self) -> Result<u32> {
        match &self.status {
            CertificateStatus::Certified { max_ord, .. } => Ok(*max_ord),
            other => Err(Error::NotCertified(format!("{other:?}"))),
        }
    }

    pub fn min_ord(&self) -> Result<u32> {
        match &self.status {
            CertificateStatus::Certified { min_ord, .. } => Ok(*min_ord),
            other => Err(Error::NotCertified(format!("{other:?}"))),
        }
    }

    pub fn depth(&self) -> Result<u32> {
        match &self.status {
            CertificateStatus::Certified { depth, .. } => Ok(*depth),
            other => Err(Error::NotCertified(format!("{other:?}"))),
        }
    }
}

/// Symbol data |f(xi)|_p^beta.
#[derive(Clone, Debug)]
pub struct SymbolParams {
    poly: EllipticPolynomial,
    beta: Rational64,
}

impl SymbolParams {
    pub fn new(poly: EllipticPolynomial, beta: Rational64) -> Result<Self> {
        if beta <= Rational64::zero() {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive, got {beta}"
            )));
        }
        Ok(SymbolParams { poly, beta })
    }

    pub fn poly(&self) -> &EllipticPolynomial {
        &self.poly
    }

    pub fn beta(&self) -> Rational64 {
        self.beta
    }

    pub fn prime(&self) -> u32 {
        self.poly.prime()
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    /// p^{e * beta} as a float.
    pub fn pow_p_beta<R: Real>(&self, e: i64) -> R {
        let exponent = self.beta * Rational64::from_integer(e);
        pow_p_real(self.prime(), exponent)
    }

    /// The symbol psi(xi) = |f(xi)|_p^beta = p^{-beta * ord f(xi)}.
    pub fn symbol_value<R: Real>(&self, xi: &PadicVector) -> Result<R> {
        match self.poly.eval(xi)?.valuation() {
            None => Ok(R::zero()),
            Some(k) => Ok(self.pow_p_beta(-k)),
        }
    }
}

/// p^q for rational q, evaluated in R.
pub fn pow_p_real<R: Real>(prime: u32, q: Rational64) -> R {
    let qf = (*q.numer() as f64) / (*q.denom() as f64);
    R::from_f64_lossy(prime as f64).powf(R::from_f64_lossy(qf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{random_in_ball, random_scalar};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn poly_a() -> EllipticPolynomial {
        EllipticPolynomial::power_family(3, 2)
    }

    fn poly_c() -> EllipticPolynomial {
        EllipticPolynomial::new(
            5,
            2,
            2,
            vec![
                (vec![2, 0], BigInt::one()),
                (vec![0, 2], BigInt::one()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let f = poly_a();
        let zero = PadicVector::zero(3, 2);
        assert!(f.eval(&zero).unwrap().is_zero());

        let one_one = PadicVector::from_integers(3, &[1, 1]);
        assert_eq!(f.eval(&one_one).unwrap().to_rational(), q(4, 1));
    }

    #[test]
    fn homogeneity_scaling_exact() {
        let f = poly_a();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let xi = random_in_ball(3, 2, 3, 8, &mut rng);
            let k = rng.gen_range(-3..4i64);
            let scaled = xi.mul_pow_p(-k);
            let lhs = f.eval(&scaled).unwrap();
            let rhs = f.eval(&xi).unwrap().mul_pow_p(-k * 2);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn symbol_norm_examples() {
        let f = poly_a();
        assert!(f.symbol_norm(&PadicVector::zero(3, 2)).unwrap().is_zero());
        let xi = PadicVector::from_integers(3, &[0, 1]);
        assert_eq!(f.symbol_norm(&xi).unwrap(), q(1, 3));
    }

    #[test]
    fn taibleson_type_radial_symbol() {
        // xi_1^2 - 2 xi_2^2 with 2 a non-residue mod 3: |h(xi)| = ||xi||^2.
        let h = EllipticPolynomial::new(
            3,
            2,
            2,
            vec![
                (vec![2, 0], BigInt::one()),
                (vec![0, 2], BigInt::from(-2)),
            ],
        )
        .unwrap();
        let cert = h.certify(DEFAULT_MAX_DEPTH).unwrap();
        assert!(cert.is_certified());
        assert_eq!(cert.c0().unwrap(), q(1, 1));
        assert_eq!(cert.c1().unwrap(), q(1, 1));
        assert_eq!(cert.depth().unwrap(), 1);

        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let xi = random_in_ball(3, 2, 3, 7, &mut rng);
            if xi.is_zero() {
                continue;
            }
            let norm = xi.norm();
            assert_eq!(h.symbol_norm(&xi).unwrap(), &norm * &norm);
        }
    }

    #[test]
    fn certify_example_a() {
        let cert = poly_a().certify(DEFAULT_MAX_DEPTH).unwrap();
        assert!(cert.is_certified());
        assert_eq!(cert.c0().unwrap(), q(1, 3));
        assert_eq!(cert.c1().unwrap(), q(1, 1));
        assert_eq!(cert.depth().unwrap(), 2);
    }

    #[test]
    fn certify_cubic_family() {
        // xi_1^3 + 2 xi_2^3 over Q_2: |f| = 1/2 exactly when xi_1 = 0 mod 2.
        let f = EllipticPolynomial::power_family(2, 3);
        let cert = f.certify(DEFAULT_MAX_DEPTH).unwrap();
        assert!(cert.is_certified());
        assert_eq!(cert.c0().unwrap(), q(1, 2));
        assert_eq!(cert.c1().unwrap(), q(1, 1));
        assert_eq!(cert.depth().unwrap(), 2);
    }

    #[test]
    fn certify_non_elliptic_with_hensel_witness() {
        let cert = poly_c().certify(DEFAULT_MAX_DEPTH).unwrap();
        let witness = cert.witness().expect("sum of squares has roots mod 5");
        assert!(witness.digits >= 10);
        assert!(witness.value_ord >= witness.digits);
        // the witness is on the unit sphere
        let p = BigInt::from(5);
        assert!(witness.root.iter().any(|c| !c.mod_floor(&p).is_zero()));

        // oracle: keep lifting far beyond the reported precision and watch
        // ord f grow without bound
        let f = poly_c();
        let class: Vec<BigInt> = vec![BigInt::from(2), BigInt::from(1)];
        assert!(f.eval_bigint(&class).mod_floor(&p).is_zero());
        let deep = f.hensel_lift(&class, 0, 0, 30);
        assert!(deep.value_ord >= 30);
    }

    #[test]
    fn lemma1_bounds_on_random_points() {
        let f = poly_a();
        let cert = f.certify(DEFAULT_MAX_DEPTH).unwrap();
        let c0 = cert.c0().unwrap();
        let c1 = cert.c1().unwrap();
        let d = f.degree() as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let xi = random_in_ball(3, 2, 4, 9, &mut rng);
            if xi.is_zero() {
                continue;
            }
            let norm_d = xi
                .norm()
                .pow(d as i32);
            let value = f.symbol_norm(&xi).unwrap();
            assert!(&c0 * &norm_d <= value, "lower bound violated at {xi:?}");
            assert!(value <= &c1 * &norm_d, "upper bound violated at {xi:?}");
        }
    }

    #[test]
    fn symbol_value_examples() {
        let params = SymbolParams::new(poly_a(), Rational64::new(1, 2)).unwrap();
        let zero: f64 = params.symbol_value(&PadicVector::zero(3, 2)).unwrap();
        assert_eq!(zero, 0.0);

        // beta = 1 reduces to the norm
        let params1 = SymbolParams::new(poly_a(), Rational64::one()).unwrap();
        let xi = PadicVector::from_integers(3, &[0, 1]);
        let v: f64 = params1.symbol_value(&xi).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);

        // beta = 1/2 with |f| = 4 gives 2
        let g = EllipticPolynomial::new(2, 1, 1, vec![(vec![1], BigInt::one())]).unwrap();
        let params = SymbolParams::new(g, Rational64::new(1, 2)).unwrap();
        let xi = PadicVector::new(2, vec![PadicScalar::from_ratio(2, 1, 4).unwrap()]);
        let v: f64 = params.symbol_value(&xi).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn beta_must_be_positive() {
        assert!(SymbolParams::new(poly_a(), Rational64::zero()).is_err());
        assert!(SymbolParams::new(poly_a(), Rational64::new(-1, 2)).is_err());
    }

    #[test]
    fn max_depth_validation() {
        assert!(poly_a().certify(0).is_err());
    }

    #[test]
    fn scaling_law_for_symbol_norm() {
        let f = poly_a();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..100 {
            let xi = PadicVector::new(
                3,
                vec![
                    random_scalar(3, -2, 6, &mut rng),
                    random_scalar(3, -2, 6, &mut rng),
                ],
            );
            if xi.is_zero() {
                continue;
            }
            for k in -2..3i64 {
                // symbol_norm(p^{-k} xi) = p^{k d} symbol_norm(xi), d = 2
                let lhs = f.symbol_norm(&xi.mul_pow_p(-k)).unwrap();
                let rhs = f.symbol_norm(&xi).unwrap() * pow_p_rational(3, 2 * k);
                assert_eq!(lhs, rhs);
            }
        }
    }
}
