//! Bruhat-Schwartz test functions as finite coset-value lists.
//!
//! A locally constant function with compact support is exactly a finite
//! disjoint union of balls with one complex value per ball. All the coset
//! geometry (centers, radii, subdivision) is exact; only the complex values
//! are floating point. The Fourier transform of a ball indicator is again a
//! (modulated) ball indicator, so the transform of any test function is
//! computed in closed form, piece by piece.

use crate::error::{Error, Result};
use crate::padic::{pow_p_rational, Coset, PadicScalar, PadicVector};
use crate::real::Real;
use num_complex::Complex;
use num_traits::Zero;
use std::collections::HashMap;

/// Cap on the number of piece contributions a single transform may expand
/// into; beyond this the function is too fine-grained for the closed form.
const PIECE_BUDGET: u64 = 1 << 22;

/// Exact character integral of a coset:
/// integral over c of chi_p(-x . xi) d^n xi,
/// which is vol(c) * chi_p(-x . center) when ||x||_p <= p^{-r} and 0
/// otherwise (the character is nontrivial on the subgroup).
pub fn fourier_coset_indicator<R: Real>(c: &Coset, x: &PadicVector) -> Complex<R> {
    if let Some(e) = x.norm_exponent() {
        if e > -c.radius_exp() {
            return Complex::zero();
        }
    }
    let vol = R::from_big_rational(&c.volume());
    let phase = (-&x.dot(c.center())).character().to_complex::<R>();
    phase * vol
}

/// Finite disjoint list of (coset, complex value); zero outside the union.
#[derive(Clone, Debug)]
pub struct LocallyConstantFn<R: Real> {
    prime: u32,
    n: usize,
    pieces: Vec<(Coset, Complex<R>)>,
}

impl<R: Real> LocallyConstantFn<R> {
    pub fn zero_fn(prime: u32, n: usize) -> Self {
        LocallyConstantFn {
            prime,
            n,
            pieces: Vec::new(),
        }
    }

    /// Builds from pieces that must already be pairwise disjoint.
    pub fn new(prime: u32, n: usize, pieces: Vec<(Coset, Complex<R>)>) -> Result<Self> {
        for (i, (a, _)) in pieces.iter().enumerate() {
            for (b, _) in pieces.iter().skip(i + 1) {
                if a.relation(b) != crate::padic::CosetRelation::Disjoint {
                    return Err(Error::OverlappingPieces(format!("{a:?} vs {b:?}")));
                }
            }
        }
        Ok(Self::from_contributions(prime, n, pieces))
    }

    /// Builds from arbitrary (possibly overlapping) contributions; values
    /// add where cosets overlap. This is the workhorse behind sums,
    /// transforms and convolutions.
    pub fn from_contributions(prime: u32, n: usize, contribs: Vec<(Coset, Complex<R>)>) -> Self {
        let pieces = flatten_contributions(contribs);
        let mut pieces = merge_sibling_pieces(prime, n, pieces);
        pieces.sort_by(|a, b| a.0.cmp(&b.0));
        LocallyConstantFn { prime, n, pieces }
    }

    pub fn indicator(c: &Coset) -> Self {
        LocallyConstantFn {
            prime: c.prime(),
            n: c.dim(),
            pieces: vec![(c.clone(), Complex::new(R::one(), R::zero()))],
        }
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn pieces(&self) -> &[(Coset, Complex<R>)] {
        &self.pieces
    }

    pub fn is_zero_fn(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn eval(&self, x: &PadicVector) -> Complex<R> {
        for (c, v) in &self.pieces {
            if c.contains(x) {
                return *v;
            }
        }
        Complex::zero()
    }

    /// Smallest radius exponent among the pieces: the scale on which the
    /// function is guaranteed locally constant.
    pub fn resolution(&self) -> Option<i64> {
        self.pieces.iter().map(|(c, _)| c.radius_exp()).min()
    }

    /// Radius exponent of a ball around 0 containing the support.
    pub fn support_radius(&self) -> Option<i64> {
        self.pieces
            .iter()
            .map(|(c, _)| {
                c.radius_exp()
                    .max(c.center().norm_exponent().unwrap_or(i64::MIN))
            })
            .max()
    }

    /// Exact integral: sum of value * vol(coset).
    pub fn integrate(&self) -> Complex<R> {
        let mut acc = Complex::zero();
        for (c, v) in &self.pieces {
            acc += *v * R::from_big_rational(&c.volume());
        }
        acc
    }

    pub fn l2_norm_sq(&self) -> R {
        let mut acc = R::zero();
        for (c, v) in &self.pieces {
            acc = acc + v.norm_sqr() * R::from_big_rational(&c.volume());
        }
        acc
    }

    pub fn sup_norm(&self) -> R {
        self.pieces
            .iter()
            .map(|(_, v)| v.norm())
            .fold(R::zero(), R::max)
    }

    pub fn scale(&self, k: Complex<R>) -> Self {
        LocallyConstantFn {
            prime: self.prime,
            n: self.n,
            pieces: self
                .pieces
                .iter()
                .map(|(c, v)| (c.clone(), *v * k))
                .collect(),
        }
    }

    pub fn conj(&self) -> Self {
        LocallyConstantFn {
            prime: self.prime,
            n: self.n,
            pieces: self
                .pieces
                .iter()
                .map(|(c, v)| (c.clone(), v.conj()))
                .collect(),
        }
    }

    /// x -> f(x - a).
    pub fn translate(&self, a: &PadicVector) -> Self {
        LocallyConstantFn {
            prime: self.prime,
            n: self.n,
            pieces: self
                .pieces
                .iter()
                .map(|(c, v)| (c.translate(a), *v))
                .collect(),
        }
    }

    /// x -> f(-x).
    pub fn reflect(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|(c, v)| (Coset::new(c.center().neg(), c.radius_exp()), *v))
            .collect();
        let mut out = LocallyConstantFn {
            prime: self.prime,
            n: self.n,
            pieces,
        };
        out.pieces.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut contribs = self.pieces.clone();
        contribs.extend(other.pieces.iter().cloned());
        Self::from_contributions(self.prime, self.n, contribs)
    }

    /// Sup over the refined difference pieces: the exact L-infinity
    /// distance between the two step functions (up to float rounding).
    pub fn linf_diff(&self, other: &Self) -> R {
        self.add(&other.scale(Complex::new(-R::one(), R::zero())))
            .sup_norm()
    }

    /// Pointwise product; the intersection of two balls is the smaller one.
    pub fn mul_pointwise(&self, other: &Self) -> Self {
        let mut contribs = Vec::new();
        for (a, v) in &self.pieces {
            for (b, w) in &other.pieces {
                use crate::padic::CosetRelation::*;
                match a.relation(b) {
                    Disjoint => {}
                    Equal | FirstInsideSecond => contribs.push((a.clone(), *v * *w)),
                    SecondInsideFirst => contribs.push((b.clone(), *v * *w)),
                }
            }
        }
        Self::from_contributions(self.prime, self.n, contribs)
    }

    /// Exact Fourier transform (F f)(xi) = integral chi_p(xi . x) f(x) dx.
    ///
    /// Each ball indicator maps to a modulated indicator of the dual ball;
    /// the modulation chi_p(xi . a) is itself locally constant at the scale
    /// ord(a), so the result is again a finite coset-value list.
    pub fn fourier(&self) -> Result<Self> {
        let mut budget: u64 = 0;
        let mut contribs = Vec::new();
        for (c, v) in &self.pieces {
            let r = c.radius_exp();
            let a = c.center();
            let vol = R::from_big_rational(&c.volume());
            if a.is_zero() {
                contribs.push((Coset::centered(self.prime, self.n, -r), *v * vol));
                continue;
            }
            // The phase is constant on cosets of radius s = ord(a) < -r.
            let s = a.ord().expect("nonzero center");
            let levels = (-r - s) as u32;
            let count = (self.prime as u64).pow(levels * self.n as u32);
            budget += count;
            if budget > PIECE_BUDGET {
                return Err(Error::GridTooLarge {
                    cells: budget,
                    cap: PIECE_BUDGET,
                });
            }
            for center in subcoset_centers(self.prime, self.n, -r, levels) {
                let phase = center.dot(a).character().to_complex::<R>();
                contribs.push((Coset::new(center, s), *v * vol * phase));
            }
        }
        Ok(Self::from_contributions(self.prime, self.n, contribs))
    }

    /// (F^{-1} g)(x) = (F g)(-x).
    pub fn inverse_fourier(&self) -> Result<Self> {
        Ok(self.fourier()?.reflect())
    }

    /// Exact convolution. For ball pieces:
    /// 1_{B_r(a)} * 1_{B_s(b)} = p^{n min(r,s)} 1_{B_max(r,s)(a+b)}.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut contribs = Vec::new();
        for (a, v) in &self.pieces {
            for (b, w) in &other.pieces {
                let r = a.radius_exp();
                let s = b.radius_exp();
                let small_vol =
                    R::from_big_rational(&pow_p_rational(self.prime, r.min(s) * self.n as i64));
                let center = a.center().add(b.center());
                contribs.push((Coset::new(center, r.max(s)), *v * *w * small_vol));
            }
        }
        Self::from_contributions(self.prime, self.n, contribs)
    }
}

/// Centers of the cosets of radius `big - levels` subdividing B_big^n(0):
/// per coordinate k * p^{-big+...}, digits at positions [-big, -big+levels).
pub(crate) fn subcoset_centers(prime: u32, n: usize, big: i64, levels: u32) -> Vec<PadicVector> {
    let per_coord = (prime as u64).pow(levels);
    let total = per_coord.pow(n as u32);
    let mut out = Vec::with_capacity(total as usize);
    let mut idx = vec![0u64; n];
    loop {
        out.push(PadicVector::new(
            prime,
            idx.iter()
                .map(|&k| PadicScalar::from_parts(prime, -big, k))
                .collect(),
        ));
        let mut i = 0;
        while i < n {
            idx[i] += 1;
            if idx[i] < per_coord {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == n {
            return out;
        }
    }
}

/// Turns overlapping contributions into disjoint pieces; values add.
fn flatten_contributions<R: Real>(contribs: Vec<(Coset, Complex<R>)>) -> Vec<(Coset, Complex<R>)> {
    if contribs.is_empty() {
        return Vec::new();
    }
    let top = contribs
        .iter()
        .map(|(c, _)| {
            c.radius_exp()
                .max(c.center().norm_exponent().unwrap_or(i64::MIN))
        })
        .max()
        .unwrap();
    // Bucket by the ancestor at the common top radius, then sweep down.
    let mut buckets: HashMap<Coset, Vec<(Coset, Complex<R>)>> = HashMap::new();
    for (c, v) in contribs {
        let anc = Coset::new(c.center().clone(), top);
        buckets.entry(anc).or_default().push((c, v));
    }
    let mut out = Vec::new();
    for (anc, items) in buckets {
        sweep(&anc, Complex::zero(), items, &mut out);
    }
    out
}

fn sweep<R: Real>(
    current: &Coset,
    inherited: Complex<R>,
    items: Vec<(Coset, Complex<R>)>,
    out: &mut Vec<(Coset, Complex<R>)>,
) {
    let mut own = inherited;
    let mut rest = Vec::new();
    for (c, v) in items {
        if c.radius_exp() == current.radius_exp() {
            debug_assert_eq!(&c, current);
            own += v;
        } else {
            rest.push((c, v));
        }
    }
    if rest.is_empty() {
        if !own.is_zero() {
            out.push((current.clone(), own));
        }
        return;
    }
    let mut buckets: HashMap<Coset, Vec<(Coset, Complex<R>)>> = HashMap::new();
    for (c, v) in rest {
        let child_anc = Coset::new(c.center().clone(), current.radius_exp() - 1);
        buckets.entry(child_anc).or_default().push((c, v));
    }
    for child in current.children() {
        match buckets.remove(&child) {
            Some(sub) => sweep(&child, own, sub, out),
            None => {
                if !own.is_zero() {
                    out.push((child, own));
                }
            }
        }
    }
    debug_assert!(buckets.is_empty(), "subcoset escaped its parent");
}

/// Canonical form: a full family of p^n sibling cosets with one common
/// value collapses into the parent.
fn merge_sibling_pieces<R: Real>(
    prime: u32,
    n: usize,
    mut pieces: Vec<(Coset, Complex<R>)>,
) -> Vec<(Coset, Complex<R>)> {
    let family = (prime as usize).pow(n as u32);
    loop {
        let mut groups: HashMap<Coset, Vec<usize>> = HashMap::new();
        for (i, (c, _)) in pieces.iter().enumerate() {
            groups.entry(c.parent()).or_default().push(i);
        }
        let mut to_merge: Vec<(Coset, Complex<R>)> = Vec::new();
        let mut remove = vec![false; pieces.len()];
        for (parent, members) in groups {
            if members.len() != family {
                continue;
            }
            if members
                .iter()
                .any(|&i| pieces[i].0.radius_exp() + 1 != parent.radius_exp())
            {
                continue;
            }
            let v0 = pieces[members[0]].1;
            if members.iter().all(|&i| pieces[i].1 == v0) {
                for &i in &members {
                    remove[i] = true;
                }
                to_merge.push((parent, v0));
            }
        }
        if to_merge.is_empty() {
            return pieces;
        }
        let mut next: Vec<(Coset, Complex<R>)> = pieces
            .drain(..)
            .enumerate()
            .filter(|(i, _)| !remove[*i])
            .map(|(_, p)| p)
            .collect();
        next.extend(to_merge);
        pieces = next;
    }
}
