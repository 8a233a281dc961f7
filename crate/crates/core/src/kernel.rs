//! Heat-kernel evaluation with rigorous truncation error bounds.
//!
//! Z(x,t) is the inverse Fourier transform of exp(-t |f(xi)|^beta). The
//! integral splits into an inner ball (integrand replaced by 1, with a
//! linearization bound), spheres handled by scaling to the unit sphere and
//! enumerating residue cosets mod p^m (on which |f| is exactly constant, m
//! being the certificate depth), and an outer tail controlled by a
//! geometric-dominated closed form. Character integrals over cosets vanish
//! exactly once the sphere index passes m - log_p ||x||, so for x != 0 the
//! sphere sum is finite with no outer truncation error at all.
//!
//! Every returned value carries `err`, composed of (a) the inner-ball
//! linearization bound, (b) the outer tail bound, (c) a floating-point
//! summation bound proportional to the accumulated absolute mass.

use crate::error::{Error, Result};
use crate::lc::subcoset_centers;
use crate::padic::{Coset, PadicScalar, PadicVector};
use crate::real::Real;
use crate::symbol::{
    unit_sphere_residues, CertificateStatus, EllipticityCertificate, SymbolParams,
};
use num_complex::Complex;
use num_traits::Zero;
use std::sync::Arc;

/// Residue-table size guard.
const RESIDUE_BUDGET: u64 = 1 << 23;

/// Grid-cell guard for tabulations.
const CELL_BUDGET: u64 = 1 << 23;

/// Extra float-error headroom per term for exp/cos evaluation accuracy.
const TERM_ULP_FACTOR: u64 = 64;

/// A real number together with a rigorous bound on |computed - true|.
#[derive(Clone, Copy, Debug)]
pub struct KernelValue<R> {
    pub value: R,
    pub err: R,
}

impl<R: Real> KernelValue<R> {
    pub fn new(value: R, err: R) -> Self {
        KernelValue { value, err }
    }
}

/// Unit-sphere residue classes mod p^depth with the exact ord of f on each.
pub struct ResidueTable {
    depth: u32,
    points: Vec<PadicVector>,
    ords: Vec<u32>,
    ord_counts: Vec<u64>,
}

impl ResidueTable {
    pub fn build(params: &SymbolParams, depth: u32) -> Result<Self> {
        let p = params.prime();
        let n = params.dim();
        (p as u64)
            .checked_pow(depth * n as u32)
            .filter(|&c| c <= RESIDUE_BUDGET)
            .ok_or(Error::GridTooLarge {
                cells: u64::MAX,
                cap: RESIDUE_BUDGET,
            })?;
        let mut points = Vec::new();
        let mut ords = Vec::new();
        let mut ord_counts = vec![0u64; depth as usize];
        for residue in unit_sphere_residues(p, n, depth) {
            let value = params.poly().eval_bigint(&residue);
            let k = crate::symbol::vp_capped(&value, p, depth).ok_or_else(|| {
                Error::NotCertified(format!(
                    "residue {residue:?} has f = 0 mod p^{depth}; certificate depth too small"
                ))
            })?;
            ords.push(k);
            ord_counts[k as usize] += 1;
            points.push(PadicVector::new(
                p,
                residue
                    .into_iter()
                    .map(|c| PadicScalar::from_integer(p, c))
                    .collect(),
            ));
        }
        Ok(ResidueTable {
            depth,
            points,
            ords,
            ord_counts,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Certified symbol plus its residue table: everything needed to integrate
/// weights of |f(xi)|^beta against characters, independent of t.
pub struct SymbolEngine<R: Real> {
    params: SymbolParams,
    min_ord: u32,
    max_ord: u32,
    table: ResidueTable,
    _marker: std::marker::PhantomData<R>,
}

impl<R: Real> SymbolEngine<R> {
    pub fn new(params: SymbolParams, cert: &EllipticityCertificate) -> Result<Arc<Self>> {
        let (min_ord, max_ord, depth) = match cert.status() {
            CertificateStatus::Certified {
                min_ord,
                max_ord,
                depth,
                ..
            } => (*min_ord, *max_ord, *depth),
            other => return Err(Error::NotCertified(format!("{other:?}"))),
        };
        let table = ResidueTable::build(&params, depth)?;
        Ok(Arc::new(SymbolEngine {
            params,
            min_ord,
            max_ord,
            table,
            _marker: std::marker::PhantomData,
        }))
    }

    pub fn params(&self) -> &SymbolParams {
        &self.params
    }

    pub fn prime(&self) -> u32 {
        self.params.prime()
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn depth(&self) -> u32 {
        self.table.depth
    }

    pub fn min_ord(&self) -> u32 {
        self.min_ord
    }

    pub fn max_ord(&self) -> u32 {
        self.max_ord
    }

    pub fn residues(&self) -> &ResidueTable {
        &self.table
    }

    /// p^e at R precision (integer exponent).
    pub fn pow_p_int(&self, e: i64) -> R {
        R::from_f64_lossy((self.prime() as f64).powi(e as i32))
    }

    pub(crate) fn n_i(&self) -> i64 {
        self.dim() as i64
    }

    pub(crate) fn d_i(&self) -> i64 {
        self.params.poly().degree() as i64
    }

    /// Integral over {||xi|| <= p^cap} of
    /// chi_p(-x . xi) |f(xi)|^beta exp(-t |f(xi)|^beta) d^n xi, t >= 0.
    ///
    /// With t = 0 this is the raw pseudo-differential weight; the integrand
    /// vanishes fast enough at 0 that the deep spheres are controlled by a
    /// geometric envelope bounded by `eps`. When `cap` is None the domain
    /// is all of Q_p^n, which needs x != 0 so the character cutoff makes
    /// the sphere sum finite.
    pub fn symbol_heat_integral(
        &self,
        x: &PadicVector,
        cap: Option<i64>,
        t: R,
        eps: R,
    ) -> Result<(Complex<R>, R)> {
        let m = self.depth() as i64;
        let x_exp = x.norm_exponent();
        let exact_cut = x_exp.map(|e| m - e);
        let j_hi = match (cap, exact_cut) {
            (Some(c), Some(e)) => c.min(e),
            (Some(c), None) => c,
            (None, Some(e)) => e,
            (None, None) => {
                return Err(Error::InvalidParameter(
                    "uncapped symbol integral at x = 0 diverges".into(),
                ))
            }
        };
        // |sphere_j| <= p^{jn} C1^beta p^{j d beta}; below j_lo the sum is
        // dominated by a geometric series with ratio p^{-(n + d beta)}.
        let mut j_lo = j_hi;
        while self.levy_lower_tail_bound(j_lo) > eps && j_lo > j_hi - 100_000 {
            j_lo -= 1;
        }
        let trunc_err = self.levy_lower_tail_bound(j_lo);

        let dots: Vec<PadicScalar> = if x.is_zero() {
            Vec::new()
        } else {
            self.table.points.iter().map(|eta| -&x.dot(eta)).collect()
        };
        let mut re = R::zero();
        let mut im = R::zero();
        let mut abs = R::zero();
        let mut terms = 0u64;
        for j in (j_lo + 1)..=j_hi {
            let scale_vol = self.pow_p_int((j - m) * self.n_i());
            let trivial = x_exp.map_or(true, |e| e + j <= 0);
            for (idx, k) in self.table.ords.iter().enumerate() {
                let a = self.params.pow_p_beta::<R>(j * self.d_i() - *k as i64);
                let w = if t.is_zero() { a } else { a * (-t * a).exp() };
                let mag = scale_vol * w;
                if trivial {
                    re += mag;
                } else {
                    let angle = dots[idx].mul_pow_p(-j).fractional_part();
                    if angle.is_zero() {
                        re += mag;
                    } else {
                        let theta = R::from_big_rational(&angle) * R::TAU();
                        re += mag * theta.cos();
                        im += mag * theta.sin();
                    }
                }
                abs += mag;
                terms += 1;
            }
        }
        let float_err =
            R::from_f64_lossy((terms + TERM_ULP_FACTOR) as f64) * R::unit_roundoff() * abs;
        Ok((Complex::new(re, im), trunc_err + float_err))
    }

    /// The Levy density L(y) = lim_{t->0} Z_t(y)/t at y != 0, via the
    /// finite oscillatory sphere sum of -|f|^beta. `eps` bounds the
    /// geometric truncation of the deep spheres.
    pub fn levy_density(&self, y: &PadicVector, eps: R) -> Result<KernelValue<R>> {
        if y.is_zero() {
            return Err(Error::InvalidParameter("Levy density needs y != 0".into()));
        }
        let (z, err) = self.symbol_heat_integral(y, None, R::zero(), eps)?;
        Ok(KernelValue::new(-z.re, err + z.im.abs()))
    }

    /// Bound for the absolute sphere sums of |f|^beta over j <= cut.
    fn levy_lower_tail_bound(&self, cut: i64) -> R {
        let c1b = self.params.pow_p_beta::<R>(-(self.min_ord as i64));
        let step = self.pow_p_int(self.n_i()) * self.params.pow_p_beta::<R>(self.d_i());
        let top =
            self.pow_p_int(cut * self.n_i()) * self.params.pow_p_beta::<R>(cut * self.d_i()) * c1b;
        top / (R::one() - R::one() / step)
    }

    /// Mass of the Levy measure on the sphere S_w: sum over residue cosets
    /// of vol * L(center).
    pub fn levy_sphere_mass(&self, w: i64, eps: R) -> Result<KernelValue<R>> {
        let m = self.depth() as i64;
        let vol = self.pow_p_int((w - m) * self.n_i());
        let mut value = R::zero();
        let mut err = R::zero();
        let per = eps / R::from_f64_lossy(self.table.len() as f64);
        for eta in &self.table.points {
            let center = eta.mul_pow_p(-w);
            let l = self.levy_density(&center, per)?;
            value += vol * l.value;
            err += vol * l.err;
        }
        Ok(KernelValue::new(value, err))
    }

    /// Series for the Levy mass outside B_r: sum over spheres w > r.
    pub fn levy_mass_outside_series(&self, r: i64, eps: R) -> Result<KernelValue<R>> {
        let mut value = R::zero();
        let mut err = R::zero();
        let mut w = r + 1;
        loop {
            let sphere = self.levy_sphere_mass(w, eps)?;
            value += sphere.value;
            err += sphere.err;
            let envelope = self.levy_upper_tail_bound(w + 1);
            if envelope <= eps || w > r + 400 {
                err += envelope;
                break;
            }
            w += 1;
        }
        Ok(KernelValue::new(value, err))
    }

    /// Bound for the total Levy sphere mass over spheres w >= from.
    fn levy_upper_tail_bound(&self, from: i64) -> R {
        let m = self.depth() as i64;
        let bound_at =
            |w: i64| -> R { self.pow_p_int(w * self.n_i()) * self.levy_lower_tail_bound(m - w) };
        let ratio = self.params.pow_p_beta::<R>(-self.d_i());
        bound_at(from) / (R::one() - ratio)
    }
}

/// A heat-kernel evaluation context: engine + time + truncation levels
/// derived from the target accuracy.
pub struct KernelJob<R: Real> {
    engine: Arc<SymbolEngine<R>>,
    t: R,
    target_eps: R,
    /// Inner ball B_{-inner} gets the linearized integrand.
    inner: i64,
    /// Spheres above `outer` fall into the geometric tail bound.
    outer: i64,
}

impl<R: Real> KernelJob<R> {
    pub fn new(engine: Arc<SymbolEngine<R>>, t: R, target_eps: R) -> Result<Self> {
        if !(t > R::zero()) {
            return Err(Error::NegativeTime(t.to_f64().unwrap_or(f64::NAN)));
        }
        if !(target_eps > R::zero()) {
            return Err(Error::InvalidParameter("target_eps must be > 0".into()));
        }
        let half = target_eps / R::from_f64_lossy(2.0);
        let mut inner = 0i64;
        while Self::inner_bound_static(&engine, t, inner) > half {
            inner += 1;
            if inner > 100_000 {
                return Err(Error::InvalidParameter(
                    "inner cutoff derivation diverged".into(),
                ));
            }
        }
        let mut outer = 1i64;
        loop {
            let term_next = Self::tail_term_static(&engine, t, outer + 1);
            if term_next.is_zero() {
                break;
            }
            let q = Self::tail_ratio_static(&engine, t, outer);
            let two = R::from_f64_lossy(2.0);
            if q <= R::from_f64_lossy(0.5) && two * term_next <= half {
                break;
            }
            outer += 1;
            if outer > 100_000 {
                return Err(Error::InvalidParameter(
                    "outer cutoff derivation diverged".into(),
                ));
            }
        }
        Ok(KernelJob {
            engine,
            t,
            target_eps,
            inner,
            outer,
        })
    }

    pub fn engine(&self) -> &Arc<SymbolEngine<R>> {
        &self.engine
    }

    pub fn t(&self) -> R {
        self.t
    }

    pub fn target_eps(&self) -> R {
        self.target_eps
    }

    pub fn inner_cutoff(&self) -> i64 {
        self.inner
    }

    pub fn outer_cutoff(&self) -> i64 {
        self.outer
    }

    /// vol(B_{-L}) * (1 - exp(-t C1^beta p^{-L d beta})).
    fn inner_bound_static(engine: &SymbolEngine<R>, t: R, l: i64) -> R {
        let vol = engine.pow_p_int(-l * engine.n_i());
        let a = engine
            .params
            .pow_p_beta::<R>(-(engine.min_ord as i64) - l * engine.d_i());
        vol * (-(-t * a).exp_m1())
    }

    /// p^{jn} exp(-t C0^beta p^{j d beta}), computed in log space.
    fn tail_term_static(engine: &SymbolEngine<R>, t: R, j: i64) -> R {
        let ln_p = R::from_f64_lossy((engine.prime() as f64).ln());
        let log_term = R::from_f64_lossy((j * engine.n_i()) as f64) * ln_p
            - t * engine
                .params
                .pow_p_beta::<R>(-(engine.max_ord as i64) + j * engine.d_i());
        if log_term < R::from_f64_lossy(-745.0) {
            R::zero()
        } else {
            log_term.exp()
        }
    }

    /// Ratio bound between successive tail terms past `u`.
    fn tail_ratio_static(engine: &SymbolEngine<R>, t: R, u: i64) -> R {
        let p_n = engine.pow_p_int(engine.n_i());
        let a_next = engine
            .params
            .pow_p_beta::<R>(-(engine.max_ord as i64) + (u + 1) * engine.d_i());
        let shrink = R::one() - engine.params.pow_p_beta::<R>(-engine.d_i());
        p_n * (-t * a_next * shrink).exp()
    }

    fn tail_bound(&self, u: i64) -> R {
        R::from_f64_lossy(2.0) * Self::tail_term_static(&self.engine, self.t, u + 1)
    }

    /// Core sum: integral over {||xi|| <= p^cap} (all of Q_p^n when cap is
    /// None) of chi_p(-x . xi) exp(-t |f(xi)|^beta) d^n xi.
    pub fn heat_integral(&self, x: &PadicVector, cap: Option<i64>) -> (Complex<R>, R) {
        let engine = &*self.engine;
        let m = engine.depth() as i64;
        let n = engine.n_i();
        let d = engine.d_i();
        let x_exp = x.norm_exponent();
        let exact_cut = x_exp.map(|e| m - e);

        let nominal_hi = cap.unwrap_or(self.outer);
        let j_hi = exact_cut.map_or(nominal_hi, |e| e.min(nominal_hi));
        let inner_radius = (-self.inner).min(nominal_hi);

        let mut err = R::zero();
        if cap.is_none() && exact_cut.map_or(true, |e| e > self.outer) {
            err += self.tail_bound(self.outer);
        }

        let mut re = R::zero();
        let mut im = R::zero();
        let mut abs = R::zero();
        let mut terms: u64 = 1;

        // Inner ball: exact character integral of the constant 1.
        let inner_vol = engine.pow_p_int(inner_radius * n);
        if x_exp.map_or(true, |e| e <= -inner_radius) {
            re += inner_vol;
            abs += inner_vol;
        }
        err += Self::inner_bound_static(engine, self.t, -inner_radius);

        let table = engine.residues();
        let dots: Vec<PadicScalar> = if x.is_zero() {
            Vec::new()
        } else {
            table.points.iter().map(|eta| -&x.dot(eta)).collect()
        };

        let mut weights = vec![R::zero(); table.depth as usize];
        for j in (inner_radius + 1)..=j_hi {
            let mut all_zero = true;
            for (k, w) in weights.iter_mut().enumerate() {
                *w = (-self.t * engine.params.pow_p_beta::<R>(j * d - k as i64)).exp();
                if !w.is_zero() {
                    all_zero = false;
                }
            }
            if all_zero {
                continue;
            }
            let scale_vol = engine.pow_p_int((j - m) * n);
            let trivial_phases = x_exp.map_or(true, |e| e + j <= 0);
            if trivial_phases {
                for (k, count) in table.ord_counts.iter().enumerate() {
                    if *count == 0 {
                        continue;
                    }
                    let contrib = scale_vol * weights[k] * R::from_f64_lossy(*count as f64);
                    re += contrib;
                    abs += contrib;
                    terms += 1;
                }
            } else {
                for (idx, k) in table.ords.iter().enumerate() {
                    let w = weights[*k as usize];
                    if w.is_zero() {
                        continue;
                    }
                    let angle = dots[idx].mul_pow_p(-j).fractional_part();
                    let mag = scale_vol * w;
                    if angle.is_zero() {
                        re += mag;
                    } else {
                        let theta = R::from_big_rational(&angle) * R::TAU();
                        re += mag * theta.cos();
                        im += mag * theta.sin();
                    }
                    abs += mag;
                    terms += 1;
                }
            }
        }
        err += R::from_f64_lossy((terms + TERM_ULP_FACTOR) as f64) * R::unit_roundoff() * abs;
        (Complex::new(re, im), err)
    }

    /// Z(x, t) with its error budget. Real by symmetry of the residue set;
    /// the floating imaginary residue is folded into the bound.
    pub fn kernel_value(&self, x: &PadicVector) -> KernelValue<R> {
        let (z, err) = self.heat_integral(x, None);
        KernelValue::new(z.re, err + z.im.abs())
    }

    /// Mass of the kernel on a coset: integral over c of Z_t(y) d^n y,
    /// computed on the Fourier side (no outer tail at all).
    pub fn coset_mass(&self, c: &Coset) -> KernelValue<R> {
        let scale = self.engine.pow_p_int(c.radius_exp() * self.engine.n_i());
        let (z, err) = self.heat_integral(c.center(), Some(-c.radius_exp()));
        KernelValue::new(z.re * scale, (err + z.im.abs()) * scale)
    }

    /// Total mass of Z_t: equals 1 exactly; computed as the mass of a ball
    /// large enough that the complement holds at most target_eps/2.
    pub fn kernel_total_mass(&self) -> KernelValue<R> {
        let half = self.target_eps / R::from_f64_lossy(2.0);
        let outside = |k: i64| -> R {
            let a = self
                .engine
                .params
                .pow_p_beta::<R>(-(self.engine.min_ord as i64) - k * self.engine.d_i());
            -(-self.t * a).exp_m1()
        };
        let mut big = 0i64;
        while outside(big) > half && big < 100_000 {
            big += 1;
        }
        let mass = self.coset_mass(&Coset::centered(
            self.engine.prime(),
            self.engine.dim(),
            big,
        ));
        KernelValue::new(mass.value, mass.err + outside(big))
    }

    /// (1/t) * Z_t(complement of B_r): the Levy-probe quantity.
    pub fn levy_mass_outside(&self, r: i64) -> KernelValue<R> {
        let mass = self.coset_mass(&Coset::centered(self.engine.prime(), self.engine.dim(), r));
        KernelValue::new((R::one() - mass.value) / self.t, mass.err / self.t)
    }
}

/// Decay probe: Z(x,t) ||x||^{d beta + n} / t, with the evaluation accuracy
/// tightened to the expected magnitude of the tiny kernel value.
pub fn decay_ratio<R: Real>(
    engine: &Arc<SymbolEngine<R>>,
    x: &PadicVector,
    t: R,
) -> Result<KernelValue<R>> {
    let x_exp = x
        .norm_exponent()
        .ok_or_else(|| Error::InvalidParameter("decay probe needs x != 0".into()))?;
    let weight = engine.params().pow_p_beta::<R>(x_exp * engine.d_i())
        * engine.pow_p_int(x_exp * engine.n_i());
    let eps = (t / weight * R::from_f64_lossy(1e-4)).max(R::from_f64_lossy(1e-280));
    let job = KernelJob::new(engine.clone(), t, eps)?;
    let z = job.kernel_value(x);
    Ok(KernelValue::new(z.value * weight / t, z.err * weight / t))
}

/// Chapman-Kolmogorov residual via two independent evaluation paths:
/// direct Z_{t+s}(x) against the physical-space cell convolution of the
/// tabulated Z_t and Z_s.
#[derive(Clone, Copy, Debug)]
pub struct ChapmanCheck<R> {
    pub residual: R,
    pub budget: R,
}

pub fn chapman_residual<R: Real>(
    engine: &Arc<SymbolEngine<R>>,
    t: R,
    s: R,
    x: &PadicVector,
    eps: R,
) -> Result<ChapmanCheck<R>> {
    let job_t = KernelJob::new(engine.clone(), t, eps)?;
    let job_s = KernelJob::new(engine.clone(), s, eps)?;
    let job_ts = KernelJob::new(engine.clone(), t + s, eps)?;
    let direct = job_ts.kernel_value(x);

    let zero = PadicVector::zero(engine.prime(), engine.dim());
    let sup_t = job_t.kernel_value(&zero);
    let sup_t_bound = sup_t.value + sup_t.err;

    // Region B_R holding all but a sliver of the Z_s mass.
    let region_tol = R::from_f64_lossy(1e-8);
    let mut big = 1i64;
    let mut outside;
    loop {
        let mass = job_s.coset_mass(&Coset::centered(engine.prime(), engine.dim(), big));
        outside = (R::one() - mass.value) + mass.err;
        if outside <= region_tol || big > 80 {
            break;
        }
        big += 1;
    }

    let fine = job_t.outer_cutoff().max(job_s.outer_cutoff());
    let x_exp = x.norm_exponent().unwrap_or(i64::MIN);
    let cells = resolving_cells(
        engine.prime(),
        engine.dim(),
        engine.depth(),
        big,
        fine,
        x_exp,
    )?;

    let mut conv = R::zero();
    let mut cell_err = R::zero();
    for cell in &cells {
        let vol = engine.pow_p_int(cell.radius_exp() * engine.n_i());
        let zs = job_s.kernel_value(cell.center());
        let zt = job_t.kernel_value(&x.sub(cell.center()));
        conv += vol * zt.value * zs.value;
        cell_err += vol * (zt.value.abs() * zs.err + zs.value.abs() * zt.err + zt.err * zs.err);
    }

    let residual = (direct.value - conv).abs();
    let budget = direct.err + cell_err + sup_t_bound * outside;
    Ok(ChapmanCheck { residual, budget })
}

/// Cells of B_R on which the truncated kernels (fine scale p^{-G}) are
/// exactly constant: the fine ball B_{-G}, fine cells on the spheres up to
/// `fine_below`, and residue-scale cells (radius w - m) on the far spheres.
pub fn resolving_cells(
    prime: u32,
    n: usize,
    depth: u32,
    grid_radius: i64,
    fine_scale: i64,
    fine_below: i64,
) -> Result<Vec<Coset>> {
    let m = depth as i64;
    let mut cells = vec![Coset::centered(prime, n, -fine_scale)];
    let mut count: u64 = 1;
    for w in (-fine_scale + 1)..=grid_radius {
        let rho = if w <= fine_below {
            -fine_scale
        } else {
            (w - m).max(-fine_scale)
        };
        let levels = (w - rho) as u32;
        count += (prime as u64)
            .checked_pow(levels * n as u32)
            .ok_or(Error::GridTooLarge {
                cells: u64::MAX,
                cap: CELL_BUDGET,
            })?;
        if count > CELL_BUDGET {
            return Err(Error::GridTooLarge {
                cells: count,
                cap: CELL_BUDGET,
            });
        }
        for center in subcoset_centers(prime, n, w, levels) {
            if center.norm_exponent() == Some(w) {
                cells.push(Coset::new(center, rho));
            }
        }
    }
    Ok(cells)
}

/// Extrapolation to 0 of a sequence sampled at decreasing positive nodes,
/// by Neville's scheme on the last few points.
pub fn extrapolate_to_zero<R: Real>(points: &[(R, R)]) -> R {
    let take = points.len().min(3);
    let pts = &points[points.len() - take..];
    let mut vals: Vec<R> = pts.iter().map(|&(_, v)| v).collect();
    let xs: Vec<R> = pts.iter().map(|&(x, _)| x).collect();
    for level in 1..take {
        for i in 0..take - level {
            let x0 = xs[i];
            let x1 = xs[i + level];
            vals[i] = (x0 * vals[i + 1] - x1 * vals[i]) / (x0 - x1);
        }
    }
    vals[0]
}

/// A t-indexed sequence of probe values with Cauchy-difference diagnostics
/// and a limit estimate.
#[derive(Clone, Debug)]
pub struct LimitEstimate<R> {
    pub values: Vec<(R, KernelValue<R>)>,
    pub cauchy_diffs: Vec<R>,
    pub limit: R,
}

fn check_decreasing<R: Real>(ts: &[R]) -> Result<()> {
    if ts.is_empty() {
        return Err(Error::InvalidSequence("empty t sequence".into()));
    }
    for pair in ts.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(Error::InvalidSequence(
                "t sequence must be strictly decreasing".into(),
            ));
        }
    }
    if !(ts[ts.len() - 1] > R::zero()) {
        return Err(Error::InvalidSequence("t values must be positive".into()));
    }
    Ok(())
}

/// (1/t) Z_t(complement B_r) along a decreasing t sequence.
pub fn levy_mass_outside_sequence<R: Real>(
    engine: &Arc<SymbolEngine<R>>,
    r: i64,
    ts: &[R],
    eps: R,
) -> Result<LimitEstimate<R>> {
    check_decreasing(ts)?;
    let mut values = Vec::with_capacity(ts.len());
    for &t in ts {
        let job = KernelJob::new(engine.clone(), t, eps * t)?;
        values.push((t, job.levy_mass_outside(r)));
    }
    Ok(finish_estimate(values))
}

/// Z_t(y)/t along a decreasing t sequence, extrapolated to the Levy
/// density at y.
pub fn levy_density_estimate<R: Real>(
    engine: &Arc<SymbolEngine<R>>,
    y: &PadicVector,
    ts: &[R],
    eps: R,
) -> Result<LimitEstimate<R>> {
    check_decreasing(ts)?;
    if y.is_zero() {
        return Err(Error::InvalidParameter(
            "Levy density estimate needs y != 0".into(),
        ));
    }
    let mut values = Vec::with_capacity(ts.len());
    for &t in ts {
        let job = KernelJob::new(engine.clone(), t, eps * t)?;
        let z = job.kernel_value(y);
        values.push((t, KernelValue::new(z.value / t, z.err / t)));
    }
    Ok(finish_estimate(values))
}

fn finish_estimate<R: Real>(values: Vec<(R, KernelValue<R>)>) -> LimitEstimate<R> {
    let cauchy_diffs = values
        .windows(2)
        .map(|w| (w[1].1.value - w[0].1.value).abs())
        .collect();
    let pts: Vec<(R, R)> = values.iter().map(|&(t, kv)| (t, kv.value)).collect();
    let limit = extrapolate_to_zero(&pts);
    LimitEstimate {
        values,
        cauchy_diffs,
        limit,
    }
}

/// Independent radial oracle: for symbols ||xi||^alpha (n = 1, f = xi, or a
/// Taibleson-type polynomial) the kernel reduces to the sphere series
/// Z_t(x) = sum_{gamma <= nu} p^{gamma n}(1 - p^{-n}) e^{-t p^{gamma alpha}}
///          - p^{nu n} e^{-t p^{(nu+1) alpha}},   nu = ord(x),
/// with all gammas for x = 0. Uses nothing from the kernel engine.
pub fn radial_oracle<R: Real>(prime: u32, n: usize, alpha: R, t: R, x: &PadicVector) -> R {
    let p = R::from_f64_lossy(prime as f64);
    let n_i = n as i64;
    let pn_inv = R::one() - p.powi(-(n as i32));
    let sphere_weight = |gamma: i64| -> R {
        let a = p.powf(alpha * R::from_f64_lossy(gamma as f64));
        (-t * a).exp()
    };
    let pow_pn = |e: i64| -> R { p.powi((e * n_i) as i32) };

    let mut sum = R::zero();
    match x.ord() {
        Some(nu) => {
            sum -= pow_pn(nu) * sphere_weight(nu + 1);
            let mut gamma = nu;
            loop {
                sum += pow_pn(gamma) * pn_inv * sphere_weight(gamma);
                if gamma < nu - 200 {
                    break;
                }
                gamma -= 1;
            }
        }
        None => {
            let mut gamma = 0i64;
            loop {
                let term = pow_pn(gamma) * pn_inv * sphere_weight(gamma);
                if term.is_zero() && gamma > 0 {
                    break;
                }
                sum += term;
                gamma += 1;
                if gamma > 10_000 {
                    break;
                }
            }
            let mut gamma = -1i64;
            loop {
                sum += pow_pn(gamma) * pn_inv * sphere_weight(gamma);
                if gamma < -200 {
                    break;
                }
                gamma -= 1;
            }
        }
    }
    sum
}

/// Radial ball-mass series: integral of Z_t over B_r for ||xi||^alpha
/// symbols, i.e. p^{rn} * integral over B_{-r} of e^{-t ||xi||^alpha}.
pub fn radial_ball_mass_oracle<R: Real>(prime: u32, n: usize, alpha: R, t: R, r: i64) -> R {
    let p = R::from_f64_lossy(prime as f64);
    let n_i = n as i64;
    let pn_inv = R::one() - p.powi(-(n as i32));
    let mut sum = R::zero();
    let mut gamma = -r;
    loop {
        let a = p.powf(alpha * R::from_f64_lossy(gamma as f64));
        sum += p.powi((gamma * n_i) as i32) * pn_inv * (-t * a).exp();
        if gamma < -r - 200 {
            break;
        }
        gamma -= 1;
    }
    p.powi((r * n_i) as i32) * sum
}

/// Closed form of the radial Levy density:
/// L(y) = ||y||^{-(alpha+n)} * (p^alpha - (1 - p^{-n}) / (1 - p^{-n-alpha})).
pub fn radial_levy_density_oracle<R: Real>(prime: u32, n: usize, alpha: R, y_norm_exp: i64) -> R {
    let p = R::from_f64_lossy(prime as f64);
    let pn_inv = R::one() - p.powi(-(n as i32));
    let denom = R::one() - p.powf(-(R::from_f64_lossy(n as f64) + alpha));
    let constant = p.powf(alpha) - pn_inv / denom;
    let scale =
        p.powf(-(alpha + R::from_f64_lossy(n as f64)) * R::from_f64_lossy(y_norm_exp as f64));
    scale * constant
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::random_on_sphere;
    use crate::symbol::{EllipticPolynomial, DEFAULT_MAX_DEPTH};
    use num_rational::Rational64;
    use num_traits::One;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn engine_a(beta: Rational64) -> Arc<SymbolEngine<f64>> {
        let poly = EllipticPolynomial::power_family(3, 2);
        let cert = poly.certify(DEFAULT_MAX_DEPTH).unwrap();
        let params = SymbolParams::new(poly, beta).unwrap();
        SymbolEngine::new(params, &cert).unwrap()
    }

    fn engine_b(beta: Rational64) -> Arc<SymbolEngine<f64>> {
        let poly =
            EllipticPolynomial::new(2, 1, 1, vec![(vec![1], num_bigint::BigInt::one())]).unwrap();
        let cert = poly.certify(DEFAULT_MAX_DEPTH).unwrap();
        let params = SymbolParams::new(poly, beta).unwrap();
        SymbolEngine::new(params, &cert).unwrap()
    }

    #[test]
    fn radial_oracle_at_zero_matches_series() {
        // p=2, n=1, alpha=1, t=1: sum over gamma of 2^{gamma-1} e^{-2^gamma}
        let x = PadicVector::zero(2, 1);
        let v = radial_oracle::<f64>(2, 1, 1.0, 1.0, &x);
        let mut direct = 0.0f64;
        for gamma in -60..60i64 {
            direct += 2f64.powi(gamma as i32 - 1) * (-2f64.powi(gamma as i32)).exp();
        }
        assert!((v - direct).abs() < 1e-14);
    }

    #[test]
    fn kernel_matches_radial_oracle() {
        let engine = engine_b(Rational64::one());
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for &t in &[0.1f64, 1.0, 10.0] {
            let job = KernelJob::new(engine.clone(), t, 1e-12).unwrap();
            for ord in -3..4i64 {
                let x = random_on_sphere(2, 1, -ord, 6, &mut rng);
                let kv = job.kernel_value(&x);
                let oracle = radial_oracle::<f64>(2, 1, 1.0, t, &x);
                assert!(
                    (kv.value - oracle).abs() <= kv.err + 1e-10,
                    "t={t} ord={ord}: {} vs {} (err {})",
                    kv.value,
                    oracle,
                    kv.err
                );
            }
            let zero = PadicVector::zero(2, 1);
            let kv = job.kernel_value(&zero);
            let oracle = radial_oracle::<f64>(2, 1, 1.0, t, &zero);
            assert!((kv.value - oracle).abs() <= kv.err + 1e-10);
        }
    }

    #[test]
    fn total_mass_is_one() {
        for beta in [Rational64::new(1, 2), Rational64::one()] {
            let engine = engine_a(beta);
            for &t in &[0.1f64, 1.0, 10.0] {
                let job = KernelJob::new(engine.clone(), t, 1e-9).unwrap();
                let mass = job.kernel_total_mass();
                assert!(
                    (mass.value - 1.0).abs() <= mass.err + 1e-9,
                    "beta={beta} t={t}: mass {} err {}",
                    mass.value,
                    mass.err
                );
            }
        }
    }

    #[test]
    fn kernel_positivity_on_probes() {
        let engine = engine_a(Rational64::one());
        let job = KernelJob::new(engine, 0.7, 1e-10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..60 {
            let ord = rand::Rng::gen_range(&mut rng, -3..4i64);
            let x = random_on_sphere(3, 2, ord, 6, &mut rng);
            let kv = job.kernel_value(&x);
            assert!(kv.value >= -kv.err, "negative beyond budget at {x:?}");
        }
    }

    #[test]
    fn coset_mass_additivity_and_radial_oracle() {
        let engine = engine_b(Rational64::new(1, 2));
        let job = KernelJob::new(engine, 0.5, 1e-12).unwrap();
        let parent = Coset::centered(2, 1, 0);
        let total = job.coset_mass(&parent);
        let mut sum = 0.0;
        let mut errs = total.err;
        for child in parent.children() {
            let kv = job.coset_mass(&child);
            sum += kv.value;
            errs += kv.err;
        }
        assert!((sum - total.value).abs() <= errs + 1e-14);

        let oracle = radial_ball_mass_oracle::<f64>(2, 1, 0.5, 0.5, 0);
        assert!((total.value - oracle).abs() <= total.err + 1e-10);
    }

    #[test]
    fn mass_in_unit_interval() {
        let engine = engine_a(Rational64::new(1, 2));
        let job = KernelJob::new(engine, 0.3, 1e-10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for _ in 0..25 {
            let center = crate::padic::random_in_ball(3, 2, 2, 5, &mut rng);
            let c = Coset::new(center, rand::Rng::gen_range(&mut rng, -2..2i64));
            let kv = job.coset_mass(&c);
            assert!(kv.value >= -kv.err && kv.value <= 1.0 + kv.err);
        }
    }

    #[test]
    fn deeper_residue_table_gives_identical_values() {
        // structural check of the exact sphere cutoff: enumerating one
        // digit deeper must reproduce the same numbers up to float dust
        let poly = EllipticPolynomial::power_family(3, 2);
        let cert = poly.certify(DEFAULT_MAX_DEPTH).unwrap();
        let params = SymbolParams::new(poly.clone(), Rational64::one()).unwrap();
        let shallow = SymbolEngine::<f64>::new(params.clone(), &cert).unwrap();

        let deep_table = ResidueTable::build(&params, cert.depth().unwrap() + 1).unwrap();
        let deep = Arc::new(SymbolEngine {
            params,
            min_ord: cert.min_ord().unwrap(),
            max_ord: cert.max_ord().unwrap(),
            table: deep_table,
            _marker: std::marker::PhantomData,
        });

        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for &t in &[0.2f64, 2.0] {
            let job1 = KernelJob::new(shallow.clone(), t, 1e-11).unwrap();
            let job2 = KernelJob::new(deep.clone(), t, 1e-11).unwrap();
            for ord in -2..3i64 {
                let x = random_on_sphere(3, 2, ord, 7, &mut rng);
                let a = job1.kernel_value(&x);
                let b = job2.kernel_value(&x);
                assert!(
                    (a.value - b.value).abs() < 1e-12,
                    "depth disagreement at {x:?}: {} vs {}",
                    a.value,
                    b.value
                );
            }
        }
    }

    #[test]
    fn chapman_residual_within_budget() {
        let engine = engine_a(Rational64::one());
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        for &(t, s) in &[(0.5f64, 0.5f64), (1.0, 0.5), (1.0, 2.0)] {
            for ord in [-1i64, 0, 1] {
                let x = random_on_sphere(3, 2, ord, 5, &mut rng);
                let check = chapman_residual(&engine, t, s, &x, 1e-10).unwrap();
                assert!(
                    check.residual <= check.budget + 1e-6,
                    "t={t} s={s} ord={ord}: residual {} budget {}",
                    check.residual,
                    check.budget
                );
            }
        }
    }

    #[test]
    fn decay_ratio_bounded_on_radial_case() {
        let engine = engine_b(Rational64::one());
        let mut ratios = Vec::new();
        for x_exp in 1..=8i64 {
            let x = PadicVector::new(2, vec![PadicScalar::one(2).mul_pow_p(-x_exp)]);
            for &t in &[0.1f64, 1.0] {
                let kv = decay_ratio(&engine, &x, t).unwrap();
                assert!(kv.value.is_finite() && kv.value > 0.0);
                ratios.push(kv.value);
            }
        }
        let max = ratios.iter().cloned().fold(0.0f64, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 100.0, "ratio spread {max}/{min}");
    }

    #[test]
    fn levy_density_matches_radial_closed_form() {
        let engine = engine_b(Rational64::one());
        for y_exp in -1..3i64 {
            let y = PadicVector::new(2, vec![PadicScalar::one(2).mul_pow_p(-y_exp)]);
            let l = engine.levy_density(&y, 1e-14).unwrap();
            let oracle = radial_levy_density_oracle::<f64>(2, 1, 1.0, y_exp);
            assert!(
                (l.value - oracle).abs() <= l.err + 1e-10 * oracle.abs(),
                "y_exp={y_exp}: {} vs {}",
                l.value,
                oracle
            );
        }
    }

    #[test]
    fn levy_density_scaling_law() {
        // shrinking ||y|| by p scales the density by p^{d beta + n}
        let engine = engine_b(Rational64::new(1, 2));
        let y1 = PadicVector::new(2, vec![PadicScalar::one(2)]);
        let y2 = PadicVector::new(2, vec![PadicScalar::one(2).mul_pow_p(1)]);
        let l1 = engine.levy_density(&y1, 1e-14).unwrap();
        let l2 = engine.levy_density(&y2, 1e-14).unwrap();
        let expected = 2f64.powf(1.5);
        assert!((l2.value / l1.value - expected).abs() < 1e-9);
    }

    #[test]
    fn levy_estimates_converge_to_series() {
        let engine = engine_b(Rational64::one());
        let ts = [1e-1f64, 1e-2, 1e-3, 1e-4];
        let y = PadicVector::new(2, vec![PadicScalar::one(2)]);
        let est = levy_density_estimate(&engine, &y, &ts, 1e-10).unwrap();
        let oracle = radial_levy_density_oracle::<f64>(2, 1, 1.0, 0);
        assert!(
            (est.limit - oracle).abs() <= 1e-6 * oracle,
            "limit {} oracle {}",
            est.limit,
            oracle
        );
        for w in est.cauchy_diffs.windows(2) {
            assert!(w[1] <= 0.5 * w[0]);
        }

        let est = levy_mass_outside_sequence(&engine, 0, &ts, 1e-10).unwrap();
        assert!(est.limit > 0.0);
        let series = engine.levy_mass_outside_series(0, 1e-10).unwrap();
        assert!(
            (est.limit - series.value).abs() <= 1e-6 * series.value + series.err,
            "probe {} series {}",
            est.limit,
            series.value
        );
    }

    #[test]
    fn rejects_bad_sequences_and_zero_points() {
        let engine = engine_b(Rational64::one());
        let y = PadicVector::new(2, vec![PadicScalar::one(2)]);
        assert!(levy_density_estimate(&engine, &y, &[0.1, 0.2], 1e-8).is_err());
        assert!(levy_density_estimate(&engine, &y, &[], 1e-8).is_err());
        let zero = PadicVector::zero(2, 1);
        assert!(levy_density_estimate(&engine, &zero, &[0.1, 0.01], 1e-8).is_err());
        assert!(engine.levy_density(&zero, 1e-8).is_err());
    }

    #[test]
    fn job_requires_positive_time_and_certificate() {
        let engine = engine_a(Rational64::one());
        assert!(KernelJob::new(engine.clone(), 0.0, 1e-8).is_err());
        assert!(KernelJob::new(engine, -1.0, 1e-8).is_err());

        let bad = EllipticPolynomial::new(
            5,
            2,
            2,
            vec![
                (vec![2, 0], num_bigint::BigInt::one()),
                (vec![0, 2], num_bigint::BigInt::one()),
            ],
        )
        .unwrap();
        let cert = bad.certify(DEFAULT_MAX_DEPTH).unwrap();
        let params = SymbolParams::new(bad, Rational64::one()).unwrap();
        assert!(SymbolEngine::<f64>::new(params, &cert).is_err());
    }

    #[test]
    fn f32_instantiation_smoke() {
        let poly =
            EllipticPolynomial::new(2, 1, 1, vec![(vec![1], num_bigint::BigInt::one())]).unwrap();
        let cert = poly.certify(DEFAULT_MAX_DEPTH).unwrap();
        let params = SymbolParams::new(poly, Rational64::one()).unwrap();
        let engine = SymbolEngine::<f32>::new(params, &cert).unwrap();
        let job = KernelJob::new(engine, 1.0f32, 1e-5f32).unwrap();
        let mass = job.kernel_total_mass();
        assert!((mass.value - 1.0).abs() < 1e-3);
    }
}
