//! Foundational numeric kernels: Bernoulli numbers in exact rational
//! arithmetic, the principal-branch complex log-gamma, and Hurwitz zeta
//! with its s-derivative via Euler-Maclaurin summation.
//!
//! Every evaluation returns a rigorous absolute error estimate alongside the
//! value; callers propagate these budgets instead of resorting to arbitrary
//! precision.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A point `s = sigma + i t` in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPoint {
    /// Abscissa (real part).
    pub sigma: f64,
    /// Ordinate (imaginary part, the "height").
    pub t: f64,
}

impl ComplexPoint {
    pub fn new(sigma: f64, t: f64) -> Result<Self> {
        if !sigma.is_finite() || !t.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite complex point ({sigma}, {t})"
            )));
        }
        Ok(Self { sigma, t })
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }

    pub fn conj(self) -> Self {
        Self {
            sigma: self.sigma,
            t: -self.t,
        }
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        Self {
            sigma: z.re,
            t: z.im,
        }
    }
}

/// Euler-Maclaurin evaluation parameters.
///
/// `cutoff_terms` is the number of directly summed terms, `correction_order`
/// the number of Bernoulli correction terms. Both act as starting points: the
/// evaluator escalates them until `target_abs_error` is met or the hard caps
/// are reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmConfig {
    pub cutoff_terms: usize,
    pub correction_order: usize,
    pub target_abs_error: f64,
}

pub const EM_MIN_CUTOFF: usize = 10;
pub const EM_MAX_CORRECTION: usize = 30;
/// Hard cap on escalated cutoffs; beyond this the evaluator reports the best
/// achieved estimate instead of looping.
const EM_CUTOFF_CAP: usize = 1 << 21;

impl EmConfig {
    pub fn new(
        cutoff_terms: usize,
        correction_order: usize,
        target_abs_error: f64,
    ) -> Result<Self> {
        if cutoff_terms < EM_MIN_CUTOFF {
            return Err(Error::Domain(format!(
                "cutoff_terms must be >= {EM_MIN_CUTOFF}, got {cutoff_terms}"
            )));
        }
        if correction_order < 1 || correction_order > EM_MAX_CORRECTION {
            return Err(Error::Domain(format!(
                "correction_order must lie in 1..={EM_MAX_CORRECTION}, got {correction_order}"
            )));
        }
        if !(target_abs_error > 0.0) {
            return Err(Error::Domain(format!(
                "target_abs_error must be positive, got {target_abs_error}"
            )));
        }
        Ok(Self {
            cutoff_terms,
            correction_order,
            target_abs_error,
        })
    }

    /// Default configuration for evaluations at height `t`:
    /// `N = max(30, ceil(2|t|))`, `M = 12`, absolute target `1e-12`.
    pub fn for_height(t: f64) -> Self {
        Self {
            cutoff_terms: (2.0 * t.abs()).ceil().max(30.0) as usize,
            correction_order: 12,
            target_abs_error: 1e-12,
        }
    }

    /// Same cutoff rule but with a caller-chosen absolute target.
    pub fn for_height_with_target(t: f64, target: f64) -> Self {
        Self {
            target_abs_error: target,
            ..Self::for_height(t)
        }
    }
}

impl Default for EmConfig {
    fn default() -> Self {
        Self::for_height(0.0)
    }
}

/// A computed value together with a rigorous absolute error estimate.
#[derive(Debug, Clone, Copy)]
pub struct EmValue {
    pub value: Complex64,
    pub abs_error: f64,
}

// ---------------------------------------------------------------------------
// Bernoulli numbers
// ---------------------------------------------------------------------------

/// Largest index kept in the exact Bernoulli cache. Internal consumers need
/// `B_{2M+2}` for the remainder bound at the maximum correction order.
const BERNOULLI_CACHE_MAX: usize = 2 * EM_MAX_CORRECTION + 2;

fn bernoulli_cache() -> &'static Vec<BigRational> {
    static CACHE: OnceLock<Vec<BigRational>> = OnceLock::new();
    CACHE.get_or_init(|| {
        // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j, exact in rationals.
        let n = BERNOULLI_CACHE_MAX;
        let mut bs: Vec<BigRational> = Vec::with_capacity(n + 1);
        bs.push(BigRational::one());
        for m in 1..=n {
            let mut acc = BigRational::zero();
            let mut binom = BigInt::one(); // C(m+1, 0)
            for (j, b) in bs.iter().enumerate().take(m) {
                acc += BigRational::from(binom.clone()) * b;
                // C(m+1, j+1) = C(m+1, j) * (m+1-j) / (j+1)
                binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
            }
            bs.push(-acc / BigRational::from(BigInt::from(m + 1)));
        }
        bs
    })
}

/// Exact Bernoulli number `B_k` for even `k` in `2..=60`.
pub fn bernoulli(k: usize) -> Result<BigRational> {
    if k % 2 != 0 || !(2..=60).contains(&k) {
        return Err(Error::Domain(format!(
            "bernoulli index must be even and in 2..=60, got {k}"
        )));
    }
    Ok(bernoulli_cache()[k].clone())
}

/// `B_{2j} / (2j)!` as f64, for the Euler-Maclaurin correction weights.
pub(crate) fn bernoulli_over_factorial(j: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let cache = bernoulli_cache();
        let mut out = vec![0.0];
        let mut fact = 1.0f64;
        let mut k = 0usize;
        for j in 1..=EM_MAX_CORRECTION + 1 {
            while k < 2 * j {
                k += 1;
                fact *= k as f64;
            }
            let b = cache[2 * j].to_f64().expect("Bernoulli fits in f64");
            out.push(b / fact);
        }
        out
    });
    table[j]
}

// ---------------------------------------------------------------------------
// Complex log-gamma
// ---------------------------------------------------------------------------

/// Principal-branch `log Gamma(z)`, continuous on the plane cut along the
/// negative real axis.
///
/// Strategy: shift `z` upward until `Re z >= 10`, apply Stirling's series
/// with 12 Bernoulli terms, and subtract the accumulated logarithms.
pub fn lngamma(z: ComplexPoint) -> Result<Complex64> {
    if !z.sigma.is_finite() || !z.t.is_finite() {
        return Err(Error::Domain("non-finite lngamma argument".into()));
    }
    if z.t == 0.0 && z.sigma <= 0.0 && z.sigma == z.sigma.round() {
        return Err(Error::Pole(format!("Gamma pole at z = {}", z.sigma)));
    }
    let mut w = z.as_complex();
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 10.0 {
        shift += w.ln();
        w += 1.0;
    }
    // Stirling: (w - 1/2) ln w - w + ln(2 pi)/2 + sum B_2j / (2j(2j-1) w^{2j-1})
    let ln_w = w.ln();
    let mut val = (w - 0.5) * ln_w - w + 0.5 * (2.0 * PI).ln();
    let w2 = w * w;
    let mut wpow = w; // w^{2j-1}
    for j in 1..=12usize {
        let b = bernoulli_cache()[2 * j].to_f64().unwrap();
        let denom = (2 * j * (2 * j - 1)) as f64;
        val += b / (denom * wpow);
        wpow *= w2;
    }
    Ok(val - shift)
}

// ---------------------------------------------------------------------------
// Hurwitz zeta via Euler-Maclaurin
// ---------------------------------------------------------------------------

/// Single fixed-parameter Euler-Maclaurin pass. Returns value and a rigorous
/// absolute remainder bound (first omitted correction term times the
/// classical `|s + 2M + 1| / (sigma + 2M + 1)` factor), plus a rounding floor
/// proportional to the summed magnitudes.
///
/// Exposed so refinement properties (doubling `N` stays within the coarser
/// run's estimate) can be tested without the adaptive escalation.
pub fn hurwitz_zeta_raw(s: Complex64, alpha: f64, n_cut: usize, m_corr: usize) -> EmValue {
    let (value, err, _, _) = hurwitz_em_core(s, alpha, n_cut, m_corr, false);
    EmValue {
        value,
        abs_error: err,
    }
}

/// As [`hurwitz_zeta_raw`] but for the s-derivative.
pub fn hurwitz_zeta_ds_raw(s: Complex64, alpha: f64, n_cut: usize, m_corr: usize) -> EmValue {
    let (_, _, value, err) = hurwitz_em_core(s, alpha, n_cut, m_corr, true);
    EmValue {
        value,
        abs_error: err,
    }
}

/// Shared Euler-Maclaurin kernel. Always produces the value/estimate pair;
/// optionally also the term-wise s-derivative with its estimate.
fn hurwitz_em_core(
    s: Complex64,
    alpha: f64,
    n_cut: usize,
    m_corr: usize,
    with_ds: bool,
) -> (Complex64, f64, Complex64, f64) {
    let sigma = s.re;
    let t = s.im;

    // Direct part: sum_{k<N} (k+alpha)^{-s}, accumulating magnitudes for the
    // rounding-noise floor. Powers are computed as exp(-sigma L) (cos, -sin)
    // of (t L) so that conjugating s conjugates the result bit-for-bit.
    let mut sum = Complex64::new(0.0, 0.0);
    let mut dsum = Complex64::new(0.0, 0.0);
    let mut mag = 0.0f64;
    for k in 0..n_cut {
        let base = k as f64 + alpha;
        let l = base.ln();
        let r = (-sigma * l).exp();
        let (sin_tl, cos_tl) = (t * l).sin_cos();
        let term = Complex64::new(r * cos_tl, -r * sin_tl);
        sum += term;
        mag += r;
        if with_ds {
            dsum -= term * l;
        }
    }

    let w = n_cut as f64 + alpha;
    let ln_w = w.ln();
    let w_pow_ms = {
        let r = (-sigma * ln_w).exp();
        let (sin_tl, cos_tl) = (t * ln_w).sin_cos();
        Complex64::new(r * cos_tl, -r * sin_tl)
    };

    // Boundary terms: w^{1-s}/(s-1) + w^{-s}/2.
    let sm1 = s - 1.0;
    let tail_int = w_pow_ms * w / sm1;
    let half = 0.5 * w_pow_ms;
    sum += tail_int + half;
    mag += tail_int.norm() + half.norm();
    if with_ds {
        dsum += tail_int * (-ln_w) - tail_int / sm1;
        dsum += half * (-ln_w);
    }

    // Bernoulli corrections: sum_j B_2j/(2j)! * poch_{2j-1}(s) * w^{-s-2j+1}
    // where poch_k(s) = s (s+1) ... (s+k-1).
    let mut poch = Complex64::new(1.0, 0.0);
    let mut dpoch = Complex64::new(0.0, 0.0);
    let mut next_factor = 0.0f64; // next i in (s + i)
    let mut w_shift = w; // w^{-2j+1} relative factor starts at w^{+1}
    for j in 1..=m_corr {
        // extend the Pochhammer product to 2j-1 factors
        while next_factor < (2 * j - 1) as f64 {
            let f = s + next_factor;
            dpoch = dpoch * f + poch;
            poch *= f;
            next_factor += 1.0;
        }
        w_shift /= w * w;
        let scale = bernoulli_over_factorial(j);
        let term = w_pow_ms * w_shift * scale;
        sum += term * poch;
        mag += term.norm() * poch.norm();
        if with_ds {
            dsum += term * (dpoch - poch * ln_w);
        }
    }

    // Remainder bound from the first omitted correction term.
    let mut poch_next = poch;
    let mut f = next_factor;
    while f < (2 * m_corr + 1) as f64 {
        poch_next *= s + f;
        f += 1.0;
    }
    let fudge_den = sigma + (2 * m_corr + 1) as f64;
    let est = if fudge_den > 0.0 {
        let first_omitted = bernoulli_over_factorial(m_corr + 1).abs()
            * poch_next.norm()
            * (-(sigma + (2 * m_corr + 1) as f64) * ln_w).exp();
        first_omitted * (s + (2 * m_corr + 1) as f64).norm() / fudge_den
    } else {
        f64::INFINITY
    };
    let noise = 4e-16 * mag;

    let (dval, dest) = if with_ds {
        // Differentiating the remainder integral brings down at most a
        // log w plus the logarithmic derivative of the Pochhammer factor.
        let mut h = 0.0;
        for i in 0..=(2 * m_corr + 1) {
            let denom = (sigma + i as f64).max(t.abs()).max(0.5);
            h += 1.0 / denom;
        }
        (dsum, est * (ln_w + h) + noise * (ln_w + 1.0))
    } else {
        (Complex64::new(0.0, 0.0), 0.0)
    };

    (sum, est + noise, dval, dest)
}

fn check_hurwitz_domain(s: Complex64, alpha: f64) -> Result<()> {
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::Domain("non-finite s".into()));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("Hurwitz zeta pole at s = 1".into()));
    }
    Ok(())
}

/// The asymptotic corrections only decay once the cutoff clears the rotation
/// scale `|s| / 2 pi`; start no lower.
fn em_min_cutoff(s: Complex64, m: usize) -> usize {
    ((s.norm() + 2.0 * m as f64) / FRAC_PI_2 / 4.0).ceil() as usize + 8
}

fn em_escalate<F>(s: Complex64, cfg: &EmConfig, eval: F) -> Result<EmValue>
where
    F: Fn(usize, usize) -> EmValue,
{
    let mut m = cfg.correction_order;
    let mut n = cfg.cutoff_terms.max(em_min_cutoff(s, m));
    let mut best = eval(n, m);
    loop {
        if best.abs_error <= cfg.target_abs_error {
            return Ok(best);
        }
        if n >= EM_CUTOFF_CAP {
            return Err(Error::Precision {
                target: cfg.target_abs_error,
                achieved: best.abs_error,
            });
        }
        n = (n * 2).min(EM_CUTOFF_CAP);
        if m < EM_MAX_CORRECTION {
            m = (m + 4).min(EM_MAX_CORRECTION);
        }
        let next = eval(n, m);
        if next.abs_error < best.abs_error {
            best = next;
        }
    }
}

/// Hurwitz zeta `zeta(s, alpha) = sum_{n>=0} (n+alpha)^{-s}` (analytically
/// continued), with a rigorous error estimate at most
/// `cfg.target_abs_error`.
pub fn hurwitz_zeta(s: ComplexPoint, alpha: f64, cfg: &EmConfig) -> Result<EmValue> {
    let z = s.as_complex();
    check_hurwitz_domain(z, alpha)?;
    em_escalate(z, cfg, |n, m| hurwitz_zeta_raw(z, alpha, n, m))
}

/// `d/ds zeta(s, alpha)` by term-wise differentiation of the Euler-Maclaurin
/// expression, log factors retained analytically.
pub fn hurwitz_zeta_ds(s: ComplexPoint, alpha: f64, cfg: &EmConfig) -> Result<EmValue> {
    let z = s.as_complex();
    check_hurwitz_domain(z, alpha)?;
    em_escalate(z, cfg, |n, m| hurwitz_zeta_ds_raw(z, alpha, n, m))
}

/// Joint evaluation of `zeta(s, alpha)` and its s-derivative sharing one
/// Euler-Maclaurin pass; the hot path for `L` and `L'` together.
pub fn hurwitz_zeta_with_ds(
    s: ComplexPoint,
    alpha: f64,
    cfg: &EmConfig,
) -> Result<(EmValue, EmValue)> {
    let z = s.as_complex();
    check_hurwitz_domain(z, alpha)?;
    let mut m = cfg.correction_order;
    let mut n = cfg.cutoff_terms.max(em_min_cutoff(z, m));
    loop {
        let (v, e, dv, de) = hurwitz_em_core(z, alpha, n, m, true);
        if e <= cfg.target_abs_error && de <= cfg.target_abs_error.max(e * 40.0) {
            return Ok((
                EmValue {
                    value: v,
                    abs_error: e,
                },
                EmValue {
                    value: dv,
                    abs_error: de,
                },
            ));
        }
        if n >= EM_CUTOFF_CAP {
            return Err(Error::Precision {
                target: cfg.target_abs_error,
                achieved: e.max(de),
            });
        }
        n = (n * 2).min(EM_CUTOFF_CAP);
        if m < EM_MAX_CORRECTION {
            m = (m + 4).min(EM_MAX_CORRECTION);
        }
    }
}
