//! The explicit-formula layer: von Mangoldt tables and their linearly
//! tapered truncation, finite weighted character sums, trivial/nontrivial
//! zero sums with certified tail bounds, and the residual checks tying
//! `L'/L` to sums over zeros.
//!
//! Conventions: `Lambda_x(n) = Lambda(n)` for `n <= x` and
//! `Lambda(n) log(x^2/n) / log x` for `x <= n <= x^2`, vanishing beyond;
//! `sigma_1 = 1/2 + 1/log x`; trivial zeros sit at `s = -2k - a`. The zero
//! sums run over the GRH form `rho = 1/2 + i gamma` with ordinates of both
//! signs supplied by a [`ZeroSet`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::argzeros::ZeroSet;
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::lfunc;
use crate::numerics::{ComplexPoint, EmConfig};

/// Default half-width of the ordinate window around `t` in the zero sums.
pub const DEFAULT_ZERO_WINDOW: f64 = 40.0;

/// Height/cutoff parameters of the explicit formula.
#[derive(Debug, Clone, Copy)]
pub struct ExplicitFormulaParams {
    pub x: f64,
    pub t: f64,
}

impl ExplicitFormulaParams {
    pub fn new(x: f64, t: f64) -> Result<Self> {
        if !(t >= 2.0) {
            return Err(Error::Domain(format!("t must be >= 2, got {t}")));
        }
        if !(x >= 4.0 && x <= t * t) {
            return Err(Error::Domain(format!(
                "x must satisfy 4 <= x <= t^2 = {}, got {x}",
                t * t
            )));
        }
        Ok(Self { x, t })
    }

    /// `sigma_1 = 1/2 + 1/log x`, always recomputed from x.
    pub fn sigma1(&self) -> f64 {
        sigma1_of(self.x)
    }
}

pub fn sigma1_of(x: f64) -> f64 {
    0.5 + 1.0 / x.ln()
}

// ---------------------------------------------------------------------------
// Von Mangoldt tables
// ---------------------------------------------------------------------------

/// `Lambda(n)` for a single n by trial factorization: `log p` iff `n = p^k`.
pub fn von_mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut m = n;
    let mut p = 0u64;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            p = d;
            while m % d == 0 {
                m /= d;
            }
            break;
        }
        d += 1;
    }
    if p == 0 {
        // n itself is prime
        return (n as f64).ln();
    }
    if m == 1 {
        (p as f64).ln()
    } else {
        0.0
    }
}

/// The tapered weight: `Lambda(n)` up to x, then scaled by
/// `log(x^2/n)/log x` up to `x^2`, zero beyond.
pub fn lambda_x(n: u64, x: f64) -> f64 {
    debug_assert!(x >= 2.0, "weight needs x >= 2");
    let nf = n as f64;
    if n < 1 || nf >= x * x {
        return 0.0;
    }
    let base = von_mangoldt(n);
    if base == 0.0 {
        return 0.0;
    }
    if nf <= x {
        base
    } else {
        base * (x * x / nf).ln() / x.ln()
    }
}

/// Sieved `Lambda(n)` and `Lambda_x(n)` for all `n < x^2`.
#[derive(Debug, Clone)]
pub struct WeightedLambdaTable {
    pub x: f64,
    /// `Lambda(n)` indexed by n, length ceil(x^2).
    base: Vec<f64>,
    /// `Lambda_x(n)`, same indexing.
    values: Vec<f64>,
}

impl WeightedLambdaTable {
    pub fn new(x: f64) -> Result<Self> {
        if !(x >= 2.0 && x <= 1000.0) {
            return Err(Error::Domain(format!(
                "table supports 2 <= x <= 1000, got {x}"
            )));
        }
        let limit = (x * x).ceil() as usize;
        // smallest-prime-factor sieve
        let mut spf = vec![0u32; limit];
        for i in 2..limit {
            if spf[i] == 0 {
                for j in (i..limit).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
        let mut base = vec![0.0f64; limit];
        let mut values = vec![0.0f64; limit];
        for n in 2..limit {
            let p = spf[n] as usize;
            let mut m = n;
            while m % p == 0 {
                m /= p;
            }
            if m == 1 {
                base[n] = (p as f64).ln();
                let nf = n as f64;
                if nf < x * x {
                    values[n] = if nf <= x {
                        base[n]
                    } else {
                        base[n] * (x * x / nf).ln() / x.ln()
                    };
                }
            }
        }
        Ok(Self { x, base, values })
    }

    pub fn lambda(&self, n: u64) -> f64 {
        self.base.get(n as usize).copied().unwrap_or(0.0)
    }

    pub fn lambda_x(&self, n: u64) -> f64 {
        self.values.get(n as usize).copied().unwrap_or(0.0)
    }

    pub fn limit(&self) -> u64 {
        self.base.len() as u64
    }
}

// ---------------------------------------------------------------------------
// Finite sums
// ---------------------------------------------------------------------------

/// A truncated sum with a certified bound on the omitted mass.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TruncatedSumResult {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub tail_estimate: f64,
    pub terms_used: usize,
}

pub(crate) fn ser_complex<S: serde::Serializer>(
    v: &Complex64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&v.re)?;
    t.serialize_element(&v.im)?;
    t.end()
}

/// `sum_{n < x^2} Lambda_x(n) chi(n) n^{-s}` -- an exact finite sum (the
/// identity's prime-power term carries the minus sign; callers negate).
pub fn truncated_sum(s: ComplexPoint, chi: &DirichletCharacter, x: f64) -> Result<Complex64> {
    let table = WeightedLambdaTable::new(x)?;
    Ok(truncated_sum_with_table(s, chi, &table))
}

pub fn truncated_sum_with_table(
    s: ComplexPoint,
    chi: &DirichletCharacter,
    table: &WeightedLambdaTable,
) -> Complex64 {
    let q = chi.modulus();
    let x = table.x;
    let mut acc = Complex64::new(0.0, 0.0);
    let n_max = (x * x).ceil() as u64;
    for n in 2..n_max {
        if (n as f64) >= x * x {
            break;
        }
        let w = table.lambda_x(n);
        if w == 0.0 {
            continue;
        }
        let chi_v = chi.value(n % q);
        if chi_v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let l = (n as f64).ln();
        let r = (-s.sigma * l).exp();
        let (sin, cos) = (s.t * l).sin_cos();
        acc += chi_v * Complex64::new(r * cos, -r * sin) * w;
    }
    acc
}

/// Trivial-zero side of the explicit formula:
/// `(1/log x) sum_{k=0}^{K} [x^{-2k-a-s} - x^{-2(2k+a+s)}] / (2k+a+s)^2`
/// with the geometric tail bound
/// `(1/log x) * 2 x^{-2K-a-sigma} / ((2K+a+sigma)^2 (1 - x^{-2}))`.
pub fn trivial_zero_sum(
    s: ComplexPoint,
    x: f64,
    a: u8,
    k_max: usize,
) -> Result<TruncatedSumResult> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("x must exceed 1, got {x}")));
    }
    if a > 1 {
        return Err(Error::Domain(format!("parity must be 0 or 1, got {a}")));
    }
    let z = s.as_complex();
    let ln_x = x.ln();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=k_max {
        let shift = (2 * k + a as usize) as f64;
        let denom = z + shift;
        if denom.norm() < 1e-12 {
            return Err(Error::Pole(format!(
                "s collides with the trivial zero at -{shift}"
            )));
        }
        let e1 = (-(z + shift) * ln_x).exp();
        let e2 = (-2.0 * (z + shift) * ln_x).exp();
        acc += (e1 - e2) / (denom * denom);
    }
    let sigma_shift = 2.0 * k_max as f64 + a as f64 + s.sigma;
    let tail = 2.0 * (-(sigma_shift) * ln_x).exp()
        / (sigma_shift * sigma_shift * (1.0 - x.powi(-2)))
        / ln_x;
    Ok(TruncatedSumResult {
        value: acc / ln_x,
        tail_estimate: tail,
        terms_used: k_max + 1,
    })
}

/// Density-style bound on `sum_{|gamma - t| > H} (t - gamma)^{-2}` scaled by
/// the per-zero numerator: `2/H + (2/(pi H)) log(q (|t| + H + 3))`.
fn window_tail_density(q: u64, t: f64, window: f64) -> f64 {
    2.0 / window + (2.0 / (PI * window)) * ((q as f64) * (t.abs() + window + 3.0)).ln()
}

/// Clamp the requested window to what the zero set certifies around t.
fn effective_window(zeros: &ZeroSet, t: f64, requested: f64) -> Result<f64> {
    if !zeros.certified {
        return Err(Error::Certification(format!(
            "zero set for {} is uncertified",
            zeros.label
        )));
    }
    let max = zeros.max_window(t);
    if max <= 0.0 {
        return Err(Error::Certification(format!(
            "zero set for {} reaches height {:.2}/{:.2}, no window left around t = {t}",
            zeros.label, zeros.height_pos, zeros.height_neg
        )));
    }
    Ok(requested.min(max))
}

/// Nontrivial-zero side of the explicit formula, summed over the stored
/// ordinates within `|gamma - t| <= window` (GRH form `rho = 1/2 + i gamma`):
/// `(1/log x) sum (x^{rho-s} - x^{2(rho-s)}) / (s-rho)^2`.
pub fn nontrivial_zero_sum(
    s: ComplexPoint,
    x: f64,
    zeros: &ZeroSet,
    window: f64,
) -> Result<TruncatedSumResult> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("x must exceed 1, got {x}")));
    }
    let h = effective_window(zeros, s.t, window)?;
    let ln_x = x.ln();
    let z = s.as_complex();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut used = 0usize;
    for &gamma in zeros.window(s.t, h) {
        let rho = Complex64::new(0.5, gamma);
        let diff = rho - z;
        let sep = z - rho;
        if sep.norm() < 1e-12 {
            return Err(Error::Pole(format!("s sits on the zero rho = {rho}")));
        }
        let e1 = (diff * ln_x).exp();
        let e2 = (2.0 * diff * ln_x).exp();
        acc += (e1 - e2) / (sep * sep);
        used += 1;
    }
    let amp = (0.5 - s.sigma) * ln_x;
    let tail = (amp.exp() + (2.0 * amp).exp()) / ln_x * window_tail_density(zeros.modulus, s.t, h);
    Ok(TruncatedSumResult {
        value: acc / ln_x,
        tail_estimate: tail,
        terms_used: used,
    })
}

/// Kernel-weighted zero count around height t:
/// `sum_gamma (sigma_1 - 1/2) / ((sigma_1 - 1/2)^2 + (t - gamma)^2)`,
/// windowed with the same density tail scheme. Strictly positive.
pub fn zero_kernel_sum(
    t: f64,
    chi: &DirichletCharacter,
    x: f64,
    zeros: &ZeroSet,
    window: f64,
) -> Result<TruncatedSumResult> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("x must exceed 1, got {x}")));
    }
    if chi.label() != zeros.label {
        return Err(Error::Integrity(format!(
            "zero set {} does not belong to {}",
            zeros.label,
            chi.label()
        )));
    }
    let h = effective_window(zeros, t, window)?;
    let kappa = sigma1_of(x) - 0.5;
    let mut acc = 0.0f64;
    let mut used = 0usize;
    for &gamma in zeros.window(t, h) {
        acc += kappa / (kappa * kappa + (t - gamma) * (t - gamma));
        used += 1;
    }
    let tail = kappa * window_tail_density(chi.modulus(), t, h);
    Ok(TruncatedSumResult {
        value: Complex64::new(acc, 0.0),
        tail_estimate: tail,
        terms_used: used,
    })
}

// ---------------------------------------------------------------------------
// Residual reports
// ---------------------------------------------------------------------------

/// Outcome of one identity check, serializable to the JSON report format.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub check: &'static str,
    pub label: String,
    pub q: u64,
    pub sigma: f64,
    pub t: f64,
    pub x: f64,
    pub window: f64,
    pub residual: f64,
    pub tail_estimate: f64,
    pub tolerance: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Checks the explicit-formula identity
/// `L'/L(s) = -truncated_sum + trivial_zero_sum + nontrivial_zero_sum`
/// numerically; exact up to the windowed zero tail, so the residual must
/// stay within twice the combined tail estimate (plus a fixed floor).
pub fn verify_lemma2(
    s: ComplexPoint,
    chi: &DirichletCharacter,
    x: f64,
    zeros: &ZeroSet,
    window: f64,
) -> Result<ResidualReport> {
    let cfg = EmConfig::for_height(s.t);
    let lhs = lfunc::l_log_deriv(s, chi, &cfg)?;
    let table = WeightedLambdaTable::new(x)?;
    let prime_side = truncated_sum_with_table(s, chi, &table);
    let trivial = trivial_zero_sum(s, x, chi.parity(), 60)?;
    let zero_side = nontrivial_zero_sum(s, x, zeros, window)?;
    let rhs = -prime_side + trivial.value + zero_side.value;
    let residual = (lhs - rhs).norm();
    let tail = trivial.tail_estimate + zero_side.tail_estimate;
    let tolerance = 2.0 * tail + 1e-8;
    Ok(ResidualReport {
        check: "lemma2",
        label: chi.label(),
        q: chi.modulus(),
        sigma: s.sigma,
        t: s.t,
        x,
        window,
        residual,
        tail_estimate: tail,
        tolerance,
        margin: tolerance - residual,
        pass: residual <= tolerance,
    })
}

/// O(1) budget for the kernel-density identity below.
pub const EQ3_BUDGET: f64 = 5.0;

/// Checks `Re L'/L(sigma_1 + it) = -log(q(t+1))/2 + kernel sum + O(1)`:
/// the residual is the O(1) witness and must stay within the fixed budget
/// plus the window tail.
pub fn verify_eq3(
    t: f64,
    chi: &DirichletCharacter,
    x: f64,
    zeros: &ZeroSet,
    window: f64,
) -> Result<ResidualReport> {
    let params = ExplicitFormulaParams::new(x, t)?;
    let sigma1 = params.sigma1();
    let s = ComplexPoint::new(sigma1, t)?;
    let cfg = EmConfig::for_height(t);
    let lhs = lfunc::l_log_deriv(s, chi, &cfg)?.re;
    let kernel = zero_kernel_sum(t, chi, x, zeros, window)?;
    let q = chi.modulus() as f64;
    let residual = lhs + 0.5 * (q * (t + 1.0)).ln() - kernel.value.re;
    let tolerance = EQ3_BUDGET + kernel.tail_estimate;
    Ok(ResidualReport {
        check: "eq3",
        label: chi.label(),
        q: chi.modulus(),
        sigma: sigma1,
        t,
        x,
        window,
        residual,
        tail_estimate: kernel.tail_estimate,
        tolerance,
        margin: tolerance - residual.abs(),
        pass: residual.abs() <= tolerance,
    })
}

/// Outcome of the windowed zero-sum triangle-inequality check.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub label: String,
    pub q: u64,
    pub sigma: f64,
    pub t: f64,
    pub x: f64,
    pub window: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Smallest per-zero margin; the inequality holds term by term, which is
    /// what makes the windowed comparison sound.
    pub min_term_margin: f64,
    pub pass: bool,
}

/// For `sigma >= sigma_1`, the windowed nontrivial zero sum is dominated by
/// `x^{1/2-sigma} (1 + x^{1/2-sigma})` times the kernel sum over the same
/// window, term by term.
pub fn lemma1_inequality_check(
    s: ComplexPoint,
    chi: &DirichletCharacter,
    x: f64,
    zeros: &ZeroSet,
    window: f64,
) -> Result<InequalityReport> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("x must exceed 1, got {x}")));
    }
    let sigma1 = sigma1_of(x);
    if s.sigma < sigma1 - 1e-12 {
        return Err(Error::Domain(format!(
            "inequality requires sigma >= sigma_1 = {sigma1}, got {}",
            s.sigma
        )));
    }
    let h = effective_window(zeros, s.t, window)?;
    let ln_x = x.ln();
    let kappa = sigma1 - 0.5;
    let amp = ((0.5 - s.sigma) * ln_x).exp();
    let coeff = amp * (1.0 + amp);
    let z = s.as_complex();

    let mut lhs_acc = Complex64::new(0.0, 0.0);
    let mut rhs_acc = 0.0f64;
    let mut min_term_margin = f64::INFINITY;
    for &gamma in zeros.window(s.t, h) {
        let rho = Complex64::new(0.5, gamma);
        let diff = rho - z;
        let sep = z - rho;
        let term = ((diff * ln_x).exp() - (2.0 * diff * ln_x).exp()) / (sep * sep) / ln_x;
        lhs_acc += term;
        let rhs_term = coeff * kappa / (kappa * kappa + (s.t - gamma) * (s.t - gamma));
        rhs_acc += rhs_term;
        min_term_margin = min_term_margin.min(rhs_term - term.norm());
    }
    let lhs = lhs_acc.norm();
    let slack = 1e-12 * (1.0 + rhs_acc);
    Ok(InequalityReport {
        label: chi.label(),
        q: chi.modulus(),
        sigma: s.sigma,
        t: s.t,
        x,
        window: h,
        lhs,
        rhs: rhs_acc,
        margin: rhs_acc - lhs,
        min_term_margin,
        pass: lhs <= rhs_acc + slack && min_term_margin >= -slack,
    })
}
