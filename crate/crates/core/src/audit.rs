//! Bound-level arithmetic and empirical auditing: the closed-form
//! sharp constant, the envelope function, the exact M1/M2/M3 path
//! decomposition of S(t, chi), and grid scans producing deterministic
//! reports.

use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::argzeros::{self, load_zeros, TraceOptions, SIGMA_START};
use crate::characters::{primitive_characters, DirichletCharacter};
use crate::error::{Error, Result};
use crate::explicit::{ser_complex, sigma1_of};
use crate::lfunc::LEvaluator;
use crate::numerics::EmConfig;
use crate::quadrature::adaptive_gk15;

/// Closed form of the sharp envelope constant:
/// `(1/pi) * [1 / (1 - (1/e)(1 + 1/e))] *
///  [(1/e + 1/(2e^2))/2 + (1/e + 1/e^2)/2 + pi/4] = 0.803986...`
pub fn theorem_constant() -> f64 {
    let e_inv = (-1.0f64).exp();
    let damping = 1.0 - e_inv * (1.0 + e_inv);
    let bracket = (e_inv + 0.5 * e_inv * e_inv) / 2.0 + (e_inv + e_inv * e_inv) / 2.0 + PI / 4.0;
    bracket / (damping * PI)
}

/// The audited envelope `0.804 log(q(t+1)) / loglog(q(t+3))`.
pub fn envelope(q: u64, t: f64) -> Result<f64> {
    if q < 3 || t < 2.0 {
        return Err(Error::Domain(format!(
            "envelope needs q >= 3 and t >= 2, got q={q}, t={t}"
        )));
    }
    let inner = (q as f64) * (t + 3.0);
    if inner.ln() <= 1.0 {
        return Err(Error::Domain(
            "loglog argument must exceed 1 (unreachable for q >= 3, t >= 2)".into(),
        ));
    }
    Ok(0.804 * ((q as f64) * (t + 1.0)).ln() / inner.ln().ln())
}

/// The three-part split of S(t, chi): direct integral beyond sigma_1, the
/// boundary term at sigma_1, and the short-interval correction down to 1/2.
#[derive(Debug, Clone, Serialize)]
pub struct MDecomposition {
    pub t: f64,
    pub label: String,
    pub x: f64,
    #[serde(serialize_with = "ser_complex")]
    pub m1: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub m2: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub m3: Complex64,
    pub s_from_parts: f64,
    pub s_direct: f64,
}

impl MDecomposition {
    pub fn residual(&self) -> f64 {
        (self.s_from_parts - self.s_direct).abs()
    }
}

/// Split `S(t, chi) = -(1/pi) Im(M1 + M2 + M3)` and cross-check against the
/// path-traced value:
///   M1 = integral of L'/L over [sigma_1, inf)  (tail beyond the trace start
///        summed analytically from the prime-power series),
///   M2 = (sigma_1 - 1/2) L'/L(sigma_1 + it),
///   M3 = -integral over [1/2, sigma_1] of (L'/L(sigma_1+it) - L'/L(sigma+it)).
pub fn m_decomposition(t: f64, chi: &DirichletCharacter, x: f64) -> Result<MDecomposition> {
    if !(t >= 2.0) {
        return Err(Error::Domain(format!("t must be >= 2, got {t}")));
    }
    if !(x >= 4.0 && x <= t * t) {
        return Err(Error::Domain(format!(
            "x must satisfy 4 <= x <= t^2, got {x} at t = {t}"
        )));
    }
    let sigma1 = sigma1_of(x);
    let cfg = EmConfig::for_height(t);
    let ev = LEvaluator::new(chi, t, cfg)?;
    let (l_end, _) = ev.l(0.5)?;
    if l_end.norm() <= argzeros::ON_ZERO_THRESHOLD {
        return Err(Error::NearZero {
            magnitude: l_end.norm(),
        });
    }

    let log_deriv = |sigma: f64| -> Result<Complex64> { Ok(ev.log_deriv(sigma)?.0) };

    let ld_sigma1 = log_deriv(sigma1)?;
    let m2 = ld_sigma1 * (sigma1 - 0.5);

    // M1: quadrature to the trace start, then the analytically integrated
    // series tail: integral_{S}^{inf} L'/L = -log L(S + it).
    let mut m1 = -ev.log_l_series(SIGMA_START);
    let mut err_total = 0.0f64;
    let breaks = [sigma1, 2.0, 4.0, 8.0, 16.0, SIGMA_START];
    for w in breaks.windows(2) {
        let (v, e) = adaptive_gk15(&log_deriv, w[0], w[1], 1e-9, 2000)?;
        m1 += v;
        err_total += e;
    }

    // M3 with endpoint care: the integrand is smooth on [1/2, sigma_1] when
    // t is not an ordinate.
    let diff = |sigma: f64| -> Result<Complex64> { Ok(ld_sigma1 - log_deriv(sigma)?) };
    let (int3, e3) = adaptive_gk15(&diff, 0.5, sigma1, 1e-9, 2000)?;
    err_total += e3;
    let _ = err_total;
    let m3 = -int3;

    let s_from_parts = -(m1 + m2 + m3).im / PI;
    let direct = argzeros::s_value(t, chi)?;
    Ok(MDecomposition {
        t,
        label: chi.label(),
        x,
        m1,
        m2,
        m3,
        s_from_parts,
        s_direct: direct.s_value,
    })
}

// ---------------------------------------------------------------------------
// Grid audit
// ---------------------------------------------------------------------------

/// One audited grid point.
#[derive(Debug, Clone, Serialize)]
pub struct AuditRow {
    pub q: u64,
    pub chi: String,
    pub t: f64,
    pub x: f64,
    pub s_value: f64,
    pub envelope: f64,
    pub ratio: f64,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSpec {
    pub q_set: Vec<u64>,
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditSummary {
    pub max_ratio: f64,
    pub argmax: Option<AuditRow>,
    pub rows: usize,
    pub failed_rows: usize,
    pub grid: GridSpec,
    pub version: String,
    /// Rows sorted by ratio descending (the worst offenders).
    pub top: Vec<AuditRow>,
}

#[derive(Debug, Clone)]
pub struct AuditOutcome {
    pub rows: Vec<AuditRow>,
    pub summary: AuditSummary,
}

/// Grid specification for [`audit_scan`].
#[derive(Debug, Clone)]
pub struct AuditSpec {
    pub q_set: Vec<u64>,
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
    /// Directory of zero-cache files; grid points within 1e-4 of a cached
    /// ordinate are flagged and evaluated by the two-sided average.
    pub zero_cache: Option<PathBuf>,
    pub parallel: bool,
}

impl AuditSpec {
    pub fn new(q_set: Vec<u64>, t_min: f64, t_max: f64, step: f64) -> Result<Self> {
        if q_set.iter().any(|&q| q < 3) {
            return Err(Error::Domain("all moduli must be >= 3".into()));
        }
        if !(t_min >= 2.0) {
            return Err(Error::Domain(format!("t_min must be >= 2, got {t_min}")));
        }
        if !(t_max >= t_min) {
            return Err(Error::Domain("t_max must be >= t_min".into()));
        }
        if !(step > 0.0) {
            return Err(Error::Domain(format!("step must be positive, got {step}")));
        }
        Ok(Self {
            q_set,
            t_min,
            t_max,
            step,
            zero_cache: None,
            parallel: true,
        })
    }
}

/// Trace profile used for audit rows: leaner Euler-Maclaurin start than the
/// defaults (the evaluator escalates on its own if the certified bound
/// misses), same step rule.
pub fn audit_trace_options(t: f64) -> TraceOptions {
    TraceOptions {
        initial_step: argzeros::INITIAL_STEP,
        step_budget: argzeros::STEP_BUDGET,
        em: EmConfig {
            cutoff_terms: ((0.75 * t.abs()).ceil() as usize).max(30),
            correction_order: 12,
            target_abs_error: 1e-10,
        },
    }
}

/// Default cutoff `x = (log q(t+3))^{3/2}`, clamped into `[4, t^2]`.
/// Returns the value and whether clamping occurred.
pub fn default_cutoff(q: u64, t: f64) -> (f64, bool) {
    let raw = ((q as f64) * (t + 3.0)).ln().powf(1.5);
    let clamped = raw.clamp(4.0, (t * t).max(4.0));
    (clamped, clamped != raw)
}

fn audit_one(
    chi: &DirichletCharacter,
    t: f64,
    cached_zeros: Option<&[f64]>,
) -> std::result::Result<AuditRow, String> {
    let q = chi.modulus();
    let mut flags: Vec<String> = Vec::new();
    let (x, clamped) = default_cutoff(q, t);
    if clamped {
        flags.push("x-clamped".into());
    }
    let near_cached = cached_zeros
        .map(|zs| zs.iter().any(|&g| (g - t).abs() < 1e-4))
        .unwrap_or(false);
    let opts = audit_trace_options(t);
    let trace = if near_cached {
        flags.push("near-cached-zero".into());
        let up = argzeros::s_value_with(t + 1e-6, chi, &opts).map_err(|e| e.to_string())?;
        let dn = argzeros::s_value_with(t - 1e-6, chi, &opts).map_err(|e| e.to_string())?;
        let mut avg = up;
        avg.s_value = 0.5 * (avg.s_value + dn.s_value);
        avg.averaged = true;
        avg
    } else {
        argzeros::s_value_with(t, chi, &opts).map_err(|e| e.to_string())?
    };
    if trace.averaged && !near_cached {
        flags.push("averaged".into());
    }
    let env = envelope(q, t).map_err(|e| e.to_string())?;
    Ok(AuditRow {
        q,
        chi: chi.label(),
        t,
        x,
        s_value: trace.s_value,
        envelope: env,
        ratio: trace.s_value.abs() / env,
        flags,
    })
}

/// Audit `|S| / envelope` for every primitive character mod each q over the
/// t grid. Failed rows are recorded with an `error:` flag, never dropped.
pub fn audit_scan(spec: &AuditSpec) -> Result<AuditOutcome> {
    let mut tasks: Vec<(DirichletCharacter, Option<Vec<f64>>)> = Vec::new();
    for &q in &spec.q_set {
        for chi in primitive_characters(q)? {
            let cached = spec.zero_cache.as_ref().and_then(|dir| {
                let path = dir.join(format!("{}.zeros", chi.label()));
                load_zeros(&path).ok().map(|l| l.ordinates)
            });
            tasks.push((chi, cached));
        }
    }
    let n_steps = ((spec.t_max - spec.t_min) / spec.step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..n_steps)
        .map(|k| spec.t_min + spec.step * k as f64)
        .filter(|&t| t <= spec.t_max + 1e-12)
        .collect();

    let jobs: Vec<(usize, usize)> = (0..tasks.len())
        .flat_map(|ci| (0..grid.len()).map(move |ti| (ci, ti)))
        .collect();

    let run_one = |&(ci, ti): &(usize, usize)| -> AuditRow {
        let (chi, cached) = &tasks[ci];
        let t = grid[ti];
        match audit_one(chi, t, cached.as_deref()) {
            Ok(row) => row,
            Err(msg) => AuditRow {
                q: chi.modulus(),
                chi: chi.label(),
                t,
                x: default_cutoff(chi.modulus(), t).0,
                s_value: f64::NAN,
                envelope: f64::NAN,
                ratio: f64::NAN,
                flags: vec![format!("error:{msg}")],
            },
        }
    };

    let mut rows: Vec<AuditRow> = if spec.parallel {
        jobs.par_iter().map(run_one).collect()
    } else {
        jobs.iter().map(run_one).collect()
    };

    // deterministic merge order
    rows.sort_by(|a, b| {
        (a.q, &a.chi, a.t)
            .partial_cmp(&(b.q, &b.chi, b.t))
            .expect("grid values are finite")
    });

    let failed = rows.iter().filter(|r| !r.ratio.is_finite()).count();
    let mut by_ratio: Vec<&AuditRow> = rows.iter().filter(|r| r.ratio.is_finite()).collect();
    by_ratio.sort_by(|a, b| b.ratio.total_cmp(&a.ratio));
    let argmax = by_ratio.first().map(|r| (*r).clone());
    let top: Vec<AuditRow> = by_ratio.iter().take(10).map(|r| (*r).clone()).collect();

    let summary = AuditSummary {
        max_ratio: argmax.as_ref().map(|r| r.ratio).unwrap_or(f64::NAN),
        argmax,
        rows: rows.len(),
        failed_rows: failed,
        grid: GridSpec {
            q_set: spec.q_set.clone(),
            t_min: spec.t_min,
            t_max: spec.t_max,
            step: spec.step,
        },
        version: env!("CARGO_PKG_VERSION").to_string(),
        top,
    };
    Ok(AuditOutcome { rows, summary })
}

/// Decimal rendering at 12 significant digits, stable across runs.
pub fn fmt_sig12(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v == 0.0 {
        return "0.00000000000".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.11e}")
    }
}

/// CSV rendering of audit rows: header `q,chi,t,x,S,envelope,ratio,flags`.
pub fn rows_to_csv(rows: &[AuditRow]) -> String {
    let mut out = String::from("q,chi,t,x,S,envelope,ratio,flags\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.q,
            r.chi,
            fmt_sig12(r.t),
            fmt_sig12(r.x),
            fmt_sig12(r.s_value),
            fmt_sig12(r.envelope),
            fmt_sig12(r.ratio),
            r.flags.join(";")
        ));
    }
    out
}
