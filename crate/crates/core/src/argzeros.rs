//! S(t, chi) by continuous argument variation along a horizontal path,
//! critical-line zero finding with sign-change scans, contour zero counting
//! by the argument principle, and a persistent zero cache.
//!
//! The trace starts at `sigma = 45`, where `log L` is given by the
//! absolutely convergent prime-power series with tail below 1e-12, and walks
//! left to `sigma = 1/2`, multiplying principal-branch phase increments of
//! consecutive L-value ratios. Steps are halved until every increment is
//! below pi/2, which pins the branch as long as no zero sits on the path.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::lfunc::{self, LEvaluator};
use crate::numerics::{ComplexPoint, EmConfig};

/// Abscissa where the trace starts; the prime-power series tail there is
/// below `2 * 2^-45` which is under the 1e-12 budget.
pub const SIGMA_START: f64 = 45.0;
/// Default initial step in sigma.
pub const INITIAL_STEP: f64 = 0.25;
/// Hard per-trace refinement budget.
pub const STEP_BUDGET: usize = 1_000_000;
/// |L| at the endpoint below this => two-sided averaged branch.
pub const ON_ZERO_THRESHOLD: f64 = 1e-10;

/// One sample of an argument trace.
#[derive(Debug, Clone, Copy)]
pub struct TraceSample {
    pub sigma: f64,
    pub l_value: Complex64,
    pub accumulated_arg: f64,
}

/// A sampled horizontal path ending in `S(t, chi)`.
#[derive(Debug, Clone)]
pub struct ArgumentTrace {
    pub t: f64,
    pub label: String,
    pub samples: Vec<TraceSample>,
    /// `accumulated_arg` at sigma = 1/2, divided by pi.
    pub s_value: f64,
    pub step_budget: usize,
    pub steps_used: usize,
    /// Set when the endpoint sat on a zero and the two-sided average
    /// `(S(t+eps) + S(t-eps)) / 2` was returned.
    pub averaged: bool,
}

/// Trace controls; the defaults follow the module constants.
#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    pub initial_step: f64,
    pub step_budget: usize,
    pub em: EmConfig,
}

impl TraceOptions {
    pub fn for_height(t: f64) -> Self {
        Self {
            initial_step: INITIAL_STEP,
            step_budget: STEP_BUDGET,
            em: EmConfig::for_height_with_target(t, 1e-11),
        }
    }
}

/// `S(t, chi)` with default options. Requires `|t| >= 2` (negative heights
/// are admitted for the conjugate-reflection identities).
pub fn s_value(t: f64, chi: &DirichletCharacter) -> Result<ArgumentTrace> {
    s_value_with(t, chi, &TraceOptions::for_height(t))
}

pub fn s_value_with(
    t: f64,
    chi: &DirichletCharacter,
    opts: &TraceOptions,
) -> Result<ArgumentTrace> {
    if t.abs() < 2.0 {
        return Err(Error::Domain(format!("|t| must be >= 2, got {t}")));
    }
    let ev = LEvaluator::new(chi, t, opts.em)?;
    let (l_end, _) = ev.l(0.5)?;
    if l_end.norm() <= ON_ZERO_THRESHOLD {
        // endpoint on a zero: S(t) = (S(t+0) + S(t-0)) / 2, realized with a
        // symmetric eps offset
        let eps = 1e-6;
        let up = trace_path(chi, t + eps, opts)?;
        let dn = trace_path(chi, t - eps, opts)?;
        let mut avg = up;
        avg.t = t;
        avg.s_value = 0.5 * (avg.s_value + dn.s_value);
        avg.averaged = true;
        avg.steps_used += dn.steps_used;
        return Ok(avg);
    }
    trace_path(chi, t, opts)
}

fn trace_path(chi: &DirichletCharacter, t: f64, opts: &TraceOptions) -> Result<ArgumentTrace> {
    let ev = LEvaluator::new(chi, t, opts.em)?;
    let mut samples = Vec::with_capacity(200);
    let log_l = ev.log_l_series(SIGMA_START);
    let mut arg = log_l.im;
    let (mut prev_l, _) = ev.l(SIGMA_START)?;
    let mut prev_sigma = SIGMA_START;
    samples.push(TraceSample {
        sigma: SIGMA_START,
        l_value: prev_l,
        accumulated_arg: arg,
    });

    // descending target grid; refinement pushes midpoints back on the stack
    let mut stack: Vec<f64> = Vec::with_capacity(256);
    let mut sigma = 0.5f64;
    while sigma < SIGMA_START - 1e-12 {
        stack.push(sigma);
        sigma += opts.initial_step;
    }

    let mut steps = 0usize;
    while let Some(next) = stack.pop() {
        let (l_next, _) = ev.l(next)?;
        if l_next.norm() == 0.0 || !l_next.is_finite() {
            return Err(Error::Refinement(format!(
                "L vanished on the path at sigma = {next}, t = {t}"
            )));
        }
        let dphi = (l_next / prev_l).arg();
        if dphi.abs() >= FRAC_PI_2 {
            if prev_sigma - next < 1e-12 {
                return Err(Error::Refinement(format!(
                    "phase step {dphi:.3} not resolvable at sigma = {next}, t = {t}"
                )));
            }
            steps += 1;
            if steps > opts.step_budget {
                return Err(Error::Refinement(format!(
                    "step budget {} exhausted at t = {t}",
                    opts.step_budget
                )));
            }
            stack.push(next);
            stack.push(0.5 * (prev_sigma + next));
            continue;
        }
        steps += 1;
        if steps > opts.step_budget {
            return Err(Error::Refinement(format!(
                "step budget {} exhausted at t = {t}",
                opts.step_budget
            )));
        }
        arg += dphi;
        samples.push(TraceSample {
            sigma: next,
            l_value: l_next,
            accumulated_arg: arg,
        });
        prev_sigma = next;
        prev_l = l_next;
    }

    Ok(ArgumentTrace {
        t,
        label: chi.label(),
        samples,
        s_value: arg / PI,
        step_budget: opts.step_budget,
        steps_used: steps,
        averaged: false,
    })
}

// ---------------------------------------------------------------------------
// Contour counting
// ---------------------------------------------------------------------------

/// Number of nontrivial zeros with ordinate in (t1, t2), by the total
/// argument variation of the completed function around the rectangle
/// `[-1, 2] x [t1, t2]`.
pub fn count_zeros(chi: &DirichletCharacter, t1: f64, t2: f64) -> Result<usize> {
    if !(t1 < t2) {
        return Err(Error::Domain(format!("need t1 < t2, got [{t1}, {t2}]")));
    }
    let cfg = EmConfig::for_height_with_target(t1.abs().max(t2.abs()), 1e-11);
    let corners = [
        Complex64::new(2.0, t1),
        Complex64::new(2.0, t2),
        Complex64::new(-1.0, t2),
        Complex64::new(-1.0, t1),
        Complex64::new(2.0, t1),
    ];
    let mut total = 0.0f64;
    for w in corners.windows(2) {
        total += edge_arg_variation(chi, w[0], w[1], &cfg)?;
    }
    let winding = total / TAU;
    let rounded = winding.round();
    if (winding - rounded).abs() > 0.01 {
        return Err(Error::Precision {
            target: 0.01,
            achieved: (winding - rounded).abs(),
        });
    }
    if rounded < 0.0 {
        return Err(Error::Contour(format!(
            "negative winding number {rounded}; completed function should be zero-free outside the strip"
        )));
    }
    Ok(rounded as usize)
}

/// Accumulated argument of Lambda along one contour edge, adaptively refined
/// so each increment stays below pi/2.
fn edge_arg_variation(
    chi: &DirichletCharacter,
    from: Complex64,
    to: Complex64,
    cfg: &EmConfig,
) -> Result<f64> {
    let len = (to - from).norm();
    let mut coarse = (len / 0.25).ceil() as usize;
    if coarse < 2 {
        coarse = 2;
    }
    let dir = (to - from) / len;
    let lambda = |z: Complex64| -> Result<Complex64> {
        match lfunc::completed_with(ComplexPoint::new(z.re, z.im)?, chi, cfg) {
            Ok(v) => Ok(v.lambda),
            // the archimedean factor has poles cancelled by trivial zeros of
            // L; a sample landing exactly there is nudged along the edge
            Err(Error::Pole(_)) => {
                let zp = z + dir * 1e-9;
                Ok(lfunc::completed_with(ComplexPoint::new(zp.re, zp.im)?, chi, cfg)?.lambda)
            }
            Err(e) => Err(e),
        }
    };

    let mut prev = lambda(from)?;
    check_on_contour(prev, from)?;
    let mut prev_u = 0.0f64;
    let mut arg = 0.0f64;
    let mut stack: Vec<f64> = (1..=coarse)
        .rev()
        .map(|k| len * k as f64 / coarse as f64)
        .collect();
    let mut steps = 0usize;
    while let Some(u) = stack.pop() {
        let z = from + dir * u;
        let val = lambda(z)?;
        check_on_contour(val, z)?;
        let dphi = (val / prev).arg();
        if dphi.abs() >= FRAC_PI_2 {
            if u - prev_u < 1e-10 {
                return Err(Error::Contour(format!(
                    "unresolvable phase step at {z}; a zero may lie on the contour -- perturb the bounds"
                )));
            }
            stack.push(u);
            stack.push(0.5 * (prev_u + u));
            continue;
        }
        steps += 1;
        if steps > STEP_BUDGET {
            return Err(Error::Refinement("contour step budget exhausted".into()));
        }
        arg += dphi;
        prev = val;
        prev_u = u;
    }
    Ok(arg)
}

fn check_on_contour(val: Complex64, z: Complex64) -> Result<()> {
    if val.norm() < 1e-280 || !val.is_finite() {
        return Err(Error::Contour(format!(
            "completed value vanished at {z}; perturb the contour bounds"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Zero lists
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    Certified,
    Uncertified,
}

/// Ordinates of critical-line zeros for one character up to a height bound,
/// with a completeness certificate from the argument principle.
#[derive(Debug, Clone)]
pub struct ZeroList {
    pub label: String,
    pub height: f64,
    pub ordinates: Vec<f64>,
    pub completeness: Completeness,
    /// The epsilon^{1/2} branch used by the underlying Z evaluations.
    pub branch_constant: Complex64,
    /// Populated when certification failed.
    pub diagnostic: Option<String>,
}

/// Scan step heuristic tied to the expected zero spacing.
pub fn scan_step(q: u64, t_top: f64) -> f64 {
    (PI / ((q as f64) * (t_top + 3.0)).ln()).min(0.2)
}

/// Locate all critical-line zeros with ordinate in (0, T] by sign changes of
/// Z, bisect each to width 1e-9, and certify the count against the contour.
pub fn find_zeros(chi: &DirichletCharacter, height: f64) -> Result<ZeroList> {
    if !(height > 0.0 && height <= 200.0) {
        return Err(Error::Domain(format!(
            "height bound must lie in (0, 200], got {height}"
        )));
    }
    let rn = lfunc::root_number(chi)?;
    let cfg = EmConfig::for_height_with_target(height, 1e-11);
    let delta = scan_step(chi.modulus(), height);
    let z_at = |t: f64| lfunc::hardy_z_with(t, chi, &cfg);

    // scan a little past T so the certification contour can dodge zeros near
    // the boundary
    let t_lo = 1e-3;
    let scan_top = height + 2.0 * delta;
    let mut ordinates = Vec::new();
    let mut above = Vec::new();
    let mut prev_t = t_lo;
    let mut prev_z = z_at(prev_t)?;
    let mut t = t_lo + delta;
    while t <= scan_top {
        let z = z_at(t)?;
        if prev_z == 0.0 {
            ordinates.push(prev_t);
        } else if prev_z.signum() != z.signum() {
            let gamma = bisect_zero(&z_at, prev_t, t)?;
            if gamma <= height {
                ordinates.push(gamma);
            } else {
                above.push(gamma);
            }
        }
        prev_t = t;
        prev_z = z;
        t += delta;
    }

    // spacing guard: a pair closer than 1e-7 is reported, not certified
    let mut diagnostic = None;
    for w in ordinates.windows(2) {
        if w[1] - w[0] <= 1e-7 {
            diagnostic = Some(format!(
                "spacing violation near gamma = {:.9}; possible double zero",
                w[0]
            ));
        }
    }

    // pick a contour top away from every located zero
    let all: Vec<f64> = ordinates.iter().chain(above.iter()).copied().collect();
    let mut t_top = height;
    if let Some(&hit) = all.iter().find(|g| (*g - t_top).abs() < 1e-3) {
        let next = all.iter().copied().find(|&g| g > hit + 1e-3);
        t_top = match next {
            Some(g) => 0.5 * (hit + g),
            None => hit + delta,
        };
    }
    let counted_scan = all.iter().filter(|&&g| g <= t_top).count();

    let mut completeness = Completeness::Uncertified;
    match count_zeros(chi, t_lo, t_top) {
        Ok(n) if n == counted_scan && diagnostic.is_none() => {
            completeness = Completeness::Certified;
        }
        Ok(n) => {
            let d = format!(
                "contour count {n} != {counted_scan} sign changes on (0, {t_top:.4}]; suspected missed pair"
            );
            diagnostic = Some(match diagnostic {
                Some(prev) => format!("{prev}; {d}"),
                None => d,
            });
        }
        Err(e) => {
            diagnostic = Some(format!("certification contour failed: {e}"));
        }
    }

    Ok(ZeroList {
        label: chi.label(),
        height,
        ordinates,
        completeness,
        branch_constant: rn.sqrt,
        diagnostic,
    })
}

fn bisect_zero(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut f_lo = f(lo)?;
    for _ in 0..64 {
        if hi - lo < 1e-9 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_lo.signum() != f_mid.signum() {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Re-validate a zero list against fresh Z evaluations: every stored
/// ordinate must bracket a sign change in a 1e-6 window.
pub fn verify_zeros(list: &ZeroList, chi: &DirichletCharacter) -> Result<()> {
    if list.label != chi.label() {
        return Err(Error::Integrity(format!(
            "list labeled {} but character is {}",
            list.label,
            chi.label()
        )));
    }
    let cfg = EmConfig::for_height_with_target(list.height, 1e-11);
    for &gamma in &list.ordinates {
        let lo = lfunc::hardy_z_with(gamma - 1e-6, chi, &cfg)?;
        let hi = lfunc::hardy_z_with(gamma + 1e-6, chi, &cfg)?;
        if lo.signum() == hi.signum() {
            return Err(Error::Integrity(format!(
                "ordinate {gamma:.9} does not bracket a sign change of Z"
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Cache file format
// ---------------------------------------------------------------------------

/// Serialize to the zero-cache text format and write atomically
/// (temp file + rename).
pub fn save_zeros(list: &ZeroList, destination: &Path) -> Result<()> {
    let mut body = String::new();
    body.push_str(&format!(
        "# zeros v1 q={} chi={} T={} branch={},{} complete={}\n",
        list.label
            .split('.')
            .next()
            .and_then(|q| q.parse::<u64>().ok())
            .ok_or_else(|| Error::Integrity(format!("malformed label {}", list.label)))?,
        list.label,
        fmt_float(list.height),
        fmt_float(list.branch_constant.re),
        fmt_float(list.branch_constant.im),
        if list.completeness == Completeness::Certified {
            1
        } else {
            0
        },
    ));
    for gamma in &list.ordinates {
        body.push_str(&format!("{:.12}\n", gamma));
    }
    let tmp = destination.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(body.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, destination)?;
    Ok(())
}

fn fmt_float(v: f64) -> String {
    format!("{v:.12}")
}

/// Parse a zero-cache file, rejecting every header-grammar or ordering
/// violation with the offending line number.
pub fn load_zeros(source: &Path) -> Result<ZeroList> {
    let text = fs::read_to_string(source)?;
    parse_zeros(&text)
}

pub fn parse_zeros(text: &str) -> Result<ZeroList> {
    fn bad(line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 8 || fields[0] != "#" || fields[1] != "zeros" || fields[2] != "v1" {
        return Err(bad(1, format!("bad header '{header}'")));
    }
    let take = |idx: usize, key: &str| -> Result<&str> {
        fields[idx]
            .strip_prefix(&format!("{key}="))
            .ok_or_else(|| bad(1, format!("expected {key}=<...>, got '{}'", fields[idx])))
    };
    let q: u64 = take(3, "q")?.parse().map_err(|_| bad(1, "unparseable q"))?;
    let label = take(4, "chi")?.to_string();
    if label.split('.').next().and_then(|s| s.parse::<u64>().ok()) != Some(q) {
        return Err(bad(1, format!("label {label} does not match q={q}")));
    }
    DirichletCharacter::from_label(&label)
        .map_err(|e| bad(1, format!("invalid chi label: {e}")))?;
    let height: f64 = take(5, "T")?.parse().map_err(|_| bad(1, "unparseable T"))?;
    let (bre, bim) = take(6, "branch")?
        .split_once(',')
        .ok_or_else(|| bad(1, "branch must be <re>,<im>"))?;
    let branch = Complex64::new(
        bre.parse().map_err(|_| bad(1, "unparseable branch re"))?,
        bim.parse().map_err(|_| bad(1, "unparseable branch im"))?,
    );
    let completeness = match take(7, "complete")? {
        "1" => Completeness::Certified,
        "0" => Completeness::Uncertified,
        other => return Err(bad(1, format!("complete must be 0 or 1, got {other}"))),
    };

    let mut ordinates = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        if line.is_empty() {
            return Err(bad(line_no, "blank line"));
        }
        let gamma: f64 = line
            .trim()
            .parse()
            .map_err(|_| bad(line_no, format!("unparseable ordinate '{line}'")))?;
        if !gamma.is_finite() {
            return Err(bad(line_no, "non-finite ordinate"));
        }
        if let Some(&prev) = ordinates.last() {
            if gamma <= prev {
                return Err(bad(
                    line_no,
                    format!("ordinates must be strictly increasing ({gamma} after {prev})"),
                ));
            }
        }
        ordinates.push(gamma);
    }

    Ok(ZeroList {
        label,
        height,
        ordinates,
        completeness,
        branch_constant: branch,
        diagnostic: None,
    })
}

// ---------------------------------------------------------------------------
// Symmetrized view over chi and its conjugate
// ---------------------------------------------------------------------------

/// Both-signs ordinate view for one character: positive ordinates from the
/// chi list, negative ones reflected from the conjugate character's list.
/// The explicit-formula sums run over this set.
#[derive(Debug, Clone)]
pub struct ZeroSet {
    pub label: String,
    pub modulus: u64,
    /// Certified height on the positive side (zeros of chi).
    pub height_pos: f64,
    /// Certified height on the negative side (reflected zeros of conj chi).
    pub height_neg: f64,
    /// Sorted ordinates in (-height_neg, height_pos].
    pub ordinates: Vec<f64>,
    pub certified: bool,
}

impl ZeroSet {
    /// Build from a pair of lists for chi and its conjugate. For a real
    /// character pass the same list twice or use [`ZeroSet::from_self_dual`].
    pub fn from_pair(chi: &DirichletCharacter, own: &ZeroList, conj: &ZeroList) -> Result<Self> {
        if own.label != chi.label() {
            return Err(Error::Integrity(format!(
                "zero list {} does not match character {}",
                own.label,
                chi.label()
            )));
        }
        if conj.label != chi.conjugate().label() {
            return Err(Error::Integrity(format!(
                "conjugate zero list {} does not match {}",
                conj.label,
                chi.conjugate().label()
            )));
        }
        let mut ordinates: Vec<f64> = conj.ordinates.iter().rev().map(|g| -g).collect();
        ordinates.extend(own.ordinates.iter().copied());
        Ok(Self {
            label: chi.label(),
            modulus: chi.modulus(),
            height_pos: own.height,
            height_neg: conj.height,
            ordinates,
            certified: own.completeness == Completeness::Certified
                && conj.completeness == Completeness::Certified,
        })
    }

    /// For a real character the ordinates pair off as gamma <-> -gamma.
    pub fn from_self_dual(chi: &DirichletCharacter, own: &ZeroList) -> Result<Self> {
        if !chi.is_real() {
            return Err(Error::Domain(format!(
                "{} is not self-dual; supply the conjugate list",
                chi.label()
            )));
        }
        Self::from_pair(chi, own, own)
    }

    /// Compute lists for chi (and its conjugate when complex) up to `height`.
    pub fn compute(chi: &DirichletCharacter, height: f64) -> Result<Self> {
        let own = find_zeros(chi, height)?;
        if chi.is_real() {
            Self::from_self_dual(chi, &own)
        } else {
            let conj = find_zeros(&chi.conjugate(), height)?;
            Self::from_pair(chi, &own, &conj)
        }
    }

    /// Ordinates within `|gamma - t| <= window`.
    pub fn window(&self, t: f64, window: f64) -> &[f64] {
        let lo = self.ordinates.partition_point(|&g| g < t - window);
        let hi = self.ordinates.partition_point(|&g| g <= t + window);
        &self.ordinates[lo..hi]
    }

    /// Largest window certified around height t.
    pub fn max_window(&self, t: f64) -> f64 {
        (self.height_pos - t).min(self.height_neg + t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::DirichletCharacter;

    fn chi(label: &str) -> DirichletCharacter {
        DirichletCharacter::from_label(label).unwrap()
    }

    #[test]
    fn trace_step_halving_stability() {
        let chi3 = chi("3.1");
        for &t in &[5.0, 10.0, 33.3] {
            let coarse = s_value_with(t, &chi3, &TraceOptions::for_height(t)).unwrap();
            let mut fine_opts = TraceOptions::for_height(t);
            fine_opts.initial_step = INITIAL_STEP / 2.0;
            let fine = s_value_with(t, &chi3, &fine_opts).unwrap();
            assert!(
                (coarse.s_value - fine.s_value).abs() < 1e-8,
                "halving instability at t={t}: {} vs {}",
                coarse.s_value,
                fine.s_value
            );
        }
    }

    #[test]
    fn trace_sample_invariants() {
        let tr = s_value(10.0, &chi("3.1")).unwrap();
        assert_eq!(tr.samples.first().unwrap().sigma, SIGMA_START);
        assert_eq!(tr.samples.last().unwrap().sigma, 0.5);
        for w in tr.samples.windows(2) {
            assert!(w[1].sigma < w[0].sigma, "sigmas must decrease");
            let dphi = w[1].accumulated_arg - w[0].accumulated_arg;
            assert!(dphi.abs() < FRAC_PI_2, "unrefined phase step {dphi}");
            assert!(w[1].l_value.norm() > 0.0);
        }
        let last = tr.samples.last().unwrap();
        assert_eq!(tr.s_value, last.accumulated_arg / PI);
    }

    #[test]
    fn trace_rejects_small_t() {
        assert!(s_value(1.0, &chi("3.1")).is_err());
    }

    #[test]
    fn conjugate_reflection_of_s() {
        // S(-t, chi) = -S(t, conj chi)
        let c = chi("5.1");
        let conj = c.conjugate();
        for &t in &[4.0, 9.5] {
            let a = s_value(-t, &c).unwrap().s_value;
            let b = s_value(t, &conj).unwrap().s_value;
            assert!((a + b).abs() < 1e-8, "reflection at t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn count_zeros_empty_range() {
        let c = chi("3.1");
        assert_eq!(count_zeros(&c, 3.0, 3.0 + 1e-9).unwrap(), 0);
    }

    #[test]
    fn count_matches_sign_changes_q4() {
        let c = chi("4.1");
        let list = find_zeros(&c, 30.0).unwrap();
        assert_eq!(
            list.completeness,
            Completeness::Certified,
            "{:?}",
            list.diagnostic
        );
        let contour = count_zeros(&c, 1e-3, 30.0).unwrap();
        assert_eq!(list.ordinates.len(), contour);
    }

    #[test]
    fn conjugate_counts_cover_negative_heights() {
        let c = chi("5.1");
        let up = count_zeros(&c, 1e-3, 20.0).unwrap();
        let down = count_zeros(&c.conjugate(), 1e-3, 20.0).unwrap();
        let both = count_zeros(&c, -20.0, 20.0).unwrap();
        assert_eq!(up + down, both);
    }

    #[test]
    fn find_zeros_certified_q3() {
        let c = chi("3.1");
        let list = find_zeros(&c, 50.0).unwrap();
        assert_eq!(
            list.completeness,
            Completeness::Certified,
            "{:?}",
            list.diagnostic
        );
        // independent recount over a top chosen in a zero-free gap
        let last = *list.ordinates.last().unwrap();
        let top = if 50.0 - last > 2e-3 {
            0.5 * (last + 50.0)
        } else {
            last - 1e-3
        };
        let contour = count_zeros(&c, 1e-3, top).unwrap();
        let expected = list.ordinates.iter().filter(|&&g| g <= top).count();
        assert_eq!(expected, contour);
        for w in list.ordinates.windows(2) {
            assert!(w[1] > w[0] + 1e-7);
        }
    }

    #[test]
    fn conjugate_zero_reflection_q5() {
        let c = chi("5.1");
        let own = find_zeros(&c, 30.0).unwrap();
        let conj = find_zeros(&c.conjugate(), 30.0).unwrap();
        // gamma is a zero ordinate of chi iff -gamma is one of conj chi;
        // compare the positive lists after reflecting through the set union
        let set = ZeroSet::from_pair(&c, &own, &conj).unwrap();
        let reflected = ZeroSet::from_pair(&c.conjugate(), &conj, &own).unwrap();
        assert_eq!(set.ordinates.len(), reflected.ordinates.len());
        for (a, b) in set
            .ordinates
            .iter()
            .zip(reflected.ordinates.iter().rev().map(|g| -g))
        {
            assert!((a - b).abs() < 1e-7, "reflection mismatch {a} vs {b}");
        }
    }

    #[test]
    fn jump_by_one_across_a_zero() {
        let c = chi("3.1");
        let list = find_zeros(&c, 15.0).unwrap();
        let gamma = list.ordinates[0];
        let below = s_value(gamma - 1e-4, &c).unwrap().s_value;
        let above = s_value(gamma + 1e-4, &c).unwrap().s_value;
        let jump = above - below;
        assert!(
            (jump - 1.0).abs() < 0.05,
            "jump across gamma={gamma}: {jump}"
        );
    }

    #[test]
    fn save_load_round_trip() {
        let c = chi("4.1");
        let list = find_zeros(&c, 25.0).unwrap();
        let dir = std::env::temp_dir().join("sarg-zero-cache-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("4.1.zeros");
        save_zeros(&list, &path).unwrap();
        let loaded = load_zeros(&path).unwrap();
        assert_eq!(loaded.label, list.label);
        assert_eq!(loaded.completeness, list.completeness);
        assert_eq!(loaded.ordinates.len(), list.ordinates.len());
        for (a, b) in loaded.ordinates.iter().zip(&list.ordinates) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((loaded.height - list.height).abs() < 1e-12);
        assert!((loaded.branch_constant - list.branch_constant).norm() < 1e-12);
        fs::remove_file(&path).unwrap();
    }

    #[test]
    fn loader_rejects_unsorted() {
        let text = "# zeros v1 q=4 chi=4.1 T=25.000000000000 branch=1.000000000000,0.000000000000 complete=1\n6.020948905400\n5.000000000000\n";
        match parse_zeros(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn loader_rejects_bad_header() {
        for text in [
            "# zeroes v1 q=4 chi=4.1 T=1 branch=1,0 complete=1\n",
            "# zeros v2 q=4 chi=4.1 T=1 branch=1,0 complete=1\n",
            "# zeros v1 q=5 chi=4.1 T=1 branch=1,0 complete=1\n",
            "# zeros v1 q=4 chi=4.7 T=1 branch=1,0 complete=1\n",
            "# zeros v1 q=4 chi=4.1 T=1 branch=1,0 complete=2\n",
            "# zeros v1 q=4 chi=4.1 T=1 branch=1,0\n",
        ] {
            assert!(parse_zeros(text).is_err(), "accepted '{text}'");
        }
    }

    #[test]
    fn tampered_ordinate_fails_integrity() {
        let c = chi("4.1");
        let mut list = find_zeros(&c, 15.0).unwrap();
        assert!(verify_zeros(&list, &c).is_ok());
        list.ordinates[0] += 0.1;
        assert!(matches!(verify_zeros(&list, &c), Err(Error::Integrity(_))));
    }

    #[test]
    fn zero_set_window_selects() {
        let set = ZeroSet {
            label: "3.1".into(),
            modulus: 3,
            height_pos: 50.0,
            height_neg: 50.0,
            ordinates: vec![-20.0, -8.0, 8.0, 12.0, 14.0, 30.0],
            certified: true,
        };
        assert_eq!(set.window(10.0, 5.0), &[8.0, 12.0, 14.0]);
        assert_eq!(set.window(10.0, 45.0).len(), 6);
        assert!((set.max_window(10.0) - 40.0).abs() < 1e-12);
    }
}
