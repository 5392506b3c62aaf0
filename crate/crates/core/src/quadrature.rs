//! Adaptive Gauss-Kronrod quadrature for complex integrands over real
//! segments. 15-point rule with bisection of the worst segment until the
//! summed error estimate meets the absolute target.

use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

fn qk15<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center)?;
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x)?;
        let f2 = f(center + x)?;
        let fsum = f1 + f2;
        kronrod += fsum * WGK[j];
        if j % 2 == 1 {
            gauss += fsum * WG[j / 2];
        }
    }
    kronrod *= half;
    gauss *= half;
    Ok((kronrod, (kronrod - gauss).norm()))
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrate `f` over `[a, b]` to the absolute target, bisecting worst
/// segments. Returns the value and the achieved error estimate.
pub(crate) fn adaptive_gk15<F>(
    f: &F,
    a: f64,
    b: f64,
    target_abs: f64,
    max_segments: usize,
) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if a == b {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let (v, e) = qk15(f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v,
        err: e,
    });
    let mut total_err = e;
    while total_err > target_abs && heap.len() < max_segments {
        let worst = heap.pop().expect("heap never empty");
        if worst.b - worst.a < 1e-14 {
            // cannot refine further; keep as-is
            total_err = heap.iter().map(|s| s.err).sum::<f64>() + worst.err;
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = qk15(f, worst.a, mid)?;
        let (v2, e2) = qk15(f, mid, worst.b)?;
        total_err = total_err - worst.err + e1 + e2;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }
    let value: Complex64 = heap.iter().map(|s| s.value).sum();
    if total_err > target_abs * 1e3 {
        return Err(Error::Refinement(format!(
            "quadrature stalled at error {total_err:.3e} (target {target_abs:.3e})"
        )));
    }
    Ok((value, total_err))
}
