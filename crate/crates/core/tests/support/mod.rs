//! Arbitrary-precision oracle for S(t, chi): direct argument tracking with
//! BigFloat arithmetic, written independently of the library's evaluation
//! path. Used to generate and re-check the committed fixture values.

use astro_float::{BigFloat, Consts, RoundingMode};
use sarg_core::characters::DirichletCharacter;

const P: usize = 128;
const RM: RoundingMode = RoundingMode::None;

pub struct Oracle {
    cc: Consts,
    pi: BigFloat,
}

#[derive(Clone, Debug)]
pub struct C {
    pub re: BigFloat,
    pub im: BigFloat,
}

fn bf(v: f64) -> BigFloat {
    BigFloat::from_f64(v, P)
}

pub fn to_f64(v: &BigFloat) -> f64 {
    format!("{v}").parse::<f64>().expect("decimal parse")
}

impl Oracle {
    pub fn new() -> Self {
        let mut cc = Consts::new().expect("constants cache");
        let pi = cc.pi(P, RM);
        Self { cc, pi }
    }

    fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, P, RM)
    }
    fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, P, RM)
    }
    fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, P, RM)
    }
    fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, P, RM)
    }

    fn cadd(&self, a: &C, b: &C) -> C {
        C {
            re: self.add(&a.re, &b.re),
            im: self.add(&a.im, &b.im),
        }
    }
    fn cmul(&self, a: &C, b: &C) -> C {
        let rr = self.mul(&a.re, &b.re);
        let ii = self.mul(&a.im, &b.im);
        let ri = self.mul(&a.re, &b.im);
        let ir = self.mul(&a.im, &b.re);
        C {
            re: self.sub(&rr, &ii),
            im: self.add(&ri, &ir),
        }
    }
    fn cdiv(&self, a: &C, b: &C) -> C {
        let den = self.add(&self.mul(&b.re, &b.re), &self.mul(&b.im, &b.im));
        let conj = C {
            re: b.re.clone(),
            im: b.im.neg(),
        };
        let num = self.cmul(a, &conj);
        C {
            re: self.div(&num.re, &den),
            im: self.div(&num.im, &den),
        }
    }
    fn cscale(&self, a: &C, k: &BigFloat) -> C {
        C {
            re: self.mul(&a.re, k),
            im: self.mul(&a.im, k),
        }
    }

    /// base^{-s} for real base > 0: exp(-sigma ln b) * (cos, -sin)(t ln b).
    fn pow_neg_s(&mut self, ln_base: &BigFloat, sigma: &BigFloat, t: &BigFloat) -> C {
        let r = self.mul(&sigma.neg(), ln_base).exp(P, RM, &mut self.cc);
        let theta = self.mul(t, ln_base);
        let cos = theta.cos(P, RM, &mut self.cc);
        let sin = theta.sin(P, RM, &mut self.cc);
        C {
            re: self.mul(&r, &cos),
            im: self.mul(&r, &sin).neg(),
        }
    }

    /// Principal-branch argument.
    fn atan2(&mut self, y: &BigFloat, x: &BigFloat) -> BigFloat {
        let zero = bf(0.0);
        if x.cmp(&zero) == Some(0) {
            let half_pi = self.div(&self.pi.clone(), &bf(2.0));
            return if y.is_negative() {
                half_pi.neg()
            } else {
                half_pi
            };
        }
        let base = self.div(y, x).atan(P, RM, &mut self.cc);
        if x.is_negative() {
            if y.is_negative() {
                self.sub(&base, &self.pi.clone())
            } else {
                self.add(&base, &self.pi.clone())
            }
        } else {
            base
        }
    }

    /// Hurwitz zeta by plain Euler-Maclaurin: 200 direct terms, 20
    /// Bernoulli corrections. Remainder far below the working precision for
    /// sigma >= 0.4, |t| <= 120.
    fn hurwitz(&mut self, sigma: &BigFloat, t: &BigFloat, alpha_num: u64, alpha_den: u64) -> C {
        let n_cut = 200u64;
        let m_corr = 20usize;
        let alpha = self.div(&bf(alpha_num as f64), &bf(alpha_den as f64));
        let mut sum = C {
            re: bf(0.0),
            im: bf(0.0),
        };
        for k in 0..n_cut {
            let base = self.add(&bf(k as f64), &alpha);
            let ln_b = base.ln(P, RM, &mut self.cc);
            let term = self.pow_neg_s(&ln_b, sigma, t);
            sum = self.cadd(&sum, &term);
        }
        let w = self.add(&bf(n_cut as f64), &alpha);
        let ln_w = w.ln(P, RM, &mut self.cc);
        let w_ms = self.pow_neg_s(&ln_w, sigma, t);
        let s_m1 = C {
            re: self.sub(sigma, &bf(1.0)),
            im: t.clone(),
        };
        // + w^{1-s}/(s-1) + w^{-s}/2
        let w_1ms = self.cscale(&w_ms, &w);
        sum = self.cadd(&sum, &self.cdiv(&w_1ms, &s_m1));
        sum = self.cadd(&sum, &self.cscale(&w_ms, &bf(0.5)));
        // Bernoulli corrections with exact rational weights
        let weights = bernoulli_over_factorial_strings();
        let mut poch = C {
            re: bf(1.0),
            im: bf(0.0),
        };
        let mut next = 0u64;
        let w2_inv = self.div(&bf(1.0), &self.mul(&w, &w));
        let mut w_shift = w.clone();
        for (j, (num, den)) in weights.iter().enumerate().take(m_corr) {
            let j = j + 1;
            while next < (2 * j - 1) as u64 {
                let f = C {
                    re: self.add(sigma, &bf(next as f64)),
                    im: t.clone(),
                };
                poch = self.cmul(&poch, &f);
                next += 1;
            }
            w_shift = self.mul(&w_shift, &w2_inv);
            let weight = self.div(&parse_decimal(num), &parse_decimal(den));
            let factor = self.mul(&w_shift, &weight);
            let term = self.cscale(&self.cmul(&w_ms, &poch), &factor);
            sum = self.cadd(&sum, &term);
        }
        sum
    }

    /// chi(r) as a BigFloat root of unity from the exact phase.
    fn chi_value(&mut self, chi: &DirichletCharacter, n: u64) -> Option<C> {
        let (num, den) = chi.phase(n)?;
        let theta = self.div(
            &self.mul(&self.mul(&bf(2.0), &self.pi.clone()), &bf(num as f64)),
            &bf(den as f64),
        );
        let cos = theta.cos(P, RM, &mut self.cc);
        let sin = theta.sin(P, RM, &mut self.cc);
        Some(C { re: cos, im: sin })
    }

    /// L(sigma + it, chi) = q^{-s} sum_r chi(r) zeta(s, r/q).
    pub fn l_value(&mut self, chi: &DirichletCharacter, sigma: &BigFloat, t: &BigFloat) -> C {
        let q = chi.modulus();
        let mut acc = C {
            re: bf(0.0),
            im: bf(0.0),
        };
        for r in 1..=q {
            if let Some(chi_v) = self.chi_value(chi, r) {
                let z = self.hurwitz(sigma, t, r, q);
                acc = self.cadd(&acc, &self.cmul(&chi_v, &z));
            }
        }
        let ln_q = bf(q as f64).ln(P, RM, &mut self.cc);
        let qfac = self.pow_neg_s(&ln_q, sigma, t);
        self.cmul(&qfac, &acc)
    }

    /// Starting argument at sigma = 45 from the prime-power series
    /// Im sum chi(p^k) / (k p^{ks}); the tail is far below working
    /// precision.
    fn series_arg(&mut self, chi: &DirichletCharacter, sigma: &BigFloat, t: &BigFloat) -> BigFloat {
        let primes = [
            2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
            83, 89, 97,
        ];
        let mut acc = bf(0.0);
        for &p in &primes {
            let mut pk = p;
            let mut k = 1u64;
            while pk <= 100 {
                if let Some(chi_v) = self.chi_value(chi, pk) {
                    let ln_pk = bf(pk as f64).ln(P, RM, &mut self.cc);
                    let pw = self.pow_neg_s(&ln_pk, sigma, t);
                    let term = self.cmul(&chi_v, &pw);
                    acc = self.add(&acc, &self.div(&term.im, &bf(k as f64)));
                }
                pk = pk.saturating_mul(p);
                k += 1;
            }
        }
        acc
    }

    /// Smallest |L(1/2 + it)| in [lo, hi] by ternary search; near a simple
    /// zero the modulus is a sharp V, so the minimizer is the ordinate.
    pub fn first_zero(&mut self, chi: &DirichletCharacter, mut lo: f64, mut hi: f64) -> f64 {
        let modulus = |o: &mut Self, t: f64| -> f64 {
            let v = o.l_value(chi, &bf(0.5), &bf(t));
            let m2 = o.add(&o.mul(&v.re, &v.re), &o.mul(&v.im, &v.im));
            to_f64(&m2)
        };
        for _ in 0..80 {
            if hi - lo < 1e-10 {
                break;
            }
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if modulus(self, m1) < modulus(self, m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        0.5 * (lo + hi)
    }

    /// S(t, chi) by direct argument tracking: fixed grid of width 1/8 from
    /// sigma = 45 down to 1/2, halving steps until each increment is below
    /// 1 radian.
    pub fn s_value(&mut self, chi: &DirichletCharacter, t_in: f64) -> f64 {
        let t = bf(t_in);
        let sigma_start = bf(45.0);
        let mut arg = self.series_arg(chi, &sigma_start, &t);
        let mut prev = self.l_value(chi, &sigma_start, &t);
        let mut prev_sigma = 45.0f64;
        let mut stack: Vec<f64> = Vec::new();
        let mut s = 0.5f64;
        while s < 45.0 - 1e-9 {
            stack.push(s);
            s += 0.125;
        }
        while let Some(next) = stack.pop() {
            let val = self.l_value(chi, &bf(next), &t);
            let ratio = self.cdiv(&val, &prev);
            let dphi = self.atan2(&ratio.im.clone(), &ratio.re.clone());
            let dphi_f = to_f64(&dphi);
            if dphi_f.abs() >= 1.0 {
                assert!(
                    prev_sigma - next > 1e-10,
                    "oracle step underflow at sigma = {next}"
                );
                stack.push(next);
                stack.push(0.5 * (prev_sigma + next));
                continue;
            }
            arg = self.add(&arg, &dphi);
            prev = val;
            prev_sigma = next;
        }
        let s_val = self.div(&arg, &self.pi.clone());
        to_f64(&s_val)
    }
}

fn parse_decimal(s: &str) -> BigFloat {
    let negative = s.starts_with('-');
    let digits = s.trim_start_matches('-');
    let mut acc = bf(0.0);
    let ten = bf(10.0);
    for ch in digits.chars() {
        let d = ch.to_digit(10).expect("decimal digit") as f64;
        acc = acc.mul(&ten, P, RM).add(&bf(d), P, RM);
    }
    if negative {
        acc.neg()
    } else {
        acc
    }
}

/// (numerator, denominator) strings of B_{2j}/(2j)! for j = 1..=20, from the
/// textbook recurrence run here in exact rationals, independent of the
/// library's Bernoulli cache.
fn bernoulli_over_factorial_strings() -> Vec<(String, String)> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    let top = 40usize;
    let mut bs: Vec<BigRational> = vec![BigRational::one()];
    for m in 1..=top {
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, b) in bs.iter().enumerate().take(m) {
            acc += BigRational::from(binom.clone()) * b;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        bs.push(-acc / BigRational::from(BigInt::from(m + 1)));
    }
    (1..=20usize)
        .map(|j| {
            let mut fact = BigInt::one();
            for k in 2..=2 * j {
                fact *= k;
            }
            let ratio = bs[2 * j].clone() / BigRational::from(fact);
            (ratio.numer().to_string(), ratio.denom().to_string())
        })
        .collect()
}

/// Parsed fixture rows (label, t, S).
pub fn load_fixtures(path: &str) -> Vec<(String, f64, f64)> {
    let text = std::fs::read_to_string(path).expect("fixture file");
    text.lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut it = l.split_whitespace();
            let label = it.next().unwrap().to_string();
            let t: f64 = it.next().unwrap().parse().unwrap();
            let s: f64 = it.next().unwrap().parse().unwrap();
            (label, t, s)
        })
        .collect()
}
