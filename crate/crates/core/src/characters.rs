//! Dirichlet character algebra: unit-group structure of (Z/qZ)*, character
//! enumeration, conductor and primitivity, parity, and Gauss sums.
//!
//! Characters are labeled `<q>.<e1>-<e2>-...-<ek>` by their exponent vector
//! with respect to a canonical generator choice: components ordered by
//! ascending prime, odd prime powers generated by the smallest primitive
//! root, and `2^k` (k >= 3) by `-1` then `3`. Values are stored as exact
//! rational phases (numerator over a common denominator), so conjugation and
//! multiplicativity hold to the last bit.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Generators and orders of (Z/qZ)*, with a discrete-log table.
#[derive(Debug, Clone)]
pub struct UnitGroupStructure {
    pub modulus: u64,
    pub generators: Vec<u64>,
    pub orders: Vec<u64>,
    /// Exponent vector for each residue class; `None` off the units.
    exp_table: Vec<Option<Vec<u32>>>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn euler_phi_prime_power(p: u64, k: u32) -> u64 {
    p.pow(k - 1) * (p - 1)
}

/// Multiplicative order of `a` modulo `m` (must be coprime).
fn multiplicative_order(a: u64, m: u64, group_order: u64) -> u64 {
    let mut ord = group_order;
    for (p, _) in factorize(group_order) {
        while ord % p == 0 && pow_mod(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    ord
}

/// Smallest primitive root mod p^k for odd p, by exhaustive order check.
fn smallest_primitive_root(pk: u64, phi: u64) -> u64 {
    for g in 2..pk {
        if gcd(g, pk) == 1 && multiplicative_order(g, pk, phi) == phi {
            return g;
        }
    }
    unreachable!("odd prime powers always have a primitive root");
}

/// CRT lift: residue congruent to `r` mod `m` and to 1 mod `q/m`.
fn crt_lift(r: u64, m: u64, q: u64) -> u64 {
    let other = q / m;
    if other == 1 {
        return r % q;
    }
    // x = r + m * k with x = 1 mod other
    let m_inv = {
        // m is coprime to other; find inverse by brute force (moduli are tiny)
        (1..other).find(|&k| m * k % other == 1).unwrap()
    };
    let k = (1 + other - r % other) % other * m_inv % other;
    (r + m * k) % q
}

impl UnitGroupStructure {
    pub fn phi(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn exponents_of(&self, n: u64) -> Option<&[u32]> {
        self.exp_table[(n % self.modulus) as usize].as_deref()
    }
}

/// Decompose (Z/qZ)* over the prime-power components of `q`.
pub fn unit_group_structure(q: u64) -> Result<UnitGroupStructure> {
    if q < 3 {
        return Err(Error::Domain(format!("modulus must be >= 3, got {q}")));
    }
    enum Component {
        /// Cyclic factor of (Z/mZ)* generated by g.
        Cyclic { m: u64, g: u64, ord: u64 },
        /// The <-1> x <3> pair mod 2^k, k >= 3.
        TwoPowerPair { m: u64, half: u64 },
    }

    let mut generators: Vec<u64> = Vec::new();
    let mut orders: Vec<u64> = Vec::new();
    let mut components: Vec<Component> = Vec::new();

    for (p, k) in factorize(q) {
        let pk = p.pow(k);
        if p == 2 {
            match k {
                1 => {} // trivial component
                2 => {
                    generators.push(crt_lift(3, 4, q));
                    orders.push(2);
                    components.push(Component::Cyclic { m: 4, g: 3, ord: 2 });
                }
                _ => {
                    let half = 1u64 << (k - 2);
                    generators.push(crt_lift(pk - 1, pk, q));
                    orders.push(2);
                    generators.push(crt_lift(3, pk, q));
                    orders.push(half);
                    components.push(Component::TwoPowerPair { m: pk, half });
                }
            }
        } else {
            let phi = euler_phi_prime_power(p, k);
            let g = smallest_primitive_root(pk, phi);
            generators.push(crt_lift(g, pk, q));
            orders.push(phi);
            components.push(Component::Cyclic { m: pk, g, ord: phi });
        }
    }

    // Discrete logs per component, assembled into the exponent table.
    let mut exp_table: Vec<Option<Vec<u32>>> = vec![None; q as usize];
    for n in 0..q {
        if gcd(n, q) != 1 {
            continue;
        }
        let mut exps: Vec<u32> = Vec::with_capacity(generators.len());
        for comp in &components {
            match *comp {
                Component::Cyclic { m, g, ord } => {
                    let r = n % m;
                    let mut val = 1u64;
                    let mut found = None;
                    for e in 0..ord {
                        if val == r {
                            found = Some(e as u32);
                            break;
                        }
                        val = val * g % m;
                    }
                    exps.push(found.expect("every unit is a power of the generator"));
                }
                Component::TwoPowerPair { m, half } => {
                    // n = (-1)^a 3^b mod 2^k
                    let r = n % m;
                    let mut found = None;
                    'search: for a in 0..2u64 {
                        let mut val = if a == 0 { 1 } else { m - 1 };
                        for b in 0..half {
                            if val == r {
                                found = Some((a as u32, b as u32));
                                break 'search;
                            }
                            val = val * 3 % m;
                        }
                    }
                    let (a, b) = found.expect("odd residues split over <-1> x <3>");
                    exps.push(a);
                    exps.push(b);
                }
            }
        }
        exp_table[n as usize] = Some(exps);
    }

    Ok(UnitGroupStructure {
        modulus: q,
        generators,
        orders,
        exp_table,
    })
}

/// A Dirichlet character mod q, stored as a full value table plus exact
/// rational phases.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    exponents: Vec<u32>,
    orders: Vec<u64>,
    /// Common phase denominator (lcm of the generator orders).
    phase_denom: u64,
    /// Phase numerator per residue; `None` off the units.
    phases: Vec<Option<u64>>,
    values: Vec<Complex64>,
    conductor: u64,
    parity: u8,
}

impl DirichletCharacter {
    pub fn from_exponents(group: &UnitGroupStructure, exponents: &[u32]) -> Result<Self> {
        if exponents.len() != group.generators.len() {
            return Err(Error::Domain(format!(
                "expected {} exponents for modulus {}, got {}",
                group.generators.len(),
                group.modulus,
                exponents.len()
            )));
        }
        for (e, &d) in exponents.iter().zip(&group.orders) {
            if u64::from(*e) >= d {
                return Err(Error::Domain(format!(
                    "exponent {e} exceeds generator order {d}"
                )));
            }
        }
        let q = group.modulus;
        let denom = group.orders.iter().copied().fold(1u64, lcm);
        let mut phases: Vec<Option<u64>> = vec![None; q as usize];
        let mut values = vec![Complex64::new(0.0, 0.0); q as usize];
        for n in 0..q {
            if let Some(exps) = group.exponents_of(n) {
                let mut num = 0u64;
                for ((&v, &e), &d) in exps.iter().zip(exponents).zip(&group.orders) {
                    num = (num + u64::from(v) * u64::from(e) % d * (denom / d)) % denom;
                }
                phases[n as usize] = Some(num);
                let theta = TAU * (num as f64) / (denom as f64);
                let (sin, cos) = theta.sin_cos();
                values[n as usize] = Complex64::new(cos, sin);
            }
        }
        let parity = match phases[(q - 1) as usize] {
            Some(0) => 0,
            Some(p) if 2 * p == denom => 1,
            other => {
                return Err(Error::Domain(format!(
                    "chi(-1) must be +-1, got phase {other:?}/{denom}"
                )))
            }
        };
        let conductor = conductor_of(q, &phases);
        Ok(Self {
            modulus: q,
            exponents: exponents.to_vec(),
            orders: group.orders.clone(),
            phase_denom: denom,
            phases,
            values,
            conductor,
            parity,
        })
    }

    pub fn from_label(label: &str) -> Result<Self> {
        let (q_str, exps_str) = label
            .split_once('.')
            .ok_or_else(|| Error::Domain(format!("malformed character label '{label}'")))?;
        let q: u64 = q_str
            .parse()
            .map_err(|_| Error::Domain(format!("bad modulus in label '{label}'")))?;
        let group = unit_group_structure(q)?;
        let exponents: Vec<u32> = exps_str
            .split('-')
            .map(|e| {
                e.parse()
                    .map_err(|_| Error::Domain(format!("bad exponent '{e}' in label '{label}'")))
            })
            .collect::<Result<_>>()?;
        Self::from_exponents(&group, &exponents)
    }

    pub fn label(&self) -> String {
        let exps: Vec<String> = self.exponents.iter().map(|e| e.to_string()).collect();
        format!("{}.{}", self.modulus, exps.join("-"))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// chi(n), zero off the units.
    pub fn value(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }

    /// Exact phase of chi(n) as (numerator, denominator), `None` off units.
    pub fn phase(&self, n: u64) -> Option<(u64, u64)> {
        self.phases[(n % self.modulus) as usize].map(|p| (p, self.phase_denom))
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Parity `a`: 0 if chi(-1) = 1, 1 if chi(-1) = -1.
    pub fn parity(&self) -> u8 {
        self.parity
    }

    /// True when all values are real (the character is quadratic or
    /// principal).
    pub fn is_real(&self) -> bool {
        self.phases
            .iter()
            .flatten()
            .all(|&p| p == 0 || 2 * p == self.phase_denom)
    }

    pub fn conjugate(&self) -> Self {
        let exponents: Vec<u32> = self
            .exponents
            .iter()
            .zip(&self.orders)
            .map(|(&e, &d)| if e == 0 { 0 } else { (d - u64::from(e)) as u32 })
            .collect();
        let group = unit_group_structure(self.modulus).expect("modulus already validated");
        Self::from_exponents(&group, &exponents).expect("conjugate exponents are valid")
    }
}

/// Smallest f | q such that chi is induced by a character mod f: the least
/// divisor with chi trivial on units congruent to 1 mod f.
fn conductor_of(q: u64, phases: &[Option<u64>]) -> u64 {
    let mut divisors: Vec<u64> = (1..=q).filter(|d| q % d == 0).collect();
    divisors.sort_unstable();
    'outer: for d in divisors {
        for (n, phase) in phases.iter().enumerate() {
            if let Some(p) = phase {
                if n as u64 % d == 1 % d && *p != 0 {
                    continue 'outer;
                }
            }
        }
        return d;
    }
    q
}

/// All phi(q) characters mod q in canonical (lexicographic exponent) order.
pub fn characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    let group = unit_group_structure(q)?;
    let k = group.orders.len();
    let mut out = Vec::with_capacity(group.phi() as usize);
    let mut exps = vec![0u32; k];
    loop {
        out.push(DirichletCharacter::from_exponents(&group, &exps)?);
        // lexicographic increment, least significant digit last
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            exps[i] += 1;
            if u64::from(exps[i]) < group.orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
}

/// Primitive characters mod q in canonical order.
pub fn primitive_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    Ok(characters(q)?
        .into_iter()
        .filter(|c| c.is_primitive())
        .collect())
}

/// Gauss sum `tau(chi) = sum_r chi(r) e^{2 pi i r / q}` for primitive chi.
pub fn gauss_sum(chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_primitive() {
        return Err(Error::Domain(format!(
            "gauss_sum requires a primitive character; {} has conductor {}",
            chi.label(),
            chi.conductor()
        )));
    }
    let q = chi.modulus();
    let mut tau = Complex64::new(0.0, 0.0);
    for r in 1..=q {
        let v = chi.value(r);
        if v != Complex64::new(0.0, 0.0) {
            let theta = TAU * (r as f64) / (q as f64);
            let (sin, cos) = theta.sin_cos();
            tau += v * Complex64::new(cos, sin);
        }
    }
    Ok(tau)
}
