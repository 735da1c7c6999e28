//! Univariate polynomials over Q and Z/p, Sturm root counting and a
//! desk-scale irreducibility certifier.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Polynomial with rational coefficients, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_ints(c: &[BigInt]) -> Self {
        QPoly::new(c.iter().map(|v| BigRational::from_integer(v.clone())).collect())
    }

    pub fn from_i64(c: &[i64]) -> Self {
        QPoly::new(c.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        QPoly { coeffs: vec![BigRational::one()] }
    }

    pub fn x() -> Self {
        QPoly::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has no degree.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, s: &BigRational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Euclidean division `self = q * d + r`.
    pub fn div_rem(&self, d: &QPoly) -> Result<(QPoly, QPoly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let mut r = self.coeffs.clone();
        let lead = d.lead();
        if r.len() <= dd {
            return Ok((QPoly::zero(), self.clone()));
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((QPoly::new(q), QPoly::new(r)))
    }

    pub fn rem(&self, d: &QPoly) -> Result<QPoly> {
        Ok(self.div_rem(d)?.1)
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        self.scale(&l.recip())
    }

    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn xgcd(&self, o: &QPoly) -> (QPoly, QPoly, QPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (QPoly::one(), QPoly::zero());
        let (mut t0, mut t1) = (QPoly::zero(), QPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            r0 = std::mem::replace(&mut r1, r);
            let s2 = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        let l = r0.lead();
        if l.is_zero() {
            return (r0, s0, t0);
        }
        let inv = l.recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Primitive integer polynomial with positive leading coefficient and the same roots.
    pub fn primitive_part(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    pub fn sign_at(&self, x: &BigRational) -> i32 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Sign of the polynomial as `x -> +inf` (`positive = true`) or `-inf`.
    fn sign_at_infinity(&self, positive: bool) -> i32 {
        match self.degree() {
            None => 0,
            Some(d) => {
                let s = if self.lead().is_positive() { 1 } else { -1 };
                if positive || d % 2 == 0 {
                    s
                } else {
                    -s
                }
            }
        }
    }

    /// Cauchy bound: every real root lies in `(-B, B)`.
    pub fn root_bound(&self) -> BigRational {
        let lead = self.lead().abs();
        let mut m = BigRational::zero();
        for c in &self.coeffs[..self.coeffs.len().saturating_sub(1)] {
            let v = c.abs() / &lead;
            if v > m {
                m = v;
            }
        }
        m + BigRational::one()
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Sturm sequence of a squarefree polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    seq: Vec<QPoly>,
}

impl SturmChain {
    pub fn new(p: &QPoly) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]).expect("nonzero");
            if r.is_zero() {
                break;
            }
            seq.push(r.neg());
        }
        SturmChain { seq }
    }

    fn variations(signs: impl Iterator<Item = i32>) -> usize {
        let mut last = 0;
        let mut v = 0;
        for s in signs {
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    fn var_at(&self, x: &BigRational) -> usize {
        Self::variations(self.seq.iter().map(|p| p.sign_at(x)))
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_in(&self, a: &BigRational, b: &BigRational) -> usize {
        self.var_at(a).saturating_sub(self.var_at(b))
    }

    /// Number of distinct real roots.
    pub fn count_real(&self) -> usize {
        let neg = Self::variations(self.seq.iter().map(|p| p.sign_at_infinity(false)));
        let pos = Self::variations(self.seq.iter().map(|p| p.sign_at_infinity(true)));
        neg.saturating_sub(pos)
    }
}

/// Isolating intervals `(lo, hi]` for all real roots of a squarefree polynomial, ascending.
pub fn isolate_real_roots(p: &QPoly) -> Vec<(BigRational, BigRational)> {
    let chain = SturmChain::new(p);
    let b = p.root_bound();
    let mut out = vec![];
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = chain.count_in(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / BigRational::from_integer(2.into());
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

// ---------------------------------------------------------------------------
// arithmetic over Z/p

fn pmod(a: &BigInt, p: u64) -> u64 {
    a.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

type ModPoly = Vec<u64>;

fn mp_trim(mut a: ModPoly) -> ModPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn mp_sub(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let n = a.len().max(b.len());
    mp_trim(
        (0..n)
            .map(|i| {
                let x = *a.get(i).unwrap_or(&0);
                let y = *b.get(i).unwrap_or(&0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn mp_mul(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    mp_trim(out)
}

fn mp_rem(a: &ModPoly, m: &ModPoly, p: u64) -> ModPoly {
    let mut r = a.clone();
    let dm = m.len() - 1;
    let inv = inv_mod(*m.last().unwrap(), p);
    while r.len() > dm && !r.is_empty() {
        let k = r.len() - 1 - dm;
        let c = mulmod(*r.last().unwrap(), inv, p);
        for (j, &mc) in m.iter().enumerate() {
            r[k + j] = (r[k + j] + p - mulmod(c, mc, p)) % p;
        }
        r = mp_trim(r);
    }
    r
}

fn mp_gcd(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let mut a = mp_trim(a.clone());
    let mut b = mp_trim(b.clone());
    while !b.is_empty() {
        let r = mp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&l) = a.last() {
        let inv = inv_mod(l, p);
        a.iter_mut().for_each(|c| *c = mulmod(*c, inv, p));
    }
    a
}

fn mp_div(a: &ModPoly, m: &ModPoly, p: u64) -> ModPoly {
    let mut r = a.clone();
    let dm = m.len() - 1;
    if r.len() <= dm {
        return vec![];
    }
    let inv = inv_mod(*m.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - dm];
    for k in (0..q.len()).rev() {
        let c = mulmod(r[k + dm], inv, p);
        q[k] = c;
        for (j, &mc) in m.iter().enumerate() {
            r[k + j] = (r[k + j] + p - mulmod(c, mc, p)) % p;
        }
    }
    mp_trim(q)
}

fn mp_powmod(base: &ModPoly, mut e: u64, m: &ModPoly, p: u64) -> ModPoly {
    let mut result: ModPoly = vec![1];
    let mut b = mp_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mp_rem(&mp_mul(&result, &b, p), m, p);
        }
        b = mp_rem(&mp_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    result
}

fn mp_derivative(a: &ModPoly, p: u64) -> ModPoly {
    mp_trim(a.iter().enumerate().skip(1).map(|(i, &c)| mulmod(c, i as u64 % p, p)).collect())
}

/// Degrees of the irreducible factors of a squarefree polynomial mod p
/// (distinct-degree factorization).
fn ddf_degrees(f: &ModPoly, p: u64) -> Vec<usize> {
    let mut degs = vec![];
    let mut g = f.clone();
    let x: ModPoly = vec![0, 1];
    let mut h = x.clone();
    let mut i = 0;
    while g.len() > 1 {
        i += 1;
        if 2 * i > g.len() - 1 {
            degs.push(g.len() - 1);
            break;
        }
        h = mp_powmod(&h, p, &g, p);
        let d = mp_gcd(&g, &mp_sub(&h, &x, p), p);
        if d.len() > 1 {
            let k = (d.len() - 1) / i;
            degs.extend(std::iter::repeat_n(i, k));
            g = mp_div(&g, &d, p);
            h = mp_rem(&h, &g, p);
        }
    }
    degs
}

fn subset_sums(parts: &[usize], n: usize) -> Vec<bool> {
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for &d in parts {
        for s in (d..=n).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    reach
}

const SMALL_PRIMES: [u64; 40] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179,
];

/// Possible degrees of nontrivial factors over Z, as constrained by factorization patterns mod p.
fn admissible_factor_degrees(f: &[BigInt]) -> Vec<usize> {
    let n = f.len() - 1;
    let mut allowed = vec![true; n + 1];
    for &p in SMALL_PRIMES.iter() {
        let lead = pmod(f.last().unwrap(), p);
        if lead == 0 {
            continue;
        }
        let fp: ModPoly = mp_trim(f.iter().map(|c| pmod(c, p)).collect());
        let g = mp_gcd(&fp, &mp_derivative(&fp, p), p);
        if g.len() > 1 {
            continue;
        }
        let sums = subset_sums(&ddf_degrees(&fp, p), n);
        for k in 0..=n {
            allowed[k] &= sums[k];
        }
        if (1..n).all(|k| !allowed[k]) {
            break;
        }
    }
    (1..=n / 2).filter(|&k| allowed[k]).collect()
}

/// Numeric complex roots by the Aberth–Ehrlich iteration.
fn complex_roots(f: &[BigInt]) -> Vec<Complex64> {
    let n = f.len() - 1;
    let c: Vec<f64> = f.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
    let lead = c[n];
    let coeffs: Vec<f64> = c.iter().map(|v| v / lead).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for k in (0..=n).rev() {
            dp = dp * z + p;
            p = p * z + coeffs[k];
        }
        (p, dp)
    };
    let radius = 1.0 + coeffs[..n].iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius * 0.5, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut maxstep: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += Complex64::new(1.0, 0.0) / (z[i] - z[j]);
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            maxstep = maxstep.max(w.norm() / (1.0 + z[i].norm()));
        }
        if maxstep < 1e-15 {
            break;
        }
    }
    z
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Searches for an integer factor of the given degree among products of numeric roots;
/// any factor returned is verified by exact division.
fn find_factor_numeric(f: &[BigInt], degree: usize, roots: &[Complex64]) -> Option<Vec<BigInt>> {
    let lead = f.last().unwrap().to_f64()?;
    let fq = QPoly::from_ints(f);
    for subset in combinations(roots.len(), degree) {
        let mut prod = vec![Complex64::new(1.0, 0.0)];
        for &i in &subset {
            let mut next = vec![Complex64::new(0.0, 0.0); prod.len() + 1];
            for (k, c) in prod.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * roots[i];
            }
            prod = next;
        }
        let mut cand = vec![];
        let mut ok = true;
        for c in &prod {
            let v = c * lead;
            if v.im.abs() > 1e-6 * (1.0 + v.re.abs()) || v.re.abs() > 1e15 {
                ok = false;
                break;
            }
            cand.push(BigInt::from(v.re.round() as i64));
        }
        if !ok {
            continue;
        }
        let g = QPoly::from_ints(&cand);
        if g.degree() != Some(degree) {
            continue;
        }
        if let Ok((_, r)) = fq.div_rem(&g) {
            if r.is_zero() {
                return Some(QPoly::from_ints(&cand).primitive_part());
            }
        }
    }
    None
}

/// Maximum degree accepted by the irreducibility certifier.
pub const MAX_DEGREE: usize = 12;

/// Certifies irreducibility over Q. Returns an error carrying a factor for reducible input,
/// or `IrreducibilityUndecided` when neither a factor nor a certificate was found.
pub fn check_irreducible(p: &QPoly) -> Result<()> {
    let n = p.degree().ok_or_else(|| Error::InvalidPolynomial("zero polynomial".into()))?;
    if n == 0 {
        return Err(Error::InvalidPolynomial("constant polynomial".into()));
    }
    if n > MAX_DEGREE {
        return Err(Error::InvalidPolynomial(format!("degree {n} exceeds the supported maximum {MAX_DEGREE}")));
    }
    if n == 1 {
        return Ok(());
    }
    let g = p.gcd(&p.derivative());
    if g.degree().unwrap_or(0) > 0 {
        return Err(Error::Reducible(format!("{}", g)));
    }
    let f = p.primitive_part();
    let degrees = admissible_factor_degrees(&f);
    if degrees.is_empty() {
        return Ok(());
    }
    let roots = complex_roots(&f);
    for &k in &degrees {
        if let Some(fac) = find_factor_numeric(&f, k, &roots) {
            return Err(Error::Reducible(format!("{}", QPoly::from_ints(&fac))));
        }
    }
    Err(Error::IrreducibilityUndecided(format!(
        "modular patterns allow factor degrees {degrees:?} and no factor was found"
    )))
}
