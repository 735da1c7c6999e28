//! Real algebraic number fields in the power basis, with a designated real embedding.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{check_irreducible, QPoly, SturmChain};
use crate::error::{Error, Result};
use crate::interval::{Interval, RationalInterval};

/// `Q(α)` for a real root `α` of an irreducible polynomial, isolated by a rational interval.
#[derive(Clone)]
pub struct NumberField {
    inner: Arc<FieldInner>,
}

struct FieldInner {
    minpoly: Vec<BigInt>,
    modulus: QPoly,
    degree: usize,
    root_interval: (BigRational, BigRational),
    /// Finest isolating interval computed so far.
    refined: Mutex<(BigRational, BigRational)>,
    /// Exact root when the degree is one.
    rational_root: Option<BigRational>,
    /// Integer companion powers for the order `Z[α]`, present when the minpoly is monic over Z.
    companion_powers: Option<Vec<Vec<Vec<i128>>>>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "NumberField({}, root in [{}, {}])",
            self.modulus(),
            self.inner.root_interval.0,
            self.inner.root_interval.1
        )
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.inner, &other.inner) {
            return true;
        }
        if self.degree() != other.degree() {
            return false;
        }
        if self.degree() == 1 {
            return true;
        }
        if self.inner.modulus != other.inner.modulus {
            return false;
        }
        let (a0, a1) = self.inner.root_interval.clone();
        let (b0, b1) = other.inner.root_interval.clone();
        let lo = if a0 > b0 { a0 } else { b0 };
        let hi = if a1 < b1 { a1 } else { b1 };
        if lo > hi {
            return false;
        }
        let f = &self.inner.modulus;
        f.sign_at(&lo) == 0 || SturmChain::new(f).count_in(&lo, &hi) == 1
    }
}

impl Eq for NumberField {}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl NumberField {
    /// Validates `minpoly` (integer coefficients, lowest degree first) and the isolating interval.
    pub fn new(minpoly: &[BigInt], lo: BigRational, hi: BigRational) -> Result<Self> {
        let poly = QPoly::from_ints(minpoly);
        let degree = poly
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::InvalidPolynomial("polynomial must be nonconstant".into()))?;
        if lo >= hi {
            return Err(Error::InvalidPolynomial(format!("root interval [{lo}, {hi}] is empty")));
        }
        check_irreducible(&poly)?;
        let chain = SturmChain::new(&poly);
        let at_lo = usize::from(poly.sign_at(&lo) == 0);
        let count = chain.count_in(&lo, &hi) + at_lo;
        if count != 1 {
            return Err(Error::RootIsolation { count });
        }
        let modulus = poly.monic();
        let rational_root = (degree == 1).then(|| -modulus.coeff(0));
        let companion_powers = companion_powers(&modulus);
        Ok(NumberField {
            inner: Arc::new(FieldInner {
                minpoly: minpoly.to_vec(),
                modulus,
                degree,
                root_interval: (lo.clone(), hi.clone()),
                refined: Mutex::new((lo, hi)),
                rational_root,
                companion_powers,
            }),
        })
    }

    pub fn from_coeffs(minpoly: &[i64], lo: BigRational, hi: BigRational) -> Result<Self> {
        let c: Vec<BigInt> = minpoly.iter().map(|&v| v.into()).collect();
        NumberField::new(&c, lo, hi)
    }

    /// The rational numbers, as the degree-one field of `x`.
    pub fn rationals() -> Self {
        NumberField::from_coeffs(&[0, 1], rat(-1), rat(1)).expect("x is irreducible")
    }

    pub fn degree(&self) -> usize {
        self.inner.degree
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.inner.minpoly
    }

    /// Monic defining polynomial.
    pub fn modulus(&self) -> &QPoly {
        &self.inner.modulus
    }

    pub fn root_interval(&self) -> (&BigRational, &BigRational) {
        (&self.inner.root_interval.0, &self.inner.root_interval.1)
    }

    pub fn is_rational_field(&self) -> bool {
        self.degree() == 1
    }

    /// Rational interval of width at most `2^-bits` containing `α`.
    pub fn alpha_interval(&self, bits: u32) -> RationalInterval {
        if let Some(r) = &self.inner.rational_root {
            return RationalInterval::point(r.clone());
        }
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
        let f = &self.inner.modulus;
        let mut guard = self.inner.refined.lock().expect("root cache poisoned");
        let (mut lo, mut hi) = guard.clone();
        if &hi - &lo > target {
            let s_lo = f.sign_at(&lo);
            let two = rat(2);
            while &hi - &lo > target {
                let mid = (&lo + &hi) / &two;
                let s = f.sign_at(&mid);
                if s == 0 {
                    lo = mid.clone();
                    hi = mid;
                    break;
                }
                if s == s_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            *guard = (lo.clone(), hi.clone());
        }
        RationalInterval::new(lo, hi)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: self.clone(), coords: vec![BigRational::zero(); self.degree()] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, q: BigRational) -> FieldElement {
        let mut coords = vec![BigRational::zero(); self.degree()];
        coords[0] = q;
        FieldElement { field: self.clone(), coords }
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        self.from_rational(rat(v))
    }

    /// The generator `α`.
    pub fn generator(&self) -> FieldElement {
        if self.degree() == 1 {
            return self.from_rational(self.inner.rational_root.clone().unwrap());
        }
        let mut coords = vec![BigRational::zero(); self.degree()];
        coords[1] = BigRational::one();
        FieldElement { field: self.clone(), coords }
    }

    /// Element from power-basis coordinates (padded or reduced as needed).
    pub fn element(&self, coords: Vec<BigRational>) -> FieldElement {
        if coords.len() <= self.degree() {
            let mut c = coords;
            c.resize(self.degree(), BigRational::zero());
            return FieldElement { field: self.clone(), coords: c };
        }
        self.from_poly(&QPoly::new(coords))
    }

    pub fn element_i64(&self, coords: &[i64]) -> FieldElement {
        self.element(coords.iter().map(|&v| rat(v)).collect())
    }

    pub fn from_poly(&self, p: &QPoly) -> FieldElement {
        let r = if self.degree() == 1 {
            QPoly::new(vec![p.eval(self.inner.rational_root.as_ref().unwrap())])
        } else {
            p.rem(&self.inner.modulus).expect("nonzero modulus")
        };
        let mut coords = r.coeffs().to_vec();
        coords.resize(self.degree(), BigRational::zero());
        FieldElement { field: self.clone(), coords }
    }

    /// Exact norm of `z_0 + z_1 α + ...` in the order `Z[α]`, as an integer.
    /// Requires a monic integer minpoly; computed as the determinant of the
    /// multiplication matrix (the resultant of minpoly and the element polynomial).
    pub fn order_norm(&self, z: &[i64]) -> Option<BigInt> {
        let pows = self.inner.companion_powers.as_ref()?;
        let n = self.degree();
        if z.len() != n {
            return None;
        }
        let mut m = vec![vec![0i128; n]; n];
        for (j, &zj) in z.iter().enumerate() {
            if zj == 0 {
                continue;
            }
            for r in 0..n {
                for c in 0..n {
                    m[r][c] = m[r][c].checked_add(pows[j][r][c].checked_mul(zj as i128)?)?;
                }
            }
        }
        bareiss_i128(m).map(BigInt::from).or_else(|| {
            let mut mb: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
            for (j, &zj) in z.iter().enumerate() {
                for r in 0..n {
                    for c in 0..n {
                        mb[r][c] += BigInt::from(pows[j][r][c]) * BigInt::from(zj);
                    }
                }
            }
            Some(bareiss_bigint(mb))
        })
    }
}

fn companion_powers(monic: &QPoly) -> Option<Vec<Vec<Vec<i128>>>> {
    let n = monic.degree()?;
    let mut c = vec![vec![0i128; n]; n];
    for i in 0..n {
        let v = monic.coeff(i);
        if !v.is_integer() {
            return None;
        }
        // column n-1 holds -c_i; subdiagonal ones
        c[i][n - 1] = -v.to_integer().to_i128()?;
        if i + 1 < n {
            c[i + 1][i] = 1;
        }
    }
    let mut pows = vec![identity_i128(n)];
    for _ in 1..n {
        let last = pows.last().unwrap();
        let mut next = vec![vec![0i128; n]; n];
        for r in 0..n {
            for k in 0..n {
                if c[r][k] == 0 {
                    continue;
                }
                for col in 0..n {
                    next[r][col] = next[r][col].checked_add(c[r][k].checked_mul(last[k][col])?)?;
                }
            }
        }
        pows.push(next);
    }
    Some(pows)
}

fn identity_i128(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

/// Fraction-free determinant; `None` on overflow.
fn bareiss_i128(mut m: Vec<Vec<i128>>) -> Option<i128> {
    let n = m.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let p = (k + 1..n).find(|&i| m[i][k] != 0);
            match p {
                Some(p) => {
                    m.swap(k, p);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].checked_mul(m[k][k])?.checked_sub(m[i][k].checked_mul(m[k][j])?)?;
                m[i][j] = v / prev;
            }
        }
        prev = m[k][k];
    }
    Some(sign * m[n - 1][n - 1])
}

fn bareiss_bigint(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(p) => {
                    m.swap(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Exact element of a [`NumberField`], in power-basis coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: NumberField,
    coords: Vec<BigRational>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})a")?,
                _ => write!(f, "({c})a^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl FieldElement {
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    /// Value as a rational, if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.field.degree() == 1 || self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    fn check_same(&self, o: &FieldElement) -> Result<()> {
        if self.field == o.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn to_poly(&self) -> QPoly {
        QPoly::new(self.coords.clone())
    }

    pub fn try_add(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check_same(o)?;
        Ok(FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check_same(o)?;
        Ok(FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn try_mul(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check_same(o)?;
        if self.field.degree() == 1 {
            return Ok(self.field.from_rational(&self.coords[0] * &o.coords[0]));
        }
        let f = &self.field.inner.minpoly;
        let n = self.field.degree();
        if !f[n].abs().is_one() {
            return Ok(self.field.from_poly(&self.to_poly().mul(&o.to_poly())));
        }
        // integer numerators over a common denominator, reduced by the monic minpoly
        let (a, da) = common_denominator(&self.coords);
        let (b, db) = common_denominator(&o.coords);
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        for k in (n..2 * n - 1).rev() {
            let c = std::mem::take(&mut prod[k]);
            if c.is_zero() {
                continue;
            }
            let c = if f[n].is_one() { c } else { -c };
            for i in 0..n {
                prod[k - n + i] -= &c * &f[i];
            }
        }
        let den = da * db;
        prod.truncate(n);
        Ok(FieldElement { field: self.field.clone(), coords: prod.into_iter().map(|v| BigRational::new(v, den.clone())).collect() })
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.field.degree() == 1 {
            return Ok(self.field.from_rational(self.coords[0].recip()));
        }
        // solve a * s = 1 on the multiplication matrix; avoids coefficient growth in the
        // rational Euclidean algorithm
        let n = self.field.degree();
        let mut cols = Vec::with_capacity(n);
        let mut p = self.clone();
        let x = self.field.generator();
        for j in 0..n {
            if j > 0 {
                p = &p * &x;
            }
            cols.push(p.coords.clone());
        }
        let mut m: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| cols[j][i].clone()).chain([if i == 0 { BigRational::one() } else { BigRational::zero() }]).collect())
            .collect();
        let pivots = super::linalg::rref(&mut m);
        if pivots.len() != n || pivots[n - 1] != n - 1 {
            return Err(Error::Internal("element shares a factor with an irreducible modulus".into()));
        }
        Ok(self.field.element(m.into_iter().map(|mut r| r.pop().unwrap()).collect()))
    }

    pub fn try_div(&self, o: &FieldElement) -> Result<FieldElement> {
        self.try_mul(&o.inv()?)
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement { field: self.field.clone(), coords: self.coords.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, q: &BigRational) -> FieldElement {
        FieldElement { field: self.field.clone(), coords: self.coords.iter().map(|c| c * q).collect() }
    }

    pub fn pow(&self, e: u32) -> FieldElement {
        let mut acc = self.field.one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Certified enclosure of the real value under the designated embedding, of width at most
    /// `2^(-precision+2) * max(1, |a|)`.
    pub fn embed(&self, precision: u32) -> RationalInterval {
        let precision = precision.max(16);
        if let Some(q) = self.as_rational() {
            return RationalInterval::point(q).round_outward(precision + 4);
        }
        let mut bits = precision + 8;
        loop {
            let a = self.field.alpha_interval(bits);
            let mut acc = RationalInterval::point(BigRational::zero());
            for c in self.coords.iter().rev() {
                acc = acc.mul(&a).add(&RationalInterval::point(c.clone()));
            }
            let out = acc.round_outward(precision + 4);
            let lo_mag = if out.lo.is_positive() {
                out.lo.clone()
            } else if out.hi.is_negative() {
                -out.hi.clone()
            } else {
                BigRational::zero()
            };
            let scale = if lo_mag > BigRational::one() { lo_mag } else { BigRational::one() };
            let limit = scale * BigRational::new(BigInt::one(), BigInt::one() << (precision as usize - 2));
            if out.width() <= limit {
                return out;
            }
            bits += 16;
        }
    }

    /// Double-precision enclosure.
    pub fn to_interval(&self) -> Interval {
        self.embed(64).to_interval()
    }

    /// Sign under the designated embedding, decided exactly.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let mut p = 64;
        loop {
            let e = self.embed(p);
            if e.lo.is_positive() {
                return 1;
            }
            if e.hi.is_negative() {
                return -1;
            }
            p *= 2;
        }
    }

    pub fn abs(&self) -> FieldElement {
        if self.signum() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Exact field norm `N_{K/Q}`.
    pub fn norm(&self) -> BigRational {
        let n = self.field.degree();
        let mut m: super::linalg::QMatrix = Vec::with_capacity(n);
        let mut basis = self.clone();
        let alpha = self.field.generator();
        for _ in 0..n {
            m.push(basis.coords.clone());
            basis = &basis * &alpha;
        }
        rational_det(m)
    }
}

/// Determinant over Q by Gaussian elimination.
pub fn rational_det(mut m: super::linalg::QMatrix) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det *= &m[k][k];
        let inv = m[k][k].recip();
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] * &inv;
            for j in k..n {
                let t = &f * &m[k][j];
                m[i][j] -= t;
            }
        }
    }
    det
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl std::ops::$trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, o: &FieldElement) -> FieldElement {
                self.$try(o).expect("field mismatch")
            }
        }
        impl std::ops::$trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, o: FieldElement) -> FieldElement {
                (&self).$try(&o).expect("field mismatch")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(self)
    }
}

/// Integer numerators and their common denominator.
fn common_denominator(c: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = c.iter().fold(BigInt::one(), |l, x| num_integer::Integer::lcm(&l, x.denom()));
    (c.iter().map(|x| x.numer() * (&den / x.denom())).collect(), den)
}
