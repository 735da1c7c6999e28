//! Lattices given by linear forms over a real number field.
//!
//! A lattice is `s * f * F * Z^d` where `F` is an invertible matrix of field
//! elements (row `i` holds the coefficients of the form `l_i`), `s` a positive
//! rational and `f` an optional real normalization factor `|b|^(-1/d)` for an
//! exact field element `b`. All structural data is exact; numeric coordinates
//! come from certified interval embeddings.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{FieldElement, NumberField};
use crate::interval::Interval;

/// Square matrix of field elements; row `i` is the coefficient vector of `l_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormsMatrix {
    field: NumberField,
    rows: Vec<Vec<FieldElement>>,
}

impl FormsMatrix {
    pub fn new(rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::Dimension("empty forms matrix".into()));
        }
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension(format!("forms matrix must be {d}x{d}")));
        }
        let field = rows[0][0].field().clone();
        if rows.iter().flatten().any(|e| e.field() != &field) {
            return Err(Error::FieldMismatch);
        }
        Ok(FormsMatrix { field, rows })
    }

    pub fn identity(field: &NumberField, d: usize) -> Self {
        let rows = (0..d)
            .map(|i| (0..d).map(|j| if i == j { field.one() } else { field.zero() }).collect())
            .collect();
        FormsMatrix { field: field.clone(), rows }
    }

    /// Rational matrix over the degree-one field.
    pub fn from_rationals(m: &[Vec<BigRational>]) -> Result<Self> {
        let q = NumberField::rationals();
        FormsMatrix::new(m.iter().map(|r| r.iter().map(|v| q.from_rational(v.clone())).collect()).collect())
    }

    pub fn from_i64(m: &[Vec<i64>]) -> Result<Self> {
        let q = NumberField::rationals();
        FormsMatrix::new(m.iter().map(|r| r.iter().map(|&v| q.from_i64(v)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn rows(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &FieldElement {
        &self.rows[i][j]
    }

    pub fn transpose(&self) -> FormsMatrix {
        let d = self.dim();
        let rows = (0..d).map(|j| (0..d).map(|i| self.rows[i][j].clone()).collect()).collect();
        FormsMatrix { field: self.field.clone(), rows }
    }

    pub fn det(&self) -> FieldElement {
        field_det(self.rows.clone(), &self.field)
    }

    /// Determinant of the submatrix on the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> FieldElement {
        let sub = rows.iter().map(|&i| cols.iter().map(|&j| self.rows[i][j].clone()).collect()).collect();
        field_det(sub, &self.field)
    }

    pub fn inverse(&self) -> Result<FormsMatrix> {
        let d = self.dim();
        if d <= SMALL_DET {
            return self.adjugate_inverse();
        }
        let mut a = self.rows.clone();
        let mut inv = FormsMatrix::identity(&self.field, d).rows;
        for c in 0..d {
            let p = (c..d).find(|&i| !a[i][c].is_zero()).ok_or(Error::Singular)?;
            a.swap(c, p);
            inv.swap(c, p);
            let piv = a[c][c].inv()?;
            for j in 0..d {
                a[c][j] = &a[c][j] * &piv;
                inv[c][j] = &inv[c][j] * &piv;
            }
            for i in 0..d {
                if i == c || a[i][c].is_zero() {
                    continue;
                }
                let f = a[i][c].clone();
                for j in 0..d {
                    a[i][j] = &a[i][j] - &(&f * &a[c][j]);
                    inv[i][j] = &inv[i][j] - &(&f * &inv[c][j]);
                }
            }
        }
        Ok(FormsMatrix { field: self.field.clone(), rows: inv })
    }

    /// Adjugate over the determinant: a single field inversion, which keeps small
    /// dimensions cheap when entries have many coefficients.
    fn adjugate_inverse(&self) -> Result<FormsMatrix> {
        let d = self.dim();
        let det = self.det();
        if det.is_zero() {
            return Err(Error::Singular);
        }
        let inv_det = det.inv()?;
        let rows = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        // (i, j) entry of the inverse is the (j, i) cofactor over det
                        let r: Vec<usize> = (0..d).filter(|&x| x != j).collect();
                        let c: Vec<usize> = (0..d).filter(|&x| x != i).collect();
                        let m = if d == 1 { self.field.one() } else { self.minor(&r, &c) };
                        let e = &m * &inv_det;
                        if (i + j) % 2 == 1 {
                            e.neg()
                        } else {
                            e
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(FormsMatrix { field: self.field.clone(), rows })
    }

    pub fn inverse_transpose(&self) -> Result<FormsMatrix> {
        Ok(self.inverse()?.transpose())
    }

    /// Exact values `(l_1(z), ..., l_d(z))`.
    pub fn apply(&self, z: &[i64]) -> Vec<FieldElement> {
        self.rows
            .iter()
            .map(|row| {
                let mut coords = vec![BigRational::zero(); self.field.degree()];
                for (e, &zj) in row.iter().zip(z) {
                    if zj == 0 {
                        continue;
                    }
                    let zq = BigRational::from_integer(zj.into());
                    for (c, ec) in coords.iter_mut().zip(e.coords()) {
                        *c += ec * &zq;
                    }
                }
                self.field.element(coords)
            })
            .collect()
    }

    pub fn permute_rows(&self, perm: &[usize]) -> FormsMatrix {
        FormsMatrix { field: self.field.clone(), rows: perm.iter().map(|&i| self.rows[i].clone()).collect() }
    }
}

/// Largest size expanded by cofactors; elimination needs a field inversion per pivot.
const SMALL_DET: usize = 4;

fn laplace_det(m: &[Vec<FieldElement>], cols: &[usize], field: &NumberField) -> FieldElement {
    let r = m.len() - cols.len();
    if cols.len() == 1 {
        return m[r][cols[0]].clone();
    }
    let mut acc = field.zero();
    for (i, &c) in cols.iter().enumerate() {
        if m[r][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let t = &m[r][c] * &laplace_det(m, &rest, field);
        acc = if i % 2 == 1 { &acc - &t } else { &acc + &t };
    }
    acc
}

/// Determinant in the field: cofactor expansion up to 4 x 4, Gaussian elimination beyond.
pub fn field_det(mut m: Vec<Vec<FieldElement>>, field: &NumberField) -> FieldElement {
    let n = m.len();
    if n == 0 {
        return field.one();
    }
    if n <= SMALL_DET {
        return laplace_det(&m, &(0..n).collect::<Vec<_>>(), field);
    }
    let mut det = field.one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return field.zero();
        };
        if p != k {
            m.swap(p, k);
            det = det.neg();
        }
        det = &det * &m[k][k];
        let inv = m[k][k].inv().expect("nonzero pivot");
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] * &inv;
            for j in k + 1..n {
                m[i][j] = &m[i][j] - &(&f * &m[k][j]);
            }
        }
    }
    det
}

/// Real normalization factor `|base|^(-1/root)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetNormalization {
    pub base: FieldElement,
    pub root: u32,
}

impl DetNormalization {
    pub fn factor(&self) -> Interval {
        self.base.abs().to_interval().root(self.root).recip()
    }
}

#[derive(Default)]
struct LatticeCache {
    det: OnceLock<FieldElement>,
    inverse: OnceLock<FormsMatrix>,
    embedded: OnceLock<Vec<Vec<Interval>>>,
    embedded_inverse: OnceLock<Vec<Vec<Interval>>>,
    zero_tests: OnceLock<Vec<ZeroTest>>,
}

/// Exact test for `l_i(z) = 0`: integer matrix `R` with `l_i(z) = 0 <=> R z = 0`.
#[derive(Clone, Debug)]
struct ZeroTest {
    small: Option<Vec<Vec<i128>>>,
    big: Vec<Vec<BigInt>>,
}

impl ZeroTest {
    fn new(row: &[FieldElement]) -> Self {
        let deg = row[0].field().degree();
        let mut big = vec![];
        for j in 0..deg {
            let mut den = BigInt::one();
            for e in row {
                den = den.lcm(e.coords()[j].denom());
            }
            let r: Vec<BigInt> = row
                .iter()
                .map(|e| (&e.coords()[j] * BigRational::from_integer(den.clone())).to_integer())
                .collect();
            if r.iter().any(|v| !v.is_zero()) {
                big.push(r);
            }
        }
        let small = big.iter().map(|r| r.iter().map(|v| v.to_i128().filter(|x| x.abs() < (1 << 60))).collect()).collect();
        ZeroTest { small, big }
    }

    fn is_zero(&self, z: &[i64]) -> bool {
        if let Some(small) = &self.small {
            return small.iter().all(|r| {
                let mut acc = 0i128;
                for (a, &b) in r.iter().zip(z) {
                    acc += a * b as i128;
                }
                acc == 0
            });
        }
        self.big.iter().all(|r| r.iter().zip(z).map(|(a, &b)| a * BigInt::from(b)).sum::<BigInt>().is_zero())
    }
}

/// Full-rank lattice `{ s * f * (l_1(z), ..., l_d(z)) : z in Z^d }`.
#[derive(Clone)]
pub struct Lattice {
    forms: FormsMatrix,
    scale: BigRational,
    normalization: Option<DetNormalization>,
    cache: Arc<LatticeCache>,
}

impl std::fmt::Debug for Lattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Lattice")
            .field("forms", &self.forms)
            .field("scale", &self.scale)
            .field("normalization", &self.normalization)
            .finish()
    }
}

impl PartialEq for Lattice {
    fn eq(&self, o: &Self) -> bool {
        self.forms == o.forms && self.scale == o.scale && self.normalization == o.normalization
    }
}

impl Lattice {
    /// The lattice `scale * {(l_1(z), ..., l_d(z)) : z in Z^d}`.
    pub fn from_forms(forms: FormsMatrix, scale: BigRational) -> Result<Self> {
        if !scale.is_positive() {
            return Err(Error::Precondition("scale must be positive".into()));
        }
        let det = forms.det();
        if det.is_zero() {
            return Err(Error::Singular);
        }
        let cache = LatticeCache::default();
        let _ = cache.det.set(det);
        Ok(Lattice { forms, scale, normalization: None, cache: Arc::new(cache) })
    }

    pub fn integer_lattice(d: usize) -> Self {
        Lattice::from_forms(FormsMatrix::identity(&NumberField::rationals(), d), BigRational::one()).unwrap()
    }

    pub fn with_normalization(forms: FormsMatrix, scale: BigRational, normalization: Option<DetNormalization>) -> Result<Self> {
        let mut l = Lattice::from_forms(forms, scale)?;
        l.normalization = normalization;
        Ok(l)
    }

    pub fn dim(&self) -> usize {
        self.forms.dim()
    }

    pub fn forms(&self) -> &FormsMatrix {
        &self.forms
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    pub fn normalization(&self) -> Option<&DetNormalization> {
        self.normalization.as_ref()
    }

    pub fn field(&self) -> &NumberField {
        self.forms.field()
    }

    /// Exact determinant of the forms matrix (without scaling).
    pub fn forms_det(&self) -> &FieldElement {
        self.cache.det.get_or_init(|| self.forms.det())
    }

    /// Exact `|det|` of `s * F`; ignores a real normalization factor.
    pub fn det_abs_exact(&self) -> FieldElement {
        let s = self.scale.clone();
        let sd = (0..self.dim()).fold(BigRational::one(), |acc, _| acc * &s);
        self.forms_det().abs().scale(&sd)
    }

    /// Certified enclosure of `|det Λ|`, including any normalization factor.
    pub fn det_abs(&self) -> Interval {
        let base = self.det_abs_exact().to_interval();
        match &self.normalization {
            None => base,
            Some(n) => base * n.factor().powi(self.dim() as u32),
        }
    }

    /// Total real scaling `s * f` as an interval.
    pub fn total_scale(&self) -> Interval {
        let s = Interval::from_rational(&self.scale);
        match &self.normalization {
            None => s,
            Some(n) => s * n.factor(),
        }
    }

    pub fn forms_inverse(&self) -> &FormsMatrix {
        self.cache.inverse.get_or_init(|| self.forms.inverse().expect("lattice forms are invertible"))
    }

    /// Certified embedding of the scaled basis: `x = B z`.
    pub fn embedded_basis(&self) -> &[Vec<Interval>] {
        self.cache.embedded.get_or_init(|| {
            let t = self.total_scale();
            self.forms.rows().iter().map(|r| r.iter().map(|e| e.to_interval() * t).collect()).collect()
        })
    }

    /// Certified embedding of `B^-1`, so that `z = B^-1 x`.
    pub fn embedded_inverse(&self) -> &[Vec<Interval>] {
        self.cache.embedded_inverse.get_or_init(|| {
            let t = self.total_scale().recip();
            self.forms_inverse().rows().iter().map(|r| r.iter().map(|e| e.to_interval() * t).collect()).collect()
        })
    }

    fn zero_tests(&self) -> &[ZeroTest] {
        self.cache.zero_tests.get_or_init(|| self.forms.rows().iter().map(|r| ZeroTest::new(r)).collect())
    }

    /// Indices `i` with `l_i(z) = 0` exactly.
    pub fn exact_zero_coords(&self, z: &[i64]) -> Vec<usize> {
        self.zero_tests().iter().enumerate().filter(|(_, t)| t.is_zero(z)).map(|(i, _)| i).collect()
    }

    /// Certified coordinates of `B z`.
    pub fn embed_point(&self, z: &[i64]) -> Vec<Interval> {
        let b = self.embedded_basis();
        b.iter()
            .map(|row| {
                row.iter().zip(z).fold(Interval::ZERO, |acc, (e, &zj)| if zj == 0 { acc } else { acc + *e * Interval::from_i64(zj) })
            })
            .collect()
    }

    /// The lattice point with preimage `z`.
    pub fn point(&self, z: &[i64]) -> LatticePoint {
        let x = self.embed_point(z);
        self.point_from_parts(z.to_vec(), x)
    }

    pub(crate) fn point_from_parts(&self, z: Vec<i64>, mut x: Vec<Interval>) -> LatticePoint {
        let needs_exact = x.iter().any(|v| v.contains_zero());
        let exact_zero_coords = if needs_exact { self.exact_zero_coords(&z) } else { vec![] };
        for &i in &exact_zero_coords {
            x[i] = Interval::ZERO;
        }
        LatticePoint::new(z, x, exact_zero_coords)
    }

    /// Exact coordinates `s * l_i(z)` (the normalization factor is not applied).
    pub fn exact_point(&self, z: &[i64]) -> Vec<FieldElement> {
        self.forms.apply(z).into_iter().map(|e| e.scale(&self.scale)).collect()
    }

    /// The dual lattice `{ y : <y, x> in Z for all x in Λ }`.
    pub fn dual(&self) -> Lattice {
        let forms = self.forms_inverse().transpose();
        let cache = LatticeCache::default();
        let _ = cache.det.set(self.forms_det().inv().expect("nonzero det"));
        let _ = cache.inverse.set(self.forms.transpose());
        Lattice {
            forms,
            scale: self.scale.recip(),
            normalization: self.normalization.as_ref().map(|n| DetNormalization {
                base: n.base.inv().expect("nonzero base"),
                root: n.root,
            }),
            cache: Arc::new(cache),
        }
    }

    /// Homothetic copy with `|det| = 1`. A rational determinant with a rational `d`-th root is
    /// absorbed into the exact scale; otherwise a real factor `|det F|^(-1/d)` is attached.
    pub fn normalize_det(&self) -> Lattice {
        let d = self.dim() as u32;
        if let Some(n) = &self.normalization {
            if n.root == d && &n.base == self.forms_det() {
                return self.clone();
            }
        }
        let det = self.forms_det().clone();
        if self.normalization.is_none() {
            if let Some(r) = det.as_rational() {
                if let Some(root) = rational_root(&r.abs(), d) {
                    let mut l = self.clone();
                    l.scale = root.recip();
                    l.cache = Arc::new(LatticeCache::default());
                    let _ = l.cache.det.set(det);
                    return l;
                }
            }
        }
        let cache = LatticeCache::default();
        let _ = cache.det.set(det.clone());
        Lattice {
            forms: self.forms.clone(),
            scale: BigRational::one(),
            normalization: Some(DetNormalization { base: det, root: d }),
            cache: Arc::new(cache),
        }
    }

    /// Constants `m, M` with `m * max_i |l_i(z)| <= |z| <= M * max_i |l_i(z)|`,
    /// from the row-sum norms of the embedded basis and its inverse.
    pub fn norm_equivalence_constants(&self) -> (Interval, Interval) {
        let row_sum = |m: &[Vec<Interval>]| {
            m.iter()
                .map(|r| r.iter().fold(Interval::ZERO, |acc, v| acc + v.abs()))
                .fold(Interval::ZERO, |acc, v| acc.max(v))
        };
        (row_sum(self.embedded_basis()).recip(), row_sum(self.embedded_inverse()))
    }
}

fn rational_root(q: &BigRational, d: u32) -> Option<BigRational> {
    let n = q.numer().nth_root(d);
    let m = q.denom().nth_root(d);
    if num_traits::pow(n.clone(), d as usize) == *q.numer() && num_traits::pow(m.clone(), d as usize) == *q.denom() {
        Some(BigRational::new(n, m))
    } else {
        None
    }
}

/// `Π(x) = prod |x_i|^(1/d)`.
pub fn pi_value(x: &[Interval]) -> Interval {
    let d = x.len() as u32;
    let prod = x.iter().fold(Interval::ONE, |acc, v| acc * v.abs());
    prod.root(d)
}

pub fn sup_norm(x: &[Interval]) -> Interval {
    x.iter().fold(Interval::ZERO, |acc, v| acc.max(v.abs()))
}

/// A lattice point with its preimage, certified coordinates and exact zero pattern.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub z: Vec<i64>,
    pub x: Vec<Interval>,
    pub sup_norm: Interval,
    pub pi: Interval,
    pub exact_zero_coords: Vec<usize>,
}

impl LatticePoint {
    pub fn new(z: Vec<i64>, x: Vec<Interval>, exact_zero_coords: Vec<usize>) -> Self {
        let sup = sup_norm(&x);
        let pi = if exact_zero_coords.is_empty() { pi_value(&x) } else { Interval::ZERO };
        LatticePoint { z, x, sup_norm: sup, pi, exact_zero_coords }
    }

    pub fn is_zero(&self) -> bool {
        self.z.iter().all(|&v| v == 0)
    }

    pub fn has_zero_coord(&self) -> bool {
        !self.exact_zero_coords.is_empty()
    }
}

/// Exponent `γ` with `Π(x) = |x|^(-γ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gamma {
    Finite(Interval),
    Infinite,
}

impl Gamma {
    pub fn lower(&self) -> f64 {
        match self {
            Gamma::Finite(g) => g.lo,
            Gamma::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Gamma::Infinite)
    }
}

/// `γ(x) = -ln Π(x) / ln |x|`; infinite when a coordinate vanishes exactly.
pub fn gamma(p: &LatticePoint) -> Result<Gamma> {
    if p.has_zero_coord() {
        return Ok(Gamma::Infinite);
    }
    gamma_from(p.pi, p.sup_norm)
}

pub fn gamma_from(pi: Interval, sup: Interval) -> Result<Gamma> {
    if sup.lo <= 1.0 {
        return Err(Error::Domain(format!("gamma needs |x| > 1, got {sup}")));
    }
    Ok(Gamma::Finite(-pi.ln() / sup.ln()))
}

/// Wedge `l_{i_1} ^ ... ^ l_{i_k}`: its `k x k` minors over lexicographically ordered column subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrassmannCoords {
    pub k: usize,
    pub row_indices: Vec<usize>,
    pub subsets: Vec<Vec<usize>>,
    pub coords: Vec<FieldElement>,
}

impl GrassmannCoords {
    pub fn coord(&self, subset: &[usize]) -> Option<&FieldElement> {
        self.subsets.iter().position(|s| s == subset).map(|i| &self.coords[i])
    }
}

/// All increasing `k`-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn check_rows(d: usize, rows: &[usize], allow_empty: bool) -> Result<()> {
    if (!allow_empty && rows.is_empty()) || rows.len() > d {
        return Err(Error::Precondition(format!("need 1 <= k <= {d} rows, got {}", rows.len())));
    }
    if rows.windows(2).any(|w| w[0] >= w[1]) || rows.iter().any(|&r| r >= d) {
        return Err(Error::Precondition(format!("row indices {rows:?} must be strictly increasing and < {d}")));
    }
    Ok(())
}

/// Exact Grassmann coordinates of the selected rows (0-based, strictly increasing).
pub fn wedge_coeffs(forms: &FormsMatrix, rows: &[usize]) -> Result<GrassmannCoords> {
    check_rows(forms.dim(), rows, false)?;
    Ok(wedge_unchecked(forms, rows))
}

fn wedge_unchecked(forms: &FormsMatrix, rows: &[usize]) -> GrassmannCoords {
    let k = rows.len();
    let subsets = k_subsets(forms.dim(), k);
    let coords = subsets.iter().map(|s| forms.minor(rows, s)).collect();
    GrassmannCoords { k, row_indices: rows.to_vec(), subsets, coords }
}

/// One slot of the complementary-minor identity:
/// `dual[dual_subset] * det(F) = sign * primal[primal_subset]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMapEntry {
    pub dual_subset: Vec<usize>,
    pub primal_subset: Vec<usize>,
    pub sign: i8,
}

#[derive(Clone, Debug)]
pub struct ComplementaryWedge {
    pub primal: GrassmannCoords,
    pub dual: GrassmannCoords,
    pub det: FieldElement,
    pub sign_map: Vec<SignMapEntry>,
}

impl ComplementaryWedge {
    /// Checks the identity slot by slot, exactly.
    pub fn verify(&self) -> bool {
        self.sign_map.iter().all(|e| {
            let lhs = &self.dual.coord(&e.dual_subset).cloned().unwrap() * &self.det;
            let rhs = self.primal.coord(&e.primal_subset).cloned().unwrap();
            let rhs = if e.sign < 0 { rhs.neg() } else { rhs };
            lhs == rhs
        })
    }
}

fn complement(d: usize, s: &[usize]) -> Vec<usize> {
    (0..d).filter(|i| !s.contains(i)).collect()
}

/// Wedge of the dual forms on the complementary rows, with the sign map relating each
/// coordinate to a primal coordinate.
pub fn complementary_dual_wedge(forms: &FormsMatrix, rows: &[usize]) -> Result<ComplementaryWedge> {
    let d = forms.dim();
    check_rows(d, rows, false)?;
    let (det, dual_forms) = det_and_dual(forms)?;
    Ok(complementary_unchecked(forms, &dual_forms, det, rows))
}

/// [`complementary_dual_wedge`] for every nonempty proper row subset, sharing one inversion.
pub fn complementary_dual_wedges(forms: &FormsMatrix) -> Result<Vec<ComplementaryWedge>> {
    let d = forms.dim();
    let (det, dual_forms) = det_and_dual(forms)?;
    Ok((1..d).flat_map(|k| k_subsets(d, k)).map(|rows| complementary_unchecked(forms, &dual_forms, det.clone(), &rows)).collect())
}

fn det_and_dual(forms: &FormsMatrix) -> Result<(FieldElement, FormsMatrix)> {
    let det = forms.det();
    if det.is_zero() {
        return Err(Error::Singular);
    }
    Ok((det, forms.inverse_transpose()?))
}

fn complementary_unchecked(forms: &FormsMatrix, dual_forms: &FormsMatrix, det: FieldElement, rows: &[usize]) -> ComplementaryWedge {
    let d = forms.dim();
    let comp_rows = complement(d, rows);
    let primal = wedge_unchecked(forms, rows);
    let dual = wedge_unchecked(dual_forms, &comp_rows);
    // 1-based index sums
    let rows_c_sum: usize = comp_rows.iter().map(|i| i + 1).sum();
    let sign_map = dual
        .subsets
        .iter()
        .map(|t| {
            let t_sum: usize = t.iter().map(|i| i + 1).sum();
            SignMapEntry {
                dual_subset: t.clone(),
                primal_subset: complement(d, t),
                sign: if (t_sum + rows_c_sum).is_multiple_of(2) { 1 } else { -1 },
            }
        })
        .collect();
    ComplementaryWedge { primal, dual, det, sign_map }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn cubic() -> NumberField {
        NumberField::from_coeffs(&[-1, -3, 0, 1], q(1), q(2)).unwrap()
    }

    #[test]
    fn identity_lattice() {
        let l = Lattice::integer_lattice(3);
        assert!(l.forms_det().is_one());
        assert_eq!(l.dual(), l);
        assert_eq!(l.normalize_det(), l);
    }

    #[test]
    fn singular_forms_rejected() {
        let f = FormsMatrix::from_i64(&[vec![1, 2, 3], vec![1, 2, 3], vec![0, 0, 1]]).unwrap();
        assert_eq!(Lattice::from_forms(f, q(1)).unwrap_err(), Error::Singular);
    }

    #[test]
    fn algebraic_determinant_and_dual() {
        let k = cubic();
        let a = k.generator();
        let a2 = &a * &a;
        let f = FormsMatrix::new(vec![
            vec![k.one(), a.clone(), a2.clone()],
            vec![a.clone(), a2.clone(), k.from_i64(2)],
            vec![k.from_i64(1), k.zero(), a.clone()],
        ])
        .unwrap();
        let l = Lattice::from_forms(f, q(1)).unwrap();
        let dl = l.dual();
        assert!((l.forms_det() * dl.forms_det()).is_one());
        assert_eq!(dl.dual(), l);
    }

    #[test]
    fn scaled_integer_lattice_normalizes() {
        let l = Lattice::from_forms(FormsMatrix::identity(&NumberField::rationals(), 3), q(2)).unwrap();
        let n = l.normalize_det();
        assert!(n.normalization().is_none());
        assert!(n.det_abs().contains(1.0));
        let nine = FormsMatrix::from_i64(&[vec![9, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let n = Lattice::from_forms(nine, q(1)).unwrap().normalize_det();
        assert!(n.normalization().is_some());
        assert!(n.det_abs().contains(1.0));
        assert!(n.total_scale().contains(9f64.powf(-1.0 / 3.0)) || n.total_scale().width() < 1e-14);
    }

    #[test]
    fn pi_examples() {
        let p = |v: &[f64]| pi_value(&v.iter().map(|&x| Interval::point(x)).collect::<Vec<_>>());
        assert!(p(&[2.0, 2.0, 2.0]).contains(2.0));
        assert_eq!(p(&[1.0, 0.0, 5.0]), Interval::ZERO);
        assert!(p(&[1.0, 2.0, 4.0]).contains(2.0));
    }

    #[test]
    fn gamma_examples() {
        let g = gamma_from(Interval::point(0.5), Interval::point(100.0)).unwrap();
        match g {
            Gamma::Finite(v) => assert!((v.mid() - 0.150_514_997_831_990_6).abs() < 1e-12),
            Gamma::Infinite => panic!(),
        }
        let g = gamma_from(Interval::ONE, Interval::point(7.0)).unwrap();
        assert_eq!(g, Gamma::Finite(Interval::ZERO));
        let z3 = Lattice::integer_lattice(3);
        assert_eq!(gamma(&z3.point(&[5, 0, 0])).unwrap(), Gamma::Infinite);
        assert!(gamma_from(Interval::point(0.5), Interval::ONE).is_err());
    }

    #[test]
    fn wedge_examples() {
        let f = FormsMatrix::from_i64(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let w = wedge_coeffs(&f, &[0, 1]).unwrap();
        let vals: Vec<_> = w.coords.iter().map(|c| c.as_rational().unwrap()).collect();
        assert_eq!(vals, vec![q(1), q(0), q(0)]);
        let w = wedge_coeffs(&f, &[0, 1, 2]).unwrap();
        assert_eq!(w.coords, vec![f.det()]);
        assert!(wedge_coeffs(&f, &[1, 0]).is_err());
        assert!(wedge_coeffs(&f, &[]).is_err());
        assert!(wedge_coeffs(&f, &[0, 3]).is_err());
    }

    #[test]
    fn symbolic_wedge_with_beta() {
        // l1 = (1, a, a^2), l2 = (a, a^2, b): minors (0, b - a^3, a b - a^4)
        let k = NumberField::from_coeffs(&[-2, 0, 0, 0, 0, 1], q(1), q(2)).unwrap();
        let a = k.generator();
        let b = k.element_i64(&[0, 1, 0, 0, 1]);
        let f = FormsMatrix::new(vec![
            vec![k.one(), a.clone(), a.pow(2)],
            vec![a.clone(), a.pow(2), b.clone()],
            vec![a.pow(3), k.one(), a.clone()],
        ])
        .unwrap();
        let w = wedge_coeffs(&f, &[0, 1]).unwrap();
        assert!(w.coords[0].is_zero());
        assert_eq!(w.coords[1], &b - &a.pow(3));
        assert_eq!(w.coords[2], &(&a * &b) - &a.pow(4));
    }

    #[test]
    fn complementary_identity_small_cases() {
        let f = FormsMatrix::from_i64(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let cw = complementary_dual_wedge(&f, &[0, 1]).unwrap();
        assert_eq!(cw.dual.coords.len(), 3);
        assert!(cw.dual.coord(&[2]).unwrap().is_one());
        assert!(cw.verify());
        let g = FormsMatrix::from_i64(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]).unwrap();
        let cw = complementary_dual_wedge(&g, &[0, 1, 2]).unwrap();
        assert_eq!(cw.dual.k, 0);
        assert!(cw.dual.coords[0].is_one());
        assert!(cw.verify());
        for rows in [vec![0], vec![1], vec![2], vec![0, 2], vec![1, 2]] {
            assert!(complementary_dual_wedge(&g, &rows).unwrap().verify());
        }
    }

    #[test]
    fn norm_equivalence_holds_on_samples() {
        let k = cubic();
        let a = k.generator();
        let f = FormsMatrix::new(vec![
            vec![k.one(), a.clone(), a.pow(2)],
            vec![k.one(), k.from_i64(3), a.clone()],
            vec![a.pow(2), k.zero(), k.one()],
        ])
        .unwrap();
        let l = Lattice::from_forms(f, q(1)).unwrap();
        let (m, big_m) = l.norm_equivalence_constants();
        for z in [[1i64, 0, 0], [3, -2, 7], [0, 5, -1], [-4, 4, 4]] {
            let p = l.point(&z);
            let zn = z.iter().map(|v| v.abs()).max().unwrap() as f64;
            assert!((m * p.sup_norm).lo <= zn);
            assert!(zn <= (big_m * p.sup_norm).hi);
        }
    }
}
