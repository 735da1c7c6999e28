//! Example lattices and exact verifiers for their hypotheses.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::poly::{isolate_real_roots, QPoly, SturmChain};
use crate::exact::{minimal_rational_subspace, q_linear_independence, FieldElement, IndependenceReport, NumberField};
use crate::exponents::spectrum_value;
use crate::lattice::{k_subsets, wedge_coeffs, FormsMatrix, Lattice};

/// Exact evidence attached to one clause.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// The listed elements are Q-independent: their coordinate matrix has full rank.
    Independent { rank: usize, elements: Vec<FieldElement> },
    /// Integer relation among the listed elements.
    Relation { relation: Vec<BigInt>, elements: Vec<FieldElement> },
    /// The value of a minor, which the clause requires to be zero or nonzero.
    Minor { value: FieldElement },
    /// Exact rank of a matrix over the field.
    Rank { rank: usize, expected: usize },
    /// Smallest rational subspace containing a set of vectors.
    RationalClosure { dim: usize, basis: Vec<Vec<BigInt>> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub description: String,
    pub passed: bool,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    pub hypothesis: String,
    pub passed: bool,
    pub clauses: Vec<Clause>,
    /// Free-form annotations, e.g. the expected exponent.
    pub notes: Vec<(String, String)>,
}

impl HypothesisReport {
    fn new(hypothesis: &str, clauses: Vec<Clause>) -> Self {
        let passed = clauses.iter().all(|c| c.passed);
        HypothesisReport { hypothesis: hypothesis.into(), passed, clauses, notes: vec![] }
    }

    pub fn failed_clauses(&self) -> Vec<&Clause> {
        self.clauses.iter().filter(|c| !c.passed).collect()
    }
}

fn one_based(v: &[usize]) -> String {
    let s: Vec<String> = v.iter().map(|i| (i + 1).to_string()).collect();
    format!("({})", s.join(","))
}

fn independence_clause(description: String, elements: Vec<FieldElement>) -> Result<Clause> {
    let rep = q_linear_independence(&elements)?;
    let passed = rep.is_independent();
    let certificate = match rep {
        IndependenceReport::Independent { rank } => Certificate::Independent { rank, elements },
        IndependenceReport::Relation { relation, .. } => Certificate::Relation { relation, elements },
    };
    Ok(Clause { description, passed, certificate })
}

/// Every wedge of every row tuple has Q-independent coefficients.
pub fn verify_corollary1_hypothesis(forms: &FormsMatrix) -> Result<HypothesisReport> {
    let d = forms.dim();
    let mut clauses = vec![];
    for k in 1..=d {
        for rows in k_subsets(d, k) {
            let w = wedge_coeffs(forms, &rows)?;
            clauses.push(independence_clause(format!("rows {}: wedge coefficients independent over Q", one_based(&rows)), w.coords)?);
        }
    }
    Ok(HypothesisReport::new("corollary1", clauses))
}

/// The wedge of the first `d-1` rows has first coefficient zero and Q-independent
/// remaining coefficients; every other row tuple has Q-independent coefficients.
pub fn verify_theorem4_hypothesis(forms: &FormsMatrix) -> Result<HypothesisReport> {
    let d = forms.dim();
    if d < 3 {
        return Err(Error::Precondition(format!("need d >= 3, got {d}")));
    }
    let special: Vec<usize> = (0..d - 1).collect();
    let w = wedge_coeffs(forms, &special)?;
    let first = w.coords[0].clone();
    let mut clauses = vec![Clause {
        description: format!("rows {}: first wedge coefficient is zero", one_based(&special)),
        passed: first.is_zero(),
        certificate: Certificate::Minor { value: first },
    }];
    clauses.push(independence_clause(
        format!("rows {}: remaining wedge coefficients independent over Q", one_based(&special)),
        w.coords[1..].to_vec(),
    )?);
    for k in 1..=d {
        for rows in k_subsets(d, k) {
            if rows == special {
                continue;
            }
            let w = wedge_coeffs(forms, &rows)?;
            clauses.push(independence_clause(format!("rows {}: wedge coefficients independent over Q", one_based(&rows)), w.coords)?);
        }
    }
    Ok(HypothesisReport::new("theorem4", clauses))
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `x^m - 2` with its real root in `[1, 2]`.
fn pure_field(m: usize) -> Result<NumberField> {
    let mut c = vec![0i64; m + 1];
    c[0] = -2;
    c[m] = 1;
    NumberField::from_coeffs(&c, rat(1), rat(2))
}

fn lattice_of(forms: FormsMatrix) -> Result<Lattice> {
    Lattice::from_forms(forms, BigRational::one())
}

/// Forms for `d = 3` over `Q(2^(1/5))`: `(1, a, a^2)`, `(a, a^2, a^4 + a)` and a third row,
/// by default `(a^3, 1, a)`.
fn theorem4_recipe(third: [u32; 3]) -> Result<FormsMatrix> {
    let k = pure_field(5)?;
    let a = k.generator();
    let rows = vec![
        vec![k.one(), a.clone(), a.pow(2)],
        vec![a.clone(), a.pow(2), a.pow(4) + a.clone()],
        third.iter().map(|&e| a.pow(e)).collect(),
    ];
    FormsMatrix::new(rows)
}

fn random_element<R: Rng>(k: &NumberField, rng: &mut R) -> FieldElement {
    loop {
        let c: Vec<i64> = (0..k.degree()).map(|_| rng.gen_range(-2..=2)).collect();
        let e = k.element_i64(&c);
        if !e.is_zero() {
            return e;
        }
    }
}

/// Random forms over `Q(2^(1/m))` with the entry `(d-2, d-2)` solved so that the leading
/// `(d-1)`-minor of the first `d-1` rows vanishes.
fn theorem4_random(d: usize, k: &NumberField, rng: &mut ChaCha8Rng) -> Result<Option<FormsMatrix>> {
    let mut rows: Vec<Vec<FieldElement>> = (0..d).map(|_| (0..d).map(|_| random_element(k, rng)).collect()).collect();
    let special: Vec<usize> = (0..d - 1).collect();
    let minor_with = |rows: &Vec<Vec<FieldElement>>, x: FieldElement| -> Result<FieldElement> {
        let mut r = rows.clone();
        r[d - 2][d - 2] = x;
        Ok(FormsMatrix::new(r)?.minor(&special, &special))
    };
    let m0 = minor_with(&rows, k.zero())?;
    let cof = minor_with(&rows, k.one())? - m0.clone();
    if cof.is_zero() {
        return Ok(None);
    }
    rows[d - 2][d - 2] = m0.neg().try_div(&cof)?;
    Ok(Some(FormsMatrix::new(rows)?))
}

/// Smallest field degree that can hold `C(d, k)` Q-independent minors for every `k`.
fn theorem4_degree(d: usize) -> usize {
    (1..d).map(|k| k_subsets(d, k).len()).max().unwrap_or(1) + 1
}

/// A lattice satisfying the vanishing-first-coefficient hypothesis, with its report.
///
/// With `config` the given forms are verified and returned as they are (the report may
/// fail). Otherwise `d = 3` uses the fixed recipe, falling back over a catalog of
/// monomial third rows, and `d = 4, 5` run a deterministic seeded search.
pub fn theorem4_lattice(d: usize, config: Option<FormsMatrix>) -> Result<(Lattice, HypothesisReport)> {
    if d < 3 {
        return Err(Error::Precondition(format!("need d >= 3, got {d}")));
    }
    if let Some(f) = config {
        if f.dim() != d {
            return Err(Error::Dimension(format!("config has dimension {}, expected {d}", f.dim())));
        }
        let rep = verify_theorem4_hypothesis(&f)?;
        return Ok((lattice_of(f)?, rep));
    }
    if d == 3 {
        let mut catalog = vec![[3, 0, 1]];
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    catalog.push([a, b, c]);
                }
            }
        }
        let mut last = None;
        for third in catalog {
            let f = theorem4_recipe(third)?;
            let rep = verify_theorem4_hypothesis(&f)?;
            if rep.passed {
                return Ok((lattice_of(f)?, rep));
            }
            last = Some(rep);
        }
        let n = last.map_or(0, |r| r.failed_clauses().len());
        return Err(Error::NoConfiguration(format!("no catalog row passes ({n} clauses fail on the last one)")));
    }
    let m = theorem4_degree(d);
    if m > crate::exact::poly::MAX_DEGREE {
        return Err(Error::Precondition(format!("d = {d} needs a field of degree {m}, above the supported maximum")));
    }
    let k = pure_field(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x7434 + d as u64);
    for _ in 0..50 {
        let Some(f) = theorem4_random(d, &k, &mut rng)? else { continue };
        let rep = verify_theorem4_hypothesis(&f)?;
        if rep.passed {
            return Ok((lattice_of(f)?, rep));
        }
    }
    Err(Error::NoConfiguration(format!("seeded search found no configuration for d = {d}")))
}

/// Exponents of the shipped generic configuration: row `i` is `(a^e_i1, a^e_i2, a^e_i3)`
/// over `Q(2^(1/5))`.
const COROLLARY1_EXPONENTS: [[u32; 3]; 3] = [[0, 1, 3], [2, 1, 0], [4, 2, 0]];

/// Shipped `d = 3` forms meant to satisfy the all-wedges independence hypothesis.
pub fn corollary1_config() -> Result<FormsMatrix> {
    let k = pure_field(5)?;
    let a = k.generator();
    FormsMatrix::new(COROLLARY1_EXPONENTS.iter().map(|r| r.iter().map(|&e| a.pow(e)).collect()).collect())
}

/// Row-reduced kernel `{v in K^n : rows v = 0}` over the number field.
pub fn field_kernel(rows: &[Vec<FieldElement>], n: usize, k: &NumberField) -> Result<Vec<Vec<FieldElement>>> {
    let mut m: Vec<Vec<FieldElement>> = rows.to_vec();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv()?;
        m[r] = m[r].iter().map(|e| e * &inv).collect();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let row_r = m[r].clone();
                for (e, rr) in m[i].iter_mut().zip(&row_r) {
                    *e = &*e - &(&f * rr);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    Ok((0..n)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![k.zero(); n];
            v[f] = k.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = m[row][f].neg();
            }
            v
        })
        .collect())
}

/// The subspace `S = {l_1 = ... = l_(d-k) = 0}` has dimension `k`, and its rational
/// closure has dimension exactly `k + l`.
pub fn verify_spectrum_hypothesis(forms: &FormsMatrix, k: usize, l: usize) -> Result<HypothesisReport> {
    let d = forms.dim();
    let target = spectrum_value(d, k, l)?;
    let det = forms.det();
    let mut clauses = vec![Clause {
        description: "forms are nonsingular".into(),
        passed: !det.is_zero(),
        certificate: Certificate::Minor { value: det },
    }];
    let ker = field_kernel(&forms.rows()[..d - k], d, forms.field())?;
    clauses.push(Clause {
        description: format!("first {} forms cut out a subspace of dimension {k}", d - k),
        passed: ker.len() == k,
        certificate: Certificate::Rank { rank: d - ker.len(), expected: d - k },
    });
    if !ker.is_empty() {
        let closure = minimal_rational_subspace(&ker)?;
        clauses.push(Clause {
            description: format!("smallest rational subspace containing it has dimension {}", k + l),
            passed: closure.dim() == k + l,
            certificate: Certificate::RationalClosure { dim: closure.dim(), basis: closure.basis },
        });
    }
    let mut rep = HypothesisReport::new("spectrum", clauses);
    rep.notes.push(("expected_omega".into(), target.to_string()));
    Ok(rep)
}

/// Forms whose zero set `S` of the first `d-k` forms is `k`-dimensional with rational
/// closure of dimension `k+l`. `(k, l) = (1, d-2)` reuses the vanishing-coefficient lattice.
pub fn spectrum_lattice(d: usize, k: usize, l: usize, config: Option<FormsMatrix>) -> Result<(Lattice, HypothesisReport)> {
    spectrum_value(d, k, l)?;
    if let Some(f) = config {
        let rep = verify_spectrum_hypothesis(&f, k, l)?;
        return Ok((lattice_of(f)?, rep));
    }
    if k == 1 && l == d - 2 {
        let (lat, _) = theorem4_lattice(d, None)?;
        let rep = verify_spectrum_hypothesis(lat.forms(), k, l)?;
        return Ok((lat, rep));
    }
    let field = pure_field(d.max(5))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5bec + (d * 100 + k * 10 + l) as u64);
    for _ in 0..50 {
        // columns: k vectors spanning S (supported on the first k+l coordinates), then
        // d-k generic completions
        let mut cols: Vec<Vec<FieldElement>> = (0..k)
            .map(|_| (0..d).map(|i| if i < k + l { random_element(&field, &mut rng) } else { field.zero() }).collect())
            .collect();
        cols.extend((0..d - k).map(|_| (0..d).map(|_| random_element(&field, &mut rng)).collect::<Vec<_>>()));
        let m = FormsMatrix::new((0..d).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect())?;
        if m.det().is_zero() {
            continue;
        }
        let inv = m.inverse()?;
        let order: Vec<usize> = (k..d).chain(0..k).collect();
        let forms = FormsMatrix::new(order.iter().map(|&i| inv.rows()[i].clone()).collect())?;
        let rep = verify_spectrum_hypothesis(&forms, k, l)?;
        if rep.passed {
            return Ok((lattice_of(forms)?, rep));
        }
    }
    Err(Error::NoConfiguration(format!("seeded search found no configuration for (d, k, l) = ({d}, {k}, {l})")))
}

/// Largest degree for which conjugates are searched.
const TOTALLY_REAL_MAX_DEGREE: usize = 7;

/// Bisects an isolating interval `(lo, hi]` down to width `2^-bits`.
fn refine_root(p: &QPoly, mut lo: BigRational, mut hi: BigRational, bits: u32) -> f64 {
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
    let s_hi = p.sign_at(&hi);
    if s_hi == 0 {
        return hi.to_f64().unwrap();
    }
    while &hi - &lo > target {
        let mid = (&lo + &hi) / rat(2);
        let s = p.sign_at(&mid);
        if s == 0 {
            return mid.to_f64().unwrap();
        }
        if s == s_hi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    ((lo + hi) / rat(2)).to_f64().unwrap()
}

/// Solves `v c = rhs` by Gaussian elimination with partial pivoting.
fn solve_f64(mut v: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| v[a][c].abs().total_cmp(&v[b][c].abs()))?;
        if v[p][c].abs() < 1e-300 {
            return None;
        }
        v.swap(c, p);
        rhs.swap(c, p);
        for i in c + 1..n {
            let f = v[i][c] / v[c][c];
            for j in c..n {
                v[i][j] -= f * v[c][j];
            }
            rhs[i] -= f * rhs[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| v[i][j] * x[j]).sum();
        x[i] = (rhs[i] - s) / v[i][i];
    }
    Some(x)
}

/// Continued-fraction approximation with denominator at most `max_den`.
fn rationalize(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i128, 1i128, 1i128, 0i128);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= 1e-9 * x.abs().max(1.0) {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = y - a;
        if frac.abs() < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    None
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur: Vec<usize> = (0..n).collect();
    fn rec(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, &mut out);
    out
}

fn eval_in_field(p: &QPoly, x: &FieldElement) -> FieldElement {
    let k = x.field();
    p.coeffs().iter().rev().fold(k.zero(), |acc, c| &(&acc * x) + &k.from_rational(c.clone()))
}

/// The real conjugates of the generator, written in the power basis, ascending by value.
/// Requires the field to be normal: every root of the minimal polynomial lies in it.
pub fn real_conjugates(k: &NumberField) -> Result<Vec<FieldElement>> {
    let n = k.degree();
    let f = k.modulus().clone();
    if SturmChain::new(&f).count_real() != n {
        return Err(Error::Precondition("minimal polynomial is not totally real".into()));
    }
    if n > TOTALLY_REAL_MAX_DEGREE {
        return Err(Error::Precondition(format!("conjugate search supports degree <= {TOTALLY_REAL_MAX_DEGREE}")));
    }
    let roots: Vec<f64> = isolate_real_roots(&f).into_iter().map(|(lo, hi)| refine_root(&f, lo, hi, 60)).collect();
    let alpha = k.alpha_interval(60).to_interval().mid();
    let i0 = (0..n).min_by(|&a, &b| (roots[a] - alpha).abs().total_cmp(&(roots[b] - alpha).abs())).unwrap();
    let vand: Vec<Vec<f64>> = roots.iter().map(|r| (0..n).map(|j| r.powi(j as i32)).collect()).collect();
    let mut found: Vec<Option<FieldElement>> = vec![None; n];
    for perm in permutations(n) {
        let target = perm[i0];
        if found[target].is_some() {
            continue;
        }
        let rhs: Vec<f64> = perm.iter().map(|&p| roots[p]).collect();
        let Some(c) = solve_f64(vand.clone(), rhs) else { continue };
        let Some(coeffs) = c.iter().map(|&v| rationalize(v, 1_000_000)).collect::<Option<Vec<_>>>() else { continue };
        let beta = k.element(coeffs);
        if !eval_in_field(&f, &beta).is_zero() {
            continue;
        }
        if (beta.to_interval().mid() - roots[target]).abs() > 1e-6 * roots[target].abs().max(1.0) {
            continue;
        }
        found[target] = Some(beta);
    }
    found
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Precondition("field is not normal: some conjugates lie outside it".into()))
}

/// Lattice of the order `Z[α]` under the real embeddings: row `i` is
/// `(σ_i(1), σ_i(α), ..., σ_i(α^(d-1)))`, so `prod_i l_i(z)` is the norm of
/// `z_0 + z_1 α + ... + z_(d-1) α^(d-1)`.
pub fn totally_real_lattice(k: &NumberField) -> Result<Lattice> {
    let n = k.degree();
    if n < 3 {
        return Err(Error::Precondition(format!("need degree >= 3, got {n}")));
    }
    if k.minpoly().last().is_none_or(|c| !c.abs().is_one()) {
        return Err(Error::Precondition("minimal polynomial must be monic".into()));
    }
    let conj = real_conjugates(k)?;
    let rows = conj.iter().map(|b| (0..n as u32).map(|j| b.pow(j)).collect()).collect();
    lattice_of(FormsMatrix::new(rows)?)
}

/// `prod_i l_i(z)` in exact field arithmetic, before scaling.
pub fn exact_form_product(l: &Lattice, z: &[i64]) -> FieldElement {
    let k = l.field();
    l.forms().apply(z).iter().fold(k.one(), |acc, x| &acc * x)
}
