//! Pseudo-compound boxes, the unimodular transference implication and the two witness
//! constructions for the transference bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::{filtered_points_in_box, points_in_box, SearchBox};
use crate::error::{Error, Result};
use crate::exact::FieldElement;
use crate::exponents::transference_lower_bound_interval;
use crate::interval::Interval;
use crate::lattice::{gamma, pi_value, FormsMatrix, Gamma, Lattice, LatticePoint};

/// Scan budget for a single implication check.
const CHECK_BUDGET: usize = 5_000_000;

/// Box with exact rational half-sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parallelepiped {
    #[serde(with = "crate::io::rational_strings")]
    pub eta: Vec<BigRational>,
}

impl Parallelepiped {
    pub fn new(eta: Vec<BigRational>) -> Result<Self> {
        if eta.is_empty() || eta.iter().any(|e| !e.is_positive()) {
            return Err(Error::Precondition("half-sides must be positive".into()));
        }
        Ok(Parallelepiped { eta })
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    pub fn volume(&self) -> BigRational {
        self.eta.iter().fold(BigRational::one(), |a, e| a * e)
    }

    pub fn to_box(&self) -> SearchBox {
        SearchBox { eta: self.eta.iter().map(Interval::from_rational).collect() }
    }

    pub fn scale(&self, t: &BigRational) -> Parallelepiped {
        Parallelepiped { eta: self.eta.iter().map(|e| e * t).collect() }
    }
}

/// Half-sides `η*_i = (prod_j η_j) / η_i`.
pub fn pseudo_compound(p: &Parallelepiped) -> Parallelepiped {
    let v = p.volume();
    Parallelepiped { eta: p.eta.iter().map(|e| &v / e).collect() }
}

pub fn pseudo_compound_interval(eta: &[Interval]) -> Vec<Interval> {
    let v = eta.iter().fold(Interval::ONE, |a, e| a * *e);
    eta.iter().map(|e| v / *e).collect()
}

/// `c = d^(1/(2(d-2)))`.
pub fn transference_constant(d: usize) -> Result<Interval> {
    if d < 3 {
        return Err(Error::Precondition(format!("need d >= 3, got {d}")));
    }
    Ok(Interval::point(d as f64).root(2 * (d as u32 - 2)))
}

fn check_unimodular(l: &Lattice) -> Result<()> {
    let det = l.det_abs();
    if !det.contains(1.0) {
        return Err(Error::Precondition(format!("lattice determinant {det} is not 1; normalize it first")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    PremiseFalse,
    ImplicationHolds,
    Counterexample,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Check {
    pub verdict: Verdict,
    /// Some dual point certainly lies in the pseudo-compound box.
    pub premise_certain: bool,
    pub dual_witness: Option<Vec<i64>>,
    pub primal_witness: Option<Vec<i64>>,
}

/// Decides `P* ∩ Λ* != {0}  =>  cP ∩ Λ != {0}` for `|det Λ| = 1`.
///
/// The premise is tested on the outward-rounded box and the conclusion on the
/// inward-rounded one, so `Counterexample` is only reported when it is genuine.
pub fn check_theorem2(l: &Lattice, p: &Parallelepiped) -> Result<Theorem2Check> {
    let d = l.dim();
    if p.dim() != d {
        return Err(Error::Dimension(format!("box has {} sides, lattice has dimension {d}", p.dim())));
    }
    check_unimodular(l)?;
    let c = transference_constant(d)?;
    let inconclusive = Theorem2Check { verdict: Verdict::Inconclusive, premise_certain: false, dual_witness: None, primal_witness: None };
    let star = pseudo_compound(p).to_box();
    let dual_pts = match filtered_points_in_box(&l.dual(), &star, true, CHECK_BUDGET, |_| true) {
        Ok(v) => v,
        Err(Error::BudgetExhausted(_)) => return Ok(inconclusive),
        Err(e) => return Err(e),
    };
    if dual_pts.is_empty() {
        return Ok(Theorem2Check { verdict: Verdict::PremiseFalse, ..inconclusive });
    }
    let certain_dual = dual_pts.iter().find(|u| star.certainly_contains(&u.x));
    let premise_certain = certain_dual.is_some();
    let dual_witness = Some(certain_dual.unwrap_or(&dual_pts[0]).z.clone());
    let cp = p.to_box().scaled(c);
    let primal = match filtered_points_in_box(l, &cp, true, CHECK_BUDGET, |_| true) {
        Ok(v) => v,
        Err(Error::BudgetExhausted(_)) => return Ok(Theorem2Check { premise_certain, dual_witness, ..inconclusive }),
        Err(e) => return Err(e),
    };
    if let Some(v) = primal.iter().find(|v| cp.certainly_contains(&v.x)) {
        return Ok(Theorem2Check { verdict: Verdict::ImplicationHolds, premise_certain, dual_witness, primal_witness: Some(v.z.clone()) });
    }
    let verdict = if premise_certain && primal.is_empty() { Verdict::Counterexample } else { Verdict::Inconclusive };
    Ok(Theorem2Check { verdict, premise_certain, dual_witness, primal_witness: None })
}

fn random_rational<R: Rng>(rng: &mut R, num: std::ops::RangeInclusive<i64>, den: std::ops::RangeInclusive<i64>) -> BigRational {
    BigRational::new(rng.gen_range(num).into(), rng.gen_range(den).into())
}

/// Random rational matrix with determinant `±1`: a product of rational shears,
/// rational diagonal pairs `diag(r, 1/r)` and row swaps.
pub fn random_unimodular_forms<R: Rng>(d: usize, rng: &mut R) -> FormsMatrix {
    let mut m: Vec<Vec<BigRational>> =
        (0..d).map(|i| (0..d).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    for _ in 0..3 * d {
        let i = rng.gen_range(0..d);
        let mut j = rng.gen_range(0..d - 1);
        if j >= i {
            j += 1;
        }
        match rng.gen_range(0..10) {
            0..=5 => {
                let mut q = random_rational(rng, -2..=2, 1..=3);
                if q.is_zero() {
                    q = BigRational::one();
                }
                for t in 0..d {
                    let add = &q * &m[j][t];
                    m[i][t] += add;
                }
            }
            6..=7 => {
                let r = random_rational(rng, 1..=3, 1..=3);
                for t in 0..d {
                    m[i][t] *= &r;
                    m[j][t] /= &r;
                }
            }
            _ => m.swap(i, j),
        }
    }
    FormsMatrix::from_rationals(&m).expect("unimodular by construction")
}

/// Rational half-sides with `prod η in [1/2, 2]`.
pub fn random_eta<R: Rng>(d: usize, rng: &mut R) -> Parallelepiped {
    let mut eta: Vec<BigRational> = (0..d - 1).map(|_| random_rational(rng, 4..=64, 16..=16)).collect();
    let t = random_rational(rng, 4..=16, 8..=8);
    let prod = eta.iter().fold(BigRational::one(), |a, e| a * e);
    eta.push(t / prod);
    Parallelepiped { eta }
}

/// The lattice and box of trial `index` under `seed`; each trial has its own stream.
pub fn theorem2_trial(d: usize, seed: u64, index: u64) -> (Lattice, Parallelepiped) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let forms = random_unimodular_forms(d, &mut rng);
    let eta = random_eta(d, &mut rng);
    (Lattice::from_forms(forms, BigRational::one()).expect("nonsingular"), eta)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Case {
    pub index: u64,
    pub forms: Vec<Vec<String>>,
    pub eta: Vec<String>,
    pub dual_witness: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Report {
    pub d: usize,
    pub trials: u64,
    pub seed: u64,
    pub premise_true: u64,
    pub implication_holds: u64,
    pub counterexamples: u64,
    pub inconclusive: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub counterexample_cases: Vec<Theorem2Case>,
}

/// Runs seeded random trials in parallel; the report depends only on `(d, trials, seed)`.
pub fn random_theorem2_trials(d: usize, trials: u64, seed: u64) -> Result<Theorem2Report> {
    if !(3..=5).contains(&d) {
        return Err(Error::Precondition(format!("trials support d in 3..=5, got {d}")));
    }
    let results: Vec<(u64, Theorem2Check, Lattice, Parallelepiped)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let (l, p) = theorem2_trial(d, seed, i);
            check_theorem2(&l, &p).map(|c| (i, c, l, p))
        })
        .collect::<Result<_>>()?;
    let mut r = Theorem2Report {
        d,
        trials,
        seed,
        premise_true: 0,
        implication_holds: 0,
        counterexamples: 0,
        inconclusive: 0,
        counterexample_cases: vec![],
    };
    for (i, c, l, p) in results {
        r.premise_true += u64::from(c.premise_certain);
        match c.verdict {
            Verdict::PremiseFalse => {}
            Verdict::ImplicationHolds => r.implication_holds += 1,
            Verdict::Inconclusive => r.inconclusive += 1,
            Verdict::Counterexample => {
                r.counterexamples += 1;
                r.counterexample_cases.push(Theorem2Case {
                    index: i,
                    forms: l.forms().rows().iter().map(|row| row.iter().map(|e| e.to_string()).collect()).collect(),
                    eta: p.eta.iter().map(|e| e.to_string()).collect(),
                    dual_witness: c.dual_witness,
                });
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Holds,
    Fails,
    Undecided,
    /// Hypotheses of the inequality are not met.
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: Interval,
    pub rhs: Interval,
    pub status: CheckStatus,
}

impl InequalityCheck {
    /// `lhs <= rhs`, decided on the enclosures.
    pub fn le(name: &str, lhs: Interval, rhs: Interval) -> Self {
        let status = if lhs.hi <= rhs.lo {
            CheckStatus::Holds
        } else if lhs.lo > rhs.hi {
            CheckStatus::Fails
        } else {
            CheckStatus::Undecided
        };
        InequalityCheck { name: name.into(), lhs, rhs, status }
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, CheckStatus::Holds | CheckStatus::Vacuous)
    }
}

/// `coeff * f^f_exp * W^w_exp`, where `f` is the real normalization factor of the dual
/// and `W^(d-1) = f^d * A` for an exact `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Monomial {
    coeff: FieldElement,
    f_exp: i64,
    w_exp: i64,
}

impl Monomial {
    fn mul(&self, o: &Monomial) -> Monomial {
        Monomial { coeff: &self.coeff * &o.coeff, f_exp: self.f_exp + o.f_exp, w_exp: self.w_exp + o.w_exp }
    }

    fn div(&self, o: &Monomial) -> Result<Monomial> {
        Ok(Monomial { coeff: self.coeff.try_div(&o.coeff)?, f_exp: self.f_exp - o.f_exp, w_exp: self.w_exp - o.w_exp })
    }

    fn reduce(mut self, d: usize, a: &FieldElement) -> Result<Monomial> {
        let k = d as i64 - 1;
        while self.w_exp >= k {
            self.w_exp -= k;
            self.f_exp += d as i64;
            self.coeff = &self.coeff * a;
        }
        while self.w_exp < 0 {
            self.w_exp += k;
            self.f_exp -= d as i64;
            self.coeff = self.coeff.try_div(a)?;
        }
        Ok(self)
    }
}

/// Exact check that the pseudo-compound of `η_i = |u_i|^-1 W` has half-sides `|u_i|`.
fn compound_identity_exact(abs_u: &[FieldElement]) -> Result<bool> {
    let d = abs_u.len();
    let field = abs_u[0].field();
    let a = abs_u.iter().fold(field.one(), |acc, x| &acc * x);
    let eta: Vec<Monomial> =
        abs_u.iter().map(|x| Ok(Monomial { coeff: x.inv()?, f_exp: -1, w_exp: 1 })).collect::<Result<_>>()?;
    let vol = eta.iter().fold(Monomial { coeff: field.one(), f_exp: 0, w_exp: 0 }, |acc, m| acc.mul(m));
    for (i, e) in eta.iter().enumerate() {
        let star = vol.div(e)?.reduce(d, &a)?;
        if star != (Monomial { coeff: abs_u[i].clone(), f_exp: 1, w_exp: 0 }) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferenceWitness {
    pub u: LatticePoint,
    pub eta: Vec<Interval>,
    pub v: LatticePoint,
    pub c: Interval,
    /// `γ(u)` lower and upper bounds; `None` when `|u| <= 1`.
    pub gamma_u: Option<Interval>,
    /// Exponent of the composed bound, from the transference bound at `γ(u)`.
    pub kappa: Option<Interval>,
    pub compound_identity_exact: bool,
    pub compound_identity_certified: bool,
    pub checks: Vec<InequalityCheck>,
}

impl TransferenceWitness {
    pub fn all_passed(&self) -> bool {
        self.compound_identity_exact && self.compound_identity_certified && self.checks.iter().all(|c| c.passed())
    }
}

/// Witness for a dual point `u` with no vanishing coordinate: the box with
/// `η_i = |u_i|^-1 (prod_j |u_j|)^(1/(d-1))` has pseudo-compound sides `|u_i|`, so `cP`
/// holds a primal point `v`, and `v` satisfies the three derived inequalities.
pub fn case1_witness(l: &Lattice, u_z: &[i64]) -> Result<TransferenceWitness> {
    let d = l.dim();
    check_unimodular(l)?;
    let c = transference_constant(d)?;
    let dual = l.dual();
    let u = dual.point(u_z);
    if u.is_zero() {
        return Err(Error::Precondition("u must be nonzero".into()));
    }
    if u.has_zero_coord() {
        return Err(Error::Precondition("u has an exactly vanishing coordinate; use case2_points".into()));
    }
    let abs_exact: Vec<FieldElement> = dual.exact_point(u_z).iter().map(|e| e.abs()).collect();
    let exact = compound_identity_exact(&abs_exact)?;
    let abs_u: Vec<Interval> = u.x.iter().map(|v| v.abs()).collect();
    let prod = abs_u.iter().fold(Interval::ONE, |a, v| a * *v);
    let w = prod.root(d as u32 - 1);
    let eta: Vec<Interval> = abs_u.iter().map(|v| w / *v).collect();
    let star = pseudo_compound_interval(&eta);
    let certified = star.iter().zip(&abs_u).all(|(s, v)| s.intersects(v));
    let cp = SearchBox { eta: eta.clone() }.scaled(c);
    let pts = points_in_box(l, &cp, true)?;
    let v = pts
        .iter()
        .find(|p| cp.certainly_contains(&p.x))
        .or(pts.first())
        .cloned()
        .ok_or_else(|| Error::Internal("no nonzero lattice point in cP".into()))?;
    let mut checks = vec![];
    let ratio = v.x.iter().zip(&cp.eta).fold(Interval::ZERO, |a, (x, e)| a.max(x.abs() / *e));
    checks.push(InequalityCheck::le("v in cP", ratio, Interval::ONE));
    let pi_u = u.pi;
    let pi_v = if v.has_zero_coord() { Interval::ZERO } else { pi_value(&v.x) };
    checks.push(InequalityCheck::le("(a) pi(v) <= c pi(u)^(1/(d-1))", pi_v, c * pi_u.root(d as u32 - 1)));
    // Π(u)^(-d(d-2)/(d-1)) = W^-(d-2)
    let rhs_b = c * u.sup_norm.powi(d as u32 - 1) * w.powi(d as u32 - 2).recip();
    checks.push(InequalityCheck::le("(b) |v| <= c |u|^(d-1) pi(u)^(-d(d-2)/(d-1))", v.sup_norm, rhs_b));
    let gamma_u = match gamma(&u) {
        Ok(Gamma::Finite(g)) => Some(g),
        _ => None,
    };
    let mut kappa = None;
    let name_c = "(c) pi(v) <= c^(1+k) |v|^(-k), k = transference bound at gamma(u)";
    match gamma_u {
        Some(g) if g.lo >= 0.0 => {
            let k = transference_lower_bound_interval(g, d)?;
            let rhs = c.pow(Interval::ONE + k) * v.sup_norm.pow(-k);
            checks.push(InequalityCheck::le(name_c, pi_v, rhs));
            kappa = Some(k);
        }
        _ => checks.push(InequalityCheck { name: name_c.into(), lhs: pi_v, rhs: Interval::ZERO, status: CheckStatus::Vacuous }),
    }
    Ok(TransferenceWitness {
        u,
        eta,
        v,
        c,
        gamma_u,
        kappa,
        compound_identity_exact: exact,
        compound_identity_certified: certified,
        checks,
    })
}

/// Unimodular `V` with `w V = (g, 0, ..., 0)`; columns `1..` span the integer kernel of `w`.
fn kernel_basis(w: &[i64]) -> Result<Vec<Vec<i64>>> {
    let d = w.len();
    let mut r: Vec<i128> = w.iter().map(|&v| v as i128).collect();
    let mut v: Vec<Vec<i128>> = (0..d).map(|i| (0..d).map(|j| i128::from(i == j)).collect()).collect();
    loop {
        let nz: Vec<usize> = (0..d).filter(|&i| r[i] != 0).collect();
        if nz.len() <= 1 {
            if let Some(&p) = nz.first() {
                r.swap(0, p);
                for row in v.iter_mut() {
                    row.swap(0, p);
                }
            }
            break;
        }
        let p = *nz.iter().min_by_key(|&&i| r[i].abs()).unwrap();
        for &j in &nz {
            if j != p {
                let q = r[j] / r[p];
                r[j] -= q * r[p];
                for row in v.iter_mut() {
                    row[j] -= q * row[p];
                }
            }
        }
    }
    let cols: Option<Vec<Vec<i64>>> =
        (1..d).map(|j| (0..d).map(|i| i64::try_from(v[i][j]).ok()).collect()).collect();
    cols.ok_or_else(|| Error::Internal("kernel basis does not fit in i64".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case2Point {
    pub v: LatticePoint,
    pub t: f64,
    /// `max_{i<d} |v_i| <= c2 |v_d|^(-1/(d-2))`.
    pub box_check: InequalityCheck,
    /// `Π(v) <= c2^((d-1)/d) |v|^(-1/(d(d-2)))`.
    pub pi_check: InequalityCheck,
    pub gamma: Option<Interval>,
    /// `1/(d(d-2)) - ln(c2^((d-1)/d)) / ln|v|`.
    pub gamma_floor: Interval,
    pub gamma_check: InequalityCheck,
}

impl Case2Point {
    pub fn passed(&self) -> bool {
        self.box_check.passed() && self.pi_check.passed() && self.gamma_check.passed()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case2Result {
    pub u: LatticePoint,
    /// Integer basis (columns) of `{z : <u, x(z)> = 0}`.
    pub kernel_basis: Vec<Vec<i64>>,
    /// Coordinate dropped when projecting `u^⊥` onto `R^(d-1)`.
    pub dropped: usize,
    pub rho: Interval,
    /// Determinant of the projected sublattice.
    pub det_projected: Interval,
    pub c2: Interval,
    pub points: Vec<Case2Point>,
}

/// Points of `Γ = Λ ∩ u^⊥` with growing last coordinate, for a dual point `u` whose last
/// coordinate vanishes exactly. Each box `|y_i| <= δ`, `|x_d| <= T` in the projection
/// of `u^⊥` has volume `2^(d-1) δ^(d-2) T >= 2^(d-1) det`, so it holds a nonzero point.
pub fn case2_points(l: &Lattice, u_z: &[i64], count: usize) -> Result<Case2Result> {
    let d = l.dim();
    if d < 3 {
        return Err(Error::Precondition(format!("need d >= 3, got {d}")));
    }
    let dual = l.dual();
    let u = dual.point(u_z);
    if u.is_zero() {
        return Err(Error::Precondition("u must be nonzero".into()));
    }
    if !u.exact_zero_coords.contains(&(d - 1)) {
        return Err(Error::Precondition("the last coordinate of u must vanish exactly".into()));
    }
    // <u, x(z)> = u_z . z since the dual forms are the inverse transpose
    let kb = kernel_basis(u_z)?;
    let dropped = (0..d - 1)
        .max_by(|&a, &b| u.x[a].abs().mid().total_cmp(&u.x[b].abs().mid()).then(b.cmp(&a)))
        .unwrap();
    if u.x[dropped].contains_zero() {
        return Err(Error::Internal("u vanishes on all but the last coordinate".into()));
    }
    let field = l.field();
    let full: Vec<Vec<FieldElement>> = l
        .forms()
        .rows()
        .iter()
        .map(|row| {
            kb.iter()
                .map(|col| row.iter().zip(col).fold(field.zero(), |acc, (e, &c)| if c == 0 { acc } else { &acc + &e.scale(&BigRational::from_integer(BigInt::from(c))) }))
                .collect()
        })
        .collect();
    let keep: Vec<usize> = (0..d).filter(|&i| i != dropped).collect();
    let proj_forms = FormsMatrix::new(keep.iter().map(|&i| full[i].clone()).collect())?;
    let proj = Lattice::with_normalization(proj_forms, l.scale().clone(), l.normalization().cloned())
        .map_err(|_| Error::Internal("projected sublattice is degenerate".into()))?;
    let det_p = proj.det_abs();
    let ud = u.x[dropped].abs();
    let rho = (0..d - 1).filter(|&i| i != dropped).fold(Interval::ZERO, |a, i| a + u.x[i].abs() / ud);
    let det_up = Interval::point((Interval::point(det_p.hi) * Interval::point(1.0 + 1e-12)).hi);
    let k = d as u32 - 2;
    let c2 = rho.max(Interval::ONE) * det_up.root(k);
    let exp_pi = Interval::point(d as f64 - 1.0) / Interval::point(d as f64);
    let c2_pi = c2.pow(exp_pi);
    let base_gamma = Interval::ONE / Interval::point((d * (d - 2)) as f64);
    let mut points: Vec<Case2Point> = vec![];
    let mut t = 4.0 * det_up.hi.max(1.0);
    let mut last_vd = 0.0f64;
    for _ in 0..80 {
        if points.len() >= count {
            break;
        }
        t *= 4.0;
        let delta = (det_up / Interval::point(t)).root(k).hi;
        let mut eta = vec![Interval::point(delta); d - 1];
        eta[d - 2] = Interval::point(t);
        let b = SearchBox::new(eta)?;
        let cands = match points_in_box(&proj, &b, true) {
            Ok(c) => c,
            Err(_) => break,
        };
        let mut best: Option<LatticePoint> = None;
        for y in cands {
            let z: Vec<i64> = (0..d).map(|i| kb.iter().zip(&y.z).map(|(col, &c)| col[i] * c).sum()).collect();
            let v = l.point(&z);
            if v.exact_zero_coords.contains(&(d - 1)) {
                continue;
            }
            let vd = v.x[d - 1].abs();
            let others = (0..d - 1).fold(Interval::ZERO, |a, i| a.max(v.x[i].abs()));
            if !others.certainly_le(&vd) || vd.lo <= last_vd {
                continue;
            }
            if best.as_ref().is_none_or(|b| vd.mid() > b.x[d - 1].abs().mid()) {
                best = Some(v);
            }
        }
        let Some(v) = best else { continue };
        let vd = v.x[d - 1].abs();
        last_vd = vd.hi;
        let others = (0..d - 1).fold(Interval::ZERO, |a, i| a.max(v.x[i].abs()));
        let box_check = InequalityCheck::le("max_{i<d} |v_i| <= c2 |v_d|^(-1/(d-2))", others, c2 * vd.root(k).recip());
        let pi_v = if v.has_zero_coord() { Interval::ZERO } else { pi_value(&v.x) };
        let rhs = c2_pi * v.sup_norm.pow(-base_gamma);
        let pi_check = InequalityCheck::le("pi(v) <= c2^((d-1)/d) |v|^(-1/(d(d-2)))", pi_v, rhs);
        let gamma_floor = base_gamma - c2_pi.ln() / v.sup_norm.ln();
        let (g, gamma_check) = match gamma(&v) {
            Ok(Gamma::Infinite) => (None, InequalityCheck { name: "gamma(v) >= floor".into(), lhs: gamma_floor, rhs: Interval::point(f64::INFINITY), status: CheckStatus::Holds }),
            Ok(Gamma::Finite(g)) => (Some(g), InequalityCheck::le("gamma(v) >= floor", gamma_floor, g)),
            Err(_) => (None, InequalityCheck { name: "gamma(v) >= floor".into(), lhs: gamma_floor, rhs: Interval::ZERO, status: CheckStatus::Vacuous }),
        };
        points.push(Case2Point { v, t, box_check, pi_check, gamma: g, gamma_floor, gamma_check });
    }
    Ok(Case2Result { u, kernel_basis: kb, dropped, rho, det_projected: det_p, c2, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pseudo_compound_examples() {
        let p = Parallelepiped::new(vec![r(2, 1), r(3, 1), r(4, 1)]).unwrap();
        let s = pseudo_compound(&p);
        assert_eq!(s.eta, vec![r(12, 1), r(8, 1), r(6, 1)]);
        assert_eq!(pseudo_compound(&s).eta, vec![r(48, 1), r(72, 1), r(96, 1)]);
        let one = Parallelepiped::new(vec![r(1, 1); 3]).unwrap();
        assert_eq!(pseudo_compound(&one), one);
    }

    #[test]
    fn theorem2_on_integer_lattice() {
        let l = Lattice::integer_lattice(3);
        let c = check_theorem2(&l, &Parallelepiped::new(vec![r(1, 1); 3]).unwrap()).unwrap();
        assert_eq!(c.verdict, Verdict::ImplicationHolds);
        let c = check_theorem2(&l, &Parallelepiped::new(vec![r(1, 10); 3]).unwrap()).unwrap();
        assert_eq!(c.verdict, Verdict::PremiseFalse);
    }

    #[test]
    fn trials_are_deterministic() {
        let a = random_theorem2_trials(3, 30, 7).unwrap();
        let b = random_theorem2_trials(3, 30, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counterexamples, 0);
        let e = random_theorem2_trials(3, 0, 1).unwrap();
        assert_eq!((e.trials, e.premise_true, e.implication_holds), (0, 0, 0));
        assert!(random_theorem2_trials(6, 1, 1).is_err());
    }

    #[test]
    fn sampled_forms_are_unimodular() {
        for i in 0..20 {
            let (l, p) = theorem2_trial(4, 3, i);
            assert_eq!(l.forms_det().abs(), l.field().one());
            let v = p.volume();
            assert!(v >= r(1, 2) && v <= r(2, 1));
        }
    }

    #[test]
    fn case1_on_integer_lattice() {
        let w = case1_witness(&Lattice::integer_lattice(3), &[1, 1, 1]).unwrap();
        assert!(w.all_passed(), "{:?}", w.checks);
        assert!(w.eta.iter().all(|e| e.contains(1.0)));
        assert!(case1_witness(&Lattice::integer_lattice(3), &[1, 0, 1]).is_err());
    }

    #[test]
    fn kernel_basis_spans_kernel() {
        let kb = kernel_basis(&[6, 10, 15]).unwrap();
        assert_eq!(kb.len(), 2);
        for c in &kb {
            assert_eq!(6 * c[0] + 10 * c[1] + 15 * c[2], 0);
        }
    }

    #[test]
    fn case2_on_integer_lattice() {
        let res = case2_points(&Lattice::integer_lattice(3), &[0, 1, 0], 3).unwrap();
        assert_eq!(res.points.len(), 3);
        for p in &res.points {
            assert!(p.passed());
            assert!(p.v.pi.hi == 0.0);
        }
        assert!(case2_points(&Lattice::integer_lattice(3), &[0, 0, 1], 3).is_err());
    }
}
