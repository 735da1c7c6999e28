//! Exponent estimates from records, the classical pair exponents, the transference
//! lower bound and the spectrum values.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::enumerate::RecordSearch;
use crate::error::{Error, Result};
use crate::exact::FieldElement;
use crate::interval::Interval;
use crate::lattice::{gamma_from, Gamma};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEntry {
    pub sup_norm: f64,
    /// Certified lower bound on `γ`; `+inf` on a certificate.
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    /// Certified lower bound for `ω`. `+inf` with a certificate, `-inf` when no record
    /// falls in the tail window.
    pub gamma_max: f64,
    pub records_used: usize,
    pub x_max_reached: f64,
    /// Preimage of a point with an exactly vanishing coordinate.
    pub certificate: Option<Vec<i64>>,
    pub trajectory: Vec<TrajectoryEntry>,
    pub complete: bool,
}

impl ExponentEstimate {
    pub fn is_infinite(&self) -> bool {
        self.certificate.is_some()
    }
}

/// `γ_max` over records with `|x| >= X^(1 - tail_fraction)`, where `X` is the reached bound.
pub fn estimate_omega(search: &RecordSearch, tail_fraction: f64) -> Result<ExponentEstimate> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::Precondition("tail fraction must lie in (0, 1]".into()));
    }
    if search.records.is_empty() && search.certificate.is_none() {
        return Err(Error::Precondition("no records to estimate from".into()));
    }
    let trajectory: Vec<TrajectoryEntry> = search
        .records
        .iter()
        .map(|r| TrajectoryEntry { sup_norm: r.point.sup_norm.mid(), gamma: r.gamma.lower() })
        .collect();
    let threshold = search.x_max_reached.powf(1.0 - tail_fraction);
    let tail: Vec<&TrajectoryEntry> = trajectory.iter().filter(|t| t.sup_norm >= threshold).collect();
    let gamma_max = if search.certificate.is_some() {
        f64::INFINITY
    } else {
        tail.iter().map(|t| t.gamma).fold(f64::NEG_INFINITY, f64::max)
    };
    Ok(ExponentEstimate {
        gamma_max,
        records_used: if search.certificate.is_some() { trajectory.len() } else { tail.len() },
        x_max_reached: search.x_max_reached,
        certificate: search.certificate.as_ref().map(|c| c.z.clone()),
        trajectory,
        complete: search.complete,
    })
}

fn check_dim(d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::Precondition(format!("transference bound needs d >= 3, got {d}")));
    }
    Ok(())
}

/// `ω* / ((d-1)^2 + d(d-2) ω*)`, equal to `1/(d(d-2))` at `ω* = ∞`.
pub fn transference_lower_bound(omega_dual: f64, d: usize) -> Result<f64> {
    check_dim(d)?;
    if !(omega_dual >= 0.0) {
        return Err(Error::Precondition("omega_dual must be nonnegative".into()));
    }
    let (a, b) = (((d - 1) * (d - 1)) as f64, (d * (d - 2)) as f64);
    if omega_dual.is_infinite() {
        return Ok(1.0 / b);
    }
    Ok(omega_dual / (a + b * omega_dual))
}

/// Exact rational value of [`transference_lower_bound`]; `None` stands for `ω* = ∞`.
pub fn transference_lower_bound_exact(omega_dual: Option<&BigRational>, d: usize) -> Result<BigRational> {
    check_dim(d)?;
    let a = BigRational::from_integer(BigInt::from((d - 1) * (d - 1)));
    let b = BigRational::from_integer(BigInt::from(d * (d - 2)));
    match omega_dual {
        None => Ok(b.recip()),
        Some(w) if w < &BigRational::zero() => Err(Error::Precondition("omega_dual must be nonnegative".into())),
        Some(w) => Ok(w / (a + b * w)),
    }
}

/// Certified enclosure of the bound for `ω*` in an interval. The bound is increasing,
/// so the endpoints map to endpoints.
pub fn transference_lower_bound_interval(omega_dual: Interval, d: usize) -> Result<Interval> {
    check_dim(d)?;
    if !(omega_dual.lo >= 0.0) {
        return Err(Error::Precondition("omega_dual must be nonnegative".into()));
    }
    let a = Interval::point(((d - 1) * (d - 1)) as f64);
    let b = Interval::point((d * (d - 2)) as f64);
    let at = |w: f64| {
        if w.is_infinite() {
            b.recip()
        } else {
            let w = Interval::point(w);
            w / (a + b * w)
        }
    };
    let (lo, hi) = (at(omega_dual.lo), at(omega_dual.hi));
    Ok(Interval::new(lo.lo, hi.hi))
}

/// `k(d-k-l) / (d l)` for `d >= 3`, `1 <= k <= d-2`, `1 <= l <= d-k-1`.
pub fn spectrum_value(d: usize, k: usize, l: usize) -> Result<BigRational> {
    if d < 3 || k < 1 || k > d - 2 || l < 1 || l > d - k - 1 {
        return Err(Error::Precondition(format!("(d, k, l) = ({d}, {k}, {l}) out of range")));
    }
    Ok(BigRational::new(BigInt::from(k * (d - k - l)), BigInt::from(d * l)))
}

/// One best approximation in the classical search.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalRecord {
    pub z: Vec<i64>,
    /// Exponent base: `|z|` (ordinary) or `z_1` (multiplicative).
    pub base: f64,
    pub value: Interval,
    pub gamma: Gamma,
}

#[derive(Clone, Debug)]
pub struct ClassicalSearch {
    pub records: Vec<ClassicalRecord>,
    pub certificate: Option<Vec<i64>>,
    pub estimate: ExponentEstimate,
}

/// Records for the forms `l_i(z) = θ_i z_1 + z_{i+1}`.
///
/// Ordinary mode measures `max_i |l_i(z)|` against `|z|^-γ`; multiplicative mode measures
/// `(prod_i |l_i(z)|)^(1/n)` against `z_1^-γ`. For each `z_1` only the nearest integers
/// `z_{i+1} = -round(θ_i z_1)` are considered, and `|z| <= x_max`.
pub fn classical_exponent(theta: &[FieldElement], x_max: f64, multiplicative: bool) -> Result<ClassicalSearch> {
    if theta.is_empty() {
        return Err(Error::Precondition("theta must be nonempty".into()));
    }
    if !(x_max > 1.0) || x_max > 1e12 {
        return Err(Error::Precondition("x_max must lie in (1, 1e12]".into()));
    }
    let n = theta.len();
    let field = theta[0].field().clone();
    if theta.iter().any(|t| t.field() != &field) {
        return Err(Error::FieldMismatch);
    }
    let th: Vec<Interval> = theta.iter().map(|t| t.to_interval()).collect();
    let mut cands: Vec<ClassicalRecord> = vec![];
    let mut certificate = None;
    let z1_max = x_max.floor() as i64;
    for z1 in 1..=z1_max {
        let zi = Interval::from_i64(z1);
        let mut z = vec![z1];
        let mut vals = Vec::with_capacity(n);
        let mut zero_forms = 0;
        for (i, t) in th.iter().enumerate() {
            let prod = *t * zi;
            let zn = -(prod.mid().round() as i64);
            z.push(zn);
            let v = prod + Interval::from_i64(zn);
            if v.contains_zero() {
                let e = theta[i].scale(&BigRational::from_integer(z1.into())) + field.from_i64(zn);
                zero_forms += usize::from(e.is_zero());
            }
            vals.push(v.abs());
        }
        // the measured quantity vanishes: all forms (max) or any form (product)
        let exact_zero = if multiplicative { zero_forms > 0 } else { zero_forms == n };
        let sup = z.iter().map(|v| v.unsigned_abs()).max().unwrap() as f64;
        if sup > x_max {
            continue;
        }
        if exact_zero {
            certificate = Some(z);
            break;
        }
        let value = if multiplicative {
            vals.iter().fold(Interval::ONE, |a, v| a * *v).root(n as u32)
        } else {
            vals.iter().fold(Interval::ZERO, |a, v| a.max(*v))
        };
        let base = if multiplicative { z1 as f64 } else { sup };
        cands.push(ClassicalRecord { z, base, value, gamma: Gamma::Finite(Interval::ZERO) });
    }
    cands.sort_by(|a, b| a.base.total_cmp(&b.base).then_with(|| a.z.cmp(&b.z)));
    let mut records: Vec<ClassicalRecord> = vec![];
    let mut running: Option<f64> = None;
    for mut c in cands {
        if c.base <= 1.0 || running.is_some_and(|m| c.value.mid() >= m) {
            continue;
        }
        running = Some(c.value.mid());
        c.gamma = gamma_from(c.value, Interval::point(c.base))?;
        if records.last().is_some_and(|r| r.base == c.base) {
            records.pop();
        }
        records.push(c);
    }
    let trajectory: Vec<TrajectoryEntry> =
        records.iter().map(|r| TrajectoryEntry { sup_norm: r.base, gamma: r.gamma.lower() }).collect();
    let gamma_max = if certificate.is_some() {
        f64::INFINITY
    } else {
        trajectory.iter().map(|t| t.gamma).fold(f64::NEG_INFINITY, f64::max)
    };
    let estimate = ExponentEstimate {
        gamma_max,
        records_used: records.len(),
        x_max_reached: x_max,
        certificate: certificate.clone(),
        trajectory,
        complete: true,
    };
    Ok(ClassicalSearch { records, certificate, estimate })
}

/// `1 / (d (d-2))`.
pub fn infinite_dual_bound(d: usize) -> Result<BigRational> {
    transference_lower_bound_exact(None, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::RecordPoint;
    use crate::exact::NumberField;
    use crate::lattice::LatticePoint;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn transference_values() {
        assert_eq!(transference_lower_bound_exact(None, 3).unwrap(), r(1, 3));
        assert_eq!(transference_lower_bound_exact(Some(&r(1, 1)), 3).unwrap(), r(1, 7));
        assert_eq!(transference_lower_bound_exact(Some(&r(0, 1)), 3).unwrap(), r(0, 1));
        assert!((transference_lower_bound(1.0, 3).unwrap() - 1.0 / 7.0).abs() < 1e-15);
        assert!(transference_lower_bound(1.0, 2).is_err());
        let iv = transference_lower_bound_interval(Interval::new(1.0, 1.0), 3).unwrap();
        assert!(iv.contains(1.0 / 7.0));
    }

    #[test]
    fn spectrum_values() {
        assert_eq!(spectrum_value(3, 1, 1).unwrap(), r(1, 3));
        assert_eq!(spectrum_value(4, 1, 1).unwrap(), r(1, 2));
        assert_eq!(spectrum_value(4, 1, 2).unwrap(), r(1, 8));
        assert!(spectrum_value(3, 2, 1).is_err());
    }

    fn search_with(sup: f64, pi: f64) -> RecordSearch {
        let x = vec![Interval::point(sup), Interval::point(pi), Interval::point(pi * pi * pi / (sup * pi))];
        let mut p = LatticePoint::new(vec![1, 0, 0], x, vec![]);
        p.pi = Interval::point(pi);
        p.sup_norm = Interval::point(sup);
        let g = gamma_from(p.pi, p.sup_norm).unwrap();
        RecordSearch {
            records: vec![RecordPoint { point: p, gamma: g, running_pi_min: Interval::point(pi) }],
            certificate: None,
            complete: true,
            x_max: sup,
            x_max_reached: sup,
            points_examined: 1,
        }
    }

    #[test]
    fn single_record_estimate() {
        let e = estimate_omega(&search_with(100.0, 0.5), 1.0).unwrap();
        assert!((e.gamma_max - 0.150515).abs() < 1e-6);
        let mut s = search_with(100.0, 0.5);
        s.certificate = Some(LatticePoint::new(vec![0, 1, 0], vec![Interval::ZERO; 3], vec![0]));
        assert_eq!(estimate_omega(&s, 0.5).unwrap().gamma_max, f64::INFINITY);
        s.records.clear();
        s.certificate = None;
        assert!(estimate_omega(&s, 0.5).is_err());
    }

    #[test]
    fn classical_rational_pair() {
        let q = NumberField::rationals();
        let theta = vec![q.from_rational(r(1, 2)), q.from_rational(r(1, 3))];
        let s = classical_exponent(&theta, 100.0, false).unwrap();
        assert_eq!(s.certificate, Some(vec![6, -3, -2]));
        assert!(s.estimate.gamma_max.is_infinite());
    }

    #[test]
    fn classical_sqrt2_convergents() {
        let k = NumberField::from_coeffs(&[-2, 0, 1], r(1, 1), r(2, 1)).unwrap();
        let theta = vec![k.generator() - k.one()];
        let ord = classical_exponent(&theta, 10_000.0, false).unwrap();
        assert!(ord.estimate.gamma_max >= 0.99);
        // convergent denominators of sqrt 2 - 1 appear among the records
        let zs: Vec<i64> = ord.records.iter().map(|r| r.z[0]).collect();
        for q in [2, 5, 12, 29, 70, 169, 408, 985, 2378, 5741] {
            assert!(zs.contains(&q), "missing convergent denominator {q}");
        }
        let mul = classical_exponent(&theta, 10_000.0, true).unwrap();
        assert!(mul.estimate.gamma_max >= ord.estimate.gamma_max);
    }
}
