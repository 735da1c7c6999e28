//! Lattice points in sup-norm boxes, record points and norm minima.
//!
//! Box scans bound the preimage `z` through a certified enclosure of `B^-1`, after an
//! LLL reduction of `D^-1 B` (with `D = diag(η)`) that only tightens the search range.
//! The innermost coordinate is solved directly from the box constraints. Membership is
//! decided on certified coordinates with ties included, so the scan returns every point
//! that possibly lies in the closed box.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational_kernel;
use crate::interval::Interval;
use crate::lattice::{gamma, Gamma, Lattice, LatticePoint};

/// Largest per-coordinate search radius accepted for `z`.
const MAX_RADIUS: i64 = 1 << 40;
/// Largest number of outer-coordinate combinations scanned for one box.
const MAX_OUTER: f64 = 4e9;

/// Closed coordinate box `|x_i| <= η_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchBox {
    pub eta: Vec<Interval>,
}

impl SearchBox {
    pub fn new(eta: Vec<Interval>) -> Result<Self> {
        if eta.is_empty() || eta.iter().any(|e| !(e.lo > 0.0) || !e.hi.is_finite()) {
            return Err(Error::Precondition("box half-sides must be positive and finite".into()));
        }
        Ok(SearchBox { eta })
    }

    pub fn from_f64(eta: &[f64]) -> Result<Self> {
        SearchBox::new(eta.iter().map(|&e| Interval::point(e)).collect())
    }

    pub fn cube(d: usize, r: f64) -> Result<Self> {
        SearchBox::new(vec![Interval::point(r); d])
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    /// `2^d * prod η_i`.
    pub fn volume(&self) -> Interval {
        let two_d = Interval::point(2f64.powi(self.dim() as i32));
        self.eta.iter().fold(two_d, |acc, e| acc * *e)
    }

    pub fn scaled(&self, c: Interval) -> SearchBox {
        SearchBox { eta: self.eta.iter().map(|e| *e * c).collect() }
    }

    pub fn possibly_contains(&self, x: &[Interval]) -> bool {
        x.iter().zip(&self.eta).all(|(v, e)| v.abs().lo <= e.hi)
    }

    pub fn certainly_contains(&self, x: &[Interval]) -> bool {
        x.iter().zip(&self.eta).all(|(v, e)| v.abs().hi <= e.lo)
    }
}

type IntMatrix = Vec<Vec<i128>>;

/// Float LLL on the columns of `m` (`δ = 0.99`). Returns `(U, U^-1)` with `m U` reduced,
/// or `None` if the transformation grows too large to be worth using.
fn lll_columns(m: &[Vec<f64>]) -> Option<(IntMatrix, IntMatrix)> {
    let n = m.len();
    let mut b: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| m[i][j]).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
    let mut uinv = u.clone();
    let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(x, y)| x * y).sum::<f64>();
    let gram_schmidt = |b: &[Vec<f64>]| {
        let mut bs: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut mu = vec![vec![0.0; n]; n];
        let mut norms = vec![0.0; n];
        for i in 0..n {
            let mut v = b[i].clone();
            for j in 0..i {
                mu[i][j] = if norms[j] > 0.0 { dot(&b[i], &bs[j]) / norms[j] } else { 0.0 };
                for t in 0..n {
                    v[t] -= mu[i][j] * bs[j][t];
                }
            }
            norms[i] = dot(&v, &v);
            bs.push(v);
        }
        (mu, norms)
    };
    let limit = 1i128 << 50;
    let mut k = 1;
    let mut iters = 0;
    while k < n {
        iters += 1;
        if iters > 20_000 {
            return None;
        }
        let (mut mu, _) = gram_schmidt(&b);
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q == 0.0 {
                continue;
            }
            if !q.is_finite() || q.abs() > 1e15 {
                return None;
            }
            let qi = q as i128;
            for t in 0..n {
                b[k][t] -= q * b[j][t];
                u[t][k] -= qi * u[t][j];
                uinv[j][t] += qi * uinv[k][t];
            }
            for i in 0..j {
                mu[k][i] -= q * mu[j][i];
            }
            mu[k][j] -= q;
        }
        if u.iter().chain(&uinv).flatten().any(|v| v.abs() > limit) {
            return None;
        }
        let (mu, norms) = gram_schmidt(&b);
        if norms[k] < (0.99 - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            b.swap(k, k - 1);
            for row in u.iter_mut() {
                row.swap(k, k - 1);
            }
            uinv.swap(k, k - 1);
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
    Some((u, uinv))
}

/// Search plan for one box: `z = U z'` with `|z'_j| <= radius_j`.
struct Plan {
    u: Vec<Vec<i64>>,
    radius: Vec<i64>,
    /// `D^-1 B U` with `D = diag(η_hi)`: the box is `|a z'|_inf <= 1`.
    a: Vec<Vec<Interval>>,
}

fn identity_i128(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn plan(l: &Lattice, b: &SearchBox) -> Result<Plan> {
    let d = l.dim();
    if b.dim() != d {
        return Err(Error::Dimension(format!("box has {} sides, lattice has dimension {d}", b.dim())));
    }
    let basis = l.embedded_basis();
    let inv = l.embedded_inverse();
    let eta: Vec<f64> = b.eta.iter().map(|e| e.hi).collect();
    let scaled: Vec<Vec<Interval>> =
        (0..d).map(|i| (0..d).map(|j| basis[i][j] / Interval::point(eta[i])).collect()).collect();
    let mid: Vec<Vec<f64>> = scaled.iter().map(|r| r.iter().map(|v| v.mid()).collect()).collect();
    let (u, uinv) = lll_columns(&mid).unwrap_or_else(|| (identity_i128(d), identity_i128(d)));
    let to_iv = |v: i128| Interval::from_i64(v as i64);
    // z' = U^-1 B^-1 x with |x_i| <= η_i
    let mut radius = Vec::with_capacity(d);
    for row in &uinv {
        let mut acc = Interval::ZERO;
        for i in 0..d {
            let mut c = Interval::ZERO;
            for (t, &ut) in row.iter().enumerate() {
                if ut != 0 {
                    c = c + to_iv(ut) * inv[t][i];
                }
            }
            acc = acc + c.abs() * Interval::point(eta[i]);
        }
        if !(acc.hi < MAX_RADIUS as f64) {
            return Err(Error::Precondition(format!("box too large to enumerate (search radius {})", acc.hi)));
        }
        radius.push(acc.hi.floor() as i64);
    }
    let outer: f64 = radius[..d - 1].iter().map(|&r| (2 * r + 1) as f64).product();
    if outer > MAX_OUTER {
        return Err(Error::Precondition(format!("box too large to enumerate ({outer:.3e} outer candidates)")));
    }
    let a = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    (0..d).fold(Interval::ZERO, |acc, t| if u[t][j] == 0 { acc } else { acc + scaled[i][t] * to_iv(u[t][j]) })
                })
                .collect()
        })
        .collect();
    let u = u.into_iter().map(|r| r.into_iter().map(|v| v as i64).collect()).collect();
    Ok(Plan { u, radius, a })
}

/// Range of the last coordinate `t` with `|p_i + a_i t| <= 1` possibly true for every row.
fn last_range(p: &[Interval], a: &[Vec<Interval>], r: i64) -> Option<(i64, i64)> {
    let d = p.len();
    let (mut lo, mut hi) = (-r as f64, r as f64);
    for i in 0..d {
        let ai = a[i][d - 1];
        if ai.contains_zero() {
            if p[i].abs().lo > 1.0 {
                return None;
            }
            continue;
        }
        let e1 = (Interval::point(-1.0) - p[i]) / ai;
        let e2 = (Interval::ONE - p[i]) / ai;
        let h = e1.hull(e2);
        lo = lo.max(h.lo);
        hi = hi.min(h.hi);
        if lo > hi {
            return None;
        }
    }
    let (lo, hi) = (lo.ceil() as i64, hi.floor() as i64);
    (lo <= hi).then_some((lo, hi))
}

/// Runs `visit` on every point possibly in the box whose outer coordinate is `first`.
fn scan_slice(l: &Lattice, b: &SearchBox, pl: &Plan, first: i64, exclude_zero: bool, stop: &AtomicBool, visit: &mut dyn FnMut(LatticePoint)) {
    let d = l.dim();
    let mut zp = vec![0i64; d];
    zp[0] = first;
    let mut partial: Vec<Vec<Interval>> = vec![vec![Interval::ZERO; d]; d];
    for i in 0..d {
        partial[1][i] = pl.a[i][0] * Interval::from_i64(first);
    }
    // depth-first over z'_1..z'_{d-2}; partial[k] holds rows of sum_{j<k} a_ij z'_j
    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        l: &Lattice,
        b: &SearchBox,
        pl: &Plan,
        zp: &mut Vec<i64>,
        partial: &mut Vec<Vec<Interval>>,
        exclude_zero: bool,
        stop: &AtomicBool,
        visit: &mut dyn FnMut(LatticePoint),
    ) {
        let d = zp.len();
        if stop.load(Ordering::Relaxed) {
            return;
        }
        if k == d - 1 {
            let Some((lo, hi)) = last_range(&partial[k], &pl.a, pl.radius[k]) else {
                return;
            };
            for t in lo..=hi {
                zp[k] = t;
                if exclude_zero && zp.iter().all(|&v| v == 0) {
                    continue;
                }
                let z: Vec<i64> = (0..d).map(|i| (0..d).map(|j| pl.u[i][j] * zp[j]).sum()).collect();
                let x = l.embed_point(&z);
                if b.possibly_contains(&x) {
                    visit(l.point_from_parts(z, x));
                }
            }
            return;
        }
        let r = pl.radius[k];
        for v in -r..=r {
            zp[k] = v;
            let iv = Interval::from_i64(v);
            for i in 0..d {
                partial[k + 1][i] = partial[k][i] + pl.a[i][k] * iv;
            }
            rec(k + 1, l, b, pl, zp, partial, exclude_zero, stop, visit);
        }
    }
    if d == 1 {
        let Some((lo, hi)) = last_range(&[Interval::ZERO], &pl.a, pl.radius[0]) else {
            return;
        };
        for t in lo..=hi {
            if exclude_zero && t == 0 {
                continue;
            }
            let z = vec![pl.u[0][0] * t];
            let x = l.embed_point(&z);
            if b.possibly_contains(&x) {
                visit(l.point_from_parts(z, x));
            }
        }
        return;
    }
    rec(1, l, b, pl, &mut zp, &mut partial, exclude_zero, stop, visit);
}

/// Deterministic order: sup-norm, then `z` lexicographically.
pub fn point_order(a: &LatticePoint, b: &LatticePoint) -> std::cmp::Ordering {
    a.sup_norm.mid().total_cmp(&b.sup_norm.mid()).then_with(|| a.z.cmp(&b.z))
}

/// Calls `visit` on every lattice point possibly inside the closed box, in parallel and
/// in no particular order. Returns the number of points visited.
pub fn for_each_point_in_box<F>(l: &Lattice, b: &SearchBox, exclude_zero: bool, visit: F) -> Result<usize>
where
    F: Fn(&LatticePoint) + Sync,
{
    let pl = plan(l, b)?;
    let count = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let r0 = pl.radius[0];
    (-r0..=r0).into_par_iter().for_each(|first| {
        let mut local = 0usize;
        scan_slice(l, b, &pl, first, exclude_zero, &stop, &mut |p| {
            local += 1;
            visit(&p);
        });
        count.fetch_add(local, Ordering::Relaxed);
    });
    Ok(count.into_inner())
}

/// Points possibly inside the box that pass `keep`, sorted by [`point_order`].
/// Fails with [`Error::BudgetExhausted`] when more than `max_points` points are kept;
/// that outcome depends only on the input, not on scheduling.
pub fn filtered_points_in_box<F>(l: &Lattice, b: &SearchBox, exclude_zero: bool, max_points: usize, keep: F) -> Result<Vec<LatticePoint>>
where
    F: Fn(&LatticePoint) -> bool + Sync,
{
    let pl = plan(l, b)?;
    let count = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let r0 = pl.radius[0];
    let slices: Vec<Vec<LatticePoint>> = (-r0..=r0)
        .into_par_iter()
        .map(|first| {
            let mut out = vec![];
            scan_slice(l, b, &pl, first, exclude_zero, &stop, &mut |p| {
                if keep(&p) {
                    if count.fetch_add(1, Ordering::Relaxed) >= max_points {
                        stop.store(true, Ordering::Relaxed);
                    }
                    out.push(p);
                }
            });
            out
        })
        .collect();
    if stop.load(Ordering::Relaxed) {
        return Err(Error::BudgetExhausted(max_points as u64));
    }
    let mut pts: Vec<LatticePoint> = slices.into_iter().flatten().collect();
    pts.sort_by(point_order);
    Ok(pts)
}

/// Every lattice point possibly inside the closed box, sorted by [`point_order`].
pub fn points_in_box(l: &Lattice, b: &SearchBox, exclude_zero: bool) -> Result<Vec<LatticePoint>> {
    filtered_points_in_box(l, b, exclude_zero, usize::MAX, |_| true)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationBudget {
    pub x_max: f64,
    pub max_points: usize,
    pub precision: u32,
}

impl EnumerationBudget {
    pub fn new(x_max: f64) -> Self {
        EnumerationBudget { x_max, max_points: 50_000_000, precision: 64 }
    }
}

/// A point whose `Π` is smaller than that of every earlier point in sup-norm order.
#[derive(Clone, Debug, PartialEq)]
pub struct RecordPoint {
    pub point: LatticePoint,
    pub gamma: Gamma,
    pub running_pi_min: Interval,
}

#[derive(Clone, Debug)]
pub struct RecordSearch {
    pub records: Vec<RecordPoint>,
    /// Nonzero point with an exactly vanishing coordinate; implies `ω = ∞`.
    pub certificate: Option<LatticePoint>,
    pub complete: bool,
    pub x_max: f64,
    /// Sup-norm up to which the record list is exhaustive.
    pub x_max_reached: f64,
    pub points_examined: usize,
}

/// Half-sides `X 2^-e_i` over all `e` with `e_i >= 0` and `sum e_i = s`.
fn dyadic_boxes(d: usize, x: f64, s: u32) -> Vec<SearchBox> {
    let mut out = vec![];
    let mut e = vec![0u32; d];
    fn rec(i: usize, left: u32, e: &mut Vec<u32>, x: f64, out: &mut Vec<SearchBox>) {
        let d = e.len();
        if i == d - 1 {
            e[i] = left;
            let eta = e.iter().map(|&k| Interval::point(x * 2f64.powi(-(k as i32)))).collect();
            out.push(SearchBox { eta });
            return;
        }
        for k in 0..=left {
            e[i] = k;
            rec(i + 1, left - k, e, x, out);
        }
    }
    rec(0, s, &mut e, x, &mut out);
    out
}

struct RecordScan {
    records: Vec<RecordPoint>,
    certificate: Option<LatticePoint>,
    running: Option<Interval>,
}

impl RecordScan {
    fn new() -> Self {
        RecordScan { records: vec![], certificate: None, running: None }
    }

    /// Feeds points in [`point_order`]; returns `false` once a certificate is found.
    fn feed(&mut self, p: &LatticePoint, min_sup: f64) -> bool {
        if p.is_zero() {
            return true;
        }
        if p.has_zero_coord() {
            self.certificate = Some(p.clone());
            return false;
        }
        if p.sup_norm.lo <= min_sup {
            return true;
        }
        // ties within rounding are not records
        let better = match self.running {
            None => true,
            Some(m) => p.pi.certainly_lt(&m),
        };
        if !better {
            return true;
        }
        self.running = Some(p.pi);
        let rec = RecordPoint { point: p.clone(), gamma: gamma_or_unbounded(p), running_pi_min: p.pi };
        if let Some(last) = self.records.last() {
            if last.point.sup_norm.mid() == p.sup_norm.mid() {
                self.records.pop();
            }
        }
        self.records.push(rec);
        true
    }
}

/// `γ(p)`, or the whole real line when `|x| > 1` is not certain.
fn gamma_or_unbounded(p: &LatticePoint) -> Gamma {
    gamma(p).unwrap_or(Gamma::Finite(Interval::new(f64::NEG_INFINITY, f64::INFINITY)))
}

fn initial_radius(l: &Lattice, x_max: f64) -> f64 {
    let d = l.dim() as f64;
    let det = l.det_abs().hi;
    (0.5 * (20_000.0 * det).powf(1.0 / d)).clamp(2f64.min(x_max), x_max)
}

/// Records over all nonzero points with `min_sup < |x| <= x_max`.
fn record_scan(l: &Lattice, x_max: f64, min_sup: f64, max_points: usize) -> Result<RecordSearch> {
    let d = l.dim();
    let mut x0 = initial_radius(l, x_max);
    let mut examined;
    let mut scan;
    loop {
        let cube = SearchBox::cube(d, x0)?;
        let pts = match filtered_points_in_box(l, &cube, true, max_points, |_| true) {
            Ok(p) => p,
            Err(Error::BudgetExhausted(_)) => {
                return Ok(RecordSearch { records: vec![], certificate: None, complete: false, x_max, x_max_reached: 0.0, points_examined: 0 })
            }
            Err(e) => return Err(e),
        };
        examined = pts.len();
        scan = RecordScan::new();
        for p in pts.iter().filter(|p| p.sup_norm.mid() <= x0) {
            if !scan.feed(p, min_sup) {
                break;
            }
        }
        if scan.certificate.is_some() || scan.running.is_some() || x0 >= x_max {
            break;
        }
        x0 = (2.0 * x0).min(x_max);
    }
    let done = |scan: RecordScan, reached: f64, complete: bool, examined: usize| RecordSearch {
        records: scan.records,
        certificate: scan.certificate,
        complete,
        x_max,
        x_max_reached: reached,
        points_examined: examined,
    };
    if scan.certificate.is_some() || x0 >= x_max {
        return Ok(done(scan, x0, true, examined));
    }
    let Some(m0) = scan.running else {
        return Ok(done(scan, x0, true, examined));
    };
    // Later records have prod |x_i| < P; every such x with |x| <= X lies in one of the
    // boxes |x_i| <= X 2^-e_i with sum e_i = S.
    let p_bound = m0.powi(d as u32) * Interval::point(1.0 + 1e-9);
    let p_hi = Interval::point(p_bound.hi);
    let xs = Interval::point(x_max);
    let t = (Interval::point(d as f64) * xs.ln() - p_hi.ln()) / Interval::point(2f64).ln() - Interval::point(d as f64);
    let s = if t.lo.is_finite() { t.lo.ceil().max(0.0) as u32 } else { 0 };
    let boxes = dyadic_boxes(d, x_max, s);
    let m0_hi = m0.hi;
    let budget = max_points.saturating_sub(examined);
    let kept = AtomicUsize::new(0);
    let over = AtomicBool::new(false);
    let per_box: Vec<Result<Vec<LatticePoint>>> = boxes
        .par_iter()
        .map(|b| {
            if over.load(Ordering::Relaxed) {
                return Ok(vec![]);
            }
            let pts = filtered_points_in_box(l, b, true, budget, |p| {
                p.sup_norm.mid() > x0 && p.sup_norm.mid() <= x_max && (p.has_zero_coord() || p.pi.lo < m0_hi)
            })?;
            if kept.fetch_add(pts.len(), Ordering::Relaxed) + pts.len() > budget {
                over.store(true, Ordering::Relaxed);
            }
            Ok(pts)
        })
        .collect();
    let mut merged: BTreeMap<Vec<i64>, LatticePoint> = BTreeMap::new();
    for r in per_box {
        match r {
            Ok(pts) => {
                for p in pts {
                    merged.entry(p.z.clone()).or_insert(p);
                }
            }
            Err(Error::BudgetExhausted(_)) => over.store(true, Ordering::Relaxed),
            Err(e) => return Err(e),
        }
    }
    if over.load(Ordering::Relaxed) {
        return Ok(done(scan, x0, false, examined));
    }
    let mut tail: Vec<LatticePoint> = merged.into_values().collect();
    tail.sort_by(point_order);
    examined += tail.len();
    for p in &tail {
        if !scan.feed(p, min_sup) {
            break;
        }
    }
    Ok(done(scan, x_max, true, examined))
}

/// Record points with `1 < |x| <= x_max`, in increasing sup-norm. Stops early with a
/// certificate when a nonzero point has an exactly vanishing coordinate.
pub fn record_points(l: &Lattice, budget: &EnumerationBudget) -> Result<RecordSearch> {
    if !(budget.x_max > 1.0) || budget.max_points == 0 {
        return Err(Error::Precondition("record search needs x_max > 1 and a positive point budget".into()));
    }
    record_scan(l, budget.x_max, 1.0, budget.max_points)
}

#[derive(Clone, Debug)]
pub struct NormMinimum {
    /// Enclosure of `min prod |x_i|` over `0 < |x| <= x_max`.
    pub value: Interval,
    pub witness: Option<LatticePoint>,
    pub complete: bool,
}

fn abs_product(x: &[Interval]) -> Interval {
    x.iter().fold(Interval::ONE, |acc, v| acc * v.abs())
}

/// `N_X(Λ) = min { prod |x_i| : x in Λ, 0 < |x| <= X }`.
pub fn norm_minimum_estimate(l: &Lattice, x_max: f64) -> Result<NormMinimum> {
    if !(x_max >= 1.0) {
        return Err(Error::Precondition("norm minimum needs x_max >= 1".into()));
    }
    let s = record_scan(l, x_max, 0.0, EnumerationBudget::new(x_max).max_points)?;
    if let Some(c) = s.certificate {
        return Ok(NormMinimum { value: Interval::ZERO, witness: Some(c), complete: true });
    }
    match s.records.last() {
        Some(r) => Ok(NormMinimum { value: abs_product(&r.point.x), witness: Some(r.point.clone()), complete: s.complete }),
        None => Ok(NormMinimum { value: Interval::point(f64::INFINITY), witness: None, complete: s.complete }),
    }
}

#[derive(Clone, Debug)]
pub struct MinkowskiPoint {
    pub point: LatticePoint,
    pub certainly_inside: bool,
    /// Relative widening of the box that was needed, `0` if none.
    pub margin: f64,
}

/// A nonzero lattice point in the closed box, which exists when `prod η_i >= |det Λ|`.
pub fn minkowski_point(l: &Lattice, b: &SearchBox, precision: u32) -> Result<MinkowskiPoint> {
    let vol = b.eta.iter().fold(Interval::ONE, |acc, e| acc * *e);
    let det = l.det_abs();
    if vol.certainly_lt(&det) {
        return Err(Error::Precondition(format!("volume condition fails: prod eta = {vol} < det = {det}")));
    }
    // a homothetic copy with volume just above 2^d det still holds a point and keeps the scan small
    let shrink = (det / vol).root(b.dim() as u32).hi * (1.0 + 1e-9);
    let inner = if shrink < 0.5 { b.scaled(Interval::point(shrink)) } else { b.clone() };
    let mut pts = points_in_box(l, &inner, true)?;
    if pts.is_empty() {
        pts = points_in_box(l, b, true)?;
    }
    if let Some(p) = pts.iter().find(|p| b.certainly_contains(&p.x)).or(pts.first()) {
        return Ok(MinkowskiPoint { certainly_inside: b.certainly_contains(&p.x), point: p.clone(), margin: 0.0 });
    }
    let margin = 2f64.powi(-(precision.min(1000) as i32));
    let wide = b.scaled(Interval::point(1.0 + margin));
    let pts = points_in_box(l, &wide, true)?;
    match pts.first() {
        Some(p) => Ok(MinkowskiPoint { certainly_inside: false, point: p.clone(), margin }),
        None => Err(Error::Internal("no lattice point found although the volume condition holds".into())),
    }
}

/// A nonzero point with `l_i(z) = 0` exactly, found from the rational kernel of each form.
pub fn coordinate_plane_point(l: &Lattice) -> Result<Option<(LatticePoint, usize)>> {
    for (i, row) in l.forms().rows().iter().enumerate() {
        let ker = rational_kernel(row)?;
        if let Some(v) = ker.basis.first() {
            let z: Option<Vec<i64>> = v.iter().map(BigInt::to_i64).collect();
            let z = z.ok_or_else(|| Error::Internal("kernel vector does not fit in i64".into()))?;
            return Ok(Some((l.point(&z), i)));
        }
    }
    Ok(None)
}
