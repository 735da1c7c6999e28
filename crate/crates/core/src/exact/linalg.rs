//! Exact linear algebra over Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type QMatrix = Vec<Vec<BigRational>>;

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMatrix) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis of the right kernel `{v : m v = 0}` of an `r x cols` matrix.
pub fn kernel(m: &QMatrix, cols: usize) -> Vec<Vec<BigRational>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][f].clone();
            }
            v
        })
        .collect()
}

/// Nonzero rows of the RREF: a canonical basis of the row space.
pub fn row_space_basis(m: &QMatrix) -> Vec<Vec<BigRational>> {
    let mut a = m.clone();
    let n = rref(&mut a).len();
    a.truncate(n);
    a
}

/// Scales a rational vector to a primitive integer vector whose first nonzero entry is positive.
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let mut den = BigInt::one();
    for c in v {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    if g.is_zero() {
        return ints;
    }
    let sign = match ints.iter().find(|c| !c.is_zero()) {
        Some(c) if c.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter().map(|c| c / &g * &sign).collect()
}

pub fn transpose(m: &QMatrix) -> QMatrix {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn to_qmatrix(m: &[Vec<i64>]) -> QMatrix {
    m.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        let m = to_qmatrix(&[vec![1, 2, 3], vec![2, 4, 6]]);
        assert_eq!(rank(&m), 1);
        let k = kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigRational = m[0].iter().zip(v).map(|(a, b)| a * b).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn primitive_vector() {
        let v = vec![
            BigRational::new((-1).into(), 2.into()),
            BigRational::new(1.into(), 3.into()),
            BigRational::zero(),
        ];
        assert_eq!(primitive_integer_vector(&v), vec![BigInt::from(3), BigInt::from(-2), BigInt::from(0)]);
    }
}
