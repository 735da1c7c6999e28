//! Exact arithmetic: number fields, rational polynomials and rational linear algebra.
//!
//! Everything here is decided without floating point. The only numeric
//! output is [`FieldElement::embed`], which returns a certified rational
//! enclosure of the designated real embedding.

pub mod field;
pub mod linalg;
pub mod poly;

pub use field::{FieldElement, NumberField};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use linalg::{kernel, primitive_integer_vector, row_space_basis, transpose, QMatrix};

/// Outcome of a Q-linear independence test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IndependenceReport {
    /// Rank of the coordinate matrix equals the number of elements.
    Independent { rank: usize },
    /// Nonzero integer vector `r` with `sum r_i * e_i = 0`.
    Relation { relation: Vec<BigInt>, rank: usize },
}

impl IndependenceReport {
    pub fn is_independent(&self) -> bool {
        matches!(self, IndependenceReport::Independent { .. })
    }

    pub fn rank(&self) -> usize {
        match self {
            IndependenceReport::Independent { rank } | IndependenceReport::Relation { rank, .. } => *rank,
        }
    }
}

/// Subspace of `Q^d` with a basis of primitive integer vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalSubspace {
    pub ambient_dim: usize,
    pub basis: Vec<Vec<BigInt>>,
}

impl RationalSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Whether the integer vector lies in the subspace.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        let mut m: QMatrix = self
            .basis
            .iter()
            .map(|b| b.iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        let r0 = linalg::rank(&m);
        m.push(v.iter().map(|x| BigRational::from_integer(x.clone())).collect());
        linalg::rank(&m) == r0
    }
}

fn check_common_field(elems: &[&FieldElement]) -> Result<NumberField> {
    let field = elems
        .first()
        .map(|e| e.field().clone())
        .ok_or_else(|| Error::Precondition("empty element list".into()))?;
    if elems.iter().any(|e| e.field() != &field) {
        return Err(Error::FieldMismatch);
    }
    Ok(field)
}

/// Decides whether the elements are linearly independent over Q, exactly.
pub fn q_linear_independence(elems: &[FieldElement]) -> Result<IndependenceReport> {
    let refs: Vec<&FieldElement> = elems.iter().collect();
    check_common_field(&refs)?;
    // columns = elements, rows = power-basis coordinates
    let rows: QMatrix = elems.iter().map(|e| e.coords().to_vec()).collect();
    let m = transpose(&rows);
    let ker = kernel(&m, elems.len());
    let rank = elems.len() - ker.len();
    match ker.first() {
        None => Ok(IndependenceReport::Independent { rank }),
        Some(v) => Ok(IndependenceReport::Relation { relation: primitive_integer_vector(v), rank }),
    }
}

/// Matrix whose row `j` holds the `α^j` coordinates of each entry of the vector.
fn coordinate_slices(v: &[FieldElement]) -> QMatrix {
    let deg = v[0].field().degree();
    (0..deg).map(|j| v.iter().map(|e| e.coords()[j].clone()).collect()).collect()
}

/// All rational `z` with `sum form_i z_i = 0` exactly.
pub fn rational_kernel(form: &[FieldElement]) -> Result<RationalSubspace> {
    let refs: Vec<&FieldElement> = form.iter().collect();
    check_common_field(&refs)?;
    if form.iter().all(|e| e.is_zero()) {
        return Err(Error::Precondition("zero form".into()));
    }
    let m = coordinate_slices(form);
    let basis = kernel(&m, form.len()).iter().map(|v| primitive_integer_vector(v)).collect();
    Ok(RationalSubspace { ambient_dim: form.len(), basis })
}

/// Smallest rational subspace of `R^d` containing every given vector.
pub fn minimal_rational_subspace(vectors: &[Vec<FieldElement>]) -> Result<RationalSubspace> {
    let first = vectors.first().ok_or_else(|| Error::Precondition("empty vector list".into()))?;
    let d = first.len();
    let all: Vec<&FieldElement> = vectors.iter().flatten().collect();
    check_common_field(&all)?;
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::Dimension("vectors of different lengths".into()));
    }
    let mut slices: QMatrix = vec![];
    for v in vectors {
        slices.extend(coordinate_slices(v));
    }
    let basis = row_space_basis(&slices).iter().map(|v| primitive_integer_vector(v)).collect();
    Ok(RationalSubspace { ambient_dim: d, basis })
}
