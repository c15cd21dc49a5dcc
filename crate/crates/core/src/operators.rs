//! Families of Hermitian operators that can act on amplitude vectors.
//!
//! The KL tensor, the penalty losses and the joint-numerical-range search only
//! need `O_a |v>` for each member of a family, so they are written against
//! [`OperatorSet`]. Pauli error bases act by bit flips and signs; arbitrary
//! Hermitian matrices act densely.

use crate::error::{Error, Result};
use crate::pauli::{hermitian_defect, CMatrix, ErrorBasis, C64};

pub trait OperatorSet: Sync {
    /// Dimension of the space the operators act on.
    fn dim(&self) -> usize;
    fn count(&self) -> usize;
    /// `dst = O_index src`.
    fn apply(&self, index: usize, src: &[C64], dst: &mut [C64]);
    fn label(&self, index: usize) -> String;
}

impl OperatorSet for ErrorBasis {
    fn dim(&self) -> usize {
        1 << self.n()
    }

    fn count(&self) -> usize {
        self.len()
    }

    fn apply(&self, index: usize, src: &[C64], dst: &mut [C64]) {
        self.get(index).apply(src, dst);
    }

    fn label(&self, index: usize) -> String {
        self.get(index).to_string()
    }
}

/// Explicit Hermitian matrices of a common dimension.
#[derive(Clone, Debug)]
pub struct DenseOperators {
    dim: usize,
    mats: Vec<CMatrix>,
}

impl DenseOperators {
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        let dim = mats
            .first()
            .map(|m| m.nrows())
            .ok_or_else(|| Error::Domain("empty operator list".into()))?;
        for (i, m) in mats.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: m.nrows().max(m.ncols()),
                });
            }
            let defect = hermitian_defect(m);
            if defect > 1e-10 {
                return Err(Error::Validation(format!(
                    "operator {i} is not Hermitian (defect {defect:e})"
                )));
            }
        }
        Ok(DenseOperators { dim, mats })
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.mats
    }
}

impl OperatorSet for DenseOperators {
    fn dim(&self) -> usize {
        self.dim
    }

    fn count(&self) -> usize {
        self.mats.len()
    }

    fn apply(&self, index: usize, src: &[C64], dst: &mut [C64]) {
        let m = &self.mats[index];
        for (r, out) in dst.iter_mut().enumerate() {
            *out = src.iter().enumerate().map(|(c, v)| m[(r, c)] * v).sum();
        }
    }

    fn label(&self, index: usize) -> String {
        format!("A{}", index + 1)
    }
}
