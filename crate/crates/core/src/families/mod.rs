//! Explicit ((6,2,3)) and ((7,2,3)) code families and the diagnostics that
//! go with them.

pub mod cyclic;
pub mod frame;

use std::str::FromStr;

pub use cyclic::{
    all_equal_block_eigenvalues, cyclic_basis_723, cyclic_code_723, elimination_residuals,
    parse_branch_pair, perm_code_723, Branch, CyclicCoeffs, EliminationReport, PermVariant,
};
pub use frame::{
    block_eigenvalues, block_matrix, code_623, lambda_star_sq_623, predicted_signature_623,
    s_basis_623, so4_check, so4_generator, xxz_form, LogicalOverlaps, OrthoFrame, So4Pair,
    So4Report,
};

use crate::codespace::CodeSubspace;
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen;
use crate::pauli::{binomial, CMatrix, Pauli, PauliString, C64, MAX_DENSE_QUBITS};

/// Normalized Dicke state `D_{n,k}`.
pub fn dicke(n: usize, k: usize) -> Result<Vec<C64>> {
    if n == 0 || n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity {
            what: "qubit count",
            value: n,
            limit: MAX_DENSE_QUBITS,
        });
    }
    if k > n {
        return Err(Error::Domain(format!(
            "excitation count {k} exceeds n = {n}"
        )));
    }
    let amp = C64::new(1.0 / (binomial(n, k) as f64).sqrt(), 0.0);
    Ok((0..1usize << n)
        .map(|b| {
            if b.count_ones() as usize == k {
                amp
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamiltonianKind {
    /// `-2 Z_2 sum_{i=3..6} Z_i + 1/2 sum_{i != j in 3..6} Z_i Z_j` on six qubits.
    H623,
    /// `-sum_{i != j} (X_iX_j + Y_iY_j + Z_iZ_j)` on seven qubits.
    H723,
}

impl FromStr for HamiltonianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h623" => Ok(HamiltonianKind::H623),
            "h723" => Ok(HamiltonianKind::H723),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

impl HamiltonianKind {
    pub fn n(self) -> usize {
        match self {
            HamiltonianKind::H623 => 6,
            HamiltonianKind::H723 => 7,
        }
    }

    /// `(coefficient, word)` terms; ordered pairs `i != j` are listed separately.
    pub fn terms(self) -> Vec<(f64, PauliString)> {
        let n = self.n();
        let pair = |p: Pauli, i: usize, j: usize| {
            PauliString::from_sites(n, &[(i, p), (j, p)]).expect("sites in range")
        };
        let mut out = Vec::new();
        match self {
            HamiltonianKind::H623 => {
                for i in 3..=6 {
                    out.push((-2.0, pair(Pauli::Z, 2, i)));
                    for j in (3..=6).filter(|&j| j != i) {
                        out.push((0.5, pair(Pauli::Z, i, j)));
                    }
                }
            }
            HamiltonianKind::H723 => {
                for i in 1..=n {
                    for j in (1..=n).filter(|&j| j != i) {
                        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                            out.push((-1.0, pair(p, i, j)));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn dense(self) -> CMatrix {
        let dim = 1usize << self.n();
        let mut h = CMatrix::zeros(dim, dim);
        for (coeff, word) in self.terms() {
            h += word.dense_matrix().expect("small register") * C64::new(coeff, 0.0);
        }
        h
    }

    /// Vectors expected to span the ground space.
    pub fn reference_span(self) -> Vec<Vec<C64>> {
        match self {
            HamiltonianKind::H623 => {
                // q2 = 0 with a single excitation on q3..q6, or q2 = 1 with a
                // single hole; q1 free
                (0..64usize)
                    .filter(|b| {
                        let q2 = b >> 4 & 1;
                        let ones = (b & 0b1111).count_ones();
                        (q2 == 0 && ones == 1) || (q2 == 1 && ones == 3)
                    })
                    .map(|b| {
                        let mut v = vec![C64::new(0.0, 0.0); 64];
                        v[b] = C64::new(1.0, 0.0);
                        v
                    })
                    .collect()
            }
            HamiltonianKind::H723 => (0..=7).map(|k| dicke(7, k).expect("k <= n")).collect(),
        }
    }

    /// Code expected to lie in the ground space.
    pub fn reference_code(self) -> Result<CodeSubspace> {
        match self {
            HamiltonianKind::H623 => code_623(&OrthoFrame::single_parameter(0.0)),
            HamiltonianKind::H723 => perm_code_723(PermVariant::Plus),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundReport {
    pub kind: HamiltonianKind,
    pub ground_energy: f64,
    pub degeneracy: usize,
    /// Largest `|(I - P_ground) psi|` over the reference codewords.
    pub containment_residual: f64,
    /// Frobenius distance between the ground projector and the projector onto the reference span.
    pub span_residual: f64,
}

/// Diagonalizes the Hamiltonian and checks the ground space.
pub fn hamiltonian_ground_check(kind: HamiltonianKind) -> Result<GroundReport> {
    let (values, vectors) = hermitian_eigen(&kind.dense());
    let ground_energy = values[0];
    let ground: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] - ground_energy <= 1e-8)
        .collect();
    let vecs = vectors.select_columns(&ground);
    let p_ground = &vecs * vecs.adjoint();

    let code = kind.reference_code()?;
    let leak = &code.projector() - &p_ground * code.projector();
    let containment_residual = (0..code.k())
        .map(|j| leak.column(j).norm())
        .chain((0..code.k()).map(|j| {
            let col = CMatrix::from_column_slice(code.dim(), 1, code.column(j));
            (&col - &p_ground * &col).norm()
        }))
        .fold(0.0, f64::max);

    let span = CodeSubspace::new(kind.n(), kind.reference_span())?;
    let span_residual = (span.projector() - p_ground).norm();
    Ok(GroundReport {
        kind,
        ground_energy,
        degeneracy: ground.len(),
        containment_residual,
        span_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dicke_examples() {
        let d0 = dicke(7, 0).unwrap();
        assert_eq!(d0[0], C64::new(1.0, 0.0));
        let d = dicke(2, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d[1].re - h).abs() < 1e-15 && (d[2].re - h).abs() < 1e-15);
        let d72 = dicke(7, 2).unwrap();
        assert_eq!(d72.iter().filter(|c| c.norm() > 0.0).count(), 21);
        let norm: f64 = d72.iter().map(|c| c.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-14);
        assert!(dicke(3, 4).is_err());
    }

    #[test]
    fn ground_spaces() {
        let r = hamiltonian_ground_check(HamiltonianKind::H623).unwrap();
        assert_eq!(r.degeneracy, 16);
        assert!((r.ground_energy + 4.0).abs() < 1e-10);
        assert!(
            r.containment_residual < 1e-9 && r.span_residual < 1e-9,
            "{r:?}"
        );
        let r = hamiltonian_ground_check(HamiltonianKind::H723).unwrap();
        assert_eq!(r.degeneracy, 8);
        assert!(
            r.containment_residual < 1e-9 && r.span_residual < 1e-10,
            "{r:?}"
        );
    }
}
