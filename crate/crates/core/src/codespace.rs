//! Code subspaces and their Knill-Laflamme data.
//!
//! A [`CodeSubspace`] holds `K` orthonormal columns in `C^(2^n)`. From it we
//! compute the KL tensor `T[a]_{ij} = <psi_i| O_a |psi_j>`, the KL violation,
//! the signature vector (mean diagonal per error operator) and its length,
//! reduced density matrices and local-unitary images.

use std::io::{Read, Write};

use nalgebra::{DMatrix, Matrix2};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::operators::OperatorSet;
use crate::pauli::{CMatrix, ErrorBasis, PauliString, C64, MAX_DENSE_QUBITS};

/// Default tolerance on the KL violation for a subspace to count as a code.
pub const DEFAULT_KL_TOL: f64 = 1e-10;
/// Imaginary parts of mean diagonals above this are rejected.
pub const IMAG_TOL: f64 = 1e-10;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `K` orthonormal vectors spanning a code space of `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeSubspace {
    n: usize,
    basis: CMatrix,
}

impl CodeSubspace {
    /// Orthonormalizes `vectors` (modified Gram-Schmidt with one
    /// re-orthogonalization pass); the span is preserved.
    pub fn new(n: usize, vectors: Vec<Vec<C64>>) -> Result<Self> {
        check_register(n)?;
        let dim = 1usize << n;
        if vectors.is_empty() {
            return Err(Error::Domain("a code needs at least one vector".into()));
        }
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(vectors.len());
        for (j, v) in vectors.into_iter().enumerate() {
            if v.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: v.len(),
                });
            }
            let scale = norm(&v);
            let mut w = v;
            for _ in 0..2 {
                for q in &cols {
                    let overlap = dotc(q, &w);
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= overlap * qi;
                    }
                }
            }
            let residual = norm(&w);
            if scale == 0.0 || residual <= 1e-10 * scale.max(1.0) {
                return Err(Error::Degenerate {
                    column: j,
                    residual,
                });
            }
            w.iter_mut().for_each(|x| *x /= residual);
            cols.push(w);
        }
        let k = cols.len();
        let basis = CMatrix::from_iterator(dim, k, cols.into_iter().flatten());
        Ok(CodeSubspace { n, basis })
    }

    /// Wraps a matrix whose columns are already orthonormal (checked to 1e-10).
    pub fn from_orthonormal(n: usize, basis: CMatrix) -> Result<Self> {
        check_register(n)?;
        if basis.nrows() != 1 << n {
            return Err(Error::Dimension {
                expected: 1 << n,
                found: basis.nrows(),
            });
        }
        if basis.ncols() == 0 {
            return Err(Error::Domain("a code needs at least one vector".into()));
        }
        let defect = orthonormality_defect(&basis);
        if defect > 1e-10 {
            return Err(Error::Validation(format!(
                "columns are not orthonormal (defect {defect:e})"
            )));
        }
        Ok(CodeSubspace { n, basis })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Code dimension `K`.
    pub fn k(&self) -> usize {
        self.basis.ncols()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn column(&self, j: usize) -> &[C64] {
        let m = self.dim();
        &self.basis.as_slice()[j * m..(j + 1) * m]
    }

    /// Dense projector `P = sum_i |psi_i><psi_i|`.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    pub fn kl_tensor(&self, basis: &ErrorBasis) -> Result<KlTensor> {
        self.kl_tensor_with(basis, Execution::default())
    }

    pub fn kl_tensor_with<O: OperatorSet>(&self, ops: &O, exec: Execution) -> Result<KlTensor> {
        if ops.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: ops.dim(),
            });
        }
        Ok(KlTensor::compute(&self.basis, ops, exec))
    }

    pub fn kl_violation(&self, basis: &ErrorBasis) -> Result<f64> {
        Ok(self.kl_tensor(basis)?.violation())
    }

    /// Signature vector; fails with [`Error::NotACode`] if the KL violation exceeds `tol`.
    pub fn signature_vector(&self, basis: &ErrorBasis, tol: f64) -> Result<SignatureVector> {
        self.kl_tensor(basis)?.signature(basis, tol)
    }

    /// Reduced state of codeword `index` (0-based) on the 1-based qubits in
    /// `subset`. The output is ordered by ascending qubit label, lowest label
    /// most significant.
    pub fn reduced_density_matrix(&self, index: usize, subset: &[usize]) -> Result<CMatrix> {
        if index >= self.k() {
            return Err(Error::Domain(format!(
                "codeword index {index} outside 0..{}",
                self.k()
            )));
        }
        reduced_density_matrix(self.n, self.column(index), subset)
    }

    /// Applies `U_1 (x) ... (x) U_n` to every column.
    pub fn apply_local_unitary(&self, factors: &[Matrix2<C64>]) -> Result<CodeSubspace> {
        if factors.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: factors.len(),
            });
        }
        for (k, u) in factors.iter().enumerate() {
            let defect = (u.adjoint() * u - Matrix2::identity())
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
            if defect > 1e-12 {
                return Err(Error::Validation(format!(
                    "factor for qubit {} is not unitary (defect {defect:e})",
                    k + 1
                )));
            }
        }
        let mut basis = self.basis.clone();
        let dim = self.dim();
        for j in 0..self.k() {
            let col = &mut basis.as_mut_slice()[j * dim..(j + 1) * dim];
            for (k, u) in factors.iter().enumerate() {
                apply_single_qubit(self.n, k + 1, u, col);
            }
        }
        Ok(CodeSubspace { n: self.n, basis })
    }

    /// Right-multiplies the basis by a `K x K` unitary (same code, new basis).
    pub fn remix(&self, u: &CMatrix) -> Result<CodeSubspace> {
        CodeSubspace::from_orthonormal(self.n, &self.basis * u)
    }

    pub fn to_json(&self) -> CodeJson {
        CodeJson {
            format: CODE_FORMAT.to_string(),
            n: self.n,
            k: self.k(),
            amplitudes: (0..self.k())
                .map(|j| self.column(j).iter().map(|c| [c.re, c.im]).collect())
                .collect(),
        }
    }

    pub fn from_json(doc: &CodeJson) -> Result<Self> {
        if doc.format != CODE_FORMAT {
            return Err(Error::Validation(format!(
                "unsupported code format {:?}",
                doc.format
            )));
        }
        if doc.amplitudes.len() != doc.k {
            return Err(Error::Dimension {
                expected: doc.k,
                found: doc.amplitudes.len(),
            });
        }
        let vectors = doc
            .amplitudes
            .iter()
            .map(|col| col.iter().map(|&[re, im]| C64::new(re, im)).collect())
            .collect();
        let code = CodeSubspace::new(doc.n, vectors)?;
        Ok(code)
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, &self.to_json())?;
        Ok(())
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        let doc: CodeJson = serde_json::from_reader(reader)?;
        CodeSubspace::from_json(&doc)
    }
}

pub const CODE_FORMAT: &str = "klscope.code.v1";

/// On-disk form of a code: `K` columns of `2^n` `[re, im]` pairs, qubit 1 most significant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeJson {
    pub format: String,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub amplitudes: Vec<Vec<[f64; 2]>>,
}

fn check_register(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity {
            what: "qubit count",
            value: n,
            limit: MAX_DENSE_QUBITS,
        });
    }
    Ok(())
}

/// The KL tensor: one `K x K` Hermitian slice per operator.
#[derive(Clone, Debug)]
pub struct KlTensor {
    slices: Vec<CMatrix>,
}

impl KlTensor {
    pub fn compute<O: OperatorSet>(basis: &CMatrix, ops: &O, exec: Execution) -> KlTensor {
        let dim = basis.nrows();
        let k = basis.ncols();
        let cols = basis.as_slice();
        let slices = map_indexed(ops.count(), exec, |a| {
            let mut image = vec![ZERO; dim];
            let mut slice = CMatrix::zeros(k, k);
            for j in 0..k {
                ops.apply(a, &cols[j * dim..(j + 1) * dim], &mut image);
                for i in 0..k {
                    slice[(i, j)] = dotc(&cols[i * dim..(i + 1) * dim], &image);
                }
            }
            slice
        });
        KlTensor { slices }
    }

    pub fn slices(&self) -> &[CMatrix] {
        &self.slices
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// `sum_a sum_{i != j} |T_ij|^2 + sum_a sum_i (T_ii - <T_ii>_i)^2`.
    pub fn violation(&self) -> f64 {
        self.slices.iter().map(slice_violation).sum()
    }

    /// Mean diagonal `K^{-1} sum_i T[a]_ii` per operator (complex).
    pub fn mean_diagonal(&self) -> Vec<C64> {
        self.slices
            .iter()
            .map(|s| s.trace() / s.nrows() as f64)
            .collect()
    }

    pub fn max_hermitian_defect(&self) -> f64 {
        self.slices
            .iter()
            .map(crate::pauli::hermitian_defect)
            .fold(0.0, f64::max)
    }

    pub fn signature(&self, basis: &ErrorBasis, tol: f64) -> Result<SignatureVector> {
        let violation = self.violation();
        if violation > tol {
            return Err(Error::NotACode {
                violation,
                tolerance: tol,
            });
        }
        let means = self.mean_diagonal();
        let worst_imag = means.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        if worst_imag > IMAG_TOL {
            return Err(Error::Validation(format!(
                "signature component has imaginary part {worst_imag:e}"
            )));
        }
        Ok(SignatureVector {
            words: basis.ops().to_vec(),
            components: means.into_iter().map(|c| c.re).collect(),
        })
    }
}

fn slice_violation(s: &CMatrix) -> f64 {
    let k = s.nrows();
    let mean = s.trace().re / k as f64;
    let mut acc = 0.0;
    for j in 0..k {
        for i in 0..k {
            acc += if i == j {
                let d = s[(i, i)].re - mean;
                d * d + s[(i, i)].im * s[(i, i)].im
            } else {
                s[(i, j)].norm_sqr()
            };
        }
    }
    acc
}

/// Real KL coefficients, one per error operator, with norm `lambda*`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignatureVector {
    words: Vec<PauliString>,
    components: Vec<f64>,
}

impl SignatureVector {
    pub fn from_parts(words: Vec<PauliString>, components: Vec<f64>) -> Result<Self> {
        if words.len() != components.len() {
            return Err(Error::Dimension {
                expected: words.len(),
                found: components.len(),
            });
        }
        Ok(SignatureVector { words, components })
    }

    pub fn words(&self) -> &[PauliString] {
        &self.words
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, word: &PauliString) -> Option<f64> {
        self.words
            .iter()
            .position(|w| w == word)
            .map(|i| self.components[i])
    }

    pub fn lambda_star_sq(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum()
    }

    /// Euclidean length of the signature vector.
    pub fn lambda_star(&self) -> f64 {
        self.lambda_star_sq().sqrt()
    }

    /// Components with magnitude above `tol`.
    pub fn nonzero(&self, tol: f64) -> Vec<(PauliString, f64)> {
        self.words
            .iter()
            .zip(&self.components)
            .filter(|(_, c)| c.abs() > tol)
            .map(|(w, &c)| (*w, c))
            .collect()
    }

    /// CSV with header `pauli_word,value`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["pauli_word", "value"])?;
        for (w, c) in self.words.iter().zip(&self.components) {
            out.write_record([w.to_string(), format!("{c:.17e}")])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Reduced state of a pure `n`-qubit state on the 1-based qubits in `subset`.
pub fn reduced_density_matrix(n: usize, psi: &[C64], subset: &[usize]) -> Result<CMatrix> {
    let mut keep = subset.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.len() != subset.len() {
        return Err(Error::Domain("repeated qubit in subset".into()));
    }
    if keep.is_empty() || keep.len() >= n {
        return Err(Error::Domain(format!(
            "subset must be nonempty and proper, got {} of {n} qubits",
            keep.len()
        )));
    }
    if let Some(&bad) = keep.iter().find(|&&q| q == 0 || q > n) {
        return Err(Error::Domain(format!("qubit {bad} outside 1..={n}")));
    }
    if psi.len() != 1 << n {
        return Err(Error::Dimension {
            expected: 1 << n,
            found: psi.len(),
        });
    }
    let traced: Vec<usize> = (1..=n).filter(|q| !keep.contains(q)).collect();
    let spread = |value: usize, qubits: &[usize]| -> usize {
        // bit t of `value` (counted from the most significant of |qubits|)
        // lands on the basis-index bit of qubits[t]
        let m = qubits.len();
        qubits.iter().enumerate().fold(0usize, |acc, (t, &q)| {
            if value >> (m - 1 - t) & 1 == 1 {
                acc | 1 << (n - q)
            } else {
                acc
            }
        })
    };
    let sub_dim = 1usize << keep.len();
    let env_dim = 1usize << traced.len();
    let sub_idx: Vec<usize> = (0..sub_dim).map(|a| spread(a, &keep)).collect();
    let env_idx: Vec<usize> = (0..env_dim).map(|c| spread(c, &traced)).collect();
    let mut rho = CMatrix::zeros(sub_dim, sub_dim);
    for &e in &env_idx {
        for (a, &sa) in sub_idx.iter().enumerate() {
            let amp = psi[sa | e];
            if amp == ZERO {
                continue;
            }
            for (b, &sb) in sub_idx.iter().enumerate() {
                rho[(a, b)] += amp * psi[sb | e].conj();
            }
        }
    }
    Ok(rho)
}

/// `Tr(rho^2)`.
pub fn purity(rho: &CMatrix) -> f64 {
    (rho * rho).trace().re
}

/// Haar-random element of U(2).
pub fn random_unitary_2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<C64> {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, c, d] = q.map(|x| x / norm);
    let phase = C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    Matrix2::new(
        C64::new(a, b),
        C64::new(c, d),
        C64::new(-c, d),
        C64::new(a, -b),
    ) * phase
}

/// Applies a 2x2 gate to 1-based `qubit` of an `n`-qubit amplitude vector.
pub fn apply_single_qubit(n: usize, qubit: usize, u: &Matrix2<C64>, state: &mut [C64]) {
    let mask = 1usize << (n - qubit);
    for b in 0..state.len() {
        if b & mask == 0 {
            let (v0, v1) = (state[b], state[b | mask]);
            state[b] = u[(0, 0)] * v0 + u[(0, 1)] * v1;
            state[b | mask] = u[(1, 0)] * v0 + u[(1, 1)] * v1;
        }
    }
}

/// `max |Q^dagger Q - I|`.
pub fn orthonormality_defect(q: &CMatrix) -> f64 {
    let gram = q.adjoint() * q;
    let k = gram.nrows();
    (gram - DMatrix::<C64>::identity(k, k))
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

pub(crate) fn dotc(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}
