//! The ((6,2,3)) family built from a real orthogonal 5x5 frame.
//!
//! Qubit 1 carries `|x_i>`/`|y_i>`, qubits 2..6 carry five fixed GHZ-like
//! states `|S_i>`; the frame columns `(a, b, c, d)` supply the amplitudes and
//! the completing column `e` determines the signature vector.

use nalgebra::{Matrix2, Matrix4, Matrix5, SMatrix, Vector5};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::codespace::{dotc, CodeSubspace, SignatureVector};
use crate::error::{Error, Result};
use crate::pauli::{CMatrix, ErrorBasis, Pauli, PauliString, C64};

/// Tolerance for accepting frame columns.
pub const FRAME_TOL: f64 = 1e-10;

const N623: usize = 6;

/// The five states `(|k> + |31 ^ k>)/sqrt 2`, `k = 2^(i-1)`, on qubits 2..6.
pub fn s_basis_623() -> Vec<Vec<C64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (0..5)
        .map(|i| {
            let mut v = vec![C64::new(0.0, 0.0); 32];
            v[1 << i] = C64::new(h, 0.0);
            v[31 ^ (1 << i)] = C64::new(h, 0.0);
            v
        })
        .collect()
}

/// A real 5x5 matrix `A` with `A^T A = I/4`; columns are `a, b, c, d, e`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoFrame {
    m: Matrix5<f64>,
}

impl OrthoFrame {
    pub fn from_matrix(m: Matrix5<f64>) -> Result<Self> {
        let defect = gram_defect(&m.fixed_columns::<5>(0).into_owned());
        if defect > FRAME_TOL {
            return Err(Error::Validation(format!(
                "frame columns violate A^T A = I/4 (defect {defect:e})"
            )));
        }
        Ok(OrthoFrame { m })
    }

    /// Completes `(a, b, c, d)` with the unique `e`, `|e|^2 = 1/4`, whose
    /// first nonzero entry is positive.
    pub fn from_abcd(
        a: Vector5<f64>,
        b: Vector5<f64>,
        c: Vector5<f64>,
        d: Vector5<f64>,
    ) -> Result<Self> {
        let cols = SMatrix::<f64, 5, 4>::from_columns(&[a, b, c, d]);
        let defect = gram_defect(&cols);
        if defect > FRAME_TOL {
            return Err(Error::Validation(format!(
                "columns a..d are not orthogonal with norm 1/2 (defect {defect:e})"
            )));
        }
        // generalized cross product: signed 4x4 minors
        let mut e = Vector5::zeros();
        for k in 0..5 {
            let minor = cols.remove_row(k);
            let det = Matrix4::from_iterator(minor.iter().copied()).determinant();
            e[k] = if k % 2 == 0 { det } else { -det };
        }
        let norm = e.norm();
        if norm < 1e-8 {
            return Err(Error::Conditioning(norm));
        }
        let mut e = e * (0.5 / norm);
        if let Some(first) = e.iter().copied().find(|x| x.abs() > 1e-12) {
            if first < 0.0 {
                e = -e;
            }
        }
        let m = Matrix5::from_columns(&[a, b, c, d, e]);
        OrthoFrame::from_matrix(m)
    }

    /// A frame whose last column is `e` (`|e|^2 = 1/4`), completed by the
    /// Householder reflection taking the fifth unit vector to `2e`.
    pub fn from_e(e: Vector5<f64>) -> Result<Self> {
        if (e.norm_squared() - 0.25).abs() > FRAME_TOL {
            return Err(Error::Validation(format!(
                "e must satisfy e.e = 1/4, got {}",
                e.norm_squared()
            )));
        }
        let u = e * 2.0;
        let w = u - Vector5::new(0.0, 0.0, 0.0, 0.0, 1.0);
        let h = if w.norm() < 1e-14 {
            Matrix5::identity()
        } else {
            let w = w.normalize();
            Matrix5::identity() - w * w.transpose() * 2.0
        };
        OrthoFrame::from_matrix(h * 0.5)
    }

    /// A Haar-random frame.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let g = Matrix5::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..5 {
            if r[(j, j)] < 0.0 {
                let flipped = -q.column(j);
                q.set_column(j, &flipped);
            }
        }
        OrthoFrame { m: q * 0.5 }
    }

    /// The single-parameter family; `theta = 0` gives `e = (0,0,0,0,1/2)`.
    pub fn single_parameter(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        #[rustfmt::skip]
        let m = Matrix5::new(
            0.5,  0.5,  0.5,  0.5 * c, 0.5 * s,
            0.5, -0.5, -0.5,  0.5 * c, 0.5 * s,
            -0.5,  0.5, -0.5,  0.5 * c, 0.5 * s,
            -0.5, -0.5,  0.5,  0.5 * c, 0.5 * s,
            0.0,  0.0,  0.0, -s,       c,
        ) * 0.5;
        OrthoFrame { m }
    }

    pub fn matrix(&self) -> &Matrix5<f64> {
        &self.m
    }

    pub fn column(&self, j: usize) -> Vector5<f64> {
        self.m.column(j).into_owned()
    }

    pub fn e(&self) -> Vector5<f64> {
        self.column(4)
    }

    /// Replaces `[a b c d]` with `[a b c d] R` for a 4x4 orthogonal `R`.
    pub fn rotate_abcd(&self, r: &Matrix4<f64>) -> Result<Self> {
        let abcd = self.m.fixed_columns::<4>(0) * r;
        let mut m = self.m;
        m.fixed_columns_mut::<4>(0).copy_from(&abcd);
        OrthoFrame::from_matrix(m)
    }

    /// `gamma_j = a_j + i b_j`, `gamma_{5+j} = c_j + i d_j`.
    pub fn gammas(&self) -> [C64; 10] {
        let mut g = [C64::new(0.0, 0.0); 10];
        for j in 0..5 {
            g[j] = C64::new(self.m[(j, 0)], self.m[(j, 1)]);
            g[j + 5] = C64::new(self.m[(j, 2)], self.m[(j, 3)]);
        }
        g
    }

    /// Qubit-1 states `(|x_i>, |y_i>)` as `[amp0, amp1]` pairs.
    pub fn qubit_one_states(&self) -> ([[C64; 2]; 5], [[C64; 2]; 5]) {
        let g = self.gammas();
        let mut xs = [[C64::new(0.0, 0.0); 2]; 5];
        let mut ys = xs;
        for i in 0..5 {
            xs[i] = [g[i], g[i + 5]];
            ys[i] = [g[i + 5].conj(), -g[i].conj()];
        }
        (xs, ys)
    }

    pub fn overlaps(&self) -> LogicalOverlaps {
        let (xs, ys) = self.qubit_one_states();
        let table = |l: &[[C64; 2]; 5], r: &[[C64; 2]; 5]| {
            CMatrix::from_fn(5, 5, |i, j| dotc(&l[i], &r[j]))
        };
        LogicalOverlaps {
            mxx: table(&xs, &xs),
            mxy: table(&xs, &ys),
            myx: table(&ys, &xs),
            myy: table(&ys, &ys),
        }
    }
}

fn gram_defect<const C: usize>(cols: &SMatrix<f64, 5, C>) -> f64 {
    let gram = cols.transpose() * cols;
    let mut worst: f64 = 0.0;
    for i in 0..C {
        for j in 0..C {
            let target = if i == j { 0.25 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

/// Inner products `<x_i|x_j>`, `<x_i|y_j>`, `<y_i|x_j>`, `<y_i|y_j>` of the qubit-1 states.
#[derive(Clone, Debug)]
pub struct LogicalOverlaps {
    pub mxx: CMatrix,
    pub mxy: CMatrix,
    pub myx: CMatrix,
    pub myy: CMatrix,
}

impl LogicalOverlaps {
    /// Largest deviations in `M^xy_ii = 0`, `M^xx_ii = M^yy_ii`,
    /// `M^xx_ij = M^yy_ji` and `M^xy + (M^xy)^T = 0`.
    pub fn identity_residuals(&self) -> [f64; 4] {
        let max = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
        let a1 = max(&mut (0..5).map(|i| self.mxy[(i, i)].norm()));
        let a2 = max(&mut (0..5).map(|i| (self.mxx[(i, i)] - self.myy[(i, i)]).norm()));
        let a3 = max(&mut (0..25).map(|k| {
            let (i, j) = (k / 5, k % 5);
            (self.mxx[(i, j)] - self.myy[(j, i)]).norm()
        }));
        let a4 = max(&mut (&self.mxy + self.mxy.transpose()).iter().map(|c| c.norm()));
        [a1, a2, a3, a4]
    }
}

/// `|0_L> = sum_i |x_i>|S_i>`, `|1_L> = sum_i |y_i>|S_i>`.
pub fn code_623(frame: &OrthoFrame) -> Result<CodeSubspace> {
    let code = code_623_unchecked(frame)?;
    let basis = ErrorBasis::new(N623, 3)?;
    let violation = code.kl_violation(&basis)?;
    if violation > FRAME_TOL {
        return Err(Error::Construction(violation));
    }
    Ok(code)
}

fn code_623_unchecked(frame: &OrthoFrame) -> Result<CodeSubspace> {
    let s = s_basis_623();
    let (xs, ys) = frame.qubit_one_states();
    let build = |q1: &[[C64; 2]; 5]| {
        let mut v = vec![C64::new(0.0, 0.0); 64];
        for (i, state) in s.iter().enumerate() {
            for (bit, amp) in q1[i].iter().enumerate() {
                for (idx, sv) in state.iter().enumerate() {
                    v[bit * 32 + idx] += amp * sv;
                }
            }
        }
        v
    };
    let cols = [build(&xs), build(&ys)];
    let basis = CMatrix::from_iterator(64, 2, cols.iter().flatten().copied());
    CodeSubspace::from_orthonormal(N623, basis)
}

/// Predicted signature over the `n = 6, d = 3` error basis: only
/// `X_iX_j`, `Y_iY_j` (value `-2 e_{7-i} e_{7-j}`) and `Z_iZ_j`
/// (value `2 e_{7-i}^2 + 2 e_{7-j}^2`) for `2 <= i < j <= 6` are nonzero.
pub fn predicted_signature_623(e: &Vector5<f64>) -> SignatureVector {
    let basis = ErrorBasis::new(N623, 3).expect("n = 6, d = 3 is a valid basis");
    let mut values = vec![0.0; basis.len()];
    let ev = |q: usize| e[7 - q - 1];
    for i in 2..=6 {
        for j in i + 1..=6 {
            let cross = -2.0 * ev(i) * ev(j);
            let zz = 2.0 * ev(i).powi(2) + 2.0 * ev(j).powi(2);
            for (p, v) in [(Pauli::X, cross), (Pauli::Y, cross), (Pauli::Z, zz)] {
                let word =
                    PauliString::from_sites(N623, &[(i, p), (j, p)]).expect("sites are in range");
                let k = basis
                    .position(&word)
                    .expect("weight-2 word is in the basis");
                values[k] = v;
            }
        }
    }
    SignatureVector::from_parts(basis.ops().to_vec(), values).expect("lengths agree")
}

/// `1/2 + 8 sum_i e_i^4`.
pub fn lambda_star_sq_623(e: &Vector5<f64>) -> f64 {
    0.5 + 8.0 * e.iter().map(|x| x.powi(4)).sum::<f64>()
}

/// Eigenvalues of the 5x5 block with unit diagonal, first row/column `r`
/// and remaining off-diagonals `s`, in the order
/// `1-s, 1-s, 1-s, (2+3s+sqrt(9s^2+16r^2))/2, (2+3s-sqrt(9s^2+16r^2))/2`.
pub fn block_eigenvalues(r: f64, s: f64) -> [f64; 5] {
    let root = (9.0 * s * s + 16.0 * r * r).sqrt();
    [
        1.0 - s,
        1.0 - s,
        1.0 - s,
        (2.0 + 3.0 * s + root) / 2.0,
        (2.0 + 3.0 * s - root) / 2.0,
    ]
}

/// The block matrix itself.
pub fn block_matrix(r: f64, s: f64) -> Matrix5<f64> {
    Matrix5::from_fn(|i, j| match (i, j) {
        _ if i == j => 1.0,
        (0, _) | (_, 0) => r,
        _ => s,
    })
}

/// The six correspondences between rotations of `(a, b, c, d)` and
/// unitaries on qubit 1 or on the logical qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum So4Pair {
    /// `exp(-i t X_1)` with `K_4`.
    X1,
    /// `exp(-i t Y_1)` with `K_5`.
    Y1,
    /// `exp(-i t Z_1)` with `-K_2`.
    Z1,
    /// `exp(-i t X_L)` with `K_3`.
    XL,
    /// `exp(-i t Y_L)` with `-K_6`.
    YL,
    /// `exp(-i t Z_L)` with `-K_1`.
    ZL,
}

impl So4Pair {
    pub const ALL: [So4Pair; 6] = [
        So4Pair::X1,
        So4Pair::Y1,
        So4Pair::Z1,
        So4Pair::XL,
        So4Pair::YL,
        So4Pair::ZL,
    ];

    /// The signed so(4) generator, squaring to `-I`.
    pub fn generator(self) -> Matrix4<f64> {
        let (k, sign) = match self {
            So4Pair::X1 => (4, 1.0),
            So4Pair::Y1 => (5, 1.0),
            So4Pair::Z1 => (2, -1.0),
            So4Pair::XL => (3, 1.0),
            So4Pair::YL => (6, -1.0),
            So4Pair::ZL => (1, -1.0),
        };
        so4_generator(k) * sign
    }

    fn pauli(self) -> Pauli {
        match self {
            So4Pair::X1 | So4Pair::XL => Pauli::X,
            So4Pair::Y1 | So4Pair::YL => Pauli::Y,
            So4Pair::Z1 | So4Pair::ZL => Pauli::Z,
        }
    }

    fn is_logical(self) -> bool {
        matches!(self, So4Pair::XL | So4Pair::YL | So4Pair::ZL)
    }
}

/// `K_1 .. K_6` built from `E_ij` (`+1` at `(i,j)`, `-1` at `(j,i)`).
pub fn so4_generator(k: usize) -> Matrix4<f64> {
    let e = |i: usize, j: usize| {
        let mut m = Matrix4::zeros();
        m[(i - 1, j - 1)] = 1.0;
        m[(j - 1, i - 1)] = -1.0;
        m
    };
    match k {
        1 => e(1, 2) + e(3, 4),
        2 => e(1, 2) - e(3, 4),
        3 => e(2, 3) + e(1, 4),
        4 => e(2, 3) - e(1, 4),
        5 => e(1, 3) + e(2, 4),
        6 => e(1, 3) - e(2, 4),
        _ => panic!("so(4) generator index {k} outside 1..=6"),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct So4Report {
    pub pair: So4Pair,
    pub theta: f64,
    /// Largest amplitude difference between corresponding codewords.
    pub codeword_deviation: f64,
    /// Frobenius distance between the two projectors.
    pub projector_deviation: f64,
}

impl So4Report {
    pub fn passed(&self, tol: f64) -> bool {
        self.projector_deviation <= tol
    }
}

/// Compares the code of the rotated frame with the code transformed by the
/// matching unitary `exp(-i theta P)`.
pub fn so4_check(frame: &OrthoFrame, pair: So4Pair, theta: f64) -> Result<So4Report> {
    let (s, c) = theta.sin_cos();
    let rotation = Matrix4::identity() * c + pair.generator() * s;
    let rotated = code_623(&frame.rotate_abcd(&rotation)?)?;
    let base = code_623(frame)?;
    let p = pair.pauli().matrix();
    let u: Matrix2<C64> = Matrix2::identity() * C64::new(c, 0.0) - p * C64::new(0.0, s);
    let transformed = if pair.is_logical() {
        base.remix(&CMatrix::from_iterator(2, 2, u.iter().copied()))?
    } else {
        let mut factors = vec![Matrix2::identity(); N623];
        factors[0] = u;
        base.apply_local_unitary(&factors)?
    };
    let codeword_deviation = (rotated.basis() - transformed.basis())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let projector_deviation = (rotated.projector() - transformed.projector()).norm();
    Ok(So4Report {
        pair,
        theta,
        codeword_deviation,
        projector_deviation,
    })
}

/// Fits `rho = I/4 + alpha (XX + YY) + beta ZZ` and returns
/// `(alpha, beta, residual)` with the Frobenius residual of the fit.
pub fn xxz_form(rho: &CMatrix) -> Result<(f64, f64, f64)> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: rho.nrows(),
        });
    }
    let dense = |p: Pauli| {
        PauliString::from_letters(&[p, p])
            .and_then(|w| w.dense_matrix())
            .expect("two-qubit word")
    };
    let (xx, yy, zz) = (dense(Pauli::X), dense(Pauli::Y), dense(Pauli::Z));
    let flip = &xx + &yy;
    let alpha = (rho * &flip).trace().re / 8.0;
    let beta = (rho * &zz).trace().re / 4.0;
    let fit = CMatrix::identity(4, 4) * C64::new(0.25, 0.0)
        + flip * C64::new(alpha, 0.0)
        + zz * C64::new(beta, 0.0);
    Ok((alpha, beta, (rho - fit).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codespace::reduced_density_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn s_basis_layout() {
        let s = s_basis_623();
        // S_1 = |00001> + |11110>
        assert!(s[0][1].re > 0.7 && s[0][30].re > 0.7);
        for i in 0..5 {
            for j in 0..5 {
                let ip = dotc(&s[i], &s[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip.re - want).abs() < 1e-15 && ip.im == 0.0);
            }
        }
    }

    #[test]
    fn s_basis_reduced_states() {
        let s = s_basis_623();
        let mut zz = CMatrix::identity(4, 4);
        zz[(1, 1)] = C64::new(-1.0, 0.0);
        zz[(2, 2)] = C64::new(-1.0, 0.0);
        let want = (CMatrix::identity(4, 4) - zz) * C64::new(0.25, 0.0);
        // tracing q2 q3 q4 keeps (q5, q6), local qubits 4 and 5
        let rho = reduced_density_matrix(5, &s[0], &[4, 5]).unwrap();
        assert!((rho - &want).norm() < 1e-15);
        let plus = (CMatrix::identity(4, 4) * C64::new(2.0, 0.0)) * C64::new(0.25, 0.0) - &want;
        let rho = reduced_density_matrix(5, &s[0], &[3, 4]).unwrap();
        assert!((rho - plus).norm() < 1e-15);
        for state in &s {
            for q in 1..=5 {
                let r1 = reduced_density_matrix(5, state, &[q]).unwrap();
                assert!((r1 - CMatrix::identity(2, 2) * C64::new(0.5, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn completion_of_identity_frame() {
        let cols: Vec<Vector5<f64>> = (0..4).map(|j| Vector5::ith(j, 0.5)).collect();
        let f = OrthoFrame::from_abcd(cols[0], cols[1], cols[2], cols[3]).unwrap();
        assert!((f.e() - Vector5::new(0.0, 0.0, 0.0, 0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn completion_of_single_parameter_frame() {
        let theta = 0.4;
        let f = OrthoFrame::single_parameter(theta);
        let g = OrthoFrame::from_abcd(f.column(0), f.column(1), f.column(2), f.column(3)).unwrap();
        assert!((g.e() - f.e()).norm() < 1e-14);
        assert!((f.e()[0] - theta.sin() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn non_orthogonal_input_is_rejected() {
        let v = Vector5::ith(0, 0.5);
        let w = Vector5::ith(1, 0.5);
        assert!(OrthoFrame::from_abcd(v, v, w, Vector5::ith(2, 0.5)).is_err());
        assert!(OrthoFrame::from_e(Vector5::ith(0, 1.0)).is_err());
    }

    #[test]
    fn uniform_and_axis_endpoints() {
        let u = Vector5::repeat(1.0 / (2.0 * 5f64.sqrt()));
        assert!((lambda_star_sq_623(&u) - 0.6).abs() < 1e-14);
        let code = code_623(&OrthoFrame::from_e(u).unwrap()).unwrap();
        let basis = ErrorBasis::new(6, 3).unwrap();
        let sig = code.signature_vector(&basis, 1e-10).unwrap();
        assert!((sig.lambda_star_sq() - 0.6).abs() < 1e-10);

        let axis = Vector5::new(0.0, 0.0, 0.0, 0.0, 0.5);
        let sig = code_623(&OrthoFrame::from_e(axis).unwrap())
            .unwrap()
            .signature_vector(&basis, 1e-10)
            .unwrap();
        assert!((sig.lambda_star_sq() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn prediction_matches_measurement_for_random_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let basis = ErrorBasis::new(6, 3).unwrap();
        for _ in 0..5 {
            let frame = OrthoFrame::random(&mut rng);
            let sig = code_623(&frame)
                .unwrap()
                .signature_vector(&basis, 1e-10)
                .unwrap();
            let predicted = predicted_signature_623(&frame.e());
            for (m, p) in sig.components().iter().zip(predicted.components()) {
                assert!((m - p).abs() < 1e-9, "{m} vs {p}");
            }
            let want = lambda_star_sq_623(&frame.e());
            assert!((predicted.lambda_star_sq() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn block_spectrum_matches_matrix() {
        for (r, s) in [(0.0, 0.0), (0.5, 0.0), (0.3, -0.1), (-0.2, 0.25)] {
            let mut numeric: Vec<f64> = block_matrix(r, s)
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .collect();
            let mut closed = block_eigenvalues(r, s).to_vec();
            numeric.sort_by(f64::total_cmp);
            closed.sort_by(f64::total_cmp);
            for (a, b) in numeric.iter().zip(&closed) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert_eq!(block_eigenvalues(0.5, 0.0), [1.0, 1.0, 1.0, 2.0, 0.0]);
    }

    #[test]
    fn so4_generators_square_to_minus_identity() {
        for k in 1..=6 {
            let g = so4_generator(k);
            assert!((g * g + Matrix4::identity()).norm() < 1e-15);
        }
    }

    #[test]
    fn so4_correspondences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let frame = OrthoFrame::random(&mut rng);
        for pair in So4Pair::ALL {
            for theta in [0.0, 0.3, 1.1] {
                let report = so4_check(&frame, pair, theta).unwrap();
                assert!(report.projector_deviation < 1e-10, "{report:?}");
                assert!(report.codeword_deviation < 1e-10, "{report:?}");
            }
        }
    }

    #[test]
    fn overlap_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ov = OrthoFrame::random(&mut rng).overlaps();
        assert!(ov.identity_residuals().iter().all(|&r| r < 1e-12));
    }

    #[test]
    fn xxz_fit_detects_off_form() {
        let (a, b, r) = xxz_form(&(CMatrix::identity(4, 4) * C64::new(0.25, 0.0))).unwrap();
        assert!(a.abs() < 1e-16 && b.abs() < 1e-16 && r < 1e-16);
        let mut rho = CMatrix::zeros(4, 4);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        let (_, _, r) = xxz_form(&rho).unwrap();
        assert!(r > 0.1);
    }
}
