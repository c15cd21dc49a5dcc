//! One-shot health report for an imported code.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codespace::{random_unitary_2, CodeSubspace, KlTensor};
use crate::enumerators::{weight_enumerators, MAX_ENUMERATOR_QUBITS};
use crate::error::Result;
use crate::pauli::ErrorBasis;

pub const VERIFY_FORMAT: &str = "klscope.verify.v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub format: String,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub d: usize,
    pub kl_violation: f64,
    /// `kl_violation <= kl_tol`.
    pub is_code: bool,
    pub lambda_star: f64,
    pub lambda_star_sq: f64,
    /// `A_1 + ... + A_{d-1}`; absent above the enumerator size limit.
    pub enumerator_lambda_star_sq: Option<f64>,
    pub enumerator_deviation: Option<f64>,
    pub lu_trials: usize,
    /// Largest `|lambda*(U code) - lambda*(code)|` over the random local unitaries.
    pub lu_max_drift: f64,
}

impl VerifyReport {
    /// True when the code satisfies KL and both cross-checks agree within `tol`.
    pub fn consistent(&self, tol: f64) -> bool {
        self.is_code
            && self.enumerator_deviation.is_none_or(|e| e <= tol)
            && self.lu_max_drift <= tol
    }
}

/// `sum_a |<T_a>|^2`, defined whether or not the KL conditions hold.
fn mean_length_sq(tensor: &KlTensor) -> f64 {
    tensor.mean_diagonal().iter().map(|m| m.norm_sqr()).sum()
}

pub fn verify_code(
    code: &CodeSubspace,
    d: usize,
    kl_tol: f64,
    lu_trials: usize,
    seed: u64,
) -> Result<VerifyReport> {
    let basis = ErrorBasis::new(code.n(), d)?;
    let tensor = code.kl_tensor(&basis)?;
    let kl_violation = tensor.violation();
    let lambda_sq = mean_length_sq(&tensor);

    let enumerator = if code.n() <= MAX_ENUMERATOR_QUBITS {
        let e = weight_enumerators(code)?;
        Some(e.a[1..d.min(code.n() + 1)].iter().sum::<f64>())
    } else {
        None
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lu_max_drift: f64 = 0.0;
    for _ in 0..lu_trials {
        let factors: Vec<_> = (0..code.n()).map(|_| random_unitary_2(&mut rng)).collect();
        let moved = code.apply_local_unitary(&factors)?;
        let l = mean_length_sq(&moved.kl_tensor(&basis)?).sqrt();
        lu_max_drift = lu_max_drift.max((l - lambda_sq.sqrt()).abs());
    }

    Ok(VerifyReport {
        format: VERIFY_FORMAT.to_string(),
        n: code.n(),
        k: code.k(),
        d,
        kl_violation,
        is_code: kl_violation <= kl_tol,
        lambda_star: lambda_sq.sqrt(),
        lambda_star_sq: lambda_sq,
        enumerator_lambda_star_sq: enumerator,
        enumerator_deviation: enumerator.map(|e| (e - lambda_sq).abs()),
        lu_trials,
        lu_max_drift,
    })
}
