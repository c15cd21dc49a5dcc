//! Penalty search for code subspaces on the Stiefel manifold.
//!
//! A full-rank `theta in C^{m x K}` is mapped to orthonormal columns by the
//! polar factor `Psi = theta (theta^dagger theta)^{-1/2}`. Losses are built
//! from the KL violation `L_KL = sum_a |T_a - m_a I|_F^2` and the squared
//! signature length `s = sum_a m_a^2`, with `T_a = Psi^dagger O_a Psi` and
//! `m_a = tr(T_a)/K`.
//!
//! Gradients use the convention `dL = Re tr(Gamma^dagger d theta)`, so
//! `theta - eta Gamma` is a descent step.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::codespace::{dotc, CodeJson, CodeSubspace, DEFAULT_KL_TOL};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, worker_count, Execution};
use crate::linalg::hermitian_eigen;
use crate::operators::{DenseOperators, OperatorSet};
use crate::pauli::{CMatrix, ErrorBasis, C64, MAX_DENSE_QUBITS};

/// Penalty weight used when none is given.
pub const DEFAULT_MU: f64 = 1000.0;
/// Smallest singular value accepted by the polar map.
pub const MIN_SINGULAR_VALUE: f64 = 1e-8;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub enum LossKind {
    KlOnly,
    MinimizeLength,
    MaximizeLength,
    /// Target signature length `lambda*` (not squared).
    TargetLength(f64),
    /// Target signature components, one per operator.
    TargetVector(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LossSpec {
    pub kind: LossKind,
    pub mu: f64,
}

impl LossSpec {
    pub fn kl_only() -> Self {
        LossSpec {
            kind: LossKind::KlOnly,
            mu: 1.0,
        }
    }

    pub fn minimize(mu: f64) -> Self {
        LossSpec {
            kind: LossKind::MinimizeLength,
            mu,
        }
    }

    pub fn maximize(mu: f64) -> Self {
        LossSpec {
            kind: LossKind::MaximizeLength,
            mu,
        }
    }

    pub fn target_length(mu: f64, lambda_star: f64) -> Self {
        LossSpec {
            kind: LossKind::TargetLength(lambda_star),
            mu,
        }
    }

    pub fn target_vector(mu: f64, components: Vec<f64>) -> Self {
        LossSpec {
            kind: LossKind::TargetVector(components),
            mu,
        }
    }

    pub fn validate(&self, operator_count: usize) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::Domain(format!(
                "penalty weight must be positive, got {}",
                self.mu
            )));
        }
        match &self.kind {
            LossKind::TargetLength(t) if !t.is_finite() || *t < 0.0 => Err(Error::Domain(format!(
                "target length must be a nonnegative number, got {t}"
            ))),
            LossKind::TargetVector(v) if v.len() != operator_count => Err(Error::Dimension {
                expected: operator_count,
                found: v.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Penalty weight actually applied to `L_KL`.
    fn kl_weight(&self) -> f64 {
        match self.kind {
            LossKind::KlOnly => 1.0,
            _ => self.mu,
        }
    }

    fn value(&self, kl: f64, s: f64, means: &[f64]) -> f64 {
        let w = self.kl_weight() * kl;
        match &self.kind {
            LossKind::KlOnly => kl,
            LossKind::MinimizeLength => w + s,
            LossKind::MaximizeLength => w - s,
            LossKind::TargetLength(t) => w + (s - t * t).powi(2),
            LossKind::TargetVector(v) => {
                w + means
                    .iter()
                    .zip(v)
                    .map(|(m, x)| (m - x).powi(2))
                    .sum::<f64>()
            }
        }
    }
}

/// Loss components at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub loss: f64,
    pub kl_violation: f64,
    /// Squared signature length `s`.
    pub lambda_sq: f64,
    pub means: Vec<f64>,
}

/// Polar factor of `theta` with the spectral data needed to differentiate it.
#[derive(Clone, Debug)]
pub struct Polar {
    pub psi: CMatrix,
    pub inv_sqrt: CMatrix,
    eigvals: Vec<f64>,
    eigvecs: CMatrix,
}

/// `theta (theta^dagger theta)^{-1/2}`.
pub fn polar(theta: &CMatrix) -> Result<Polar> {
    let gram = theta.adjoint() * theta;
    let (eigvals, eigvecs) = hermitian_eigen(&gram);
    let smallest = eigvals.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    if smallest < MIN_SINGULAR_VALUE {
        return Err(Error::Conditioning(smallest));
    }
    let scale = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        eigvals.len(),
        eigvals.iter().map(|&d| C64::new(1.0 / d.sqrt(), 0.0)),
    ));
    let inv_sqrt = &eigvecs * scale * eigvecs.adjoint();
    Ok(Polar {
        psi: theta * &inv_sqrt,
        inv_sqrt,
        eigvals,
        eigvecs,
    })
}

/// The code spanned by `theta`.
pub fn stiefel_map(n: usize, theta: &CMatrix) -> Result<CodeSubspace> {
    CodeSubspace::from_orthonormal(n, polar(theta)?.psi)
}

/// Loss and, if asked, `dL/dPsi` at an orthonormal `psi`.
pub fn evaluate<O: OperatorSet>(
    ops: &O,
    psi: &CMatrix,
    spec: &LossSpec,
    want_gradient: bool,
) -> (Evaluation, Option<CMatrix>) {
    let m = psi.nrows();
    let k = psi.ncols();
    let cols = psi.as_slice();
    let kf = k as f64;
    let mut image = vec![ZERO; m * k];
    let mut t = vec![ZERO; k * k];
    let mut d = vec![ZERO; k * k];
    let mut g_kl = if want_gradient {
        vec![ZERO; m * k]
    } else {
        Vec::new()
    };
    let mut g_len = g_kl.clone();
    let mut kl = 0.0;
    let mut means = Vec::with_capacity(ops.count());
    for a in 0..ops.count() {
        for j in 0..k {
            ops.apply(a, &cols[j * m..(j + 1) * m], &mut image[j * m..(j + 1) * m]);
        }
        let mut trace = ZERO;
        for j in 0..k {
            let img = &image[j * m..(j + 1) * m];
            for i in 0..k {
                t[i + j * k] = dotc(&cols[i * m..(i + 1) * m], img);
            }
            trace += t[j + j * k];
        }
        let mean = trace / kf;
        for j in 0..k {
            for i in 0..k {
                let v = if i == j {
                    t[i + j * k] - mean
                } else {
                    t[i + j * k]
                };
                d[i + j * k] = v;
                kl += v.norm_sqr();
            }
        }
        means.push(mean.re);
        if want_gradient {
            let w = match &spec.kind {
                LossKind::TargetVector(v) => mean.re - v[a],
                _ => mean.re,
            };
            for j in 0..k {
                let (gk, gl) = (
                    &mut g_kl[j * m..(j + 1) * m],
                    &mut g_len[j * m..(j + 1) * m],
                );
                let img_j = &image[j * m..(j + 1) * m];
                for (r, (gkr, glr)) in gk.iter_mut().zip(gl.iter_mut()).enumerate() {
                    let mut acc = ZERO;
                    for i in 0..k {
                        acc += image[i * m + r] * d[i + j * k];
                    }
                    *gkr += acc;
                    *glr += img_j[r] * w;
                }
            }
        }
    }
    let s: f64 = means.iter().map(|x| x * x).sum();
    let loss = spec.value(kl, s, &means);
    let eval = Evaluation {
        loss,
        kl_violation: kl,
        lambda_sq: s,
        means,
    };
    if !want_gradient {
        return (eval, None);
    }
    let coef = match &spec.kind {
        LossKind::KlOnly => 0.0,
        LossKind::MinimizeLength | LossKind::TargetVector(_) => 1.0,
        LossKind::MaximizeLength => -1.0,
        LossKind::TargetLength(target) => 2.0 * (s - target * target),
    };
    let a = 4.0 * spec.kl_weight();
    let b = 4.0 * coef / kf;
    let g = CMatrix::from_iterator(m, k, g_kl.iter().zip(&g_len).map(|(x, y)| x * a + y * b));
    (eval, Some(g))
}

/// Pulls `dL/dPsi` back through the polar map.
pub fn pullback(theta: &CMatrix, polar: &Polar, g_psi: &CMatrix) -> CMatrix {
    let c = theta.adjoint() * g_psi;
    let v = &polar.eigvecs;
    let chat = v.adjoint() * c * v;
    let roots: Vec<f64> = polar.eigvals.iter().map(|d| d.sqrt()).collect();
    let k = roots.len();
    // divided difference of x^{-1/2}, written to stay stable for equal eigenvalues
    let f = CMatrix::from_fn(k, k, |a, b| {
        let (ra, rb) = (roots[a], roots[b]);
        C64::new(-1.0 / (ra * rb * (ra + rb)), 0.0)
    });
    let h = v * f.component_mul(&chat) * v.adjoint();
    g_psi * &polar.inv_sqrt + theta * (&h + h.adjoint())
}

pub fn loss<O: OperatorSet>(ops: &O, theta: &CMatrix, spec: &LossSpec) -> Result<f64> {
    check_shapes(ops, theta, spec)?;
    let p = polar(theta)?;
    Ok(evaluate(ops, &p.psi, spec, false).0.loss)
}

/// Loss and its gradient with respect to `theta`.
pub fn loss_and_gradient<O: OperatorSet>(
    ops: &O,
    theta: &CMatrix,
    spec: &LossSpec,
) -> Result<(Evaluation, CMatrix)> {
    check_shapes(ops, theta, spec)?;
    let p = polar(theta)?;
    let (eval, g) = evaluate(ops, &p.psi, spec, true);
    let g = g.expect("gradient requested");
    Ok((eval, pullback(theta, &p, &g)))
}

pub fn gradient<O: OperatorSet>(ops: &O, theta: &CMatrix, spec: &LossSpec) -> Result<CMatrix> {
    Ok(loss_and_gradient(ops, theta, spec)?.1)
}

fn check_shapes<O: OperatorSet>(ops: &O, theta: &CMatrix, spec: &LossSpec) -> Result<()> {
    if theta.nrows() != ops.dim() {
        return Err(Error::Dimension {
            expected: ops.dim(),
            found: theta.nrows(),
        });
    }
    if theta.ncols() == 0 || theta.ncols() > theta.nrows() {
        return Err(Error::Domain(format!(
            "code dimension {} must lie in 1..={}",
            theta.ncols(),
            theta.nrows()
        )));
    }
    spec.validate(ops.count())
}

/// `m x k` matrix of i.i.d. complex Gaussians with unit variance.
pub fn random_theta<R: Rng + ?Sized>(m: usize, k: usize, rng: &mut R) -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(m, k, |_, _| {
        C64::new(
            h * rng.sample::<f64, _>(StandardNormal),
            h * rng.sample::<f64, _>(StandardNormal),
        )
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Iteration cap for the penalty phase.
    pub max_iters: usize,
    /// Penalty weights run (each for `max_iters`) before the phase at `spec.mu`.
    #[serde(default)]
    pub warmup_mu: Vec<f64>,
    /// Iteration cap for the KL-only polish that follows the penalty phase; 0 disables it.
    pub polish_iters: usize,
    pub seed: u64,
    pub kl_tol: f64,
    /// Stop a phase once the gradient norm drops below this.
    pub grad_tol: f64,
    /// Heavy-ball coefficient.
    pub momentum: f64,
    /// Stop launching restarts once one reaches this loss with `kl <= kl_tol`.
    pub stop_loss: Option<f64>,
    /// Keep the per-iteration loss of every restart.
    pub record_history: bool,
    #[serde(skip, default)]
    pub execution: Execution,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 50,
            max_iters: 3000,
            warmup_mu: Vec::new(),
            polish_iters: 3000,
            seed: 0,
            kl_tol: DEFAULT_KL_TOL,
            grad_tol: 1e-12,
            momentum: 0.9,
            stop_loss: None,
            record_history: false,
            execution: Execution::default(),
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Domain("at least one restart is required".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Domain(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if let Some(mu) = self
            .warmup_mu
            .iter()
            .find(|m| !(**m > 0.0 && m.is_finite()))
        {
            return Err(Error::Domain(format!(
                "warm-up weights must be positive, got {mu}"
            )));
        }
        if !(self.kl_tol > 0.0) {
            return Err(Error::Domain("kl_tol must be positive".into()));
        }
        Ok(())
    }
}

/// One finished restart.
#[derive(Clone, Debug)]
pub struct RestartOutcome {
    pub index: usize,
    pub psi: CMatrix,
    pub eval: Evaluation,
    pub iterations: usize,
    pub history: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct OptimizationResult {
    pub code: CodeSubspace,
    pub kl_violation: f64,
    pub lambda_star: f64,
    pub final_loss: f64,
    pub iterations: usize,
    pub restarts_used: usize,
    pub converged: bool,
    pub wall_time_ms: u64,
    /// Index of the winning restart.
    pub best_restart: usize,
    /// Loss per iteration of the winning restart, if recorded.
    pub history: Vec<f64>,
}

pub const RESULT_FORMAT: &str = "klscope.optimization.v1";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultJson {
    pub format: String,
    pub kl_violation: f64,
    pub lambda_star: f64,
    pub final_loss: f64,
    pub iterations: usize,
    pub restarts_used: usize,
    pub converged: bool,
    pub wall_time_ms: u64,
    pub best_restart: usize,
    pub code: CodeJson,
}

impl OptimizationResult {
    pub fn to_json(&self) -> ResultJson {
        ResultJson {
            format: RESULT_FORMAT.to_string(),
            kl_violation: self.kl_violation,
            lambda_star: self.lambda_star,
            final_loss: self.final_loss,
            iterations: self.iterations,
            restarts_used: self.restarts_used,
            converged: self.converged,
            wall_time_ms: self.wall_time_ms,
            best_restart: self.best_restart,
            code: self.code.to_json(),
        }
    }
}

/// Runs gradient descent with momentum and Armijo backtracking from
/// `theta0`, re-orthonormalizing after every accepted step.
pub fn descend<O: OperatorSet>(
    ops: &O,
    theta0: &CMatrix,
    spec: &LossSpec,
    max_iters: usize,
    config: &OptimizerConfig,
    history: &mut Vec<f64>,
) -> Result<(CMatrix, Evaluation, usize)> {
    let mut psi = polar(theta0)?.psi;
    let (mut eval, g) = evaluate(ops, &psi, spec, true);
    let mut grad = tangent(&psi, &g.expect("gradient requested"));
    let mut dir_prev: Option<CMatrix> = None;
    let mut eta = 1.0 / grad.norm().max(1.0);
    let mut iterations = 0;
    while iterations < max_iters {
        let gnorm = grad.norm();
        if gnorm <= config.grad_tol {
            break;
        }
        let mut dir = match &dir_prev {
            Some(prev) => &grad + prev * C64::new(config.momentum, 0.0),
            None => grad.clone(),
        };
        let mut slope = inner_re(&grad, &dir);
        if slope <= 0.0 {
            dir = grad.clone();
            slope = gnorm * gnorm;
        }
        let mut accepted = None;
        for _ in 0..80 {
            let candidate = &psi - &dir * C64::new(eta, 0.0);
            if let Ok(p) = polar(&candidate) {
                let (trial, _) = evaluate(ops, &p.psi, spec, false);
                if trial.loss <= eval.loss - 1e-4 * eta * slope {
                    accepted = Some(p.psi);
                    break;
                }
            }
            eta *= 0.5;
        }
        let Some(next) = accepted else {
            break;
        };
        iterations += 1;
        psi = next;
        let (e, g) = evaluate(ops, &psi, spec, true);
        eval = e;
        grad = tangent(&psi, &g.expect("gradient requested"));
        dir_prev = Some(dir);
        eta *= 2.0;
        if config.record_history {
            history.push(eval.loss);
        }
    }
    Ok((psi, eval, iterations))
}

/// Gradient with respect to `theta` at an orthonormal `theta = psi`.
fn tangent(psi: &CMatrix, g: &CMatrix) -> CMatrix {
    let c = psi.adjoint() * g;
    g - psi * ((&c + c.adjoint()) * C64::new(0.5, 0.0))
}

fn inner_re(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Draws a well-conditioned start for restart `index`.
pub fn initial_theta(m: usize, k: usize, seed: u64, index: usize) -> CMatrix {
    let mut rng = restart_rng(seed, index);
    loop {
        let theta = random_theta(m, k, &mut rng);
        if polar(&theta).is_ok() {
            return theta;
        }
    }
}

/// A single restart: optional warm-up weights, the penalty phase, then the
/// KL-only polish.
pub fn run_restart<O: OperatorSet>(
    ops: &O,
    k: usize,
    spec: &LossSpec,
    config: &OptimizerConfig,
    index: usize,
) -> Result<RestartOutcome> {
    let mut theta = initial_theta(ops.dim(), k, config.seed, index);
    let mut history = Vec::new();
    let mut iterations = 0;
    if spec.kind != LossKind::KlOnly {
        for &mu in &config.warmup_mu {
            let warm = LossSpec { mu, ..spec.clone() };
            let (p, _, it) = descend(ops, &theta, &warm, config.max_iters, config, &mut history)?;
            theta = p;
            iterations += it;
        }
    }
    let (mut psi, mut eval, it) =
        descend(ops, &theta, spec, config.max_iters, config, &mut history)?;
    iterations += it;
    if config.polish_iters > 0 && spec.kind != LossKind::KlOnly {
        let kl_spec = LossSpec::kl_only();
        let (p, _, it) = descend(
            ops,
            &psi,
            &kl_spec,
            config.polish_iters,
            config,
            &mut Vec::new(),
        )?;
        let (e, _) = evaluate(ops, &p, spec, false);
        psi = p;
        eval = e;
        iterations += it;
        if config.record_history {
            history.push(eval.loss);
        }
    }
    Ok(RestartOutcome {
        index,
        psi,
        eval,
        iterations,
        history,
    })
}

fn better(a: &RestartOutcome, b: &RestartOutcome) -> bool {
    if (a.eval.loss - b.eval.loss).abs() > 1e-12 {
        a.eval.loss < b.eval.loss
    } else {
        a.eval.kl_violation < b.eval.kl_violation
    }
}

/// Best of `config.restarts` independent runs on an arbitrary operator set.
pub fn optimize_operators<O: OperatorSet>(
    ops: &O,
    k: usize,
    spec: &LossSpec,
    config: &OptimizerConfig,
) -> Result<(RestartOutcome, usize)> {
    config.validate()?;
    spec.validate(ops.count())?;
    if k == 0 || k > ops.dim() {
        return Err(Error::Domain(format!(
            "code dimension {k} must lie in 1..={}",
            ops.dim()
        )));
    }
    let batch = worker_count(config.execution);
    let mut best: Option<RestartOutcome> = None;
    let mut used = 0;
    while used < config.restarts {
        let len = batch.min(config.restarts - used);
        let outcomes = map_indexed(len, config.execution, |b| {
            run_restart(ops, k, spec, config, used + b)
        });
        used += len;
        for outcome in outcomes {
            let outcome = outcome?;
            if best.as_ref().is_none_or(|b| better(&outcome, b)) {
                best = Some(outcome);
            }
        }
        if let (Some(stop), Some(b)) = (config.stop_loss, &best) {
            if b.eval.loss <= stop && b.eval.kl_violation <= config.kl_tol {
                break;
            }
        }
    }
    Ok((best.expect("at least one restart ran"), used))
}

/// Searches for an `((n, K, d))` code minimizing `spec`.
pub fn optimize(
    n: usize,
    k: usize,
    basis: &ErrorBasis,
    spec: &LossSpec,
    config: &OptimizerConfig,
) -> Result<OptimizationResult> {
    if n != basis.n() {
        return Err(Error::Dimension {
            expected: basis.n(),
            found: n,
        });
    }
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity {
            what: "qubit count",
            value: n,
            limit: MAX_DENSE_QUBITS,
        });
    }
    let start = Instant::now();
    let (best, used) = optimize_operators(basis, k, spec, config)?;
    let code = CodeSubspace::from_orthonormal(n, best.psi)?;
    Ok(OptimizationResult {
        code,
        kl_violation: best.eval.kl_violation,
        lambda_star: best.eval.lambda_sq.sqrt(),
        final_loss: best.eval.loss,
        iterations: best.iterations,
        restarts_used: used,
        converged: best.eval.kl_violation <= config.kl_tol,
        wall_time_ms: start.elapsed().as_millis() as u64,
        best_restart: best.index,
        history: best.history,
    })
}

/// One random-start feasibility run.
#[derive(Clone, Debug, PartialEq)]
pub struct JnrRun {
    pub values: Vec<f64>,
    /// `sqrt(L_KL)` at the end of the run.
    pub residual: f64,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct JnrResult {
    pub runs: Vec<JnrRun>,
    /// Distinct value tuples among converged runs (first occurrence order).
    pub tuples: Vec<Vec<f64>>,
}

/// Residual bound for counting a feasibility run as converged.
pub const JNR_RESIDUAL_TOL: f64 = 1e-9;

/// Searches for rank-`k` projectors with `P A_i P = lambda_i P` from
/// `config.restarts` random starts.
pub fn jnr_feasibility(
    ops: &DenseOperators,
    k: usize,
    config: &OptimizerConfig,
) -> Result<JnrResult> {
    config.validate()?;
    if k == 0 || k > ops.dim() {
        return Err(Error::Domain(format!(
            "rank {k} must lie in 1..={}",
            ops.dim()
        )));
    }
    let spec = LossSpec::kl_only();
    let runs = map_indexed(config.restarts, config.execution, |i| {
        let theta = initial_theta(ops.dim(), k, config.seed, i);
        let (_, eval, _) = descend(
            ops,
            &theta,
            &spec,
            config.max_iters,
            config,
            &mut Vec::new(),
        )?;
        let residual = eval.kl_violation.sqrt();
        Ok(JnrRun {
            values: eval.means,
            residual,
            converged: residual <= JNR_RESIDUAL_TOL,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut tuples: Vec<Vec<f64>> = Vec::new();
    for run in runs.iter().filter(|r| r.converged) {
        let seen = tuples.iter().any(|t| {
            t.iter()
                .zip(&run.values)
                .all(|(a, b)| (a - b).abs() <= 1e-6)
        });
        if !seen {
            tuples.push(run.values.clone());
        }
    }
    Ok(JnrResult { runs, tuples })
}
