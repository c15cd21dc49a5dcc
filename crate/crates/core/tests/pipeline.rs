use klscope::codespace::CodeSubspace;
use klscope::families::{code_623, cyclic_code_723, Branch, CyclicCoeffs, OrthoFrame};
use klscope::optimizer::{optimize, LossSpec, OptimizerConfig};
use klscope::sweep::{sweep, SweepConfig, SweepResult};
use klscope::verify::verify_code;
use klscope::{ErrorBasis, Execution, StabilizerCode};

fn lambda(code: &CodeSubspace) -> f64 {
    let basis = ErrorBasis::new(code.n(), 3).unwrap();
    code.signature_vector(&basis, 1e-10).unwrap().lambda_star()
}

#[test]
fn json_round_trip_keeps_lambda() {
    let coeffs = CyclicCoeffs::from_lambda(2.0, Branch::Minus, Branch::Plus).unwrap();
    let codes = [
        cyclic_code_723(&coeffs).unwrap(),
        code_623(&OrthoFrame::single_parameter(0.7)).unwrap(),
        StabilizerCode::builtin("shaw623")
            .unwrap()
            .codespace()
            .unwrap(),
    ];
    for code in codes {
        let mut buf = Vec::new();
        code.write_json(&mut buf).unwrap();
        let back = CodeSubspace::read_json(&buf[..]).unwrap();
        assert!((lambda(&back) - lambda(&code)).abs() < 1e-10);
        assert!(verify_code(&back, 3, 1e-10, 2, 0).unwrap().consistent(1e-9));
    }
}

#[test]
fn optimized_codes_are_certified() {
    // ((5,2,3)) exists, so a short search must produce a verified code
    let basis = ErrorBasis::new(5, 3).unwrap();
    let config = OptimizerConfig {
        restarts: 4,
        seed: 11,
        ..OptimizerConfig::default()
    };
    let result = optimize(5, 2, &basis, &LossSpec::minimize(1000.0), &config).unwrap();
    assert!(result.converged);
    assert!(result.kl_violation <= 1e-10);
    let report = verify_code(&result.code, 3, 1e-10, 3, 1).unwrap();
    assert!(report.is_code);
    assert!((report.lambda_star - result.lambda_star).abs() < 1e-9);
    assert_eq!(result.restarts_used, 4);
}

#[test]
fn results_do_not_depend_on_execution() {
    let basis = ErrorBasis::new(4, 2).unwrap();
    let spec = LossSpec::maximize(100.0);
    let run = |execution| {
        let config = OptimizerConfig {
            restarts: 6,
            max_iters: 300,
            polish_iters: 300,
            seed: 4,
            execution,
            ..OptimizerConfig::default()
        };
        optimize(4, 2, &basis, &spec, &config).unwrap()
    };
    let a = run(Execution::Sequential);
    let b = run(Execution::Parallel);
    assert_eq!(a.best_restart, b.best_restart);
    assert_eq!(a.code.basis(), b.code.basis());
    assert_eq!(a.final_loss, b.final_loss);
}

#[test]
fn steane_point_is_approached() {
    // lambda*^2 = 0 is a degenerate minimum (lambda*^2 is quartic in the
    // cyclic coefficients there), so descent approaches it sublinearly
    let basis = ErrorBasis::new(7, 3).unwrap();
    let mut config = SweepConfig::default();
    config.optimizer.restarts = 2;
    let result = sweep(&basis, 2, &[0.0], &config, &[], |_| Ok(())).unwrap();
    let row = &result.rows[0];
    assert!(row.kl_violation <= 1e-10);
    assert!(
        row.achieved_lambda_sq < 1e-2 && row.final_loss < 1e-4,
        "{row:?}"
    );
}

#[test]
fn sweep_resume_reuses_rows() {
    let basis = ErrorBasis::new(5, 3).unwrap();
    let mut config = SweepConfig::default();
    config.optimizer.restarts = 2;
    config.optimizer.max_iters = 300;
    config.optimizer.polish_iters = 300;
    let first = sweep(&basis, 2, &[0.2, 0.4], &config, &[], |_| Ok(())).unwrap();
    let mut buf = Vec::new();
    first.write_csv(&mut buf).unwrap();
    let saved = SweepResult::read_csv(&buf[..]).unwrap();
    let mut seen = Vec::new();
    let full = sweep(&basis, 2, &[0.4, 0.3, 0.2], &config, &saved.rows, |r| {
        seen.push(r.target_lambda_sq);
        Ok(())
    })
    .unwrap();
    assert_eq!(seen, vec![0.2, 0.3, 0.4]);
    assert_eq!(full.row(0.2), first.row(0.2));
    assert_eq!(full.row(0.4), first.row(0.4));
    // a fresh run of a single point reproduces the stored row's numbers
    let again = sweep(&basis, 2, &[0.4], &config, &[], |_| Ok(())).unwrap();
    assert_eq!(
        again.rows[0].achieved_lambda_sq,
        first.row(0.4).unwrap().achieved_lambda_sq
    );
}
