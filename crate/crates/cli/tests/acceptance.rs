//! End-to-end acceptance gate: one line per criterion, each pinned to the
//! tolerance it must meet.  Every criterion reuses the verification suites
//! (which compare the library against independent oracles) plus a run of the
//! installed binary itself.

use hadamard_cli::report::SuiteReport;
use hadamard_cli::suites;
use hadamard_core::PairingConfig;
use std::time::{Duration, Instant};

struct Gate {
    lines: Vec<(String, bool)>,
}

impl Gate {
    fn new() -> Self {
        Gate { lines: Vec::new() }
    }

    fn criterion(&mut self, id: &str, description: &str, pass: bool) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("[{verdict}] {id}: {description}");
        self.lines.push((id.to_string(), pass));
    }

    fn finish(self) {
        let failed: Vec<&str> = self
            .lines
            .iter()
            .filter(|(_, p)| !p)
            .map(|(id, _)| id.as_str())
            .collect();
        println!(
            "acceptance: {}/{} criteria pass",
            self.lines.len() - failed.len(),
            self.lines.len()
        );
        assert!(failed.is_empty(), "failed criteria: {failed:?}");
    }
}

fn run_suite(name: &str, cfg: &PairingConfig) -> (SuiteReport, Duration) {
    let t = Instant::now();
    let mut reports = suites::run(name, cfg).expect("known suite name");
    let elapsed = t.elapsed();
    assert_eq!(reports.len(), 1);
    (reports.remove(0), elapsed)
}

fn rows_pass(report: &SuiteReport, ids: &[&str]) -> bool {
    ids.iter().all(|id| {
        report
            .rows
            .iter()
            .find(|r| r.id == *id)
            .map(|r| r.pass)
            .unwrap_or(false)
    })
}

#[test]
fn acceptance_criteria() {
    let cfg = PairingConfig::default();
    let mut gate = Gate::new();

    // 1. the unit point mass is the identity: eigenvalue 1 for every order up
    //    to 6 within 1e-10, and its operator leaves every catalog pairing
    //    unchanged within 1e-9, in under 5 seconds
    let (identity, t_identity) = run_suite("identity", &cfg);
    let unit_rows: Vec<&str> = identity
        .rows
        .iter()
        .map(|r| r.id.as_str())
        .filter(|id| id.starts_with("eigen_table") || id.starts_with("unit_star"))
        .collect();
    gate.criterion(
        "unit_kernel_identity",
        "unit kernel has eigenvalue 1 (1e-10) and acts as the identity on the catalog (1e-9) in < 5 s",
        rows_pass(&identity, &unit_rows) && t_identity < Duration::from_secs(5),
    );

    // 2. dilation kernels scale eigenvalues by sigma(a)^-1 a^-(alpha+1) for
    //    a in {2, -1.5, (2,-3)} and all orders up to 4, within 1e-8 relative
    let (dilation, _) = run_suite("dilation", &cfg);
    gate.criterion(
        "dilation_eigenvalues",
        "dilation kernels for a in {2, -1.5, (2,-3)} match the closed form to 1e-8",
        dilation.all_pass(),
    );

    // 3. the indicator of [1,2]: m_0 = ln 2 and m_a = (1-2^-a)/a to 1e-8,
    //    weak-form residual below 1e-6 on five random bumps, and the
    //    derivative of x times the indicator scales by the factorial ratio
    let (eigenvalue, _) = run_suite("eigenvalue", &cfg);
    gate.criterion(
        "indicator_eigenvalues",
        "indicator of [1,2] matches ln 2 and (1-2^-a)/a to 1e-8, weak form to 1e-6, derivative scaling to 1e-6",
        rows_pass(
            &eigenvalue,
            &[
                "indicator_m0",
                "indicator_m_alpha",
                "weak_form_random_bumps",
                "derivative_kernel_scaling",
            ],
        ),
    );

    // 4. Euler operators scale eigenvalues by alpha^beta for all beta up to
    //    (2,2) and alpha up to (4,4), within 1e-8 against exact and
    //    quadrature oracles
    let (euler, _) = run_suite("euler_eigen", &cfg);
    gate.criterion(
        "euler_eigenvalue_scaling",
        "theta^beta kernels scale eigenvalues by alpha^beta for beta <= (2,2), alpha <= (4,4) to 1e-8",
        euler.all_pass(),
    );

    // 5. the operators commute with dilations within 1e-7
    let (commutation, _) = run_suite("commutation", &cfg);
    gate.criterion(
        "dilation_commutation",
        "operators commute with dilations to 1e-7",
        commutation.all_pass(),
    );

    // 6. Euler/weighted-derivative decompositions are exact in rational
    //    arithmetic for every order up to 4 in dimensions 1 and 2, sub-second
    let (decomposition, t_decomposition) = run_suite("decomposition", &cfg);
    gate.criterion(
        "exact_decomposition",
        "operator decompositions are exact in rational arithmetic, sub-second",
        decomposition.all_pass() && t_decomposition < Duration::from_secs(1),
    );

    // 7. operator factorization: L_{P(theta) t} = P(theta) after L_t within
    //    1e-6 for P in {1, theta, theta^2 - theta} on three test pairs
    let (factorization, _) = run_suite("factorization", &cfg);
    gate.criterion(
        "operator_factorization",
        "L applied to P(theta) t factors through P(theta) for P in {1, theta, theta^2-theta} to 1e-6",
        factorization.all_pass(),
    );

    // 8. the oscillatory kernel's scaling action matches the independent
    //    Fourier closed form to 1e-6 relative at y in {0.5, 1, 2} for
    //    derivative orders up to 2, vanishes rapidly toward the hyperplane,
    //    and finishes in under 60 seconds
    let (fourier, t_fourier) = run_suite("fourier", &cfg);
    gate.criterion(
        "oscillatory_fourier_action",
        "oscillatory kernel action matches the Fourier closed form to 1e-6 and is flat at the hyperplane, < 60 s",
        rows_pass(
            &fourier,
            &[
                "scaling_action_values",
                "scaling_action_derivative_1",
                "scaling_action_derivative_2",
                "hyperplane_flatness",
                "fft_cross_check",
            ],
        ) && t_fourier < Duration::from_secs(60),
    );

    // 9. the half-line indicator produces the predicted mass/y growth within
    //    10% and is rejected by the certificate gate
    let (unbounded, _) = run_suite("unbounded", &cfg);
    gate.criterion(
        "half_line_growth",
        "half-line kernel grows like mass/y within 10% and fails the certificate gate",
        rows_pass(
            &unbounded,
            &["gate_rejects_missing_decay", "growth_rate_c_over_y"],
        ),
    );

    // 10. weighted-pairing extendability: ramp densities x^p/p! admit exactly
    //    the weights up to p, flat densities admit all, and a point mass at
    //    the origin is rejected
    let (extendability, _) = run_suite("extendability", &cfg);
    gate.criterion(
        "weight_extendability",
        "ramp densities admit weights up to p and fail beyond, flat densities admit all, origin rejected",
        extendability.all_pass(),
    );

    // 11. the shipped binary verifies every suite with exit code 0, within
    //     the ten-minute budget
    let t = Instant::now();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_hadamard"))
        .args(["verify", "--suite", "all"])
        .stdout(std::process::Stdio::null())
        .status()
        .expect("binary runs");
    gate.criterion(
        "binary_full_verification",
        "hadamard verify --suite all exits 0 in < 10 min",
        status.code() == Some(0) && t.elapsed() < Duration::from_secs(600),
    );

    gate.finish();
}
