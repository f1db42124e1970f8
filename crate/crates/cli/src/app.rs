//! Command-line front end: eigenvalue tables, scaling-action evaluation on
//! grids, and the verification suites.
//!
//! Exit codes: `0` success, `1` a numeric check or quadrature failed, `2` the
//! input or a kernel certificate was rejected (the failing predicate is named
//! on stderr).

use crate::report::reports_to_json;
use crate::specfile::SpecFile;
use crate::suites;
use anyhow::Context;
use clap::{Parser, Subcommand};
use hadamard_core::hadamard::{apply_multiplicative, certify};
use hadamard_core::{
    Distribution, EigenvalueTable, Error, MultiIndex, PairingConfig, TestFunction,
};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "hadamard",
    version,
    about = "Eigenvalue tables, scaling actions and verification suites for \
             multiplicative-convolution operators on distributions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the eigenvalue table of a kernel from a spec file, as CSV
    Eig {
        /// JSON spec file defining the distributions
        #[arg(long)]
        spec: PathBuf,
        /// Name of the kernel distribution inside the spec file
        #[arg(long)]
        dist: String,
        /// Compute all orders with every component at most this value
        #[arg(long, default_value_t = 6)]
        alpha_max: u32,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Relative quadrature tolerance override
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Evaluate the scaling action of a kernel on a grid, as CSV
    Apply {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        dist: String,
        /// Name of the test function inside the spec file
        #[arg(long)]
        testfn: String,
        /// Grid as `a:b:n` per axis, comma-separated for higher dimensions
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
        /// Evaluate an uncertified kernel anyway, at points with no zero
        /// coordinate
        #[arg(long)]
        unsafe_off_hyperplane: bool,
    },
    /// Run a verification suite (or `all`) and report pass/fail per identity
    Verify {
        /// Suite name, or `all`
        #[arg(long)]
        suite: String,
        /// Write the report as JSON to this file
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

/// Name of the gate predicate a certificate error corresponds to.
fn predicate_name(e: &Error) -> &'static str {
    match e {
        Error::SupportTouchesHyperplane => "support_in_w_eps",
        Error::MissingDecayBound | Error::InsufficientDecay { .. } => "decay_witness",
        Error::HyperplaneWithoutWitness => "hyperplane_witness",
        Error::ZeroCoordinate => "nonzero_coordinates",
        Error::DimensionMismatch { .. } => "dimension_match",
        Error::NotADerivAtom => "derivative_atom_shape",
        Error::BudgetExhausted { .. } | Error::NonIntegrableSingularity { .. } => "quadrature",
    }
}

/// `2` for rejected inputs/certificates, `1` for numeric failures.
fn exit_class(e: &Error) -> u8 {
    match e {
        Error::BudgetExhausted { .. } | Error::NonIntegrableSingularity { .. } => 1,
        _ => 2,
    }
}

/// Resolve the numeric configuration: defaults, then the spec file, then the
/// `HADAMARD_TOL` environment variable, then the `--tol` flag.
fn build_config(spec: Option<&SpecFile>, tol_flag: Option<f64>) -> Result<PairingConfig, String> {
    let mut cfg = PairingConfig::default();
    if let Some(s) = spec {
        s.config.apply(&mut cfg);
    }
    if let Ok(v) = std::env::var("HADAMARD_TOL") {
        let parsed: f64 = v
            .parse()
            .map_err(|_| format!("HADAMARD_TOL is not a number: '{v}'"))?;
        if !(parsed > 0.0 && parsed < 1.0) {
            return Err(format!("HADAMARD_TOL must be in (0, 1), got {parsed}"));
        }
        set_tol(&mut cfg, parsed);
    }
    if let Some(t) = tol_flag {
        if !(t > 0.0 && t < 1.0) {
            return Err(format!("--tol must be in (0, 1), got {t}"));
        }
        set_tol(&mut cfg, t);
    }
    Ok(cfg)
}

fn set_tol(cfg: &mut PairingConfig, rel: f64) {
    cfg.rel_tol = rel;
    cfg.abs_tol = rel * 1e-3;
}

/// `HADAMARD_THREADS` is accepted for compatibility with batch harnesses; the
/// implementation is deterministic and single-threaded, so any value `>= 1`
/// only caps what would be used.  Invalid values are rejected.
fn check_threads_env() -> Result<(), String> {
    if let Ok(v) = std::env::var("HADAMARD_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(format!("HADAMARD_THREADS must be a positive integer, got '{v}'")),
        }
    } else {
        Ok(())
    }
}

fn load_spec(path: &Path) -> Result<SpecFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    SpecFile::parse(&text).map_err(|e| e.to_string())
}

/// Parse `a:b:n[,a:b:n]` into per-axis sample vectors.
fn parse_grid(grid: &str) -> Result<Vec<Vec<f64>>, String> {
    let mut axes = Vec::new();
    for part in grid.split(',') {
        let pieces: Vec<&str> = part.split(':').collect();
        if pieces.len() != 3 {
            return Err(format!("grid axis '{part}' is not of the form a:b:n"));
        }
        let a: f64 = pieces[0].parse().map_err(|_| format!("bad grid start '{}'", pieces[0]))?;
        let b: f64 = pieces[1].parse().map_err(|_| format!("bad grid end '{}'", pieces[1]))?;
        let n: usize = pieces[2].parse().map_err(|_| format!("bad grid count '{}'", pieces[2]))?;
        if n == 0 {
            return Err("grid count must be at least 1".into());
        }
        let axis = if n == 1 {
            vec![a]
        } else {
            (0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect()
        };
        axes.push(axis);
    }
    Ok(axes)
}

/// All points of the cartesian product of the axes, row-major.
fn grid_points(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(points.len() * axis.len());
        for p in &points {
            for &v in axis {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        points = next;
    }
    points
}

fn write_output(out: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Parse the process arguments and run; returns the process exit code.
pub fn run() -> u8 {
    let cli = Cli::parse();
    if let Err(msg) = check_threads_env() {
        eprintln!("input rejected: {msg}");
        return 2;
    }
    match cli.cmd {
        Cmd::Eig {
            spec,
            dist,
            alpha_max,
            out,
            tol,
        } => cmd_eig(&spec, &dist, alpha_max, &out, tol),
        Cmd::Apply {
            spec,
            dist,
            testfn,
            grid,
            out,
            tol,
            unsafe_off_hyperplane,
        } => cmd_apply(&spec, &dist, &testfn, &grid, &out, tol, unsafe_off_hyperplane),
        Cmd::Verify { suite, out, tol } => cmd_verify(&suite, &out, tol),
    }
}

fn cmd_eig(
    spec_path: &Path,
    dist: &str,
    alpha_max: u32,
    out: &Option<PathBuf>,
    tol: Option<f64>,
) -> u8 {
    let spec = match load_spec(spec_path) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("input rejected: {msg}");
            return 2;
        }
    };
    let cfg = match build_config(Some(&spec), tol) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("input rejected: {msg}");
            return 2;
        }
    };
    let kernel = match spec.distribution(dist) {
        Ok(k) => k,
        Err(e) => {
            eprintln!("input rejected: {e}");
            return 2;
        }
    };
    let cert = match certify(&kernel) {
        Ok(c) => c,
        Err(e) => {
            eprintln!(
                "certificate rejected: predicate {} failed ({e})",
                predicate_name(&e)
            );
            return 2;
        }
    };
    match cert.decay_exponent {
        Some(k) => eprintln!("certificate: eps={:.6e}, decay_exponent={k}", cert.eps),
        None => eprintln!("certificate: eps={:.6e}, all atoms bounded", cert.eps),
    }
    let max = MultiIndex::new(vec![alpha_max; kernel.dim()]);
    let table = match EigenvalueTable::compute(&kernel, &max, &cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("eigenvalue computation failed: {e}");
            return exit_class(&e);
        }
    };
    let mut csv = String::new();
    for j in 1..=kernel.dim() {
        csv.push_str(&format!("alpha_{j},"));
    }
    csv.push_str("re,im,error_bound\n");
    for (alpha, value, error) in table.entries() {
        for &a in alpha.components() {
            csv.push_str(&format!("{a},"));
        }
        csv.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", value.re, value.im, error));
    }
    if write_output(out, &csv).is_err() {
        eprintln!("input rejected: cannot write output file");
        return 2;
    }
    0
}

fn cmd_apply(
    spec_path: &Path,
    dist: &str,
    testfn: &str,
    grid: &str,
    out: &Option<PathBuf>,
    tol: Option<f64>,
    unsafe_off_hyperplane: bool,
) -> u8 {
    let spec = match load_spec(spec_path) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("input rejected: {msg}");
            return 2;
        }
    };
    let cfg = match build_config(Some(&spec), tol) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("input rejected: {msg}");
            return 2;
        }
    };
    let (kernel, phi): (Distribution, TestFunction) =
        match (spec.distribution(dist), spec.test_function(testfn)) {
            (Ok(k), Ok(p)) => (k, p),
            (Err(e), _) | (_, Err(e)) => {
                eprintln!("input rejected: {e}");
                return 2;
            }
        };
    let axes = match parse_grid(grid) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("input rejected: {msg}");
            return 2;
        }
    };
    if axes.len() != kernel.dim() {
        eprintln!(
            "input rejected: grid has {} axes but the kernel is {}-dimensional",
            axes.len(),
            kernel.dim()
        );
        return 2;
    }
    let points = grid_points(&axes);
    match certify(&kernel) {
        Ok(cert) => match cert.decay_exponent {
            Some(k) => eprintln!("certificate: eps={:.6e}, decay_exponent={k}", cert.eps),
            None => eprintln!("certificate: eps={:.6e}, all atoms bounded", cert.eps),
        },
        Err(e) => {
            if !unsafe_off_hyperplane {
                eprintln!(
                    "certificate rejected: predicate {} failed ({e}); \
                     pass --unsafe-off-hyperplane to evaluate away from the hyperplanes anyway",
                    predicate_name(&e)
                );
                return 2;
            }
            if points.iter().any(|p| p.contains(&0.0)) {
                eprintln!(
                    "input rejected: predicate nonzero_coordinates failed \
                     (--unsafe-off-hyperplane grids must avoid zero coordinates)"
                );
                return 2;
            }
            eprintln!("warning: kernel is uncertified; evaluating off the hyperplanes only");
        }
    }
    let mut csv = String::new();
    for j in 1..=kernel.dim() {
        csv.push_str(&format!("y_{j},"));
    }
    csv.push_str("re,im,error_bound\n");
    for p in &points {
        match apply_multiplicative(&kernel, &phi, p, &cfg) {
            Ok(r) => {
                for &v in p {
                    csv.push_str(&format!("{v:.16e},"));
                }
                csv.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e}\n",
                    r.value.re, r.value.im, r.error_bound
                ));
            }
            Err(e) => {
                eprintln!("evaluation failed at {p:?}: {e}");
                return exit_class(&e);
            }
        }
    }
    if write_output(out, &csv).is_err() {
        eprintln!("input rejected: cannot write output file");
        return 2;
    }
    0
}

fn cmd_verify(suite: &str, out: &Option<PathBuf>, tol: Option<f64>) -> u8 {
    let cfg = match build_config(None, tol) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("input rejected: {msg}");
            return 2;
        }
    };
    let Some(reports) = suites::run(suite, &cfg) else {
        eprintln!(
            "input rejected: unknown suite '{suite}' (expected one of: {}, all)",
            suites::SUITE_NAMES.join(", ")
        );
        return 2;
    };
    for rep in &reports {
        print!("{}", rep.render_text());
    }
    if let Some(path) = out {
        if std::fs::write(path, reports_to_json(&reports)).is_err() {
            eprintln!("input rejected: cannot write output file");
            return 2;
        }
    }
    if reports.iter().all(|r| r.all_pass()) {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let axes = parse_grid("0.5:2:4").unwrap();
        assert_eq!(axes, vec![vec![0.5, 1.0, 1.5, 2.0]]);
        let axes = parse_grid("1:1:1,-2:2:3").unwrap();
        assert_eq!(axes, vec![vec![1.0], vec![-2.0, 0.0, 2.0]]);
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("1:2:0").is_err());
        assert!(parse_grid("a:2:3").is_err());
    }

    #[test]
    fn grid_cartesian_product() {
        let pts = grid_points(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(
            pts,
            vec![
                vec![1.0, 3.0],
                vec![1.0, 4.0],
                vec![2.0, 3.0],
                vec![2.0, 4.0]
            ]
        );
    }

    #[test]
    fn predicate_names_cover_certificate_errors() {
        assert_eq!(
            predicate_name(&Error::SupportTouchesHyperplane),
            "support_in_w_eps"
        );
        assert_eq!(predicate_name(&Error::MissingDecayBound), "decay_witness");
        assert_eq!(
            exit_class(&Error::BudgetExhausted {
                estimate: hadamard_core::Scalar::new(0.0, 0.0),
                error_bound: 1.0
            }),
            1
        );
        assert_eq!(exit_class(&Error::SupportTouchesHyperplane), 2);
    }
}
