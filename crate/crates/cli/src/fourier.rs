//! FFT cross-check of the quadrature Fourier transform, and Richardson
//! extrapolation of central differences for derivatives of numerically
//! evaluated functions.

use anyhow::Result;
use hadamard_core::{MultiIndex, PairingConfig, Scalar, TestFunction};
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Compare `φ̂(2πk/L)` computed by FFT of equispaced samples against the
/// adaptive-quadrature transform, for the given frequency bins.  `φ` must be
/// supported inside `[-L/2, L/2]`; since `φ` is smooth and compactly
/// supported the rectangle rule underlying the FFT is spectrally accurate.
///
/// Returns `(ξ_k, fft value, quadrature value)` triples.
pub fn fft_cross_check(
    phi: &TestFunction,
    len: f64,
    n: usize,
    bins: &[usize],
    cfg: &PairingConfig,
) -> Result<Vec<(f64, Complex64, Complex64)>> {
    assert_eq!(phi.dim(), 1);
    let support = phi.support_cell();
    assert!(
        support.lo[0] >= -len / 2.0 && support.hi[0] <= len / 2.0,
        "support must fit inside [-len/2, len/2]"
    );
    let mut samples: Vec<Complex64> = (0..n)
        .map(|i| {
            let x = -len / 2.0 + len * i as f64 / n as f64;
            Complex64::new(phi.eval(&[x]), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut samples);
    let zero = MultiIndex::zeros(1);
    let mut out = Vec::new();
    for &k in bins {
        assert!(k < n / 2);
        let xi = 2.0 * std::f64::consts::PI * k as f64 / len;
        // shift the origin from the left endpoint back to the center
        let phase = if k % 2 == 0 { 1.0 } else { -1.0 };
        let fft_val = samples[k] * (len / n as f64) * phase;
        let quad_val = phi
            .fourier_derivative(&zero, &[xi], cfg)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        out.push((xi, fft_val, Complex64::new(quad_val.re, quad_val.im)));
    }
    Ok(out)
}

/// `d^order/dy^order f(y)` by central differences over step sizes
/// `h0, h0/2, …` with Neville extrapolation in `h²`.  Supports orders `0..=2`.
pub fn richardson_derivative(
    f: &mut dyn FnMut(f64) -> Result<Scalar>,
    order: u32,
    y: f64,
    h0: f64,
    levels: usize,
) -> Result<Scalar> {
    assert!(order <= 2, "only orders 0..=2 are implemented");
    assert!(levels >= 1);
    if order == 0 {
        return f(y);
    }
    let mut diff = |h: f64| -> Result<Scalar> {
        match order {
            1 => Ok((f(y + h)? - f(y - h)?) / (2.0 * h)),
            _ => Ok((f(y + h)? - 2.0 * f(y)? + f(y - h)?) / (h * h)),
        }
    };
    // Neville tableau in powers of h²: both stencils have even error series
    let mut tableau: Vec<Vec<Scalar>> = Vec::with_capacity(levels);
    for i in 0..levels {
        let h = h0 / 2f64.powi(i as i32);
        let mut row = vec![diff(h)?];
        for j in 1..=i {
            let factor = 4f64.powi(j as i32) - 1.0;
            let prev = row[j - 1];
            let above = tableau[i - 1][j - 1];
            row.push(prev + (prev - above) / factor);
        }
        tableau.push(row);
    }
    Ok(tableau[levels - 1][levels - 1])
}
