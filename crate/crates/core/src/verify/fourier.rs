use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use serde_json::json;

use super::BoundReport;
use crate::error::{Error, Result};
use crate::grid::{check_exponent, inverse_ft_multi, mixed_norm, mixed_norm_spectrum, GridSpec, Spectrum};

fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Constant `prod_j (2 pi)^{n/p_j'}` of the lattice inequality; 1 when every `p_j = 1`.
pub fn hausdorff_young_constant(n: usize, exponents: &[f64]) -> f64 {
    exponents.iter().map(|&p| (2.0 * PI).powf(n as f64 * (1.0 - 1.0 / p))).product()
}

// Complex Gaussian coefficients with log-normal magnitudes and random sparsity.
fn random_coefficients(grid: &GridSpec, dims: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let keep: f64 = rng.random_range(0.05..1.0);
    let spread: f64 = rng.random_range(0.0..3.0);
    (0..grid.len(dims))
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let s: f64 = rng.sample(StandardNormal);
            if rng.random::<f64>() < keep {
                Complex64::new(re, im) * (spread * s).exp()
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect()
}

/// `K(x) = sum_Xi a(Xi) e^{i x.Xi} (pi/L)^{nN}` against `a` in mixed norms:
/// `||K||_{L^{p_1'}..L^{p_N'}} <= prod_j (2 pi)^{n/p_j'} ||a||_{L^{p_1}..L^{p_N}}`.
///
/// The blocks of `grid` carry the exponents, innermost first.
pub fn verify_hausdorff_young(exponents: &[f64], trials: usize, grid: &GridSpec, seed: u64) -> Result<BoundReport> {
    let start = Instant::now();
    if exponents.len() != grid.blocks() {
        return Err(Error::Shape(format!("expected {} exponents, got {}", grid.blocks(), exponents.len())));
    }
    for &p in exponents {
        check_exponent(p)?;
        if p > 2.0 {
            return Err(Error::Exponent(format!("exponents must lie in [1, 2], got {p}")));
        }
    }
    for w in exponents.windows(2) {
        if w[1] > w[0] {
            return Err(Error::Exponent(format!("need p_N <= .. <= p_1, got {exponents:?}")));
        }
    }
    let n = grid.n();
    let dims = grid.product_dims();
    let dual: Vec<f64> = exponents.iter().map(|&p| conjugate(p)).collect();
    let c = hausdorff_young_constant(n, exponents);
    let kernel_scale = (2.0 * PI).powi(dims as i32);
    let mut report = BoundReport::new(
        "hausdorff_young",
        "mixed-norm Hausdorff-Young inequality for the inverse-transform kernel",
        json!({ "exponents": exponents, "grid": grid, "trials": trials, "seed": seed, "constant": c }),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ok = true;
    for t in 0..trials {
        let spec = Spectrum::new(*grid, dims, random_coefficients(grid, dims, &mut rng))?;
        let rhs = c * mixed_norm_spectrum(&spec, exponents)?;
        let k = inverse_ft_multi(&spec)?.scale(Complex64::new(kernel_scale, 0.0));
        let lhs = mixed_norm(&k, &dual)?;
        let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
        ok &= lhs <= rhs * (1.0 + 1e-8);
        report.record("ratio", grid.points(), seed + t as u64, ratio, 0);
    }
    report.finish("LHS <= C RHS (1 + 1e-8) on every trial", ok);
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
