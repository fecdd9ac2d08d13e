//! Transforms on the half-shifted periodic lattice: a Gaussian against its
//! closed-form transform, Plancherel, and the round trip.

use std::f64::consts::PI;

use pdo_lab::grid::{forward_ft, inverse_ft, lp_norm, Field, GridSpec, Sampled};

fn main() -> pdo_lab::Result<()> {
    let grid = GridSpec::new(1, 1, 16.0, 512)?;
    println!("h = {}, dxi = {}, Nyquist = {:.4}", grid.spacing(), grid.freq_spacing(), grid.nyquist());

    let u = Field::from_real_fn(grid, |x| (-x[0] * x[0] / 2.0).exp());
    let spec = forward_ft(&u);
    let mut xi = [0.0];
    let mut err: f64 = 0.0;
    for (c, v) in spec.values().iter().enumerate() {
        grid.freq_point(c, 1, &mut xi);
        err = err.max((v.re - (2.0 * PI).sqrt() * (-xi[0] * xi[0] / 2.0).exp()).abs() + v.im.abs());
    }
    println!("max |u^ - sqrt(2 pi) e^(-xi^2/2)| = {err:.2e}");

    // ||u||_2^2 = (2 pi)^{-1} ||u^||_2^2
    let lhs = lp_norm(&u, 2.0, None)?;
    let rhs = spec.lp_norm(2.0)? / (2.0 * PI).sqrt();
    println!("Plancherel: {lhs:.15} vs {rhs:.15}");

    let back = inverse_ft(&spec)?;
    let trip = back.values().iter().zip(u.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("round trip error {trip:.2e}");
    Ok(())
}
