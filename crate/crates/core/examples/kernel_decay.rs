//! Off-diagonal kernel decay: the Gaussian symbol against its closed-form
//! kernel, then a power-law fit for an oscillatory symbol.

use std::f64::consts::PI;

use pdo_lab::grid::GridSpec;
use pdo_lab::lp_decomp::build_family;
use pdo_lab::operators::{compute_kernel, fit_kernel_decay, KernelIndex};
use pdo_lab::symbols::{gaussian_symbol, oscillatory_symbol, Arity};

fn main() -> pdo_lab::Result<()> {
    let grid = GridSpec::new(1, 1, 8.0, 128)?;
    let fam = build_family(&grid)?;
    let s = 0.5;
    let k = compute_kernel(&gaussian_symbol(s, Arity::new(1, 1))?, &fam, KernelIndex::Total, &grid)?;
    let mut y = [0.0];
    let mut err: f64 = 0.0;
    for i in 0..grid.points() {
        grid.displacement_point(i, 1, &mut y);
        let exact = (4.0 * PI * s).powf(-0.5) * (-y[0] * y[0] / (4.0 * s)).exp();
        err = err.max((k.at(0, i).re - exact).abs());
    }
    println!("Gaussian kernel vs (4 pi s)^(-1/2) e^(-y^2/4s): max error {err:.2e}");

    let grid = GridSpec::new(1, 1, 16.0, 256)?;
    let fam = build_family(&grid)?;
    let a = oscillatory_symbol(-1.0, 0.5, Arity::new(1, 1))?;
    let k = compute_kernel(&a, &fam, KernelIndex::Summed, &grid)?;
    let report = fit_kernel_decay(&k, &[2.0])?;
    for l in &report.levels {
        println!("{:<24} {:.4}", l.group, l.sup);
    }
    println!("decay of order 2: {:?}", report.verdict);
    Ok(())
}
