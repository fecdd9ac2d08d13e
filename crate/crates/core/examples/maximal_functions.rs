//! Discrete maximal functions: an indicator, L^p maximal functions, the
//! iterated mixed version and the radial convolution majorant.

use pdo_lab::grid::{Field, GridSpec, MultiField};
use pdo_lab::maximal::{iterated_maximal_values, maximal_values};
use pdo_lab::verify::verify_convolution_majorant;

fn main() -> pdo_lab::Result<()> {
    let grid = GridSpec::new(1, 1, 8.0, 256)?;
    let u = Field::from_real_fn(grid, |x| if (0.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 });
    for p in [1.0, 2.0, 4.0] {
        let m = maximal_values(&u, p)?;
        let at = |x: f64| m[((x + 8.0) / grid.spacing()) as usize];
        println!("M_{p} 1_[0,1): at 0.5 {:.4}, at 2 {:.4}, at 5 {:.4}", at(0.5), at(2.0), at(5.0));
    }

    let g2 = GridSpec::new(1, 2, 8.0, 64)?;
    let v = MultiField::from_fn(g2, |x| (-(x[0] * x[0] + 4.0 * x[1] * x[1])).exp().into());
    let it = iterated_maximal_values(&v, &[2.0, 1.5])?;
    println!("iterated M_1.5 M_2 of a Gaussian: max {:.4}", it.iter().fold(0.0f64, |a, &b| a.max(b)));

    let report = verify_convolution_majorant(&grid, 20, 0)?;
    println!("|phi * u| <= ||phi||_1 M u for 20 radial profiles: {:?}, largest ratio {:.6}", report.verdict, report.sup());
    Ok(())
}
