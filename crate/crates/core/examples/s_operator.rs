//! The bilinear-to-linear operator S: its L^2 norm equals sup m^{1/2}, with
//! m the multiplier of S S*.

use pdo_lab::grid::GridSpec;
use pdo_lab::operators::{a_constant, s_operator_norm};
use pdo_lab::symbols::{random_table_symbol, separable_bilinear_symbol, FreqProfile};
use pdo_lab::verify::verify_lemma61;

fn main() -> pdo_lab::Result<()> {
    let grid = GridSpec::new(1, 2, 4.0, 32)?;
    for seed in 0..3 {
        let a = random_table_symbol(&grid, seed, false, None)?;
        let big_a = a_constant(&a, &grid)?;
        let power = s_operator_norm(&a, &grid, seed, 20_000)?;
        println!("random table {seed}: A = {big_a:.10}, power iteration {power:.10}");
    }
    let a = separable_bilinear_symbol(FreqProfile::Gaussian { width: 1.0 }, FreqProfile::Gaussian { width: 1.0 }, 1)?;
    let report = verify_lemma61(&a, &grid, 20, 0)?;
    println!("separable Gaussians: {:?}; {}", report.verdict, report.notes.join("; "));
    Ok(())
}
