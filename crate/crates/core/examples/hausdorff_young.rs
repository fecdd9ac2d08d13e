//! Mixed-norm Hausdorff-Young for the inverse transform, over random sparse
//! coefficient arrays.

use pdo_lab::grid::GridSpec;
use pdo_lab::verify::{hausdorff_young_constant, verify_hausdorff_young};

fn main() -> pdo_lab::Result<()> {
    for exps in [vec![2.0], vec![1.0], vec![1.5], vec![2.0, 1.0], vec![2.0, 2.0], vec![1.0, 1.0], vec![1.8, 1.2]] {
        let grid = GridSpec::new(1, exps.len(), 4.0, 16)?;
        let report = verify_hausdorff_young(&exps, 200, &grid, 0)?;
        println!(
            "p = {exps:?}: C = {:.4}, largest LHS/(C RHS) = {:.10}, {:?}",
            hausdorff_young_constant(1, &exps),
            report.sup(),
            report.verdict
        );
    }
    Ok(())
}
