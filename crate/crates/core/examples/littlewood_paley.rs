//! The dyadic partition of unity: partition sum on the resolved band,
//! rescaled derivative bounds, and the pieces of an oscillatory symbol.

use pdo_lab::grid::GridSpec;
use pdo_lab::lp_decomp::{build_family, check_derivative_bounds, dyadic_piece, LittlewoodPaleyFamily};
use pdo_lab::symbols::{oscillatory_symbol, Arity};

fn main() -> pdo_lab::Result<()> {
    let grid = GridSpec::new(1, 2, 8.0, 256)?;
    let fam = build_family(&grid)?;
    println!("dims {}, K_max {}, resolved radius {}", fam.dims(), fam.max_index(), fam.resolved_radius());

    for r in [0.0, 0.9, 1.5, 3.0, 7.7, fam.resolved_radius()] {
        let parts: Vec<f64> = (0..=fam.max_index()).map(|k| LittlewoodPaleyFamily::radial(k, r)).collect();
        println!("|Xi| = {r:5.2}: sum = {:.15}  pieces {:.3?}", parts.iter().sum::<f64>(), parts);
    }

    let report = check_derivative_bounds(&fam, 2)?;
    for l in &report.levels {
        if l.level == 1 {
            println!("{:<14} sup 2^(k|alpha|)|d^alpha phi_k| at k=1: {:.4}", l.group, l.sup);
        }
    }
    println!("derivative bounds: {:?}", report.verdict);

    let a = oscillatory_symbol(-1.0, 0.5, Arity::new(1, 2))?;
    let x = [0.0];
    for k in 0..=fam.max_index() {
        let piece = dyadic_piece(&a, &fam, k)?;
        let (lo, hi) = LittlewoodPaleyFamily::support(k);
        let mid = (lo + hi) / 2.0;
        println!("a_{k} at |Xi| = {mid:5.1}: {:.4}", piece.eval(&x, &[mid, 0.0]).norm());
    }
    Ok(())
}
