//! Order-zero bilinear symbols under the local L^2 condition: the condition
//! itself, global ratios on the L^2 triangle and the local estimate.

use pdo_lab::grid::GridSpec;
use pdo_lab::suite::local_l2_symbol;
use pdo_lab::symbols::hypo_functional;
use pdo_lab::verify::{thm63_triples, verify_thm63, Settings};

fn main() -> pdo_lab::Result<()> {
    let a = local_l2_symbol().build()?;
    let grid = GridSpec::new(1, 2, 8.0, 64)?;
    let x0: Vec<Vec<f64>> = (-3..=3).map(|c| vec![c as f64]).collect();
    let zeta: Vec<Vec<i64>> = [0, 1, -1, 4, -4].iter().map(|&k| vec![k]).collect();
    let hypo = hypo_functional(&a, 2, &grid, &x0, &zeta)?;
    for l in &hypo.levels {
        println!("local condition {:<10} level {} sup {:.4}", l.group, l.level, l.sup);
    }

    let settings = Settings { trials: 10, ..Settings::default() };
    let report = verify_thm63(&a, &thm63_triples(), &settings)?;
    for g in report.groups() {
        println!("{g:<16} {:.4?}", report.level_sups(&g));
    }
    println!("{:?}", report.verdict);
    Ok(())
}
