//! A linear operator on R^2 viewed as R x R, bounded between mixed-norm
//! spaces through the iterated maximal function.

use pdo_lab::grid::{mixed_norm, GridSpec, MultiField};
use pdo_lab::symbols::SymbolSpec;
use pdo_lab::verify::{verify_mixed_norm, Settings};

fn main() -> pdo_lab::Result<()> {
    let g = GridSpec::new(1, 2, 8.0, 64)?;
    let u = MultiField::from_fn(g, |x| (-(x[0] * x[0]) - 3.0 * (x[1] - 1.0).powi(2)).exp().into());
    for exps in [[2.0, 2.0], [1.0, 2.0], [2.0, 1.0], [f64::INFINITY, 1.0]] {
        println!("||u||_(L^{} in x1, L^{} in x2) = {:.6}", exps[0], exps[1], mixed_norm(&u, &exps)?);
    }

    let a = SymbolSpec::Oscillatory { m: -1.0, rho: 0.5, n: 2, blocks: 1 }.build()?;
    let settings = Settings { ladder: vec![16, 32, 64], ..Settings::default() };
    let report = verify_mixed_norm(&a, &[1.5, 1.5], &[2.0, 2.0], &settings)?;
    for l in &report.levels {
        println!("{:<10} G={:<3} sup {:.4}", l.group, l.level, l.sup);
    }
    println!("{:?}: {}", report.verdict, report.criterion);
    Ok(())
}
