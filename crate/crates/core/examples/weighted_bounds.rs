//! Weighted estimates: multilinear bounds with A_p weights, and linear
//! operators whose symbols are only L^p in x.

use pdo_lab::suite::{lp_class_symbol, parse_symbol};
use pdo_lab::verify::{verify_linear_weighted, verify_weighted_bound, Settings};
use pdo_lab::weights::WeightSpec;

fn main() -> pdo_lab::Result<()> {
    let settings = Settings { trials: 10, ..Settings::default() };
    let a = parse_symbol("osc:m=-0.8,rho=0.5", 2)?.build()?;
    for w in [WeightSpec::Unit, WeightSpec::Power { gamma: 0.5 }] {
        let r = verify_weighted_bound(&a, &[4.0, 4.0], &[2.0, 2.0], &[w.clone(), w.clone()], &settings)?;
        println!("bilinear, w = {w:?}: {:?}, norm sups {:.4?}", r.verdict, r.level_sups("norm"));
    }

    let a = lp_class_symbol().build()?;
    let unit = WeightSpec::Unit;
    for (q, r, w) in [(2.0, 1.0, unit.clone()), (4.0, 4.0 / 3.0, WeightSpec::Power { gamma: 0.5 }), (f64::INFINITY, 2.0, unit.clone())] {
        let rep = verify_linear_weighted(&a, 2.0, q, r, &unit, &w, &settings)?;
        println!("linear, q = {q}, r = {r:.4}, w = {w:?}: {:?}, sups {:.4?}", rep.verdict, rep.level_sups("norm"));
    }
    Ok(())
}
