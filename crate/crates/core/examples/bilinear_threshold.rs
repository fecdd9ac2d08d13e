//! The order threshold for bilinear boundedness over the exponent triangle,
//! and a measurement at a few triples below it.

use pdo_lab::grid::ExponentTriple;
use pdo_lab::suite::parse_symbol;
use pdo_lab::verify::{bilinear_threshold, verify_bilinear_bound, Settings};

fn main() -> pdo_lab::Result<()> {
    let rho = 0.5;
    println!("  1/p   1/q   stronger  weaker   region");
    for (a, b) in [(0.5, 0.5), (0.0, 0.5), (0.5, 0.0), (0.0, 1.0), (1.0, 0.0), (0.0, 0.0), (0.25, 0.25), (0.75, 0.1)] {
        let t = ExponentTriple::from_reciprocals(a, b, a + b)?;
        let th = bilinear_threshold(rho, 1, &t);
        println!("{a:6.2}{b:6.2}  {:8.4}  {:7.4}  {:?}", th.stronger, th.weaker, th.region);
    }

    let a = parse_symbol("osc:m=-0.55,rho=0.5", 2)?.build()?;
    let triples = [ExponentTriple::new(2.0, 2.0, 1.0)?, ExponentTriple::new(f64::INFINITY, 2.0, 2.0)?];
    let settings = Settings { trials: 10, ..Settings::default() };
    let report = verify_bilinear_bound(&a, &triples, &settings)?;
    for g in report.groups() {
        println!("{g:<16} {:.4?}", report.level_sups(&g));
    }
    println!("{:?}", report.verdict);
    Ok(())
}
