//! Pointwise domination of T_a(f, g) by M_2 f M_2 g for three symbol families
//! below the order threshold.

use pdo_lab::suite::parse_symbol;
use pdo_lab::verify::{verify_pointwise_bound, Settings};

fn main() -> pdo_lab::Result<()> {
    let settings = Settings { ladder: vec![64, 128, 256], trials: 10, ..Settings::default() };
    for desc in ["osc:m=-0.8,rho=0.5", "rough:m=-0.8,rho=0.5,seed=7", "band:osc:m=-0.8,rho=0.5"] {
        let a = parse_symbol(desc, 2)?.build()?;
        let report = verify_pointwise_bound(&a, &[2.0, 2.0], &settings)?;
        let sups: Vec<String> = report.level_sups("pointwise").iter().map(|(g, s)| format!("G={g}: {s:.4}")).collect();
        println!("{desc:<28} {:?}  {}", report.verdict, sups.join(", "));
    }
    // above the threshold the experiment is rejected
    let a = parse_symbol("osc:m=-0.45,rho=0.5", 2)?.build()?;
    println!("m = -0.45: {}", verify_pointwise_bound(&a, &[2.0, 2.0], &settings).unwrap_err());
    Ok(())
}
