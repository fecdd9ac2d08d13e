//! Seminorm estimates for a few symbols and the doubling reading of class
//! membership.

use pdo_lab::symbols::{membership_check, oscillatory_symbol, neg_laplacian_symbol, Arity, ProbeSet};

fn main() -> pdo_lab::Result<()> {
    let arity = Arity::new(1, 2);
    for (name, a) in [
        ("osc m=-1 rho=1/2", oscillatory_symbol(-1.0, 0.5, arity)?),
        ("osc m=-0.5 rho=3/4", oscillatory_symbol(-0.5, 0.75, arity)?),
        ("-|Xi|^2 as S^2_{1,0}", neg_laplacian_symbol(arity)?),
    ] {
        let probes = ProbeSet::standard(arity, 64.0);
        let check = membership_check(&a, 2, 0, &probes)?;
        println!("{name}: claimed {:?}", a.class());
        for (e, g) in check.base.entries.iter().zip(&check.growth) {
            println!("  alpha {:?}: C = {:.4}, doubled/base = {:.4}", e.alpha, e.constant, g);
        }
        println!("  member: {}", check.member);
    }
    Ok(())
}
