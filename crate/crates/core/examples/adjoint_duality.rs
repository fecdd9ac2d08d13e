//! The two transposes of a bilinear operator, checked through the pairing
//! <T(f, g), h> = <f, T*1(h, g)> = <g, T*2(f, h)>.

use pdo_lab::grid::GridSpec;
use pdo_lab::operators::{adjoint_bilinear, pairing, AdjointSlot, PreparedSymbol};
use pdo_lab::symbols::random_table_symbol;
use pdo_lab::verify::random_field;

fn main() -> pdo_lab::Result<()> {
    let grid = GridSpec::new(1, 2, 4.0, 32)?;
    for seed in 0..5 {
        let a = random_table_symbol(&grid, seed, true, None)?;
        let (f, g, h) = (random_field(&grid, seed, 0), random_field(&grid, seed, 1), random_field(&grid, seed, 2));
        let lhs = pairing(&PreparedSymbol::new(&a, &grid)?.apply_multilinear(&[f.clone(), g.clone()])?, &h);
        let r1 = pairing(&f, &adjoint_bilinear(&a, AdjointSlot::First, &grid)?.apply(&h, &g)?);
        let r2 = pairing(&g, &adjoint_bilinear(&a, AdjointSlot::Second, &grid)?.apply(&f, &h)?);
        println!(
            "seed {seed}: <T(f,g),h> = {lhs:.6}, relative defects {:.1e}, {:.1e}",
            (lhs - r1).norm() / lhs.norm(),
            (lhs - r2).norm() / lhs.norm()
        );
    }
    Ok(())
}
