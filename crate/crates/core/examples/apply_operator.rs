//! Applying multilinear operators: the constant symbol gives the product,
//! a translation symbol shifts each input, and the FFT route agrees with the
//! direct lattice sum for x-dependent symbols.

use pdo_lab::grid::{Field, GridSpec, Sampled};
use pdo_lab::operators::{apply_multilinear, PreparedSymbol};
use pdo_lab::symbols::{constant_symbol, rough_x_symbol, translation_symbol, Arity, XFactor};

fn max_diff(a: &[pdo_lab::Complex64], b: &[pdo_lab::Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn main() -> pdo_lab::Result<()> {
    let grid = GridSpec::new(1, 2, 8.0, 128)?;
    let f = Field::from_real_fn(grid, |x| (-x[0] * x[0]).exp());
    let g = Field::from_real_fn(grid, |x| (x[0] / 2.0).cos() * (-x[0] * x[0] / 8.0).exp());

    let one = constant_symbol(1.0, Arity::new(1, 2))?;
    let t = apply_multilinear(&one, &[f.clone(), g.clone()])?;
    let fg: Vec<_> = f.values().iter().zip(g.values()).map(|(a, b)| a * b).collect();
    println!("T_1(f, g) vs f g: {:.2e}", max_diff(t.values(), &fg));

    // e^{i(xi + eta)} evaluates f and g at x + 1; h = 1/8 so the shift is 8 cells
    let shift = translation_symbol(vec![1.0], 2)?;
    let t = apply_multilinear(&shift, &[f.clone(), g.clone()])?;
    let shifted: Vec<_> = (0..grid.points()).map(|i| fg[(i + 8) % grid.points()]).collect();
    println!("translation by 1 vs shifted product: {:.2e}", max_diff(t.values(), &shifted));

    let rough = rough_x_symbol(-0.8, 0.5, XFactor::RandomSigns { seed: 7, cell: 1.0 }, Arity::new(1, 2))?;
    let op = PreparedSymbol::new(&rough, &GridSpec::new(1, 2, 8.0, 64)?)?;
    let g64 = *op.grid();
    let (f, g) = (Field::from_real_fn(g64, |x| (-x[0] * x[0]).exp()), Field::from_real_fn(g64, |x| x[0].sin()));
    let fast = op.apply_multilinear(&[f.clone(), g.clone()])?;
    let direct = op.apply_multilinear_direct(&[f, g])?;
    println!("rough-x symbol, branch FFT vs direct sum: {:.2e}", max_diff(fast.values(), direct.values()));
    Ok(())
}
