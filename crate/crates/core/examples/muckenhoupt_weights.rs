//! Discrete A_p constants of power weights under grid refinement.

use pdo_lab::grid::GridSpec;
use pdo_lab::weights::{ap_constant, power_weight, unit_weight};

fn main() -> pdo_lab::Result<()> {
    let g = GridSpec::new(1, 1, 8.0, 64)?;
    println!("[1]_A2 = {}", ap_constant(&unit_weight(&g), 2.0)?);
    for gamma in [0.5, -0.5, -1.5] {
        let row: Vec<String> = [16, 64, 256, 1024]
            .iter()
            .map(|&pts| {
                let g = GridSpec::new(1, 1, 8.0, pts).unwrap();
                format!("{:.3}", ap_constant(&power_weight(gamma, &g), 2.0).unwrap())
            })
            .collect();
        println!("|x|^{gamma}: A2 on G = 16, 64, 256, 1024: {}", row.join(", "));
    }
    Ok(())
}
