// Per-axis DFT plans for the two lattices used by the crate.
//
// The spatial lattice sits at y_d = (d - G/2 + o) h, with o = 1/2 for the
// x-grid and o = 0 for displacements. Frequencies are xi_c = (c - G/2) dxi.
// Both are stored with the centered index c, d in 0..G.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Lattice {
    Shifted,
    Centered,
}

impl Lattice {
    fn offset(self) -> f64 {
        match self {
            Lattice::Shifted => 0.5,
            Lattice::Centered => 0.0,
        }
    }

    // Value of a transform at frequency index k + sG relative to index k.
    pub(crate) fn alias_sign(self, periods: i64) -> f64 {
        match self {
            Lattice::Shifted if periods.rem_euclid(2) == 1 => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

struct AxisPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    sign: Vec<f64>,
    fwd_post: Vec<Complex64>,
    inv_pre: Vec<Complex64>,
    inv_post: Vec<Complex64>,
    scratch_len: usize,
}

impl AxisPlan {
    fn new(planner: &mut FftPlanner<f64>, g: usize, lattice: Lattice) -> Self {
        let forward = planner.plan_fft_forward(g);
        let inverse = planner.plan_fft_inverse(g);
        let o = lattice.offset();
        let gf = g as f64;
        let sign: Vec<f64> = (0..g).map(|d| if d % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let global = Complex64::from_polar(1.0, PI * (o - gf / 2.0));
        let fwd_post = (0..g)
            .map(|c| Complex64::from_polar(1.0, PI * c as f64 * (1.0 - 2.0 * o / gf)) * global)
            .collect();
        let inv_pre = (0..g)
            .map(|c| Complex64::from_polar(1.0, -PI * c as f64 * (1.0 - 2.0 * o / gf)))
            .collect();
        let inv_post = (0..g).map(|d| sign[d] * global.conj() / gf).collect();
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        AxisPlan {
            forward,
            inverse,
            sign,
            fwd_post,
            inv_pre,
            inv_post,
            scratch_len,
        }
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    static PLANS: RefCell<HashMap<(usize, Lattice), Rc<AxisPlan>>> = RefCell::new(HashMap::new());
}

fn plan(g: usize, lattice: Lattice) -> Rc<AxisPlan> {
    PLANS.with(|plans| {
        plans
            .borrow_mut()
            .entry((g, lattice))
            .or_insert_with(|| {
                PLANNER.with(|p| Rc::new(AxisPlan::new(&mut p.borrow_mut(), g, lattice)))
            })
            .clone()
    })
}

/// Transforms a row-major array with `dims` axes of side `g` in place.
///
/// Forward: `h^dims * sum_y u(y) e^{-i xi.y}`.
/// Inverse: `(dxi / 2pi)^dims * sum_xi v(xi) e^{+i xi.y}`.
pub(crate) fn transform(
    values: &mut [Complex64],
    g: usize,
    dims: usize,
    h: f64,
    lattice: Lattice,
    dir: Direction,
) {
    debug_assert_eq!(values.len(), g.pow(dims as u32));
    let plan = plan(g, lattice);
    let mut line = vec![Complex64::new(0.0, 0.0); g];
    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.scratch_len];
    for axis in 0..dims {
        let stride = g.pow((dims - 1 - axis) as u32);
        let outer = values.len() / (stride * g);
        for o in 0..outer {
            for i in 0..stride {
                let base = o * stride * g + i;
                match dir {
                    Direction::Forward => {
                        for d in 0..g {
                            line[d] = values[base + d * stride] * plan.sign[d];
                        }
                        plan.forward.process_with_scratch(&mut line, &mut scratch);
                        for c in 0..g {
                            values[base + c * stride] = line[c] * plan.fwd_post[c] * h;
                        }
                    }
                    Direction::Inverse => {
                        for c in 0..g {
                            line[c] = values[base + c * stride] * plan.inv_pre[c];
                        }
                        plan.inverse.process_with_scratch(&mut line, &mut scratch);
                        for d in 0..g {
                            values[base + d * stride] = line[d] * plan.inv_post[d] / h;
                        }
                    }
                }
            }
        }
    }
}
