//! Littlewood–Paley partition of unity on the product frequency space.
//!
//! `phi_0 = 1` on `|Xi| <= 1`, `0` on `|Xi| >= 2`, and `1 - s(|Xi| - 1)` in
//! between, with `s` the standard smooth step. For `k >= 1`,
//! `phi_k(Xi) = phi_0(2^-k Xi) - phi_0(2^{1-k} Xi)`, supported in
//! `2^{k-1} <= |Xi| <= 2^{k+1}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::symbols::SymbolModel;
use crate::verify::report::{ladder_stable, BoundReport};

/// `e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})`, clamped to 0 and 1 outside `(0, 1)`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Radial profile of `phi_0`.
pub fn bump(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        1.0 - smooth_step(r - 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LittlewoodPaleyFamily {
    dims: usize,
    max_index: u32,
}

/// Family on the `nN`-dimensional frequency lattice of `grid`.
pub fn build_family(grid: &GridSpec) -> Result<LittlewoodPaleyFamily> {
    let k = grid.nyquist().log2().floor();
    if k < 2.0 {
        return Err(Error::InvalidGrid(format!(
            "Nyquist radius {} resolves fewer than two dyadic scales",
            grid.nyquist()
        )));
    }
    Ok(LittlewoodPaleyFamily { dims: grid.product_dims(), max_index: k as u32 })
}

impl LittlewoodPaleyFamily {
    pub fn new(dims: usize, max_index: u32) -> Self {
        LittlewoodPaleyFamily { dims, max_index }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn max_index(&self) -> u32 {
        self.max_index
    }

    /// `phi_k` as a function of `|Xi|`.
    pub fn radial(k: u32, r: f64) -> f64 {
        if k == 0 {
            bump(r)
        } else {
            let s = (2.0f64).powi(-(k as i32));
            bump(s * r) - bump(2.0 * s * r)
        }
    }

    pub fn phi(&self, k: u32, xi: &[f64]) -> f64 {
        Self::radial(k, norm(xi))
    }

    /// Closed annulus containing the support of `phi_k`.
    pub fn support(k: u32) -> (f64, f64) {
        if k == 0 {
            (0.0, 2.0)
        } else {
            (2f64.powi(k as i32 - 1), 2f64.powi(k as i32 + 1))
        }
    }

    /// `sum_{k=lo}^{hi} phi_k(Xi)`.
    pub fn window(lo: u32, hi: u32, r: f64) -> f64 {
        (lo..=hi).map(|k| Self::radial(k, r)).sum()
    }

    /// Radius below which `sum_{k <= K} phi_k = 1`.
    pub fn resolved_radius(&self) -> f64 {
        2f64.powi(self.max_index as i32 - 1)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// All multi-indices in `dims` variables with total order exactly `order`.
pub fn multi_indices(dims: usize, order: usize) -> Vec<Vec<usize>> {
    fn rec(dims: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == dims {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in (0..=left).rev() {
            cur.push(a);
            rec(dims, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if dims > 0 {
        rec(dims, order, &mut Vec::new(), &mut out);
    }
    out
}

/// Fourth-order central stencil for derivatives of order 1 to 3, unit step.
pub(crate) fn stencil(order: usize) -> &'static [(i32, f64)] {
    const D0: [(i32, f64); 1] = [(0, 1.0)];
    const D1: [(i32, f64); 4] = [(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)];
    const D2: [(i32, f64); 5] = [
        (-2, -1.0 / 12.0),
        (-1, 16.0 / 12.0),
        (0, -30.0 / 12.0),
        (1, 16.0 / 12.0),
        (2, -1.0 / 12.0),
    ];
    const D3: [(i32, f64); 6] = [
        (-3, 1.0 / 8.0),
        (-2, -1.0),
        (-1, 13.0 / 8.0),
        (1, -13.0 / 8.0),
        (2, 1.0),
        (3, -1.0 / 8.0),
    ];
    match order {
        0 => &D0,
        1 => &D1,
        2 => &D2,
        3 => &D3,
        _ => panic!("stencils are provided up to order 3"),
    }
}

/// Tensor-product finite difference `d^alpha f(x)` with per-axis steps.
pub(crate) fn finite_difference<T>(alpha: &[usize], x: &[f64], steps: &[f64], f: impl Fn(&[f64]) -> T) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let axes: Vec<usize> = (0..alpha.len()).filter(|&a| alpha[a] > 0).collect();
    let scale: f64 = axes.iter().map(|&a| steps[a].powi(-(alpha[a] as i32))).product();
    let mut probe = x.to_vec();
    let mut acc: Option<T> = None;
    let mut pos = vec![0usize; axes.len()];
    loop {
        let mut w = scale;
        for (i, &a) in axes.iter().enumerate() {
            let (off, c) = stencil(alpha[a])[pos[i]];
            probe[a] = x[a] + off as f64 * steps[a];
            w *= c;
        }
        let v = f(&probe) * w;
        acc = Some(match acc {
            Some(s) => s + v,
            None => v,
        });
        let mut i = 0;
        loop {
            if i == axes.len() {
                return acc.expect("at least one stencil point");
            }
            pos[i] += 1;
            if pos[i] < stencil(alpha[axes[i]]).len() {
                break;
            }
            pos[i] = 0;
            probe[axes[i]] = x[axes[i]];
            i += 1;
        }
    }
}

fn probe_directions(dims: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for a in 0..dims {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; dims];
            d[a] = s;
            dirs.push(d);
        }
    }
    if dims > 1 {
        dirs.push(vec![1.0 / (dims as f64).sqrt(); dims]);
        let mut rng = ChaCha8Rng::seed_from_u64(0x1a9);
        for _ in 0..8 {
            let v: Vec<f64> = (0..dims).map(|_| StandardNormal.sample(&mut rng)).collect();
            let r = norm(&v);
            dirs.push(v.into_iter().map(|c| c / r).collect());
        }
    }
    dirs
}

/// Estimates `sup_Xi 2^{k|alpha|} |d^alpha phi_k(Xi)|` for each `k = 1..=K_max`
/// and each `|alpha| <= alpha_max`, using steps `2^k 10^-3`.
///
/// Passes when the `alpha = 0` value is at most `1 + 1e-12` and, for every
/// `alpha != 0`, the estimates agree across `k` within 5%.
pub fn check_derivative_bounds(fam: &LittlewoodPaleyFamily, alpha_max: usize) -> Result<BoundReport> {
    check_derivative_bounds_upto(fam, alpha_max, fam.max_index)
}

/// As [`check_derivative_bounds`] with the scale range capped at `k_top`.
pub fn check_derivative_bounds_upto(
    fam: &LittlewoodPaleyFamily,
    alpha_max: usize,
    k_top: u32,
) -> Result<BoundReport> {
    if alpha_max > 3 {
        return Err(Error::Parameter(format!("derivative order {alpha_max} exceeds 3")));
    }
    let k_top = k_top.min(fam.max_index);
    let mut report = BoundReport::new(
        "littlewood_paley_derivatives",
        "rescaled derivatives 2^{k|alpha|} d^alpha phi_k are bounded uniformly in k",
        json!({ "dims": fam.dims, "alpha_max": alpha_max, "k_range": [1, k_top] }),
    );
    let dirs = probe_directions(fam.dims);
    let radii: Vec<f64> = (0..=320).map(|i| 0.45 + 1.6 * i as f64 / 320.0).collect();
    let mut ok = true;
    for order in 0..=alpha_max {
        for alpha in multi_indices(fam.dims, order) {
            let group = format!("alpha={:?}", alpha);
            let mut per_k = Vec::new();
            for k in 1..=k_top {
                let scale = 2f64.powi(k as i32);
                let steps = vec![scale * 1e-3; fam.dims];
                let mut best: f64 = 0.0;
                let mut xi = vec![0.0; fam.dims];
                for d in &dirs {
                    for &r in &radii {
                        for (a, c) in d.iter().enumerate() {
                            xi[a] = scale * r * c;
                        }
                        let v = if order == 0 {
                            fam.phi(k, &xi)
                        } else {
                            finite_difference(&alpha, &xi, &steps, |p| fam.phi(k, p))
                        };
                        best = best.max(v.abs() * scale.powi(order as i32));
                    }
                }
                report.record(&group, k as usize, 0, best, 0);
                per_k.push(best);
            }
            let pass = if order == 0 {
                per_k.iter().all(|&v| v <= 1.0 + 1e-12)
            } else {
                ladder_stable(&per_k, 1.05)
            };
            ok &= pass;
        }
    }
    report.finish(
        "alpha = 0: sup <= 1 + 1e-12; otherwise max/min over k <= 1.05",
        ok,
    );
    Ok(report)
}

/// The piece `a_k(x, Xi) = a(x, Xi) phi_k(Xi)`.
pub fn dyadic_piece(a: &SymbolModel, fam: &LittlewoodPaleyFamily, k: u32) -> Result<SymbolModel> {
    if k > fam.max_index {
        return Err(Error::Parameter(format!(
            "dyadic index {k} exceeds the largest resolved index {}",
            fam.max_index
        )));
    }
    a.windowed(k, k)
}

/// `sum_{k=lo}^{hi} a_k`.
pub fn dyadic_window(a: &SymbolModel, fam: &LittlewoodPaleyFamily, lo: u32, hi: u32) -> Result<SymbolModel> {
    if hi > fam.max_index || lo > hi {
        return Err(Error::Parameter(format!(
            "dyadic window {lo}..={hi} outside 0..={}",
            fam.max_index
        )));
    }
    a.windowed(lo, hi)
}
