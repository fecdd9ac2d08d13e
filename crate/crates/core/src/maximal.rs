//! Discrete `L^p` maximal functions over centered periodic lattice cubes.
//!
//! The competitors at a point are the cubes of side `2r + 1` centered there,
//! `r = 0..G/2 - 1`, and the whole torus. The `r = 0` cube makes `M_p u >= |u|`.

use std::f64::consts::PI;

use serde_json::json;

use crate::error::{Error, Result};
use crate::grid::{check_exponent, Field, GridSpec, MultiField, Sampled};
use crate::verify::report::BoundReport;
use crate::weights::{box_extreme, box_sums, cube_count, cube_radii};

/// `sup_Q (|Q|^{-1} sum_Q v)` over the cube family, for nonnegative `v`.
pub(crate) fn maximal_average(v: &[f64], g: usize, dims: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    for r in cube_radii(g) {
        let count = cube_count(g, dims, r);
        let avg: Vec<f64> = box_sums(v, g, dims, r).into_iter().map(|s| s / count).collect();
        // a cube of half-width r centered at c contains x iff |x - c| <= r
        let reach = box_extreme(&avg, g, dims, r, true);
        for (o, a) in out.iter_mut().zip(reach) {
            *o = o.max(a);
        }
    }
    out
}

fn check_p(p: f64) -> Result<()> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Err(Error::Exponent("maximal functions use finite p".into()));
    }
    Ok(())
}

fn powered(u: &[rustfft::num_complex::Complex64], p: f64) -> Vec<f64> {
    u.iter().map(|z| if p == 1.0 { z.norm() } else { z.norm().powf(p) }).collect()
}

fn root(v: Vec<f64>, p: f64) -> Vec<f64> {
    if p == 1.0 {
        v
    } else {
        v.into_iter().map(|s| s.powf(1.0 / p)).collect()
    }
}

/// Real samples of `M_p u`.
pub fn maximal_values(u: &Field, p: f64) -> Result<Vec<f64>> {
    check_p(p)?;
    let g = u.grid().points();
    Ok(root(maximal_average(&powered(u.values(), p), g, u.dims()), p))
}

/// `M_p u (x) = sup_{Q containing x} (|Q|^{-1} int_Q |u|^p)^{1/p}`.
pub fn maximal_fn(u: &Field, p: f64) -> Result<Field> {
    let v = maximal_values(u, p)?;
    Field::new(*u.grid(), v.into_iter().map(|a| a.into()).collect())
}

/// Applies `M_p` along block `block` of a product-lattice array.
pub(crate) fn block_maximal(values: &[f64], grid: &GridSpec, block: usize, p: f64) -> Vec<f64> {
    let n = grid.n();
    let g = grid.points();
    let b = grid.block_len();
    let stride = grid.len(n * (grid.blocks() - 1 - block));
    let outer = values.len() / (b * stride);
    let mut out = vec![0.0; values.len()];
    let mut line = vec![0.0; b];
    for o in 0..outer {
        for i in 0..stride {
            let base = o * b * stride + i;
            for (t, l) in line.iter_mut().enumerate() {
                let v = values[base + t * stride];
                *l = if p == 1.0 { v } else { v.powf(p) };
            }
            let m = root(maximal_average(&line, g, n), p);
            for (t, v) in m.into_iter().enumerate() {
                out[base + t * stride] = v;
            }
        }
    }
    out
}

/// Real samples of `M^{(N)}_{p_N}( ... M^{(1)}_{p_1} u)`.
pub fn iterated_maximal_values(u: &MultiField, exponents: &[f64]) -> Result<Vec<f64>> {
    let grid = *u.grid();
    if exponents.len() != grid.blocks() {
        return Err(Error::Shape(format!(
            "expected {} exponents, got {}",
            grid.blocks(),
            exponents.len()
        )));
    }
    for &p in exponents {
        check_p(p)?;
    }
    let mut v: Vec<f64> = u.values().iter().map(|z| z.norm()).collect();
    for (j, &p) in exponents.iter().enumerate() {
        v = block_maximal(&v, &grid, j, p);
    }
    Ok(v)
}

pub fn iterated_maximal(u: &MultiField, exponents: &[f64]) -> Result<MultiField> {
    let v = iterated_maximal_values(u, exponents)?;
    MultiField::new(*u.grid(), v.into_iter().map(|a| a.into()).collect())
}

/// Samples a profile of `|y|_inf` on the displacement lattice of one block.
pub fn radial_profile(grid: &GridSpec, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = grid.n();
    let mut y = vec![0.0; n];
    (0..grid.block_len())
        .map(|i| {
            grid.displacement_point(i, n, &mut y);
            f(y.iter().fold(0.0, |m: f64, v| m.max(v.abs())))
        })
        .collect()
}

fn validate_profile(grid: &GridSpec, phi: &[f64]) -> Result<()> {
    if phi.len() != grid.block_len() {
        return Err(Error::Shape("profile must live on the displacement lattice".into()));
    }
    if phi.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Parameter("profile must be finite and nonnegative".into()));
    }
    let n = grid.n();
    let half = (grid.points() / 2) as i64;
    // level per |m|_inf, m the signed displacement index
    let mut level: Vec<Option<f64>> = vec![None; half as usize + 1];
    for (i, &v) in phi.iter().enumerate() {
        let mut rest = i;
        let mut r = 0i64;
        for _ in 0..n {
            let m = (rest % grid.points()) as i64 - half;
            rest /= grid.points();
            r = r.max(m.abs());
        }
        let slot = &mut level[r as usize];
        match slot {
            None => *slot = Some(v),
            Some(prev) => {
                if (*prev - v).abs() > 1e-12 * prev.abs().max(v.abs()) {
                    return Err(Error::Parameter(format!(
                        "profile is not radial: values {prev} and {v} at |y|_inf index {r}"
                    )));
                }
            }
        }
    }
    let levels: Vec<f64> = level.into_iter().flatten().collect();
    if levels.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-12)) {
        return Err(Error::Parameter("profile increases with |y|".into()));
    }
    Ok(())
}

/// Checks `int phi(y) |u(x - y)| dy <= ||phi||_1 M u (x)` at every lattice point.
///
/// `phi` is sampled on the displacement lattice and must depend on `|y|_inf`
/// only, without increasing.
pub fn convolution_majorant_check(phi: &[f64], u: &Field) -> Result<BoundReport> {
    let grid = *u.grid();
    validate_profile(&grid, phi)?;
    let n = grid.n();
    let g = grid.points();
    let cell = grid.spacing().powi(n as i32);
    let abs: Vec<f64> = u.values().iter().map(|z| z.norm()).collect();
    let mu = maximal_average(&abs, g, n);
    let l1: f64 = phi.iter().sum::<f64>() * cell;
    let len = grid.block_len();
    let mut xi = vec![0usize; n];
    let mut yi = vec![0usize; n];
    let mut worst: f64 = 0.0;
    let mut violations = 0usize;
    for x in 0..len {
        crate::grid::unravel(x, g, n, |a, i| xi[a] = i);
        let mut lhs = 0.0;
        for (y, &w) in phi.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            crate::grid::unravel(y, g, n, |a, i| yi[a] = i);
            // x - y on the shifted lattice: index i - m + G/2
            let mut flat = 0;
            for a in 0..n {
                flat = flat * g + (xi[a] + g + g / 2 - yi[a]) % g;
            }
            lhs += w * abs[flat];
        }
        lhs *= cell;
        let rhs = l1 * mu[x];
        if lhs > rhs * (1.0 + 1e-10) + 1e-300 {
            violations += 1;
        }
        if rhs > 0.0 {
            worst = worst.max(lhs / rhs);
        }
    }
    let mut report = BoundReport::new(
        "convolution_majorant",
        "convolution with a radial non-increasing integrable profile is dominated by its L1 norm times the maximal function",
        json!({ "grid": grid, "profile_l1": l1 }),
    );
    report.record("max_lhs_over_rhs", g, 0, worst, 0);
    report.note(format!("{violations} points violate the inequality beyond 1e-10 relative slack"));
    report.finish("no point exceeds the right side by more than 1e-10 relative", violations == 0);
    Ok(report)
}

fn check_sigma(n: usize, p_conj: f64, s: f64) -> Result<()> {
    if n == 0 || !(p_conj >= 1.0) || p_conj.is_infinite() {
        return Err(Error::Parameter(format!("need n >= 1 and finite p' >= 1 (n={n}, p'={p_conj})")));
    }
    if !(s > n as f64 / p_conj) {
        return Err(Error::Parameter(format!(
            "s = {s} must exceed n/p' = {}; the integral of sigma^-p' diverges otherwise",
            n as f64 / p_conj
        )));
    }
    Ok(())
}

/// `sigma_k(y) = 2^{-k rho n/p'}` for `|y| <= 2^{-k rho}`, else `2^{-k rho (n/p' - s)} |y|^s`.
pub fn sigma_weight(k: i32, rho: f64, n: usize, p_conj: f64, s: f64, y_norm: f64) -> Result<f64> {
    check_sigma(n, p_conj, s)?;
    let t = 2f64.powf(-(k as f64) * rho);
    let e = n as f64 / p_conj;
    Ok(if y_norm <= t {
        t.powf(e)
    } else {
        t.powf(e - s) * y_norm.powf(s)
    })
}

// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=m {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

// Integral of f over (0, 1] on dyadically graded panels, for integrable power singularities at 0.
fn graded_integral(f: impl Fn(f64) -> f64) -> f64 {
    let nodes = gauss_legendre(20);
    let mut total = 0.0;
    for j in 0..80 {
        let (a, b) = (2f64.powi(-(j + 1)), 2f64.powi(-j));
        let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
        total += nodes.iter().map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h;
    }
    total
}

/// Surface area of the unit sphere in `R^n`.
fn sphere_area(n: usize) -> f64 {
    n as f64 * crate::symbols::unit_ball_volume(n)
}

/// `int_{R^n} sigma_k(y)^{-p'} dy` by radial quadrature; the tail uses `r = R/t`.
pub fn sigma_integral(k: i32, rho: f64, n: usize, p_conj: f64, s: f64) -> Result<f64> {
    check_sigma(n, p_conj, s)?;
    let t0 = 2f64.powf(-(k as f64) * rho);
    let radial = |r: f64| sigma_weight(k, rho, n, p_conj, s, r).unwrap().powf(-p_conj) * r.powi(n as i32 - 1);
    let inner = graded_integral(|u| radial(u * t0) * t0);
    let outer = graded_integral(|t| {
        let r = t0 / t;
        radial(r) * t0 / (t * t)
    });
    Ok(sphere_area(n) * (inner + outer))
}

/// Quadrature of `int sigma_k^{-p'}` for each `k`; passes when the values agree within 5%.
pub fn sigma_integral_check(ks: std::ops::RangeInclusive<i32>, rho: f64, n: usize, p_conj: f64, s: f64) -> Result<BoundReport> {
    check_sigma(n, p_conj, s)?;
    let mut report = BoundReport::new(
        "sigma_weight_integral",
        "the integral of sigma_k^{-p'} is bounded uniformly in k",
        json!({ "rho": rho, "n": n, "p_conj": p_conj, "s": s, "k": [ks.start(), ks.end()] }),
    );
    let mut vals = Vec::new();
    for k in ks {
        let v = sigma_integral(k, rho, n, p_conj, s)?;
        report.record("integral", k.max(0) as usize, 0, v, 0);
        vals.push(v);
    }
    let ok = crate::verify::report::ladder_stable(&vals, 1.05);
    report.finish("max/min of the integrals over k <= 1.05", ok);
    Ok(report)
}
