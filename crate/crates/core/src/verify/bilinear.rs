use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{check_margin, ladder_stable, random_field, safe_ratio, BoundReport, Settings, STABILITY_FACTOR};
use crate::error::{Error, Result};
use crate::grid::{lp_norm, ExponentTriple, Field, GridSpec, MultiField, Sampled};
use crate::operators::{a_constant, apply_s, s_operator_norm, PreparedSymbol};
use crate::symbols::{hypo_functional, ClaimedClass, SymbolModel};

/// Piece of the exponent triangle on which the order threshold is affine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubTriangle {
    /// `1/p, 1/q <= 1/2 <= 1/p + 1/q`; the threshold is constant.
    Central,
    /// `1/p >= 1/2`, towards `(1, 0, 1)`.
    NearP,
    /// `1/q >= 1/2`, towards `(0, 1, 1)`.
    NearQ,
    /// `1/r <= 1/2`, towards `(0, 0, 0)`.
    NearOrigin,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// `n(rho - 1) max{1/2, 2/p - 1/2, 2/q - 1/2, 3/2 - 2/r}`.
    pub stronger: f64,
    /// `2n(rho - 1) max{|1/p - 1/2|, |1/q - 1/2|} + n(rho - 1)/2`.
    pub weaker: f64,
    pub region: SubTriangle,
}

/// Order thresholds for `||T_a(f, g)||_r <~ ||f||_q ||g||_p`.
pub fn bilinear_threshold(rho: f64, n: usize, t: &ExponentTriple) -> Threshold {
    let [a, b, c] = t.reciprocals();
    let nr = n as f64 * (rho - 1.0);
    let k = [0.5, 2.0 * a - 0.5, 2.0 * b - 0.5, 1.5 - 2.0 * c].into_iter().fold(f64::NEG_INFINITY, f64::max);
    let weaker = 2.0 * nr * (a - 0.5).abs().max((b - 0.5).abs()) + nr / 2.0;
    let region = if a > 0.5 {
        SubTriangle::NearP
    } else if b > 0.5 {
        SubTriangle::NearQ
    } else if a + b < 0.5 {
        SubTriangle::NearOrigin
    } else {
        SubTriangle::Central
    };
    Threshold { stronger: nr * k, weaker, region }
}

pub(crate) fn triple_label(t: &ExponentTriple) -> String {
    let f = |v: f64| if v.is_infinite() { "inf".to_string() } else { format!("{v}") };
    format!("p={},q={},r={}", f(t.p), f(t.q), f(t.r))
}

fn bilinear_grids(settings: &Settings, n: usize) -> Result<Vec<GridSpec>> {
    settings.validate()?;
    settings.ladder.iter().map(|&g| GridSpec::new(n, 2, settings.half_period, g)).collect()
}

fn stable(report: &BoundReport, group: &str) -> bool {
    let sups: Vec<f64> = report.level_sups(group).into_iter().map(|(_, s)| s).collect();
    ladder_stable(&sups, STABILITY_FACTOR)
}

// ||T(f, g)||_r / (||f||_q ||g||_p) for every triple, one row per triple.
fn global_ratios(op: &PreparedSymbol, f: &Field, g: &Field, triples: &[ExponentTriple]) -> Result<(Field, Vec<f64>)> {
    let t = op.apply_multilinear(&[f.clone(), g.clone()])?;
    let mut out = Vec::with_capacity(triples.len());
    for tr in triples {
        let num = lp_norm(&t, tr.r, None)?;
        let den = lp_norm(f, tr.q, None)? * lp_norm(g, tr.p, None)?;
        out.push(safe_ratio(num, den));
    }
    Ok((t, out))
}

/// Norm ratio `||T_a(f, g)||_r / (||f||_q ||g||_p)` for symbols in `S^m_{rho,delta}(n, 2)`.
pub fn verify_bilinear_bound(a: &SymbolModel, triples: &[ExponentTriple], settings: &Settings) -> Result<BoundReport> {
    let start = Instant::now();
    let ar = a.arity();
    if ar.blocks != 2 {
        return Err(Error::Shape("a bilinear symbol is expected".into()));
    }
    let (m, rho, delta) = match a.class() {
        ClaimedClass::Hormander { m, rho, delta } => (*m, *rho, *delta),
        _ => return Err(Error::Hypothesis("the symbol must be claimed in S^m_{rho,delta}".into())),
    };
    if !(0.0 <= delta && delta <= rho && rho <= 1.0 && delta < 1.0) {
        return Err(Error::Hypothesis(format!("need 0 <= delta <= rho <= 1, delta < 1; got rho = {rho}, delta = {delta}")));
    }
    if triples.is_empty() {
        return Err(Error::Parameter("no exponent triples".into()));
    }
    let mut thresholds = Vec::new();
    for t in triples {
        t.validate()?;
        let th = bilinear_threshold(rho, ar.n, t);
        check_margin(m, th.stronger)?;
        thresholds.push(json!({ "triple": t, "threshold": th }));
    }
    let mut report = BoundReport::new(
        "bilinear_bound",
        "||T_a(f, g)||_r <~ ||f||_q ||g||_p below the order threshold",
        json!({ "symbol": a.spec(), "triples": thresholds, "settings": settings }),
    );
    let labels: Vec<String> = triples.iter().map(triple_label).collect();
    for grid in bilinear_grids(settings, ar.n)? {
        let op = PreparedSymbol::new(&a.resolve_for(&grid)?, &grid)?;
        let rows: Vec<(u64, Vec<f64>)> = settings
            .seeds()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|seed| {
                let (f, g) = (random_field(&grid, seed, 0), random_field(&grid, seed, 1));
                Ok((seed, global_ratios(&op, &f, &g, triples)?.1))
            })
            .collect::<Result<_>>()?;
        for (seed, ratios) in rows {
            for (label, r) in labels.iter().zip(ratios) {
                report.record(label, grid.points(), seed, r, 0);
            }
        }
    }
    let ok = labels.iter().all(|l| stable(&report, l));
    report.finish("every triple's sup ratio within a factor 2 across the ladder", ok);
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn white_noise(grid: &GridSpec, dims: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..grid.len(dims))
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Relative tolerance for the power-iteration norm against `A`.
pub const SHARPNESS_TOLERANCE: f64 = 1e-6;
const POWER_ITERATIONS: usize = 20_000;

/// `||S F||_2 <= A ||F||_2` on random `F`, and `||S|| = A` by power iteration.
pub fn verify_lemma61(a: &SymbolModel, grid: &GridSpec, trials: usize, seed: u64) -> Result<BoundReport> {
    let start = Instant::now();
    if grid.blocks() != 2 {
        return Err(Error::Shape("S acts on the two-block product lattice".into()));
    }
    if !a.is_x_independent() {
        return Err(Error::Hypothesis("S is defined by an x-independent symbol".into()));
    }
    let big_a = a_constant(a, grid)?;
    let mut report = BoundReport::new(
        "s_operator",
        "||S F||_2 <= A ||F||_2 with A = sup m^{1/2}, and the bound is attained",
        json!({ "symbol": a.spec(), "grid": grid, "trials": trials, "seed": seed, "A": big_a }),
    );
    let rows: Vec<(u64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let f = MultiField::new(*grid, white_noise(grid, grid.product_dims(), seed + t))?;
            let num = lp_norm(&apply_s(a, &f)?, 2.0, None)?;
            let den = big_a * lp_norm(&f, 2.0, None)?;
            Ok((seed + t, if num == 0.0 { 0.0 } else { num / den }))
        })
        .collect::<Result<_>>()?;
    let mut ok = true;
    for (s, r) in rows {
        ok &= r <= 1.0 + 1e-10;
        report.record("inequality", grid.points(), s, r, 0);
    }
    let power = s_operator_norm(a, grid, seed, POWER_ITERATIONS)?;
    let rel = if big_a == 0.0 { power } else { (power - big_a).abs() / big_a };
    report.record("sharpness", grid.points(), seed, rel, 0);
    report.note(format!("power iteration {power:.12e}, A = {big_a:.12e}"));
    ok &= rel <= SHARPNESS_TOLERANCE;
    report.finish("every ratio <= 1 + 1e-10; power-iteration norm equals A within 1e-6 relative", ok);
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Triples checked by default: the three vertices of the `L^2` triangle and one interior point.
pub fn thm63_triples() -> Vec<ExponentTriple> {
    [(2.0, 2.0, 1.0), (f64::INFINITY, 2.0, 2.0), (2.0, f64::INFINITY, 2.0), (3.0, 3.0, 1.5)]
        .into_iter()
        .map(|(p, q, r)| ExponentTriple { p, q, r })
        .collect()
}

/// Number of centers used by the local estimate.
pub const LOCAL_CENTERS: usize = 5;

fn periodic_dist(x: &[f64], y: &[f64], period: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = (a - b).rem_euclid(period);
            let d = d.min(period - d);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

// max over centers of int_{B_1(x0)} |T| / (int |f|^2 (1+|y-x0|)^{-2n} int |g|^2 (1+|z-x0|)^{-2n})^{1/2}
fn local_ratio(t: &Field, f: &Field, g: &Field, centers: &[Vec<f64>]) -> f64 {
    let grid = *t.grid();
    let n = grid.n();
    let period = 2.0 * grid.half_period();
    let cell = grid.spacing().powi(n as i32);
    let decay = 2 * n as i32;
    let mut x = vec![0.0; n];
    let mut best: f64 = 0.0;
    for x0 in centers {
        let (mut lhs, mut wf, mut wg) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..grid.block_len() {
            grid.point(i, n, &mut x);
            let d = periodic_dist(&x, x0, period);
            if d <= 1.0 {
                lhs += t.values()[i].norm();
            }
            let k = (1.0 + d).powi(-decay);
            wf += f.values()[i].norm_sqr() * k;
            wg += g.values()[i].norm_sqr() * k;
        }
        let rhs = (wf * cell * wg * cell).sqrt();
        best = best.max(safe_ratio(lhs * cell, rhs));
    }
    best
}

fn local_centers(n: usize, l: f64) -> Vec<Vec<f64>> {
    [-0.5, -0.25, 0.0, 0.25, 0.5].iter().map(|c| vec![c * l; n]).collect()
}

fn hypo_probes(n: usize, grid: &GridSpec) -> (Vec<Vec<f64>>, Vec<Vec<i64>>) {
    let l = grid.half_period();
    let mut x0: Vec<Vec<f64>> = (-3..=3).map(|c| vec![c as f64; n]).collect();
    x0.extend([-0.8, -0.6, 0.55, 0.75].iter().map(|c| vec![c * l; n]));
    let zeta: Vec<Vec<i64>> = [0i64, 1, -1, 2, 4, -4, 8, -8].iter().map(|&k| vec![k; n]).collect();
    (x0, zeta)
}

/// Symbols of order 0 under the local `L^2` condition: global norm ratios on
/// the `L^2` triangle and the local estimate at five centers.
///
/// For an x-independent symbol the `L^2 x L^2 -> L^2` ratio against the
/// multiplier constant `A` is recorded as well and must not exceed 1.
pub fn verify_thm63(a: &SymbolModel, triples: &[ExponentTriple], settings: &Settings) -> Result<BoundReport> {
    let start = Instant::now();
    let ar = a.arity();
    if ar.blocks != 2 {
        return Err(Error::Shape("a bilinear symbol is expected".into()));
    }
    match a.class() {
        ClaimedClass::Hormander { m, rho, delta } if *m <= 0.0 && *delta == 0.0 && *rho > 0.0 => {}
        _ => return Err(Error::Hypothesis("the symbol must be claimed in S^0_{rho,0}".into())),
    }
    for t in triples {
        t.validate()?;
        if !t.in_l2_triangle() {
            return Err(Error::Hypothesis(format!("{} lies outside the L^2 triangle", triple_label(t))));
        }
    }
    let grids = bilinear_grids(settings, ar.n)?;
    let (x0, zeta) = hypo_probes(ar.n, &grids[0]);
    let hypo = hypo_functional(&a.resolve_for(&grids[0])?, 2, &grids[0], &x0, &zeta)?;
    if !hypo.passed() {
        return Err(Error::Hypothesis(format!(
            "local L^2 symbol condition fails: {:?}",
            hypo.levels.iter().map(|l| (&l.group, l.level, l.sup)).collect::<Vec<_>>()
        )));
    }
    let centers = local_centers(ar.n, settings.half_period);
    let mut report = BoundReport::new(
        "l2_triangle_bound",
        "T_a maps L^q x L^p to L^r on the L^2 triangle; local estimate on unit balls",
        json!({ "symbol": a.spec(), "triples": triples, "centers": centers, "decay": 2 * ar.n, "settings": settings }),
    );
    report.note(format!(
        "local symbol condition: sup {:.6e} over {} probes",
        hypo.levels.iter().map(|l| l.sup).fold(0.0, f64::max),
        x0.len() * zeta.len()
    ));
    let labels: Vec<String> = triples.iter().map(triple_label).collect();
    let x_free = a.is_x_independent();
    let mut l2_ok = true;
    for grid in grids {
        let resolved = a.resolve_for(&grid)?;
        let op = PreparedSymbol::new(&resolved, &grid)?;
        let big_a = if x_free { Some(a_constant(&resolved, &grid)?) } else { None };
        let rows: Vec<(u64, Vec<f64>, f64, Option<f64>)> = settings
            .seeds()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|seed| {
                let (f, g) = (random_field(&grid, seed, 0), random_field(&grid, seed, 1));
                let (t, ratios) = global_ratios(&op, &f, &g, triples)?;
                let local = local_ratio(&t, &f, &g, &centers);
                let l2 = match big_a {
                    Some(c) => {
                        let num = lp_norm(&t, 2.0, None)?;
                        Some(safe_ratio(num, c * lp_norm(&f, 2.0, None)? * lp_norm(&g, 2.0, None)?))
                    }
                    None => None,
                };
                Ok((seed, ratios, local, l2))
            })
            .collect::<Result<_>>()?;
        for (seed, ratios, local, l2) in rows {
            for (label, r) in labels.iter().zip(ratios) {
                report.record(label, grid.points(), seed, r, 0);
            }
            report.record("local", grid.points(), seed, local, 0);
            if let Some(v) = l2 {
                l2_ok &= v <= 1.0 + 1e-10;
                report.record("multiplier_l2", grid.points(), seed, v, 0);
            }
        }
    }
    let ok = l2_ok && labels.iter().all(|l| stable(&report, l)) && stable(&report, "local");
    report.finish("global and local ratios within a factor 2 across the ladder", ok);
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
