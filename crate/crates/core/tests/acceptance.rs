//! Acceptance criteria, one line per criterion. Run with
//! `cargo test --test acceptance`; exits non-zero when any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use pdo_lab::grid::{forward_ft, inverse_ft, lp_norm, ExponentTriple, Field, GridSpec, Sampled};
use pdo_lab::lp_decomp::{build_family, check_derivative_bounds_upto};
use pdo_lab::maximal::maximal_values;
use pdo_lab::operators::{
    adjoint_apply_streaming, adjoint_bilinear, compute_kernel, pairing, AdjointSlot, KernelIndex, PreparedSymbol,
};
use pdo_lab::suite::{canonical_suite, run_experiment, run_suite, Experiment, RunOptions, SuiteConfig};
use pdo_lab::symbols::{
    gaussian_symbol, random_table_symbol, separable_bilinear_symbol, Arity, FreqProfile,
};
use pdo_lab::verify::{
    bilinear_threshold, random_field, verify_convolution_majorant, verify_hausdorff_young, verify_lemma61,
    BoundReport, SubTriangle, LOCAL_CENTERS,
};
use pdo_lab::weights::{ap_constant, power_weight, unit_weight};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn entry_report(cfg: &SuiteConfig, name: &str) -> Result<BoundReport, String> {
    let e = cfg.experiments.iter().find(|e| e.name == name).ok_or(format!("no entry {name}"))?;
    let settings = e.settings.clone().unwrap_or_else(|| cfg.settings.clone());
    run_experiment(&e.experiment, &settings, &RunOptions::default()).map_err(|err| format!("{name}: {err}"))
}

fn grid(n: usize, blocks: usize, l: f64, g: usize) -> GridSpec {
    GridSpec::new(n, blocks, l, g).unwrap()
}

fn c1_littlewood_paley() -> Outcome {
    let start = Instant::now();
    let g = grid(1, 2, 8.0, 256);
    let fam = build_family(&g).map_err(|e| e.to_string())?;
    if fam.max_index() < 5 {
        return Err(format!("family resolves only k <= {}", fam.max_index()));
    }
    let radius = fam.resolved_radius();
    let mut worst: f64 = 0.0;
    let mut xi = vec![0.0; fam.dims()];
    for flat in 0..g.len(fam.dims()) {
        g.freq_point(flat, fam.dims(), &mut xi);
        if xi.iter().map(|v| v * v).sum::<f64>().sqrt() <= radius {
            let s: f64 = (0..=fam.max_index()).map(|k| fam.phi(k, &xi)).sum();
            worst = worst.max((s - 1.0).abs());
        }
    }
    let report = check_derivative_bounds_upto(&fam, 2, 5).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(
        worst <= 1e-12 && report.passed() && secs < 5.0,
        format!("partition error {worst:.1e}, derivative bounds {:?}, {secs:.2} s", report.verdict),
    )
}

fn c2_transforms() -> Outcome {
    let g = grid(1, 1, 16.0, 512);
    let u = Field::from_real_fn(g, |x| (-x[0] * x[0] / 2.0).exp());
    let spec = forward_ft(&u);
    let mut xi = [0.0];
    let mut ft_err: f64 = 0.0;
    for (c, v) in spec.values().iter().enumerate() {
        g.freq_point(c, 1, &mut xi);
        let exact = (2.0 * PI).sqrt() * (-xi[0] * xi[0] / 2.0).exp();
        ft_err = ft_err.max((v - exact).norm());
    }
    let w = random_field(&g, 3, 0);
    let wh = forward_ft(&w);
    let lhs = lp_norm(&w, 2.0, None).unwrap();
    let rhs = wh.lp_norm(2.0).unwrap() / (2.0 * PI).sqrt();
    let planch = (lhs - rhs).abs() / lhs;
    let back = inverse_ft(&wh).unwrap();
    let scale = w.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let trip = back.values().iter().zip(w.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    ensure(
        ft_err < 1e-10 && planch < 1e-10 && trip < 1e-12,
        format!("Gaussian transform {ft_err:.1e}, Plancherel {planch:.1e}, round trip {trip:.1e}"),
    )
}

fn c3_hausdorff_young() -> Outcome {
    let mut worst: f64 = 0.0;
    for exps in [vec![2.0], vec![1.0], vec![2.0, 1.0], vec![2.0, 2.0], vec![1.0, 1.0]] {
        let g = grid(1, exps.len(), 4.0, 16);
        let r = verify_hausdorff_young(&exps, 200, &g, 0).map_err(|e| e.to_string())?;
        let trials = r.trials.len();
        worst = worst.max(r.sup());
        if !r.passed() || trials != 200 {
            return Err(format!("{exps:?}: {trials} trials, sup ratio {:.12}", r.sup()));
        }
    }
    Ok(format!("1000 trials, largest LHS/(C RHS) = {worst:.12}"))
}

// Sup over every centered periodic cube containing the point, by direct summation.
fn brute_maximal(v: &[f64], at: usize) -> f64 {
    let g = v.len();
    let mut best = v.iter().sum::<f64>() / g as f64;
    for r in 0..g / 2 {
        for c in 0..g {
            let d = (at + g - c) % g;
            if d.min(g - d) <= r {
                let s: f64 = (0..=2 * r).map(|t| v[(c + g - r + t) % g]).sum();
                best = best.max(s / (2 * r + 1) as f64);
            }
        }
    }
    best
}

fn c4_maximal() -> Outcome {
    let g = grid(1, 1, 8.0, 256);
    let h = g.spacing();
    let u = Field::from_real_fn(g, |x| if (0.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 });
    let m = maximal_values(&u, 1.0).map_err(|e| e.to_string())?;
    let v: Vec<f64> = u.values().iter().map(|z| z.re).collect();
    let mut msg = String::new();
    let mut ok = true;
    for at in [159usize, 160] {
        let brute = brute_maximal(&v, at);
        ok &= (m[at] - brute).abs() <= 1e-12 && (m[at] - 0.5).abs() <= 2.0 * h;
        msg += &format!("M(x={}) = {:.5} (brute {:.5}); ", g.coord(at), m[at], brute);
    }
    let conv = verify_convolution_majorant(&g, 20, 0).map_err(|e| e.to_string())?;
    ok &= conv.passed();
    msg += &format!("majorant {:?} over {} pairs", conv.verdict, conv.trials.len());
    ensure(ok, msg)
}

fn c5_weights() -> Outcome {
    let g = grid(1, 1, 8.0, 64);
    let unit: Vec<f64> = [1.0, 1.5, 2.0, 3.0].iter().map(|&p| ap_constant(&unit_weight(&g), p).unwrap()).collect();
    let stable: Vec<f64> =
        [64, 128, 256].iter().map(|&n| ap_constant(&power_weight(0.5, &grid(1, 1, 8.0, n)), 2.0).unwrap()).collect();
    let blow: Vec<f64> =
        [16, 64, 256].iter().map(|&n| ap_constant(&power_weight(-1.5, &grid(1, 1, 8.0, n)), 2.0).unwrap()).collect();
    let ok = unit.iter().all(|&c| c == 1.0)
        && stable.windows(2).all(|w| (w[1] / w[0] - 1.0).abs() <= 0.1)
        && blow.windows(2).all(|w| w[1] >= 2.0 * w[0]);
    ensure(ok, format!("[1] = {unit:?}; |x|^(1/2): {stable:.4?}; |x|^(-3/2) on G = 16, 64, 256: {blow:.3?}"))
}

fn c6_pointwise(cfg: &SuiteConfig) -> Outcome {
    let start = Instant::now();
    let mut msg = String::new();
    let mut ok = true;
    for name in ["pointwise_oscillatory", "pointwise_rough_x", "pointwise_dyadic"] {
        let e = cfg.experiments.iter().find(|e| e.name == name).unwrap();
        if let Experiment::PointwiseBound { symbol, ps } = &e.experiment {
            let a = symbol.build().map_err(|e| e.to_string())?;
            let rho = a.class().rho().unwrap();
            let threshold = (rho - 1.0) * ps.iter().map(|p| 1.0 / p).sum::<f64>();
            ok &= (a.class().order().unwrap() - (threshold - 0.3)).abs() < 1e-12 && ps == &[2.0, 2.0];
        }
        let r = entry_report(cfg, name)?;
        let sups: Vec<f64> = r.level_sups("pointwise").into_iter().map(|(_, s)| s).collect();
        ok &= r.passed() && r.trials.len() == 60;
        msg += &format!("{name} {sups:.3?}; ");
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(ok && secs < 180.0, format!("{msg}{secs:.1} s"))
}

fn c7_mixed_norm(cfg: &SuiteConfig) -> Outcome {
    let e = cfg.experiments.iter().find(|e| e.name == "mixed_norm").unwrap();
    let shape_ok = match &e.experiment {
        Experiment::MixedNorm { ps, qs, .. } => ps == &[1.5, 1.5] && qs == &[2.0, 2.0],
        _ => false,
    } && e.settings.as_ref().is_some_and(|s| s.ladder.iter().all(|&g| g <= 64));
    let r = entry_report(cfg, "mixed_norm")?;
    let pw: Vec<f64> = r.level_sups("pointwise").into_iter().map(|(_, s)| s).collect();
    let nr: Vec<f64> = r.level_sups("norm").into_iter().map(|(_, s)| s).collect();
    ensure(shape_ok && r.passed(), format!("pointwise {pw:.3?}, norm {nr:.3?}"))
}

fn c8_linear_weighted(cfg: &SuiteConfig) -> Outcome {
    let mut msg = String::new();
    let mut ok = true;
    for name in ["linear_weighted_r1", "linear_weighted_power", "linear_weighted_q_inf"] {
        let r = entry_report(cfg, name)?;
        ok &= r.passed();
        msg += &format!("{name} {:?}; ", r.verdict);
    }
    ensure(ok, msg)
}

fn threshold_at(a: f64, b: f64) -> f64 {
    let t = ExponentTriple::from_reciprocals(a, b, a + b).unwrap();
    bilinear_threshold(0.5, 1, &t).stronger
}

fn c9_threshold() -> Outcome {
    let (rho, n) = (0.5, 1usize);
    let low = n as f64 * (rho - 1.0) / 2.0;
    let high = 3.0 * n as f64 * (rho - 1.0) / 2.0;
    let marks = [
        ((0.5, 0.5), low),
        ((0.0, 0.5), low),
        ((0.5, 0.0), low),
        ((0.0, 1.0), high),
        ((1.0, 0.0), high),
        ((0.0, 0.0), high),
    ];
    let exact = marks.iter().all(|&((a, b), v)| threshold_at(a, b) == v);
    let triangles: [(SubTriangle, [(f64, f64); 3]); 4] = [
        (SubTriangle::NearP, [(0.5, 0.0), (1.0, 0.0), (0.5, 0.5)]),
        (SubTriangle::NearQ, [(0.0, 0.5), (0.0, 1.0), (0.5, 0.5)]),
        (SubTriangle::NearOrigin, [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)]),
        (SubTriangle::Central, [(0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut regions_ok = true;
    let sample = |v: &[(f64, f64); 3], rng: &mut ChaCha8Rng| {
        let (mut s, mut t): (f64, f64) = (rng.random(), rng.random());
        if s + t > 1.0 {
            (s, t) = (1.0 - s, 1.0 - t);
        }
        let a = v[0].0 + s * (v[1].0 - v[0].0) + t * (v[2].0 - v[0].0);
        let b = v[0].1 + s * (v[1].1 - v[0].1) + t * (v[2].1 - v[0].1);
        (a, b)
    };
    for (region, verts) in &triangles {
        for _ in 0..200 {
            let p = sample(verts, &mut rng);
            let q = sample(verts, &mut rng);
            let mid = ((p.0 + q.0) / 2.0, (p.1 + q.1) / 2.0);
            let err = (threshold_at(mid.0, mid.1) - (threshold_at(p.0, p.1) + threshold_at(q.0, q.1)) / 2.0).abs();
            worst = worst.max(err);
            // strict interior points carry the region label
            let (a, b) = mid;
            let t = ExponentTriple::from_reciprocals(a, b, a + b).unwrap();
            let interior = match region {
                SubTriangle::NearP => a > 0.5,
                SubTriangle::NearQ => b > 0.5,
                SubTriangle::NearOrigin => a + b < 0.5,
                SubTriangle::Central => a < 0.5 && b < 0.5 && a + b > 0.5,
            };
            if interior {
                regions_ok &= bilinear_threshold(rho, n, &t).region == *region;
            }
        }
    }
    ensure(
        exact && worst <= 1e-12 && regions_ok,
        format!("six marked points exact: {exact}; midpoint defect {worst:.1e}; regions consistent: {regions_ok}"),
    )
}

fn c10_lemma61() -> Outcome {
    let start = Instant::now();
    let g = grid(1, 2, 4.0, 32);
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let a = random_table_symbol(&g, seed, false, None).map_err(|e| e.to_string())?;
        let r = verify_lemma61(&a, &g, 20, seed).map_err(|e| e.to_string())?;
        let rel = r.level_sups("sharpness")[0].1;
        worst = worst.max(rel);
        if !r.passed() {
            return Err(format!("random symbol {seed}: relative error {rel:.2e}, inequality sup {:.6}", r.sup()));
        }
    }
    // separable g(xi + eta) h(eta): A = sup|g| ((2 pi)^{-1} int |h|^2)^{1/2}
    let mut closed_worst: f64 = 0.0;
    for (wg, wh) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.7)] {
        let a = separable_bilinear_symbol(FreqProfile::Gaussian { width: wg }, FreqProfile::Gaussian { width: wh }, 1)
            .map_err(|e| e.to_string())?;
        let r = verify_lemma61(&a, &g, 20, 0).map_err(|e| e.to_string())?;
        let dxi = g.freq_spacing();
        let h2: f64 = (0..g.points())
            .map(|c| {
                let eta = g.freq(c);
                (-eta * eta / (wh * wh)).exp()
            })
            .sum::<f64>()
            * dxi;
        let closed = (h2 / (2.0 * PI)).sqrt();
        let power: f64 = r
            .notes
            .iter()
            .find_map(|n| n.strip_prefix("power iteration ").and_then(|s| s.split(',').next()?.trim().parse().ok()))
            .ok_or("missing power-iteration note")?;
        let rel = (power - closed).abs() / closed;
        closed_worst = closed_worst.max(rel);
        if !r.passed() || rel > 1e-6 {
            return Err(format!("separable ({wg}, {wh}): power {power:.10e}, closed form {closed:.10e}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        secs < 30.0,
        format!("random symbols worst {worst:.1e}, separable closed form worst {closed_worst:.1e}, {secs:.1} s"),
    )
}

fn c11_adjoint() -> Outcome {
    let g = grid(1, 2, 4.0, 32);
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let a = random_table_symbol(&g, 100 + seed, true, None).map_err(|e| e.to_string())?;
        let op = PreparedSymbol::new(&a, &g).map_err(|e| e.to_string())?;
        let (f, gg, h) = (random_field(&g, seed, 0), random_field(&g, seed, 1), random_field(&g, seed, 2));
        let t = op.apply_multilinear(&[f.clone(), gg.clone()]).map_err(|e| e.to_string())?;
        let lhs = pairing(&t, &h);
        let first = adjoint_bilinear(&a, AdjointSlot::First, &g).map_err(|e| e.to_string())?;
        let second = adjoint_bilinear(&a, AdjointSlot::Second, &g).map_err(|e| e.to_string())?;
        let r1 = pairing(&f, &first.apply(&h, &gg).unwrap());
        let r2 = pairing(&gg, &second.apply(&f, &h).unwrap());
        let s1 = pairing(&f, &adjoint_apply_streaming(&a, AdjointSlot::First, &h, &gg).unwrap());
        for r in [r1, r2, s1] {
            worst = worst.max((lhs - r).norm() / lhs.norm());
        }
    }
    ensure(worst <= 1e-10, format!("20 instances, worst relative defect {worst:.1e}"))
}

fn c12_kernel(cfg: &SuiteConfig) -> Outcome {
    let g = grid(1, 2, 8.0, 64);
    let scale = 0.5;
    let a = gaussian_symbol(scale, Arity::new(1, 2)).unwrap();
    let fam = build_family(&g).unwrap();
    let k = compute_kernel(&a, &fam, KernelIndex::Total, &g).map_err(|e| e.to_string())?;
    let dims = 2;
    let mut y = vec![0.0; dims];
    let mut err: f64 = 0.0;
    for flat in 0..g.len(dims) {
        g.displacement_point(flat, dims, &mut y);
        let r2: f64 = y.iter().map(|v| v * v).sum();
        let exact = (4.0 * PI * scale).powf(-(dims as f64) / 2.0) * (-r2 / (4.0 * scale)).exp();
        err = err.max((k.at(0, flat) - Complex64::new(exact, 0.0)).norm());
    }
    let fit = entry_report(cfg, "kernel_decay_oscillatory")?;
    let slopes: Vec<f64> = fit
        .groups()
        .iter()
        .filter(|n| n.ends_with(":slope"))
        .flat_map(|n| fit.level_sups(n))
        .map(|(_, s)| s)
        .collect();
    ensure(err < 1e-8 && fit.passed(), format!("Gaussian kernel error {err:.1e}; oscillatory slopes {slopes:.2?}"))
}

fn c13_local_l2(cfg: &SuiteConfig) -> Outcome {
    let r = entry_report(cfg, "l2_triangle")?;
    let global: Vec<f64> = r.level_sups("p=2,q=2,r=1").into_iter().map(|(_, s)| s).collect();
    let local: Vec<f64> = r.level_sups("local").into_iter().map(|(_, s)| s).collect();
    let centers = r.parameters["centers"].as_array().map_or(0, |c| c.len());
    ensure(
        r.passed() && !global.is_empty() && !local.is_empty() && centers == LOCAL_CENTERS,
        format!("L2 x L2 -> L1 {global:.3?}; local at {centers} centers {local:.3?}"),
    )
}

fn c14_suite(cfg: &SuiteConfig) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let start = Instant::now();
    let first = run_suite(cfg, &RunOptions::default(), Some(&a)).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let second =
        run_suite(cfg, &RunOptions { jobs: Some(1), ..RunOptions::default() }, Some(&b)).map_err(|e| e.to_string())?;
    let mut names: Vec<String> = cfg.experiments.iter().map(|e| format!("{}.csv", e.name)).collect();
    names.push("summary.csv".into());
    let mut differing = Vec::new();
    for n in &names {
        let x = std::fs::read(a.join(n)).map_err(|e| format!("{n}: {e}"))?;
        let y = std::fs::read(b.join(n)).map_err(|e| format!("{n}: {e}"))?;
        if x != y {
            differing.push(n.clone());
        }
    }
    ensure(
        secs < 600.0 && first.exit_code() == 0 && second.exit_code() == 0 && differing.is_empty(),
        format!(
            "{} entries, exit {}, {secs:.1} s, {} CSV files compared, differing {differing:?}",
            cfg.experiments.len(),
            first.exit_code(),
            names.len()
        ),
    )
}

fn main() {
    let cfg = canonical_suite();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("littlewood-paley partition and derivative bounds", Box::new(c1_littlewood_paley)),
        ("transform correctness", Box::new(c2_transforms)),
        ("mixed-norm Hausdorff-Young", Box::new(c3_hausdorff_young)),
        ("maximal function oracle and convolution majorant", Box::new(c4_maximal)),
        ("A_p weights", Box::new(c5_weights)),
        ("pointwise maximal bound", Box::new(|| c6_pointwise(&cfg))),
        ("mixed-norm boundedness", Box::new(|| c7_mixed_norm(&cfg))),
        ("linear weighted boundedness", Box::new(|| c8_linear_weighted(&cfg))),
        ("bilinear threshold function", Box::new(c9_threshold)),
        ("S operator norm sharpness", Box::new(c10_lemma61)),
        ("adjoint duality", Box::new(c11_adjoint)),
        ("kernel oracle and decay", Box::new(|| c12_kernel(&cfg))),
        ("L2 triangle and local estimate", Box::new(|| c13_local_l2(&cfg))),
        ("full suite runtime and determinism", Box::new(|| c14_suite(&cfg))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, msg) = match check() {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("[{tag}] {:>2}. {name} ({:.1} s): {msg}", i + 1, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
