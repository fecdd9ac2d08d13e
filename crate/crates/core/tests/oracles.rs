//! Library values against independently computed references: closed forms,
//! brute-force sums and second evaluation routes.

use std::f64::consts::PI;

use pdo_lab::grid::{forward_ft, mixed_norm, Field, GridSpec, MultiField, Sampled};
use pdo_lab::lp_decomp::{smooth_step, LittlewoodPaleyFamily};
use pdo_lab::maximal::{iterated_maximal_values, maximal_values, sigma_integral, sigma_integral_check};
use pdo_lab::operators::{
    a_constant, apply_s, apply_s_adjoint, compute_kernel, pairing, ssstar_multiplier, KernelIndex, PreparedSymbol,
};
use pdo_lab::lp_decomp::build_family;
use pdo_lab::suite::parse_symbol;
use pdo_lab::symbols::{
    constant_symbol, gaussian_symbol, hypo_functional, random_table_symbol, rough_x_symbol, translation_symbol,
    unit_ball_volume, Arity, XFactor,
};
use pdo_lab::verify::{bilinear_threshold, lp_quasi_norm, random_field, random_multi_field, SubTriangle};
use pdo_lab::weights::{ap_constant, power_weight, WeightField};
use pdo_lab::{Complex64, ExponentTriple};

fn grid(n: usize, blocks: usize, l: f64, g: usize) -> GridSpec {
    GridSpec::new(n, blocks, l, g).unwrap()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn lattice_coordinates() {
    let g = grid(1, 1, 8.0, 16);
    assert_eq!(g.spacing(), 1.0);
    assert_eq!(g.coord(0), -7.5);
    assert_eq!(g.coord(15), 7.5);
    assert_eq!(g.freq(8), 0.0);
    assert_eq!(g.freq(0), -PI);
    assert_eq!(g.displacement(8), 0.0);
    assert_eq!(g.nyquist(), PI);
}

#[test]
fn smooth_step_values() {
    assert_eq!(smooth_step(0.5), 0.5);
    for t in [0.01, 0.2, 0.37, 0.9] {
        assert!((smooth_step(t) + smooth_step(1.0 - t) - 1.0).abs() < 1e-15);
    }
    let e = (-1.0f64 / 0.25).exp();
    let f = (-1.0f64 / 0.75).exp();
    assert!((smooth_step(0.25) - e / (e + f)).abs() < 1e-16);
}

#[test]
fn dyadic_pieces_vanish_outside_their_annulus() {
    for k in 1..6u32 {
        let (lo, hi) = LittlewoodPaleyFamily::support(k);
        assert_eq!(LittlewoodPaleyFamily::radial(k, lo * 0.999), 0.0);
        assert_eq!(LittlewoodPaleyFamily::radial(k, hi * 1.001), 0.0);
        // peak value 1 at 1.5 * 2^{k-1} .. 2^k
        assert_eq!(LittlewoodPaleyFamily::radial(k, 2f64.powi(k as i32)), 1.0);
    }
}

#[test]
fn forward_transform_matches_direct_dft() {
    let g = grid(1, 1, 3.0, 16);
    let u = random_field(&g, 11, 0);
    let spec = forward_ft(&u);
    let h = g.spacing();
    for c in 0..g.points() {
        let xi = g.freq(c);
        let direct: Complex64 = (0..g.points())
            .map(|j| u.values()[j] * Complex64::from_polar(1.0, -xi * g.coord(j)))
            .sum::<Complex64>()
            * h;
        assert!((spec.values()[c] - direct).norm() < 1e-12, "c = {c}");
    }
}

#[test]
fn two_dimensional_gaussian_transform() {
    let g = grid(2, 1, 8.0, 64);
    let u = Field::from_real_fn(g, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 2.0).exp());
    let spec = forward_ft(&u);
    let mut xi = [0.0; 2];
    for (i, v) in spec.values().iter().enumerate() {
        g.freq_point(i, 2, &mut xi);
        let exact = 2.0 * PI / 2f64.sqrt() * (-(xi[0] * xi[0] + xi[1] * xi[1] / 2.0) / 2.0).exp();
        assert!((v - exact).norm() < 1e-10);
    }
}

// Sup over all centered periodic cubes containing the point, written out in 2D.
fn brute_maximal_2d(v: &[f64], g: usize, at: (usize, usize), p: f64) -> f64 {
    let mut best = (v.iter().map(|a| a.powf(p)).sum::<f64>() / v.len() as f64).powf(1.0 / p);
    let dist = |a: usize, b: usize| {
        let d = (a + g - b) % g;
        d.min(g - d)
    };
    for r in 0..g / 2 {
        for c0 in 0..g {
            for c1 in 0..g {
                if dist(at.0, c0) > r || dist(at.1, c1) > r {
                    continue;
                }
                let mut s = 0.0;
                for t0 in 0..=2 * r {
                    for t1 in 0..=2 * r {
                        s += v[((c0 + g - r + t0) % g) * g + (c1 + g - r + t1) % g].powf(p);
                    }
                }
                best = best.max((s / ((2 * r + 1) * (2 * r + 1)) as f64).powf(1.0 / p));
            }
        }
    }
    best
}

#[test]
fn maximal_function_matches_brute_force() {
    let g = grid(2, 1, 4.0, 8);
    let u = random_field(&g, 5, 0);
    let v: Vec<f64> = u.values().iter().map(|z| z.norm()).collect();
    for p in [1.0, 2.5] {
        let m = maximal_values(&u, p).unwrap();
        for at in [(0, 0), (3, 5), (7, 2)] {
            let b = brute_maximal_2d(&v, 8, at, p);
            assert!((m[at.0 * 8 + at.1] - b).abs() < 1e-12 * b, "p = {p}, {at:?}");
        }
    }
}

#[test]
fn iterated_maximal_of_a_tensor_is_the_product() {
    let g = grid(1, 2, 4.0, 32);
    let f = random_field(&g, 1, 0);
    let h = random_field(&g, 2, 0);
    let u = MultiField::tensor(&[f.clone(), h.clone()]).unwrap();
    let it = iterated_maximal_values(&u, &[1.5, 3.0]).unwrap();
    let (mf, mh) = (maximal_values(&f, 1.5).unwrap(), maximal_values(&h, 3.0).unwrap());
    // block 1 is the outer axis
    for i in 0..32 {
        for j in 0..32 {
            let want = mf[i] * mh[j];
            assert!((it[i * 32 + j] - want).abs() <= 1e-12 * want.max(1e-300));
        }
    }
    let norms = mixed_norm(&u, &[2.0, 4.0]).unwrap();
    let lf = pdo_lab::grid::lp_norm(&f, 2.0, None).unwrap();
    let lh = pdo_lab::grid::lp_norm(&h, 4.0, None).unwrap();
    assert!((norms - lf * lh).abs() < 1e-12 * norms);
}

fn brute_ap(w: &[f64], p: f64) -> f64 {
    let g = w.len();
    let mut best: f64 = 0.0;
    let mut radii: Vec<usize> = (0..g / 2).collect();
    radii.push(g / 2);
    for r in radii {
        let side = if 2 * r + 1 >= g { g } else { 2 * r + 1 };
        for c in 0..g {
            let cells: Vec<f64> = (0..side).map(|t| w[(c + g - side / 2 + t) % g]).collect();
            let avg = cells.iter().sum::<f64>() / side as f64;
            let dual = cells.iter().map(|v| v.powf(-1.0 / (p - 1.0))).sum::<f64>() / side as f64;
            best = best.max(avg * dual.powf(p - 1.0));
        }
    }
    best
}

#[test]
fn ap_constant_matches_brute_force() {
    let g = grid(1, 1, 4.0, 32);
    for (gamma, p) in [(0.5, 2.0), (-0.3, 1.5), (1.2, 3.0)] {
        let w = power_weight(gamma, &g);
        let c = ap_constant(&w, p).unwrap();
        let b = brute_ap(w.values(), p);
        assert!((c - b).abs() < 1e-12 * b, "gamma = {gamma}");
    }
    let two_level = WeightField::new(g, (0..32).map(|i| if i < 16 { 1.0 } else { 4.0 }).collect()).unwrap();
    let c = ap_constant(&two_level, 2.0).unwrap();
    assert!((c - brute_ap(two_level.values(), 2.0)).abs() < 1e-12);
}

#[test]
fn sigma_integral_closed_form() {
    // n = 1, p' = 2: 2 (1 + 1/(2s - 1)) for every k
    for s in [0.75, 1.0, 2.0] {
        let exact = 2.0 * (1.0 + 1.0 / (2.0 * s - 1.0));
        for k in [0, 3, 7] {
            let v = sigma_integral(k, 0.5, 1, 2.0, s).unwrap();
            assert!((v - exact).abs() < 1e-9 * exact, "s = {s}, k = {k}: {v}");
        }
    }
    assert!(sigma_integral_check(0..=6, 0.5, 2, 2.0, 1.5).unwrap().passed());
    assert!(sigma_integral(0, 0.5, 1, 2.0, 0.5).is_err());
}

#[test]
fn unit_ball_volumes() {
    assert_eq!(unit_ball_volume(1), 2.0);
    assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
    assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
}

#[test]
fn quasi_norm_of_a_constant() {
    let g = grid(1, 1, 4.0, 64);
    let ones = vec![Complex64::new(1.0, 0.0); 64];
    for r in [0.5, 2.0 / 3.0, 1.0, 3.0] {
        let v = lp_quasi_norm(&ones, &g, 1, r, None).unwrap();
        assert!((v - 8f64.powf(1.0 / r)).abs() < 1e-12 * v);
    }
}

#[test]
fn figure_values_of_the_threshold() {
    let at = |a: f64, b: f64, rho: f64, n: usize| {
        bilinear_threshold(rho, n, &ExponentTriple::from_reciprocals(a, b, a + b).unwrap())
    };
    for (rho, n) in [(0.5, 1), (0.25, 2), (0.9, 3)] {
        let low = n as f64 * (rho - 1.0) / 2.0;
        let high = 3.0 * n as f64 * (rho - 1.0) / 2.0;
        for (a, b) in [(0.5, 0.5), (0.0, 0.5), (0.5, 0.0)] {
            assert_eq!(at(a, b, rho, n).stronger, low);
        }
        for (a, b) in [(0.0, 1.0), (1.0, 0.0), (0.0, 0.0)] {
            assert_eq!(at(a, b, rho, n).stronger, high);
        }
    }
    // weaker threshold, hand computed at rho = 1/2, n = 1
    assert_eq!(at(0.0, 0.5, 0.5, 1).weaker, -0.75);
    assert_eq!(at(0.25, 0.25, 0.5, 1).weaker, -0.5);
    assert_eq!(at(0.75, 0.1, 0.5, 1).region, SubTriangle::NearP);
    assert_eq!(at(0.1, 0.1, 0.5, 1).region, SubTriangle::NearOrigin);
    assert_eq!(at(1.0, 0.0, 1.0, 1).stronger, 0.0);
}

#[test]
fn constant_symbol_gives_the_product() {
    let g = grid(1, 3, 6.0, 64);
    let a = constant_symbol(2.0, Arity::new(1, 3)).unwrap();
    let fs: Vec<Field> = (0..3).map(|s| random_field(&g, 4, s)).collect();
    let t = PreparedSymbol::new(&a, &g).unwrap().apply_multilinear(&fs).unwrap();
    let want: Vec<Complex64> =
        (0..64).map(|i| 2.0 * fs[0].values()[i] * fs[1].values()[i] * fs[2].values()[i]).collect();
    assert!(max_diff(t.values(), &want) < 1e-12);
}

#[test]
fn translation_symbol_shifts_inputs() {
    let g = grid(1, 2, 8.0, 64);
    // both inputs evaluated at x + 2; h = 1/4
    let a = translation_symbol(vec![2.0], 2).unwrap();
    let (f, h) = (random_field(&g, 1, 0), random_field(&g, 1, 1));
    let t = PreparedSymbol::new(&a, &g).unwrap().apply_multilinear(&[f.clone(), h.clone()]).unwrap();
    let want: Vec<Complex64> = (0..64).map(|i| f.values()[(i + 8) % 64] * h.values()[(i + 8) % 64]).collect();
    assert!(max_diff(t.values(), &want) < 1e-12);
}

#[test]
fn fft_route_matches_direct_sum() {
    let g = grid(1, 2, 6.0, 32);
    let (f, h) = (random_field(&g, 2, 0), random_field(&g, 2, 1));
    for desc in ["osc:m=-1,rho=0.5", "band:osc:m=-0.5,rho=0.7", "modsep:g=1,h=0.5,freq=2"] {
        let a = parse_symbol(desc, 2).unwrap().build().unwrap().resolve_for(&g).unwrap();
        let op = PreparedSymbol::new(&a, &g).unwrap();
        assert!(op.is_factored());
        let fast = op.apply_multilinear(&[f.clone(), h.clone()]).unwrap();
        let direct = op.apply_multilinear_direct(&[f.clone(), h.clone()]).unwrap();
        assert!(max_diff(fast.values(), direct.values()) < 1e-12, "{desc}");
    }
    let rough = rough_x_symbol(-0.7, 0.5, XFactor::RandomSigns { seed: 3, cell: 0.5 }, Arity::new(1, 2)).unwrap();
    let op = PreparedSymbol::new(&rough, &g).unwrap();
    assert!(op.is_factored());
    let fast = op.apply_multilinear(&[f.clone(), h.clone()]).unwrap();
    let direct = op.apply_multilinear_direct(&[f, h]).unwrap();
    assert!(max_diff(fast.values(), direct.values()) < 1e-12);
}

#[test]
fn linear_fft_route_matches_direct_sum() {
    let g = grid(1, 2, 4.0, 16);
    let u = random_multi_field(&g, 9, 0);
    for desc in ["osc:m=-1,rho=0.5,n=2,blocks=1", "rough:m=-1,rho=0.5,n=2,blocks=1"] {
        let a = parse_symbol(desc, 1).unwrap().build().unwrap();
        let op = PreparedSymbol::new(&a, &g).unwrap();
        let fast = op.apply_linear(&u).unwrap();
        let direct = op.apply_linear_direct(&u).unwrap();
        assert!(max_diff(fast.values(), direct.values()) < 1e-12, "{desc}");
    }
}

#[test]
fn kernel_route_matches_fourier_route() {
    let g = grid(1, 2, 8.0, 32);
    let a = gaussian_symbol(0.3, Arity::new(1, 2)).unwrap().modulated(XFactor::ExpISin { freq: 1.0 }).unwrap();
    let fam = build_family(&g).unwrap();
    let k = compute_kernel(&a, &fam, KernelIndex::Total, &g).unwrap();
    let (f, h) = (random_field(&g, 3, 0), random_field(&g, 3, 1));
    let by_kernel = k.apply(&[f.clone(), h.clone()]).unwrap();
    let by_symbol = PreparedSymbol::new(&a, &g).unwrap().apply_multilinear(&[f, h]).unwrap();
    assert!(max_diff(by_kernel.values(), by_symbol.values()) < 1e-10);
}

#[test]
fn s_on_tensors_is_the_bilinear_operator() {
    let g = grid(1, 2, 4.0, 32);
    let a = random_table_symbol(&g, 5, false, None).unwrap();
    let (f, h) = (random_field(&g, 6, 0), random_field(&g, 6, 1));
    let s = apply_s(&a, &MultiField::tensor(&[f.clone(), h.clone()]).unwrap()).unwrap();
    let t = PreparedSymbol::new(&a, &g).unwrap().apply_multilinear(&[f, h]).unwrap();
    assert!(max_diff(s.values(), t.values()) < 1e-12);
}

#[test]
fn s_adjoint_is_the_hilbert_adjoint() {
    let g = grid(1, 2, 4.0, 16);
    let a = random_table_symbol(&g, 8, false, None).unwrap();
    let big_f = random_multi_field(&g, 1, 0);
    let v = random_field(&g, 2, 0);
    let lhs = pairing(&apply_s(&a, &big_f).unwrap(), &v);
    let adj = apply_s_adjoint(&a, &v).unwrap();
    let cell = g.spacing().powi(2);
    let rhs: Complex64 = big_f.values().iter().zip(adj.values()).map(|(x, y)| x * y.conj()).sum::<Complex64>() * cell;
    assert!((lhs - rhs).norm() < 1e-12 * lhs.norm());
}

#[test]
fn multiplier_of_a_separable_symbol() {
    // a(xi, eta) = g(xi + eta) h(eta): m(zeta) = |g(zeta)|^2 (2 pi)^{-1} dxi sum |h|^2
    let g = grid(1, 2, 4.0, 32);
    let a = parse_symbol("sep:g=1,h=0.7", 2).unwrap().build().unwrap();
    let m = ssstar_multiplier(&a, &g).unwrap();
    let dxi = g.freq_spacing();
    let h2: f64 = (0..32).map(|c| (-g.freq(c).powi(2) / 0.49).exp()).sum::<f64>() * dxi / (2.0 * PI);
    let zeta0 = m.values()[16].re;
    assert!((zeta0 - h2).abs() < 1e-12 * h2);
    let a_c = a_constant(&a, &g).unwrap();
    assert!((a_c - h2.sqrt()).abs() < 1e-12);
}

#[test]
fn local_functional_of_the_constant_symbol() {
    // a = 1: value^2 = (h * #{x : |x - x0| <= 1}) (G dxi)
    let g = grid(1, 2, 4.0, 32);
    let a = constant_symbol(1.0, Arity::new(1, 2)).unwrap();
    let x0 = vec![vec![0.0], vec![1.1]];
    let r = hypo_functional(&a, 0, &g, &x0, &[vec![0]]).unwrap();
    let inside = (0..32).filter(|&i| (g.coord(i) - 1.1).abs() <= 1.0).count() as f64;
    let inside0 = (0..32).filter(|&i| g.coord(i).abs() <= 1.0).count() as f64;
    let want = (inside.max(inside0) * g.spacing() * 32.0 * g.freq_spacing()).sqrt();
    assert!((r.sup() - want).abs() < 1e-12 * want);
}
