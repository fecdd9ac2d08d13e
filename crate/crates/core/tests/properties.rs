use proptest::prelude::*;

use pdo_lab::grid::{forward_ft, inverse_ft, lp_norm, ExponentTriple, Field, GridSpec, Sampled};
use pdo_lab::lp_decomp::LittlewoodPaleyFamily;
use pdo_lab::maximal::maximal_values;
use pdo_lab::operators::PreparedSymbol;
use pdo_lab::symbols::{oscillatory_symbol, rough_x_symbol, Arity, XFactor};
use pdo_lab::verify::{bilinear_threshold, random_field, Settings};
use pdo_lab::weights::{ap_constant, power_weight};
use pdo_lab::Complex64;

fn grid1(g: usize) -> GridSpec {
    GridSpec::new(1, 1, 4.0, g).unwrap()
}

fn grid2(g: usize) -> GridSpec {
    GridSpec::new(1, 2, 4.0, g).unwrap()
}

fn combine(a: Complex64, f: &Field, b: Complex64, h: &Field) -> Field {
    let v = f.values().iter().zip(h.values()).map(|(x, y)| a * x + b * y).collect();
    Field::new(*f.grid(), v).unwrap()
}

fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    let scale = b.iter().map(|z| z.norm()).fold(1.0, f64::max);
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol * scale)
}

fn triple() -> impl Strategy<Value = ExponentTriple> {
    (0.0..=1.0f64, 0.0..=1.0f64)
        .prop_filter("1/r <= 1", |(a, b)| a + b <= 1.0)
        .prop_map(|(a, b)| ExponentTriple::from_reciprocals(a, b, a + b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn operator_is_multilinear(seed in 0u64..1000, ar in -2.0..2.0f64, ai in -2.0..2.0f64, rough in any::<bool>()) {
        let g = grid2(32);
        let a = if rough {
            rough_x_symbol(-0.5, 0.5, XFactor::RandomSigns { seed, cell: 1.0 }, Arity::new(1, 2)).unwrap()
        } else {
            oscillatory_symbol(-0.5, 0.5, Arity::new(1, 2)).unwrap()
        };
        let op = PreparedSymbol::new(&a, &g).unwrap();
        let (f1, f2, h) = (random_field(&g, seed, 0), random_field(&g, seed, 1), random_field(&g, seed, 2));
        let alpha = Complex64::new(ar, ai);
        let one = Complex64::new(1.0, 0.0);
        let lhs = op.apply_multilinear(&[combine(alpha, &f1, one, &f2), h.clone()]).unwrap();
        let t1 = op.apply_multilinear(&[f1.clone(), h.clone()]).unwrap();
        let t2 = op.apply_multilinear(&[f2.clone(), h.clone()]).unwrap();
        prop_assert!(close(lhs.values(), combine(alpha, &t1, one, &t2).values(), 1e-12));
        let rhs = op.apply_multilinear(&[h.clone(), combine(one, &f1, alpha, &f2)]).unwrap();
        let s1 = op.apply_multilinear(&[h.clone(), f1]).unwrap();
        let s2 = op.apply_multilinear(&[h, f2]).unwrap();
        prop_assert!(close(rhs.values(), combine(one, &s1, alpha, &s2).values(), 1e-12));
    }

    #[test]
    fn fast_and_direct_routes_agree(seed in 0u64..1000, rough in any::<bool>()) {
        let g = grid2(16);
        let a = if rough {
            rough_x_symbol(-0.8, 0.5, XFactor::RandomSigns { seed, cell: 1.0 }, Arity::new(1, 2)).unwrap()
        } else {
            oscillatory_symbol(-0.8, 0.5, Arity::new(1, 2)).unwrap()
        };
        let op = PreparedSymbol::new(&a, &g).unwrap();
        let u = [random_field(&g, seed, 0), random_field(&g, seed, 1)];
        let fast = op.apply_multilinear(&u).unwrap();
        let direct = op.apply_multilinear_direct(&u).unwrap();
        prop_assert!(close(fast.values(), direct.values(), 1e-11));
    }

    #[test]
    fn norm_ratio_is_scale_invariant(seed in 0u64..1000, t in triple()) {
        let g = grid2(32);
        let op = PreparedSymbol::new(&oscillatory_symbol(-0.5, 0.5, Arity::new(1, 2)).unwrap(), &g).unwrap();
        let (f, h) = (random_field(&g, seed, 0), random_field(&g, seed, 1));
        let big = f.scale(Complex64::new(1e3, 0.0));
        let ratio = |f: &Field| {
            let out = op.apply_multilinear(&[f.clone(), h.clone()]).unwrap();
            lp_norm(&out, t.r, None).unwrap() / (lp_norm(f, t.q, None).unwrap() * lp_norm(&h, t.p, None).unwrap())
        };
        let (r0, r1) = (ratio(&f), ratio(&big));
        prop_assert!((r0 - r1).abs() <= 1e-12 * r0);
        let pointwise = |f: &Field| {
            let out = op.apply_multilinear(&[f.clone(), h.clone()]).unwrap();
            let (mf, mh) = (maximal_values(f, 2.0).unwrap(), maximal_values(&h, 2.0).unwrap());
            out.values().iter().zip(mf.iter().zip(&mh)).map(|(t, (a, b))| t.norm() / (a * b)).fold(0.0, f64::max)
        };
        let (p0, p1) = (pointwise(&f), pointwise(&big));
        prop_assert!((p0 - p1).abs() <= 1e-12 * p0);
    }

    #[test]
    fn maximal_function_properties(seed in 0u64..1000, p in 1.0..6.0f64, dp in 0.0..3.0f64, c in 0.01..100.0f64) {
        let g = grid1(32);
        let u = random_field(&g, seed, 0);
        let m = maximal_values(&u, p).unwrap();
        for (mv, z) in m.iter().zip(u.values()) {
            prop_assert!(*mv >= z.norm() * (1.0 - 1e-12));
        }
        let mc = maximal_values(&u.scale(Complex64::new(0.0, c)), p).unwrap();
        for (a, b) in mc.iter().zip(&m) {
            prop_assert!((a - c * b).abs() <= 1e-12 * c * b);
        }
        let mq = maximal_values(&u, p + dp).unwrap();
        for (a, b) in m.iter().zip(&mq) {
            prop_assert!(*a <= b * (1.0 + 1e-12));
        }
        let k = maximal_values(&Field::from_real_fn(g, |_| -c), p).unwrap();
        prop_assert!(k.iter().all(|v| (v - c).abs() <= 1e-12 * c));
    }

    #[test]
    fn ap_constant_properties(gamma in -0.9..2.0f64, p in 1.2..4.0f64, c in 0.001..1000.0f64) {
        let g = grid1(32);
        let w = power_weight(gamma, &g);
        let a = ap_constant(&w, p).unwrap();
        prop_assert!(a >= 1.0 - 1e-12);
        let b = ap_constant(&w.scaled(c), p).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn partition_of_unity(r in 0.0..1.0e3f64, k in 2u32..12) {
        let fam = LittlewoodPaleyFamily::new(1, k);
        let s = LittlewoodPaleyFamily::window(0, k, r);
        if r < fam.resolved_radius() {
            prop_assert!((s - 1.0).abs() < 1e-14);
        }
        prop_assert!((-1e-15..=1.0 + 1e-14).contains(&s));
    }

    #[test]
    fn threshold_ordering_and_symmetry(t in triple(), rho in 0.0..=1.0f64, n in 1usize..4) {
        let th = bilinear_threshold(rho, n, &t);
        prop_assert!(th.stronger >= th.weaker - 1e-12);
        prop_assert!(th.stronger <= 0.0 && th.weaker <= 0.0);
        let swapped = ExponentTriple::new(t.q, t.p, t.r).unwrap();
        let sw = bilinear_threshold(rho, n, &swapped);
        prop_assert!((sw.stronger - th.stronger).abs() < 1e-12);
        prop_assert!((sw.weaker - th.weaker).abs() < 1e-12);
    }

    #[test]
    fn fourier_round_trip(seed in 0u64..1000, n in 1usize..3) {
        let g = GridSpec::new(n, 1, 3.0, 16).unwrap();
        let u = random_field(&g, seed, 0);
        let back = inverse_ft(&forward_ft(&u)).unwrap();
        prop_assert!(close(back.values(), u.values(), 1e-12));
        // Plancherel with the 2pi in the measure
        let spec = forward_ft(&u);
        let lhs = lp_norm(&u, 2.0, None).unwrap();
        let rhs = spec.lp_norm(2.0).unwrap() / (2.0 * std::f64::consts::PI).powf(n as f64 / 2.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
    }

    #[test]
    fn lp_norm_homogeneous_and_subadditive(seed in 0u64..1000, p in 1.0..8.0f64, inf in any::<bool>(), c in -50.0..50.0f64) {
        let p = if inf { f64::INFINITY } else { p };
        let g = grid1(32);
        let (f, h) = (random_field(&g, seed, 0), random_field(&g, seed, 1));
        let nf = lp_norm(&f, p, None).unwrap();
        let nc = lp_norm(&f.scale(Complex64::new(c, 0.0)), p, None).unwrap();
        prop_assert!((nc - c.abs() * nf).abs() <= 1e-12 * nf.max(1e-300) * c.abs().max(1.0));
        let one = Complex64::new(1.0, 0.0);
        let sum = lp_norm(&combine(one, &f, one, &h), p, None).unwrap();
        prop_assert!(sum <= (nf + lp_norm(&h, p, None).unwrap()) * (1.0 + 1e-12));
    }

    #[test]
    fn triple_from_pq(p in 1.0..100.0f64, q in 1.0..100.0f64, pinf in any::<bool>(), qinf in any::<bool>()) {
        let p = if pinf { f64::INFINITY } else { p };
        let q = if qinf { f64::INFINITY } else { q };
        let t = ExponentTriple::from_pq(p, q).unwrap();
        let [a, b, c] = t.reciprocals();
        prop_assert!((a + b - c).abs() < 1e-12);
        prop_assert_eq!((t.p, t.q), (p, q));
        prop_assert!(t.r >= 0.5);
        let back = ExponentTriple::from_reciprocals(a, b, c).unwrap();
        prop_assert!((1.0 / back.r - c).abs() < 1e-12);
        prop_assert!(ExponentTriple::new(p, q, t.r * 1.5 + 0.1).is_err() || t.r.is_infinite());
    }

    #[test]
    fn settings_json_round_trip(hp in 0.5..64.0f64, ladder in prop::collection::vec(8usize..1024, 1..5), trials in 1usize..100, seed in any::<u64>()) {
        let s = Settings { half_period: hp, ladder, trials, seed };
        let text = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<Settings>(&text).unwrap(), s);
    }
}
