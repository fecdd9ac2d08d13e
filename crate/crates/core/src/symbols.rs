//! Symbols `a(x, Xi)`, their claimed classes, and seminorm scans.
//!
//! A [`SymbolModel`] is built from a serializable [`SymbolSpec`] recipe, so
//! every symbol used in an experiment can be written to a report and rebuilt.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::grid::{ext_real, weighted_norm, GridSpec};
use crate::lp_decomp::{build_family, finite_difference, multi_indices, norm, LittlewoodPaleyFamily};
use crate::verify::report::BoundReport;
use crate::weights::WeightSpec;

const MAX_DIMS: usize = 16;

/// Block dimension `n` and number of blocks `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arity {
    pub n: usize,
    pub blocks: usize,
}

impl Arity {
    pub fn new(n: usize, blocks: usize) -> Self {
        Arity { n, blocks }
    }

    pub fn dims(&self) -> usize {
        self.n * self.blocks
    }
}

/// Class a symbol is claimed to belong to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClaimedClass {
    /// Bounded in x, `|d^alpha_Xi a| <= C <Xi>^{m - rho|alpha|}`.
    LinfS { m: f64, rho: f64 },
    /// As `LinfS` with the sup over x replaced by a weighted `L^p` norm.
    LpMuS {
        m: f64,
        rho: f64,
        #[serde(with = "ext_real")]
        p: f64,
        weight: WeightSpec,
    },
    /// Smooth in both variables, `<Xi>^{m - rho|alpha| + delta|beta|}`.
    Hormander { m: f64, rho: f64, delta: f64 },
    Unclassified,
}

impl ClaimedClass {
    pub fn order(&self) -> Option<f64> {
        match self {
            ClaimedClass::LinfS { m, .. } | ClaimedClass::LpMuS { m, .. } | ClaimedClass::Hormander { m, .. } => Some(*m),
            ClaimedClass::Unclassified => None,
        }
    }

    pub fn rho(&self) -> Option<f64> {
        match self {
            ClaimedClass::LinfS { rho, .. }
            | ClaimedClass::LpMuS { rho, .. }
            | ClaimedClass::Hormander { rho, .. } => Some(*rho),
            ClaimedClass::Unclassified => None,
        }
    }

    pub fn delta(&self) -> f64 {
        match self {
            ClaimedClass::Hormander { delta, .. } => *delta,
            _ => 0.0,
        }
    }

    fn weaken_to_linf(&self) -> ClaimedClass {
        match self {
            ClaimedClass::Hormander { m, rho, .. } => ClaimedClass::LinfS { m: *m, rho: *rho },
            other => other.clone(),
        }
    }
}

/// Bounded profile `b(x)` multiplying a frequency symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum XFactor {
    Unit,
    /// `sign(sin(freq x_1))`, with `sign(0) = 1`.
    SignSin { freq: f64 },
    /// Independent seeded signs on cells of side `cell`.
    RandomSigns { seed: u64, cell: f64 },
    /// `exp(i sin(freq x_1))`.
    ExpISin { freq: f64 },
    /// `exp(-|x|^2 / (2 width^2))`.
    Gaussian { width: f64 },
    Product { factors: Vec<XFactor> },
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl XFactor {
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        match self {
            XFactor::Unit => Complex64::new(1.0, 0.0),
            XFactor::SignSin { freq } => {
                Complex64::new(if (freq * x[0]).sin() >= 0.0 { 1.0 } else { -1.0 }, 0.0)
            }
            XFactor::RandomSigns { seed, cell } => {
                let mut h = mix64(*seed);
                for &c in x {
                    h = mix64(h ^ ((c / cell).floor() as i64 as u64));
                }
                Complex64::new(if h & 1 == 0 { 1.0 } else { -1.0 }, 0.0)
            }
            XFactor::ExpISin { freq } => Complex64::from_polar(1.0, (freq * x[0]).sin()),
            XFactor::Gaussian { width } => {
                Complex64::new((-x.iter().map(|v| v * v).sum::<f64>() / (2.0 * width * width)).exp(), 0.0)
            }
            XFactor::Product { factors } => factors.iter().map(|f| f.eval(x)).product(),
        }
    }

    pub fn is_smooth(&self) -> bool {
        match self {
            XFactor::SignSin { .. } | XFactor::RandomSigns { .. } => false,
            XFactor::Product { factors } => factors.iter().all(|f| f.is_smooth()),
            _ => true,
        }
    }

    fn combine(a: XFactor, b: XFactor) -> XFactor {
        match (a, b) {
            (XFactor::Unit, f) | (f, XFactor::Unit) => f,
            (a, b) => XFactor::Product { factors: vec![a, b] },
        }
    }
}

/// Radial frequency profile on `R^n` used by separable bilinear symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FreqProfile {
    Zero,
    Constant { value: f64 },
    /// `exp(-|z|^2 / (2 width^2))`.
    Gaussian { width: f64 },
    /// Indicator of the closed ball of the given radius.
    Indicator { radius: f64 },
}

impl FreqProfile {
    pub fn eval(&self, z: &[f64]) -> f64 {
        match self {
            FreqProfile::Zero => 0.0,
            FreqProfile::Constant { value } => *value,
            FreqProfile::Gaussian { width } => (-z.iter().map(|v| v * v).sum::<f64>() / (2.0 * width * width)).exp(),
            FreqProfile::Indicator { radius } => {
                if norm(z) <= *radius {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn decays(&self) -> bool {
        !matches!(self, FreqProfile::Constant { value } if *value != 0.0)
    }

    fn smooth(&self) -> bool {
        !matches!(self, FreqProfile::Indicator { .. })
    }
}

/// Serializable recipe for a symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "constructor", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    Constant {
        value: f64,
        #[serde(default)]
        imag: f64,
        n: usize,
        blocks: usize,
    },
    Oscillatory { m: f64, rho: f64, n: usize, blocks: usize },
    RoughX { m: f64, rho: f64, profile: XFactor, n: usize, blocks: usize },
    Gaussian { scale: f64, n: usize, blocks: usize },
    NegLaplacian { n: usize, blocks: usize },
    Translation { shift: Vec<f64>, blocks: usize },
    PlaneWave { n: usize },
    SeparableBilinear { g: FreqProfile, h: FreqProfile, n: usize },
    Modulated { factor: XFactor, inner: Box<SymbolSpec> },
    SingleBlock { block: usize, blocks: usize, inner: Box<SymbolSpec> },
    RandomTable {
        seed: u64,
        n: usize,
        blocks: usize,
        points: usize,
        half_period: f64,
        x_dependent: bool,
        #[serde(default)]
        band: Option<f64>,
    },
    Window { lo: u32, hi: u32, inner: Box<SymbolSpec> },
    /// `sum_{k < K_max} a_k`, with `K_max` fixed once a grid is chosen.
    ResolvedBand { inner: Box<SymbolSpec> },
    Reclassified { class: ClaimedClass, inner: Box<SymbolSpec> },
}

pub(crate) struct Table {
    grid: GridSpec,
    dims: usize,
    x_dependent: bool,
    values: Vec<Complex64>,
}

impl Table {
    fn xi_index(&self, xi: &[f64]) -> Option<usize> {
        let g = self.grid.points() as i64;
        let d = self.grid.freq_spacing();
        let mut flat = 0usize;
        for &v in xi {
            let k = (v / d).round() as i64 + g / 2;
            if !(0..g).contains(&k) {
                return None;
            }
            flat = flat * g as usize + k as usize;
        }
        Some(flat)
    }

    fn x_index(&self, x: &[f64]) -> usize {
        let g = self.grid.points() as i64;
        let h = self.grid.spacing();
        x.iter().fold(0usize, |acc, &v| {
            let i = ((v + self.grid.half_period()) / h - 0.5).round() as i64;
            acc * g as usize + i.rem_euclid(g) as usize
        })
    }

    fn lookup(&self, x: &[f64], xi_flat: usize) -> Complex64 {
        let per_x = self.grid.len(self.dims);
        if self.x_dependent {
            self.values[self.x_index(x) * per_x + xi_flat]
        } else {
            self.values[xi_flat]
        }
    }
}

#[derive(Clone)]
pub(crate) enum Form {
    Const(Complex64),
    /// `<Xi>^m exp(i phase <Xi>^{1 - rho})`.
    Osc { m: f64, rho: f64, phase: f64 },
    /// `Osc` with `phase = 1 + Re b(x) / 2`.
    RoughOsc { m: f64, rho: f64, profile: XFactor },
    Gauss { scale: f64 },
    NegLap,
    Translate(Vec<f64>),
    PlaneWave,
    Separable { g: FreqProfile, h: FreqProfile },
    Modulated { factor: XFactor, inner: Box<Form> },
    Block { block: usize, inner: Box<Form> },
    Table(Arc<Table>),
    Window { lo: u32, hi: u32, inner: Box<Form> },
}

const MAX_BRANCHES: usize = 16;

fn rough_phase(profile: &XFactor, x: &[f64]) -> f64 {
    1.0 + profile.eval(x).re / 2.0
}

fn bracket(xi: &[f64]) -> f64 {
    (1.0 + xi.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

impl Form {
    pub(crate) fn eval(&self, ar: Arity, x: &[f64], xi: &[f64]) -> Complex64 {
        match self {
            Form::Const(c) => *c,
            Form::Osc { m, rho, phase } => {
                let t = bracket(xi);
                Complex64::from_polar(t.powf(*m), phase * t.powf(1.0 - rho))
            }
            Form::RoughOsc { m, rho, profile } => {
                Form::Osc { m: *m, rho: *rho, phase: rough_phase(profile, x) }.eval(ar, x, xi)
            }
            Form::Gauss { scale } => Complex64::new((-scale * xi.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0),
            Form::NegLap => Complex64::new(-xi.iter().map(|v| v * v).sum::<f64>(), 0.0),
            Form::Translate(v) => {
                let phase: f64 = xi.iter().enumerate().map(|(i, z)| z * v[i % ar.n]).sum();
                Complex64::from_polar(1.0, phase)
            }
            Form::PlaneWave => {
                let phase: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
                Complex64::from_polar(1.0, phase)
            }
            Form::Separable { g, h } => {
                let n = ar.n;
                let mut z = [0.0; MAX_DIMS];
                for a in 0..n {
                    z[a] = xi[a] + xi[n + a];
                }
                Complex64::new(g.eval(&z[..n]) * h.eval(&xi[n..2 * n]), 0.0)
            }
            Form::Modulated { factor, inner } => factor.eval(x) * inner.eval(ar, x, xi),
            Form::Block { block, inner } => {
                let n = ar.n;
                inner.eval(Arity::new(n, 1), x, &xi[block * n..(block + 1) * n])
            }
            Form::Table(t) => match t.xi_index(xi) {
                Some(i) => t.lookup(x, i),
                None => Complex64::new(0.0, 0.0),
            },
            Form::Window { lo, hi, inner } => {
                let w = LittlewoodPaleyFamily::window(*lo, *hi, norm(xi));
                if w == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    inner.eval(ar, x, xi) * w
                }
            }
        }
    }

    /// Evaluation at lattice frequencies `k` (signed indices inside the window),
    /// with sums of block frequencies wrapped periodically.
    pub(crate) fn eval_lattice(&self, ar: Arity, grid: &GridSpec, x: &[f64], k: &[i64]) -> Complex64 {
        let d = grid.freq_spacing();
        match self {
            Form::Separable { g, h } => {
                let n = ar.n;
                let mut z = [0.0; MAX_DIMS];
                let mut e = [0.0; MAX_DIMS];
                for a in 0..n {
                    let (c, _) = grid.wrap_freq(k[a] + k[n + a]);
                    z[a] = grid.freq(c);
                    e[a] = k[n + a] as f64 * d;
                }
                Complex64::new(g.eval(&z[..n]) * h.eval(&e[..n]), 0.0)
            }
            Form::Modulated { factor, inner } => factor.eval(x) * inner.eval_lattice(ar, grid, x, k),
            Form::Block { block, inner } => {
                let n = ar.n;
                inner.eval_lattice(Arity::new(n, 1), grid, x, &k[block * n..(block + 1) * n])
            }
            Form::Table(t) => {
                let g = grid.points() as i64;
                let flat = k.iter().fold(0usize, |acc, &v| acc * g as usize + (v + g / 2) as usize);
                t.lookup(x, flat)
            }
            Form::Window { lo, hi, inner } => {
                let mut xi = [0.0; MAX_DIMS];
                for (a, &v) in k.iter().enumerate() {
                    xi[a] = v as f64 * d;
                }
                let w = LittlewoodPaleyFamily::window(*lo, *hi, norm(&xi[..k.len()]));
                if w == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    inner.eval_lattice(ar, grid, x, k) * w
                }
            }
            _ => {
                let mut xi = [0.0; MAX_DIMS];
                for (a, &v) in k.iter().enumerate() {
                    xi[a] = v as f64 * d;
                }
                self.eval(ar, x, &xi[..k.len()])
            }
        }
    }

    fn gradient(&self, ar: Arity, x: &[f64], xi: &[f64]) -> Option<Vec<Complex64>> {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Form::Const(_) => Some(vec![zero; xi.len()]),
            Form::Osc { m, rho, phase } => {
                let t = bracket(xi);
                let s = phase * t.powf(1.0 - rho);
                let common = Complex64::from_polar(t.powf(m - 2.0), s) * Complex64::new(*m, (1.0 - rho) * s);
                Some(xi.iter().map(|&v| common * v).collect())
            }
            Form::RoughOsc { m, rho, profile } => {
                Form::Osc { m: *m, rho: *rho, phase: rough_phase(profile, x) }.gradient(ar, x, xi)
            }
            Form::Gauss { scale } => {
                let a = self.eval(ar, x, xi);
                Some(xi.iter().map(|&v| a * (-2.0 * scale * v)).collect())
            }
            Form::NegLap => Some(xi.iter().map(|&v| Complex64::new(-2.0 * v, 0.0)).collect()),
            Form::Translate(v) => {
                let a = self.eval(ar, x, xi);
                Some((0..xi.len()).map(|i| a * Complex64::new(0.0, v[i % ar.n])).collect())
            }
            Form::PlaneWave => {
                let a = self.eval(ar, x, xi);
                Some(x.iter().map(|&xv| a * Complex64::new(0.0, xv)).collect())
            }
            Form::Modulated { factor, inner } => {
                let b = factor.eval(x);
                inner.gradient(ar, x, xi).map(|g| g.into_iter().map(|v| v * b).collect())
            }
            Form::Block { block, inner } => {
                let n = ar.n;
                let gi = inner.gradient(Arity::new(n, 1), x, &xi[block * n..(block + 1) * n])?;
                let mut out = vec![zero; xi.len()];
                out[block * n..(block + 1) * n].copy_from_slice(&gi);
                Some(out)
            }
            _ => None,
        }
    }

    fn x_smooth(&self) -> bool {
        match self {
            Form::Modulated { factor, inner } => factor.is_smooth() && inner.x_smooth(),
            Form::RoughOsc { profile, .. } => profile.is_smooth(),
            Form::Block { inner, .. } | Form::Window { inner, .. } => inner.x_smooth(),
            Form::Table(t) => !t.x_dependent,
            _ => true,
        }
    }

    fn xi_smooth(&self) -> bool {
        match self {
            Form::Table(_) => false,
            Form::Separable { g, h } => g.smooth() && h.smooth(),
            Form::Modulated { inner, .. } | Form::Block { inner, .. } | Form::Window { inner, .. } => inner.xi_smooth(),
            _ => true,
        }
    }

    /// Splits `a(x, Xi) = b(x) s(Xi)` when possible.
    pub(crate) fn split_x(&self) -> Option<(Option<XFactor>, Form)> {
        match self {
            Form::PlaneWave | Form::RoughOsc { .. } => None,
            Form::Table(t) if t.x_dependent => None,
            Form::Modulated { factor, inner } => {
                let (f, rest) = inner.split_x()?;
                let f = match f {
                    Some(f) => XFactor::combine(factor.clone(), f),
                    None => factor.clone(),
                };
                Some((Some(f), rest))
            }
            Form::Block { block, inner } => {
                let (f, rest) = inner.split_x()?;
                Some((f, Form::Block { block: *block, inner: Box::new(rest) }))
            }
            Form::Window { lo, hi, inner } => {
                let (f, rest) = inner.split_x()?;
                Some((f, Form::Window { lo: *lo, hi: *hi, inner: Box::new(rest) }))
            }
            other => Some((None, other.clone())),
        }
    }

    /// Splits an x-dependent form whose x-profile takes at most
    /// `MAX_BRANCHES` values on the lattice into x-independent branches,
    /// returning the branch index of every lattice point.
    pub(crate) fn x_branches(&self, grid: &GridSpec, n: usize) -> Option<(Vec<usize>, Vec<Form>)> {
        match self {
            Form::RoughOsc { m, rho, profile } => {
                let mut x = vec![0.0; n];
                let mut phases: Vec<f64> = Vec::new();
                let mut index = Vec::with_capacity(grid.len(n));
                for i in 0..grid.len(n) {
                    grid.point(i, n, &mut x);
                    let c = rough_phase(profile, &x);
                    let b = match phases.iter().position(|p| p.to_bits() == c.to_bits()) {
                        Some(b) => b,
                        None => {
                            if phases.len() == MAX_BRANCHES {
                                return None;
                            }
                            phases.push(c);
                            phases.len() - 1
                        }
                    };
                    index.push(b);
                }
                Some((index, phases.into_iter().map(|phase| Form::Osc { m: *m, rho: *rho, phase }).collect()))
            }
            Form::Window { lo, hi, inner } => {
                let (index, forms) = inner.x_branches(grid, n)?;
                let wrap = |f| Form::Window { lo: *lo, hi: *hi, inner: Box::new(f) };
                Some((index, forms.into_iter().map(wrap).collect()))
            }
            _ => None,
        }
    }

    fn table_grid(&self) -> Option<GridSpec> {
        match self {
            Form::Table(t) => Some(t.grid),
            Form::Modulated { inner, .. } | Form::Block { inner, .. } | Form::Window { inner, .. } => inner.table_grid(),
            _ => None,
        }
    }
}

/// An evaluable symbol with its recipe and claimed class.
#[derive(Clone)]
pub struct SymbolModel {
    spec: SymbolSpec,
    arity: Arity,
    class: ClaimedClass,
    form: Form,
    rapid_decay: bool,
}

impl std::fmt::Debug for SymbolModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymbolModel")
            .field("spec", &self.spec)
            .field("arity", &self.arity)
            .field("class", &self.class)
            .finish()
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn check_arity(n: usize, blocks: usize) -> Result<()> {
    if n == 0 || blocks == 0 || n * blocks > MAX_DIMS {
        return Err(Error::Parameter(format!("unsupported arity (n={n}, N={blocks})")));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Parameter(format!("rho must lie in (0, 1], got {rho}")));
    }
    Ok(())
}

impl SymbolSpec {
    /// Builds the evaluable model.
    pub fn build(&self) -> Result<SymbolModel> {
        let (arity, class, form, rapid_decay) = match self {
            SymbolSpec::Constant { value, imag, n, blocks } => {
                check_arity(*n, *blocks)?;
                let c = Complex64::new(*value, *imag);
                (
                    Arity::new(*n, *blocks),
                    ClaimedClass::Hormander { m: 0.0, rho: 1.0, delta: 0.0 },
                    Form::Const(c),
                    c == Complex64::new(0.0, 0.0),
                )
            }
            SymbolSpec::Oscillatory { m, rho, n, blocks } => {
                check_arity(*n, *blocks)?;
                check_rho(*rho)?;
                if !(m.is_finite() && *m <= 0.0) {
                    return Err(Error::Parameter(format!("order must be finite and <= 0, got {m}")));
                }
                (
                    Arity::new(*n, *blocks),
                    ClaimedClass::Hormander { m: *m, rho: *rho, delta: 0.0 },
                    Form::Osc { m: *m, rho: *rho, phase: 1.0 },
                    false,
                )
            }
            SymbolSpec::RoughX { m, rho, profile, n, blocks } => {
                check_arity(*n, *blocks)?;
                check_rho(*rho)?;
                if !m.is_finite() {
                    return Err(Error::Parameter(format!("order must be finite, got {m}")));
                }
                (
                    Arity::new(*n, *blocks),
                    ClaimedClass::LinfS { m: *m, rho: *rho },
                    Form::RoughOsc { m: *m, rho: *rho, profile: profile.clone() },
                    false,
                )
            }
            SymbolSpec::Gaussian { scale, n, blocks } => {
                check_arity(*n, *blocks)?;
                positive("scale", *scale)?;
                (
                    Arity::new(*n, *blocks),
                    ClaimedClass::Hormander { m: 0.0, rho: 1.0, delta: 0.0 },
                    Form::Gauss { scale: *scale },
                    true,
                )
            }
            SymbolSpec::NegLaplacian { n, blocks } => {
                check_arity(*n, *blocks)?;
                (
                    Arity::new(*n, *blocks),
                    ClaimedClass::Hormander { m: 2.0, rho: 1.0, delta: 0.0 },
                    Form::NegLap,
                    false,
                )
            }
            SymbolSpec::Translation { shift, blocks } => {
                check_arity(shift.len(), *blocks)?;
                (
                    Arity::new(shift.len(), *blocks),
                    ClaimedClass::Hormander { m: 0.0, rho: 0.0, delta: 0.0 },
                    Form::Translate(shift.clone()),
                    false,
                )
            }
            SymbolSpec::PlaneWave { n } => {
                check_arity(*n, 1)?;
                (Arity::new(*n, 1), ClaimedClass::Unclassified, Form::PlaneWave, false)
            }
            SymbolSpec::SeparableBilinear { g, h, n } => {
                check_arity(*n, 2)?;
                let class = if g.smooth() && h.smooth() && g.decays() && h.decays() {
                    ClaimedClass::Hormander { m: 0.0, rho: 1.0, delta: 0.0 }
                } else {
                    ClaimedClass::Unclassified
                };
                (
                    Arity::new(*n, 2),
                    class,
                    Form::Separable { g: g.clone(), h: h.clone() },
                    g.decays() && h.decays(),
                )
            }
            SymbolSpec::Modulated { factor, inner } => {
                let a = inner.build()?;
                let class = if factor.is_smooth() { a.class.clone() } else { a.class.weaken_to_linf() };
                (
                    a.arity,
                    class,
                    Form::Modulated { factor: factor.clone(), inner: Box::new(a.form) },
                    a.rapid_decay,
                )
            }
            SymbolSpec::SingleBlock { block, blocks, inner } => {
                let a = inner.build()?;
                if a.arity.blocks != 1 || *block >= *blocks {
                    return Err(Error::Parameter("single-block symbols wrap a one-block symbol".into()));
                }
                check_arity(a.arity.n, *blocks)?;
                (
                    Arity::new(a.arity.n, *blocks),
                    ClaimedClass::Unclassified,
                    Form::Block { block: *block, inner: Box::new(a.form) },
                    false,
                )
            }
            SymbolSpec::RandomTable { seed, n, blocks, points, half_period, x_dependent, band } => {
                check_arity(*n, *blocks)?;
                let grid = GridSpec::new(*n, *blocks, *half_period, *points)?;
                let dims = n * blocks;
                let per_x = grid.len(dims);
                let copies = if *x_dependent { grid.block_len() } else { 1 };
                let band = band.unwrap_or(f64::INFINITY);
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut xi = vec![0.0; dims];
                let mut values = Vec::with_capacity(per_x * copies);
                for _ in 0..copies {
                    for i in 0..per_x {
                        grid.freq_point(i, dims, &mut xi);
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        let inside = xi.iter().all(|v| v.abs() <= band);
                        values.push(if inside { Complex64::new(re, im) } else { Complex64::new(0.0, 0.0) });
                    }
                }
                let table = Table { grid, dims, x_dependent: *x_dependent, values };
                (Arity::new(*n, *blocks), ClaimedClass::Unclassified, Form::Table(Arc::new(table)), true)
            }
            SymbolSpec::Window { lo, hi, inner } => {
                let a = inner.build()?;
                if lo > hi {
                    return Err(Error::Parameter(format!("empty dyadic window {lo}..={hi}")));
                }
                (
                    a.arity,
                    a.class,
                    Form::Window { lo: *lo, hi: *hi, inner: Box::new(a.form) },
                    true,
                )
            }
            SymbolSpec::ResolvedBand { inner } => {
                let a = inner.build()?;
                (a.arity, a.class, a.form, a.rapid_decay)
            }
            SymbolSpec::Reclassified { class, inner } => {
                let a = inner.build()?;
                (a.arity, class.clone(), a.form, a.rapid_decay)
            }
        };
        Ok(SymbolModel { spec: self.clone(), arity, class, form, rapid_decay })
    }

    /// Replaces every resolved-band marker by the concrete window of `grid`.
    pub fn resolve(&self, grid: &GridSpec) -> Result<SymbolSpec> {
        let boxed = |s: &SymbolSpec| -> Result<Box<SymbolSpec>> { Ok(Box::new(s.resolve(grid)?)) };
        Ok(match self {
            SymbolSpec::ResolvedBand { inner } => {
                let fam = build_family(grid)?;
                SymbolSpec::Window { lo: 0, hi: fam.max_index() - 1, inner: boxed(inner)? }
            }
            SymbolSpec::Modulated { factor, inner } => SymbolSpec::Modulated { factor: factor.clone(), inner: boxed(inner)? },
            SymbolSpec::SingleBlock { block, blocks, inner } => {
                SymbolSpec::SingleBlock { block: *block, blocks: *blocks, inner: boxed(inner)? }
            }
            SymbolSpec::Window { lo, hi, inner } => SymbolSpec::Window { lo: *lo, hi: *hi, inner: boxed(inner)? },
            SymbolSpec::Reclassified { class, inner } => SymbolSpec::Reclassified { class: class.clone(), inner: boxed(inner)? },
            other => other.clone(),
        })
    }
}

impl SymbolModel {
    pub fn spec(&self) -> &SymbolSpec {
        &self.spec
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn class(&self) -> &ClaimedClass {
        &self.class
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        self.form.eval(self.arity, x, xi)
    }

    /// Value at signed lattice frequency indices of `grid`.
    pub fn eval_lattice(&self, grid: &GridSpec, x: &[f64], k: &[i64]) -> Complex64 {
        self.form.eval_lattice(self.arity, grid, x, k)
    }

    /// Analytic first `Xi`-derivatives, where declared.
    pub fn gradient(&self, x: &[f64], xi: &[f64]) -> Option<Vec<Complex64>> {
        self.form.gradient(self.arity, x, xi)
    }

    pub fn is_x_independent(&self) -> bool {
        matches!(self.form.split_x(), Some((None, _)))
    }

    pub fn is_x_smooth(&self) -> bool {
        self.form.x_smooth()
    }

    pub fn is_xi_smooth(&self) -> bool {
        self.form.xi_smooth()
    }

    pub fn has_rapid_decay(&self) -> bool {
        self.rapid_decay
    }

    pub(crate) fn split_x(&self) -> Option<(Option<XFactor>, Form)> {
        self.form.split_x()
    }

    pub(crate) fn x_branches(&self, grid: &GridSpec) -> Option<(Vec<usize>, Vec<Form>)> {
        self.form.x_branches(grid, self.arity.n)
    }

    /// Lattice the symbol is tabulated on, if any.
    pub fn table_grid(&self) -> Option<GridSpec> {
        self.form.table_grid()
    }

    /// Same symbol with a different claimed class.
    pub fn with_class(&self, class: ClaimedClass) -> SymbolModel {
        let mut a = self.clone();
        a.spec = SymbolSpec::Reclassified { class: class.clone(), inner: Box::new(self.spec.clone()) };
        a.class = class;
        a
    }

    /// `a(x, Xi) sum_{k=lo}^{hi} phi_k(Xi)`.
    pub fn windowed(&self, lo: u32, hi: u32) -> Result<SymbolModel> {
        SymbolSpec::Window { lo, hi, inner: Box::new(self.spec.clone()) }.build()
    }

    /// `b(x) a(x, Xi)`.
    pub fn modulated(&self, factor: XFactor) -> Result<SymbolModel> {
        SymbolSpec::Modulated { factor, inner: Box::new(self.spec.clone()) }.build()
    }

    /// Fixes grid-dependent truncations.
    pub fn resolve_for(&self, grid: &GridSpec) -> Result<SymbolModel> {
        self.spec.resolve(grid)?.build()
    }
}

pub fn constant_symbol(value: f64, arity: Arity) -> Result<SymbolModel> {
    SymbolSpec::Constant { value, imag: 0.0, n: arity.n, blocks: arity.blocks }.build()
}

/// `<Xi>^m exp(i <Xi>^{1 - rho})`, claimed in `S^m_{rho,0}`.
pub fn oscillatory_symbol(m: f64, rho: f64, arity: Arity) -> Result<SymbolModel> {
    SymbolSpec::Oscillatory { m, rho, n: arity.n, blocks: arity.blocks }.build()
}

/// `<Xi>^m exp(i (1 + b(x)/2) <Xi>^{1 - rho})` with `b` real, `|b| <= 1` and
/// merely bounded, claimed in `L^inf S^m_rho`.
pub fn rough_x_symbol(m: f64, rho: f64, profile: XFactor, arity: Arity) -> Result<SymbolModel> {
    SymbolSpec::RoughX { m, rho, profile, n: arity.n, blocks: arity.blocks }.build()
}

/// `g(xi + eta) h(eta)` on `R^n x R^n`.
pub fn separable_bilinear_symbol(g: FreqProfile, h: FreqProfile, n: usize) -> Result<SymbolModel> {
    SymbolSpec::SeparableBilinear { g, h, n }.build()
}

/// `exp(-scale |Xi|^2)`.
pub fn gaussian_symbol(scale: f64, arity: Arity) -> Result<SymbolModel> {
    SymbolSpec::Gaussian { scale, n: arity.n, blocks: arity.blocks }.build()
}

/// `-|Xi|^2`.
pub fn neg_laplacian_symbol(arity: Arity) -> Result<SymbolModel> {
    SymbolSpec::NegLaplacian { n: arity.n, blocks: arity.blocks }.build()
}

/// `exp(i v . (xi_1 + ... + xi_N))`.
pub fn translation_symbol(shift: Vec<f64>, blocks: usize) -> Result<SymbolModel> {
    SymbolSpec::Translation { shift, blocks }.build()
}

/// `exp(i x . xi)`, a bounded function that is not a symbol of order 0.
pub fn plane_wave_symbol(n: usize) -> Result<SymbolModel> {
    SymbolSpec::PlaneWave { n }.build()
}

/// Symbol depending on one block only.
pub fn single_block_symbol(inner: &SymbolModel, block: usize, blocks: usize) -> Result<SymbolModel> {
    SymbolSpec::SingleBlock { block, blocks, inner: Box::new(inner.spec.clone()) }.build()
}

/// Seeded complex Gaussian values on the lattice of `grid`, zero outside `|Xi_a| <= band`.
pub fn random_table_symbol(grid: &GridSpec, seed: u64, x_dependent: bool, band: Option<f64>) -> Result<SymbolModel> {
    SymbolSpec::RandomTable {
        seed,
        n: grid.n(),
        blocks: grid.blocks(),
        points: grid.points(),
        half_period: grid.half_period(),
        x_dependent,
        band,
    }
    .build()
}

/// Where seminorm scans sample `x`.
#[derive(Clone, Debug)]
pub enum XProbes {
    Points(Vec<Vec<f64>>),
    /// Every point of the x-lattice; used for `L^p_mu` reductions.
    Lattice { grid: GridSpec, weight: WeightSpec },
}

/// Probe set: radii `0` and `r0 2^{j/per_octave} <= radius` along fixed directions.
#[derive(Clone, Debug)]
pub struct ProbeSet {
    pub dims: usize,
    pub radius: f64,
    pub per_octave: usize,
    pub random_directions: usize,
    pub seed: u64,
    pub x: XProbes,
}

impl ProbeSet {
    pub fn new(arity: Arity, radius: f64, x: XProbes) -> Self {
        ProbeSet { dims: arity.dims(), radius, per_octave: 6, random_directions: 4, seed: 17, x }
    }

    /// Default probes: origin and four seeded points of `[-4, 4]^n`.
    pub fn standard(arity: Arity, radius: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut pts = vec![vec![0.0; arity.n]];
        for _ in 0..4 {
            pts.push((0..arity.n).map(|_| rand::Rng::random_range(&mut rng, -4.0..4.0)).collect());
        }
        Self::new(arity, radius, XProbes::Points(pts))
    }

    pub fn xi_points(&self) -> Vec<Vec<f64>> {
        let mut dirs = Vec::new();
        for a in 0..self.dims {
            for s in [1.0, -1.0] {
                let mut d = vec![0.0; self.dims];
                d[a] = s;
                dirs.push(d);
            }
        }
        if self.dims > 1 {
            dirs.push(vec![1.0 / (self.dims as f64).sqrt(); self.dims]);
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            for _ in 0..self.random_directions {
                let v: Vec<f64> = (0..self.dims).map(|_| StandardNormal.sample(&mut rng)).collect();
                let r = norm(&v);
                dirs.push(v.into_iter().map(|c| c / r).collect());
            }
        }
        let mut out = vec![vec![0.0; self.dims]];
        let mut j = 0;
        loop {
            let r = 0.5 * 2f64.powf(j as f64 / self.per_octave as f64);
            if r > self.radius * (1.0 + 1e-12) {
                break;
            }
            for d in &dirs {
                out.push(d.iter().map(|c| c * r).collect());
            }
            j += 1;
        }
        out
    }

    pub fn x_points(&self) -> Vec<Vec<f64>> {
        match &self.x {
            XProbes::Points(p) => p.clone(),
            XProbes::Lattice { grid, .. } => {
                let n = grid.n();
                let mut x = vec![0.0; n];
                (0..grid.block_len())
                    .map(|i| {
                        grid.point(i, n, &mut x);
                        x.clone()
                    })
                    .collect()
            }
        }
    }

    /// Frequency radius and spatial window both doubled; the old probes are a subset.
    pub fn doubled(&self) -> Result<ProbeSet> {
        let x = match &self.x {
            XProbes::Points(p) => XProbes::Points(
                p.iter()
                    .cloned()
                    .chain(p.iter().map(|v| v.iter().map(|c| 2.0 * c).collect()))
                    .collect(),
            ),
            XProbes::Lattice { grid, weight } => XProbes::Lattice {
                grid: grid.with_half_period(2.0 * grid.half_period())?.with_points(2 * grid.points())?,
                weight: weight.clone(),
            },
        };
        Ok(ProbeSet { radius: 2.0 * self.radius, x, ..self.clone() })
    }

    pub fn describe(&self) -> String {
        let x = match &self.x {
            XProbes::Points(p) => format!("{} x-points", p.len()),
            XProbes::Lattice { grid, .. } => format!("x-lattice L={} G={}", grid.half_period(), grid.points()),
        };
        format!(
            "|Xi| <= {} ({} per octave, {} probes); {}",
            self.radius,
            self.per_octave,
            self.xi_points().len(),
            x
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormEntry {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    pub constant: f64,
}

/// Estimated constants `sup |d^alpha_Xi d^beta_x a| <Xi>^{rho|alpha| - delta|beta| - m}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormEstimate {
    pub entries: Vec<SeminormEntry>,
    pub probes: String,
    pub class: ClaimedClass,
}

impl SeminormEstimate {
    pub fn get(&self, alpha: &[usize], beta: &[usize]) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.alpha == alpha && e.beta == beta)
            .map(|e| e.constant)
    }

    /// Largest constant among entries with `|alpha| = a` and `|beta| = b`.
    pub fn max_order(&self, a: usize, b: usize) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.alpha.iter().sum::<usize>() == a && e.beta.iter().sum::<usize>() == b)
            .map(|e| e.constant)
            .fold(0.0, f64::max)
    }
}

fn derivative(a: &SymbolModel, alpha: &[usize], beta: &[usize], x: &[f64], xi: &[f64], xi_step: f64) -> Complex64 {
    let order_a: usize = alpha.iter().sum();
    let order_b: usize = beta.iter().sum();
    if order_b == 0 && order_a == 0 {
        return a.eval(x, xi);
    }
    if order_b == 0 && order_a == 1 {
        if let Some(g) = a.gradient(x, xi) {
            let axis = alpha.iter().position(|&v| v == 1).unwrap();
            return g[axis];
        }
    }
    let nx = x.len();
    let z: Vec<f64> = x.iter().chain(xi).copied().collect();
    let idx: Vec<usize> = beta.iter().chain(alpha).copied().collect();
    let steps: Vec<f64> = (0..z.len()).map(|i| if i < nx { 1e-3 } else { xi_step }).collect();
    finite_difference(&idx, &z, &steps, |p| a.eval(&p[..nx], &p[nx..]))
}

/// Scans seminorm constants for `|alpha| <= alpha_max`, `|beta| <= beta_max`.
///
/// For `L^p_mu` classes the x-reduction is the weighted discrete `L^p` norm on
/// a lattice probe; otherwise it is the maximum over the x-probes.
pub fn estimate_seminorms(a: &SymbolModel, alpha_max: usize, beta_max: usize, probes: &ProbeSet) -> Result<SeminormEstimate> {
    if alpha_max > 3 || beta_max > 3 {
        return Err(Error::Parameter("derivative orders above 3 are not supported".into()));
    }
    if beta_max > 0 && !a.is_x_smooth() {
        return Err(Error::Unsupported(
            "x-derivatives requested of a symbol that is only bounded in x".into(),
        ));
    }
    if alpha_max > 0 && !a.is_xi_smooth() {
        return Err(Error::Unsupported("Xi-derivatives requested of a non-smooth symbol".into()));
    }
    if probes.dims != a.arity.dims() {
        return Err(Error::Shape("probe dimension differs from the symbol".into()));
    }
    let (m, rho, delta) = (
        a.class.order().unwrap_or(0.0),
        a.class.rho().unwrap_or(0.0).clamp(0.0, 1.0),
        a.class.delta(),
    );
    let lp = match (&a.class, &probes.x) {
        (ClaimedClass::LpMuS { p, weight, .. }, XProbes::Lattice { grid, .. }) => {
            let w = weight.build(grid);
            Some((*p, w.values().to_vec(), grid.spacing().powi(grid.n() as i32)))
        }
        (ClaimedClass::LpMuS { .. }, _) => {
            return Err(Error::Parameter("L^p_mu classes need lattice x-probes".into()));
        }
        _ => None,
    };
    let xs = probes.x_points();
    let xis = probes.xi_points();
    let n = a.arity.n;
    let mut pairs = Vec::new();
    for ob in 0..=beta_max {
        for beta in multi_indices(n, ob) {
            for oa in 0..=alpha_max {
                for alpha in multi_indices(a.arity.dims(), oa) {
                    pairs.push((alpha, beta.clone()));
                }
            }
        }
    }
    let entries = pairs
        .into_par_iter()
        .map(|(alpha, beta)| {
            let oa = alpha.iter().sum::<usize>() as f64;
            let ob = beta.iter().sum::<usize>() as f64;
            let mut best: f64 = 0.0;
            for xi in &xis {
                let br = bracket(xi);
                let step = 1e-3 * br.powf(rho);
                let vals: Vec<f64> = xs.iter().map(|x| derivative(a, &alpha, &beta, x, xi, step).norm()).collect();
                let red = match &lp {
                    Some((p, w, cell)) => weighted_norm(&vals, Some(w), *cell, *p).unwrap_or(f64::NAN),
                    None => vals.iter().copied().fold(0.0, f64::max),
                };
                let v = red * br.powf(rho * oa - delta * ob - m);
                best = if v.is_nan() || best.is_nan() { f64::NAN } else { best.max(v) };
            }
            SeminormEntry { alpha, beta, constant: best }
        })
        .collect();
    Ok(SeminormEstimate { entries, probes: probes.describe(), class: a.class.clone() })
}

/// Seminorms on a probe set and on its doubling.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MembershipCheck {
    pub base: SeminormEstimate,
    pub doubled: SeminormEstimate,
    /// Doubled over base constant for each entry (1 when both vanish).
    pub growth: Vec<f64>,
    pub member: bool,
}

/// Membership reading: every constant changes by less than 10% when the probe window doubles.
pub fn membership_check(a: &SymbolModel, alpha_max: usize, beta_max: usize, probes: &ProbeSet) -> Result<MembershipCheck> {
    let base = estimate_seminorms(a, alpha_max, beta_max, probes)?;
    let doubled = estimate_seminorms(a, alpha_max, beta_max, &probes.doubled()?)?;
    let growth: Vec<f64> = base
        .entries
        .iter()
        .zip(&doubled.entries)
        .map(|(b, d)| {
            if d.constant <= 1e-12 * (1.0 + b.constant) && b.constant <= 1e-12 {
                1.0
            } else {
                d.constant / b.constant
            }
        })
        .collect();
    let member = growth.iter().all(|g| g.is_finite() && *g < 1.1);
    Ok(MembershipCheck { base, doubled, growth, member })
}

/// `sup_{x0, zeta} (int_{B_1(x0)} int |d^alpha_x a(x, zeta - eta, eta)|^2 deta dx)^{1/2}`
/// on the lattice, with `zeta - eta` wrapped periodically and plain `deta`.
///
/// Trials at level 1 use the first half of the probes, level 2 all of them;
/// the functional passes when every sup is finite and grows by under 10%.
pub fn hypo_functional(
    a: &SymbolModel,
    alpha_max: usize,
    grid: &GridSpec,
    x0_probes: &[Vec<f64>],
    zeta_probes: &[Vec<i64>],
) -> Result<BoundReport> {
    let ar = a.arity;
    if ar.blocks != 2 || grid.n() != ar.n {
        return Err(Error::Shape("the functional is defined for bilinear symbols on a matching grid".into()));
    }
    if alpha_max > 3 {
        return Err(Error::Parameter("derivative orders above 3 are not supported".into()));
    }
    if alpha_max > 0 && !a.is_x_smooth() {
        return Err(Error::Unsupported("x-derivatives of a symbol that is only bounded in x".into()));
    }
    if x0_probes.is_empty() || zeta_probes.is_empty() {
        return Err(Error::Parameter("empty probe set".into()));
    }
    let n = ar.n;
    let g = grid.points() as i64;
    let h = grid.spacing();
    let period = 2.0 * grid.half_period();
    let cell_x = h.powi(n as i32);
    let cell_eta = grid.freq_spacing().powi(n as i32);
    let eta_count = grid.block_len();
    let mut report = BoundReport::new(
        "local_symbol_functional",
        "local L2 symbol functional is finite and stable under probe doubling",
        json!({ "alpha_max": alpha_max, "grid": grid, "symbol": a.spec(), "x0": x0_probes, "zeta": zeta_probes }),
    );
    let mut ok = true;
    for order in 0..=alpha_max {
        for alpha in multi_indices(n, order) {
            let values: Vec<f64> = x0_probes
                .par_iter()
                .flat_map_iter(|x0| zeta_probes.iter().map(move |z| (x0, z)))
                .map(|(x0, zeta)| {
                    let mut x = vec![0.0; n];
                    let mut k = vec![0i64; 2 * n];
                    let mut total = 0.0;
                    for xi_flat in 0..grid.block_len() {
                        grid.point(xi_flat, n, &mut x);
                        let dist2: f64 = x
                            .iter()
                            .zip(x0)
                            .map(|(a, b)| {
                                let d = (a - b).rem_euclid(period);
                                let d = d.min(period - d);
                                d * d
                            })
                            .sum();
                        if dist2 > 1.0 {
                            continue;
                        }
                        let mut inner = 0.0;
                        for e in 0..eta_count {
                            let mut rest = e;
                            for ax in (0..n).rev() {
                                let eta = (rest % grid.points()) as i64 - g / 2;
                                rest /= grid.points();
                                let (c, _) = grid.wrap_freq(zeta[ax] - eta);
                                k[ax] = grid.freq_index(c);
                                k[n + ax] = eta;
                            }
                            let v = if order == 0 {
                                a.eval_lattice(grid, &x, &k)
                            } else {
                                let steps = vec![1e-3; n];
                                finite_difference(&alpha, &x, &steps, |p| a.eval_lattice(grid, p, &k))
                            };
                            inner += v.norm_sqr();
                        }
                        total += inner * cell_eta;
                    }
                    (total * cell_x).sqrt()
                })
                .collect();
            let zc = zeta_probes.len();
            let half_x = x0_probes.len().div_ceil(2);
            let half_z = zc.div_ceil(2);
            let mut base: f64 = 0.0;
            let mut full: f64 = 0.0;
            for (i, v) in values.iter().enumerate() {
                let (xi_i, zi) = (i / zc, i % zc);
                full = full.max(*v);
                if xi_i < half_x && zi < half_z {
                    base = base.max(*v);
                }
            }
            let group = format!("alpha={:?}", alpha);
            report.record(&group, 1, 0, base, 0);
            report.record(&group, 2, 0, full, 0);
            let finite = values.iter().all(|v| v.is_finite());
            ok &= finite && (full == 0.0 || full <= 1.1 * base);
        }
    }
    report.finish("all values finite; sup over all probes within 10% of the sup over the first half", ok);
    Ok(report)
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}
