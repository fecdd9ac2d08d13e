//! Lattice realizations of the operators built from symbols.
//!
//! `T_a(u_1..u_N)(x) = (2 pi)^{-nN} (pi/L)^{nN} sum_Xi a(x, Xi) prod_j u_j^(xi_j) e^{i x.(xi_1+..+xi_N)}`.
//! The `(2 pi)^{-nN}` factor makes `a = 1` the pointwise product.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::fft::{self, Direction, Lattice};
use crate::grid::{forward_ft, inverse_values, Field, GridSpec, MultiField, Sampled, Spectrum};
use crate::lp_decomp::{dyadic_piece, dyadic_window, LittlewoodPaleyFamily};
use crate::symbols::{Arity, Form, SymbolModel, XFactor};
use crate::verify::report::BoundReport;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn lattice_k(grid: &GridSpec, flat: usize, dims: usize, k: &mut [i64]) {
    crate::grid::unravel(flat, grid.points(), dims, |a, i| k[a] = grid.freq_index(i));
}

fn check_table(a: &SymbolModel, grid: &GridSpec) -> Result<()> {
    if let Some(t) = a.table_grid() {
        if t.points() != grid.points() || t.half_period() != grid.half_period() {
            return Err(Error::Shape("tabulated symbol lives on a different lattice".into()));
        }
    }
    Ok(())
}

/// Values of an x-independent form on the `dims`-dimensional frequency lattice.
fn tabulate(form: &Form, ar: Arity, grid: &GridSpec, dims: usize) -> Vec<Complex64> {
    let len = grid.len(dims);
    let x = vec![0.0; ar.n];
    (0..len)
        .into_par_iter()
        .map_init(
            || vec![0i64; dims],
            |k, flat| {
                lattice_k(grid, flat, dims, k);
                form.eval_lattice(ar, grid, &x, k)
            },
        )
        .collect()
}

fn factor_values(factor: &Option<XFactor>, grid: &GridSpec, dims: usize) -> Option<Vec<Complex64>> {
    factor.as_ref().map(|f| {
        let mut x = vec![0.0; dims];
        (0..grid.len(dims))
            .map(|i| {
                grid.point(i, dims, &mut x);
                f.eval(&x)
            })
            .collect()
    })
}

/// A symbol evaluated once on a lattice, for repeated application.
///
/// Symbols of the form `b(x) s(Xi)` use one inverse transform per application,
/// symbols whose x-dependence takes finitely many values one per value;
/// anything else falls back to the direct sum over the lattice for each `x`.
pub struct PreparedSymbol {
    symbol: SymbolModel,
    grid: GridSpec,
    factored: Option<(Option<Vec<Complex64>>, Vec<Complex64>)>,
    branches: Option<(Vec<usize>, Vec<Vec<Complex64>>)>,
}

impl PreparedSymbol {
    /// `grid` is the grid of the inputs: `(n, N)` for multilinear use, or the
    /// product grid for a linear symbol over `R^{nN}`.
    pub fn new(a: &SymbolModel, grid: &GridSpec) -> Result<Self> {
        check_table(a, grid)?;
        let ar = a.arity();
        if ar.dims() != grid.product_dims() {
            return Err(Error::Shape(format!(
                "symbol acts on {} frequency variables, the grid has {}",
                ar.dims(),
                grid.product_dims()
            )));
        }
        let factored = a.split_x().map(|(f, rest)| {
            let table = tabulate(&rest, ar, grid, ar.dims());
            (factor_values(&f, grid, ar.n), table)
        });
        let branches = match factored {
            Some(_) => None,
            None => a.x_branches(grid).map(|(index, forms)| {
                (index, forms.iter().map(|f| tabulate(f, ar, grid, ar.dims())).collect())
            }),
        };
        Ok(PreparedSymbol { symbol: a.clone(), grid: *grid, factored, branches })
    }

    pub fn symbol(&self) -> &SymbolModel {
        &self.symbol
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// True when application avoids the direct sum.
    pub fn is_factored(&self) -> bool {
        self.factored.is_some() || self.branches.is_some()
    }

    fn check_inputs(&self, inputs: &[Field]) -> Result<()> {
        let ar = self.symbol.arity();
        if inputs.len() != ar.blocks || self.grid.blocks() != ar.blocks || self.grid.n() != ar.n {
            return Err(Error::Shape(format!(
                "symbol takes {} inputs of dimension {}, got {} on a grid with n = {}",
                ar.blocks,
                ar.n,
                inputs.len(),
                self.grid.n()
            )));
        }
        if inputs.iter().any(|u| *u.grid() != self.grid) {
            return Err(Error::Shape("inputs live on a different grid".into()));
        }
        Ok(())
    }

    /// `T_a(u_1, ..., u_N)`.
    pub fn apply_multilinear(&self, inputs: &[Field]) -> Result<Field> {
        self.check_inputs(inputs)?;
        let spectra: Vec<Spectrum> = inputs.iter().map(forward_ft).collect();
        if let Some((index, tables)) = &self.branches {
            let outs: Vec<Vec<Complex64>> = tables
                .iter()
                .map(|t| diagonal_of_inverse(tensor_spectra(&spectra, Some(t)), &self.grid))
                .collect();
            return Field::new(self.grid, pick_branches(index, &outs));
        }
        match &self.factored {
            Some((factor, table)) => {
                let product = tensor_spectra(&spectra, Some(table));
                let diag = diagonal_of_inverse(product, &self.grid);
                Field::new(self.grid, apply_factor(diag, factor.as_deref()))
            }
            None => {
                let product = tensor_spectra(&spectra, None);
                Field::new(self.grid, self.direct_sum(&product, self.grid.n(), self.grid.blocks()))
            }
        }
    }

    /// Reference evaluation by the direct lattice sum at every `x`.
    pub fn apply_multilinear_direct(&self, inputs: &[Field]) -> Result<Field> {
        self.check_inputs(inputs)?;
        let spectra: Vec<Spectrum> = inputs.iter().map(forward_ft).collect();
        let product = tensor_spectra(&spectra, None);
        Field::new(self.grid, self.direct_sum(&product, self.grid.n(), self.grid.blocks()))
    }

    /// Linear operator on `R^{nN}`: the whole product lattice is one variable.
    pub fn apply_linear(&self, u: &MultiField) -> Result<MultiField> {
        let ar = self.symbol.arity();
        if ar.blocks != 1 || *u.grid() != self.grid {
            return Err(Error::Shape("linear symbols take one input on the prepared grid".into()));
        }
        let dims = u.dims();
        let spec = forward_ft(u);
        if let Some((index, tables)) = &self.branches {
            let outs: Vec<Vec<Complex64>> = tables
                .iter()
                .map(|t| {
                    let values = spec.values().iter().zip(t).map(|(v, s)| v * s).collect();
                    inverse_raw(values, &self.grid, dims, Lattice::Shifted)
                })
                .collect();
            return MultiField::new(self.grid, pick_branches(index, &outs));
        }
        match &self.factored {
            Some((factor, table)) => {
                let mut values = spec.into_values();
                for (v, s) in values.iter_mut().zip(table) {
                    *v *= s;
                }
                let out = inverse_raw(values, &self.grid, dims, Lattice::Shifted);
                MultiField::new(self.grid, apply_factor(out, factor.as_deref()))
            }
            None => MultiField::new(self.grid, self.direct_sum(&spec.into_values(), dims, 1)),
        }
    }

    pub fn apply_linear_direct(&self, u: &MultiField) -> Result<MultiField> {
        if self.symbol.arity().blocks != 1 || *u.grid() != self.grid {
            return Err(Error::Shape("linear symbols take one input on the prepared grid".into()));
        }
        let dims = u.dims();
        let spec = forward_ft(u);
        MultiField::new(self.grid, self.direct_sum(&spec.into_values(), dims, 1))
    }

    // out(x) = (dxi/2pi)^{nN} sum_Xi a(x, Xi) P(Xi) e^{i x.(xi_1 + .. + xi_N)}, x of dimension n.
    fn direct_sum(&self, product: &[Complex64], n: usize, blocks: usize) -> Vec<Complex64> {
        let grid = self.grid;
        let g = grid.points();
        let dims = n * blocks;
        let phase: Vec<Complex64> = (0..g * g)
            .map(|t| Complex64::from_polar(1.0, grid.coord(t / g) * grid.freq(t % g)))
            .collect();
        let norm = (grid.freq_spacing() / (2.0 * PI)).powi(dims as i32);
        let a = &self.symbol;
        (0..grid.len(n))
            .into_par_iter()
            .map(|xf| {
                let mut x = vec![0.0; n];
                let mut xi_idx = vec![0usize; n];
                grid.point(xf, n, &mut x);
                crate::grid::unravel(xf, g, n, |ax, i| xi_idx[ax] = i);
                let mut k = vec![0i64; dims];
                let mut idx = vec![0usize; dims];
                let mut acc = ZERO;
                for (flat, p) in product.iter().enumerate() {
                    if *p == ZERO {
                        continue;
                    }
                    crate::grid::unravel(flat, g, dims, |ax, i| idx[ax] = i);
                    let mut e = Complex64::new(1.0, 0.0);
                    for ax in 0..dims {
                        k[ax] = grid.freq_index(idx[ax]);
                        e *= phase[xi_idx[ax % n] * g + idx[ax]];
                    }
                    acc += a.eval_lattice(&grid, &x, &k) * p * e;
                }
                acc * norm
            })
            .collect()
    }
}

fn pick_branches(index: &[usize], outs: &[Vec<Complex64>]) -> Vec<Complex64> {
    index.iter().enumerate().map(|(i, &b)| outs[b][i]).collect()
}

fn apply_factor(mut values: Vec<Complex64>, factor: Option<&[Complex64]>) -> Vec<Complex64> {
    if let Some(f) = factor {
        for (v, b) in values.iter_mut().zip(f) {
            *v *= b;
        }
    }
    values
}

fn inverse_raw(mut values: Vec<Complex64>, grid: &GridSpec, dims: usize, lattice: Lattice) -> Vec<Complex64> {
    fft::transform(&mut values, grid.points(), dims, grid.spacing(), lattice, Direction::Inverse);
    values
}

// prod_j u_j^(xi_j), optionally times a symbol table, on the nN-dimensional lattice.
fn tensor_spectra(spectra: &[Spectrum], table: Option<&[Complex64]>) -> Vec<Complex64> {
    let mut values = vec![Complex64::new(1.0, 0.0)];
    for s in spectra {
        let mut next = Vec::with_capacity(values.len() * s.values().len());
        for &v in &values {
            next.extend(s.values().iter().map(|&w| v * w));
        }
        values = next;
    }
    if let Some(t) = table {
        for (v, s) in values.iter_mut().zip(t) {
            *v *= s;
        }
    }
    values
}

// Inverse transform on the product lattice, then restriction to y_1 = .. = y_N = x.
fn diagonal_of_inverse(product: Vec<Complex64>, grid: &GridSpec) -> Vec<Complex64> {
    let dims = grid.product_dims();
    let full = inverse_raw(product, grid, dims, Lattice::Shifted);
    let b = grid.block_len();
    let blocks = grid.blocks();
    (0..b)
        .map(|i| {
            let flat = (0..blocks).fold(0usize, |acc, _| acc * b + i);
            full[flat]
        })
        .collect()
}

/// `T_a(u_1, ..., u_N)` on the common grid of the inputs.
pub fn apply_multilinear(a: &SymbolModel, inputs: &[Field]) -> Result<Field> {
    let grid = *inputs.first().ok_or_else(|| Error::Shape("no inputs".into()))?.grid();
    PreparedSymbol::new(a, &grid)?.apply_multilinear(inputs)
}

/// `T_a u` for a one-block symbol over the whole product lattice of `u`.
pub fn apply_linear(a: &SymbolModel, u: &MultiField) -> Result<MultiField> {
    PreparedSymbol::new(a, u.grid())?.apply_linear(u)
}

/// Which part of the symbol a kernel is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "k", rename_all = "snake_case")]
pub enum KernelIndex {
    /// `a phi_k`.
    Piece(u32),
    /// `a sum_{k < K_max} phi_k`, the part resolved by the grid.
    Summed,
    /// `a` itself; only for symbols with rapid decay.
    Total,
}

enum KernelStorage {
    Shared { factor: Option<Vec<Complex64>>, base: Vec<Complex64> },
    PerX(Vec<Vec<Complex64>>),
}

/// `K(x, Y) = (2 pi)^{-nN} int a(x, Xi) e^{i Y.Xi} dXi` on the displacement lattice,
/// where `Y = (x - y_1, ..., x - y_N)`.
pub struct KernelSlice {
    grid: GridSpec,
    index: KernelIndex,
    storage: KernelStorage,
}

const PER_X_LIMIT: usize = 1 << 24;

fn raw_kernel(a: &SymbolModel, grid: &GridSpec) -> Result<KernelStorage> {
    check_table(a, grid)?;
    let ar = a.arity();
    let dims = ar.dims();
    if dims != grid.product_dims() {
        return Err(Error::Shape("symbol arity differs from the grid".into()));
    }
    if let Some((f, rest)) = a.split_x() {
        let table = tabulate(&rest, ar, grid, dims);
        let base = inverse_raw(table, grid, dims, Lattice::Centered);
        return Ok(KernelStorage::Shared { factor: factor_values(&f, grid, ar.n), base });
    }
    if grid.block_len() * grid.len(dims) > PER_X_LIMIT {
        return Err(Error::Unsupported("x-dependent kernel too large to store per x".into()));
    }
    let slices = (0..grid.block_len())
        .into_par_iter()
        .map(|xf| {
            let mut x = vec![0.0; ar.n];
            grid.point(xf, ar.n, &mut x);
            let mut k = vec![0i64; dims];
            let table: Vec<Complex64> = (0..grid.len(dims))
                .map(|flat| {
                    lattice_k(grid, flat, dims, &mut k);
                    a.eval_lattice(grid, &x, &k)
                })
                .collect();
            inverse_raw(table, grid, dims, Lattice::Centered)
        })
        .collect();
    Ok(KernelStorage::PerX(slices))
}

/// Kernel of a dyadic piece, of the resolved sum, or of the whole symbol.
pub fn compute_kernel(a: &SymbolModel, fam: &LittlewoodPaleyFamily, which: KernelIndex, grid: &GridSpec) -> Result<KernelSlice> {
    if fam.dims() != grid.product_dims() {
        return Err(Error::Shape("family dimension differs from the grid".into()));
    }
    let sym = match which {
        KernelIndex::Piece(k) => dyadic_piece(a, fam, k)?,
        KernelIndex::Summed => dyadic_window(a, fam, 0, fam.max_index() - 1)?,
        KernelIndex::Total => {
            if !a.has_rapid_decay() {
                return Err(Error::Unsupported(
                    "the whole-symbol kernel needs a symbol with rapid decay; use a piece or the resolved sum".into(),
                ));
            }
            a.clone()
        }
    };
    Ok(KernelSlice { grid: *grid, index: which, storage: raw_kernel(&sym, grid)? })
}

impl KernelSlice {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn index(&self) -> KernelIndex {
        self.index
    }

    pub fn dims(&self) -> usize {
        self.grid.product_dims()
    }

    pub fn is_x_independent(&self) -> bool {
        matches!(self.storage, KernelStorage::Shared { factor: None, .. })
    }

    /// `K(x, Y)` at flat x-index `x` and flat displacement index `y`.
    pub fn at(&self, x: usize, y: usize) -> Complex64 {
        match &self.storage {
            KernelStorage::Shared { factor, base } => match factor {
                Some(f) => f[x] * base[y],
                None => base[y],
            },
            KernelStorage::PerX(s) => s[x][y],
        }
    }

    /// The slice `Y -> K(x, Y)`.
    pub fn slice(&self, x: usize) -> Vec<Complex64> {
        match &self.storage {
            KernelStorage::Shared { factor, base } => match factor {
                Some(f) => base.iter().map(|v| v * f[x]).collect(),
                None => base.clone(),
            },
            KernelStorage::PerX(s) => s[x].clone(),
        }
    }

    /// `h^{nN} sum_Y K(x, Y) prod_j u_j(x - y_j)`.
    pub fn apply(&self, inputs: &[Field]) -> Result<Field> {
        let grid = self.grid;
        if inputs.len() != grid.blocks() || inputs.iter().any(|u| *u.grid() != grid) {
            return Err(Error::Shape("inputs must match the kernel grid and arity".into()));
        }
        let n = grid.n();
        let g = grid.points();
        let b = grid.block_len();
        let blocks = grid.blocks();
        let cell = grid.spacing().powi(self.dims() as i32);
        let values = (0..b)
            .into_par_iter()
            .map(|xf| {
                let mut xi = vec![0usize; n];
                crate::grid::unravel(xf, g, n, |a, i| xi[a] = i);
                // shifted[m] = flat index of x - y for displacement m
                let shifted: Vec<usize> = (0..b)
                    .map(|m| {
                        let mut out = 0;
                        let mut rest = m;
                        let mut place = 1;
                        for a in (0..n).rev() {
                            let mi = rest % g;
                            rest /= g;
                            out += ((xi[a] + g + g / 2 - mi) % g) * place;
                            place *= g;
                        }
                        out
                    })
                    .collect();
                let kx = self.slice(xf);
                let mut acc = ZERO;
                for (y, kv) in kx.iter().enumerate() {
                    let mut prod = *kv;
                    let mut rest = y;
                    for j in (0..blocks).rev() {
                        prod *= inputs[j].values()[shifted[rest % b]];
                        rest /= b;
                    }
                    acc += prod;
                }
                acc * cell
            })
            .collect();
        Field::new(grid, values)
    }

    /// Writes the slice at `x` in the field binary format (`N = 1` header on `R^{nN}`).
    pub fn write_slice(&self, path: &std::path::Path, x: usize) -> Result<()> {
        let g = GridSpec::new(self.dims(), 1, self.grid.half_period(), self.grid.points())?;
        crate::grid::write_raw(path, &g, &self.slice(x))
    }
}

fn ols_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Slope reported when a ray falls below the floor within its first samples.
pub const BELOW_FLOOR_SLOPE: f64 = -1000.0;

/// Log–log fit of `|K|` along rays in each block and along the block diagonal,
/// over `|z| in [1, L/2]`.
///
/// Each ray uses the envelope `E(t) = sup_{s >= t} max_x |K|`, ignores values
/// below `1e-13 max |K|`, and must have slope `<= -sum_{j in S} N_j + 0.2`,
/// `S` the blocks the ray moves in.
pub fn fit_kernel_decay(k: &KernelSlice, orders: &[f64]) -> Result<BoundReport> {
    let grid = k.grid;
    let (n, blocks, g) = (grid.n(), grid.blocks(), grid.points());
    if orders.len() != blocks {
        return Err(Error::Shape(format!("expected {blocks} decay orders, got {}", orders.len())));
    }
    let h = grid.spacing();
    let lo = (1.0 / h).ceil() as usize;
    let hi = (grid.half_period() / 2.0 / h + 1e-9).floor() as usize;
    if hi < lo || hi - lo + 1 < 8 {
        return Err(Error::Parameter(format!(
            "window [1, L/2] holds {} sample radii; at least 8 are needed",
            (hi + 1).saturating_sub(lo)
        )));
    }
    let dims = n * blocks;
    let xs = if k.is_x_independent() { 1 } else { grid.block_len() };
    let mut peak: f64 = 0.0;
    for x in 0..xs {
        peak = k.slice(x).iter().fold(peak, |m, v| m.max(v.norm()));
    }
    let floor = 1e-13 * peak;
    let mut rays: Vec<(String, Vec<usize>, f64)> = (0..blocks)
        .map(|j| (format!("block{}", j + 1), vec![j * n], orders[j]))
        .collect();
    if blocks > 1 {
        rays.push(("diagonal".into(), (0..blocks).map(|j| j * n).collect(), orders.iter().sum()));
    }
    let mut report = BoundReport::new(
        "kernel_decay",
        "kernel decays at least like the product of |x - y_j|^{-N_j} away from the diagonal",
        json!({ "grid": grid, "orders": orders, "kernel": k.index, "floor": floor, "window": [1.0, grid.half_period() / 2.0] }),
    );
    let mut ok = true;
    for (name, axes, total) in rays {
        let mut env: Vec<(f64, f64)> = (lo..=hi)
            .map(|m| {
                let mut best: f64 = 0.0;
                for sign in [1i64, -1] {
                    let mut idx = vec![g / 2; dims];
                    for &a in &axes {
                        idx[a] = (g as i64 / 2 + sign * m as i64) as usize;
                    }
                    let flat = crate::grid::ravel(&idx, g);
                    for x in 0..xs {
                        best = best.max(k.at(x, flat).norm());
                    }
                }
                (m as f64 * h, best)
            })
            .collect();
        for i in (0..env.len().saturating_sub(1)).rev() {
            env[i].1 = env[i].1.max(env[i + 1].1);
        }
        let pts: Vec<(f64, f64)> = env.iter().filter(|p| p.1 > floor).map(|p| (p.0.ln(), p.1.ln())).collect();
        let slope = if pts.len() < 3 { BELOW_FLOOR_SLOPE } else { ols_slope(&pts) };
        let ratio_sup = env.iter().map(|(t, e)| e * t.powf(total)).fold(0.0, f64::max);
        let pass = slope.is_finite() && slope <= -total + 0.2 && ratio_sup.is_finite();
        ok &= pass;
        report.record(&format!("{name}:slope"), g, 0, slope, 0);
        report.record(&format!("{name}:weighted_sup"), g, 0, ratio_sup, 0);
    }
    report.finish("fitted slope <= -(sum of orders) + 0.2 on every ray, weighted sup finite", ok);
    Ok(report)
}

/// `<u, v> = h^n sum u conj(v)`.
pub fn pairing(u: &Field, v: &Field) -> Complex64 {
    let cell = u.grid().spacing().powi(u.dims() as i32);
    u.values().iter().zip(v.values()).map(|(a, b)| a * b.conj()).sum::<Complex64>() * cell
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdjointSlot {
    /// `<T(f, g), h> = <f, T*1(h, g)>`.
    First,
    /// `<T(f, g), h> = <g, T*2(f, h)>`.
    Second,
}

const DENSE_LIMIT: usize = 64;

/// Dense tensor `T[x, y1, y2] = K(x, x - y1, x - y2)` of a bilinear operator.
pub struct BilinearAdjoint {
    grid: GridSpec,
    slot: AdjointSlot,
    tensor: Vec<Complex64>,
}

fn disp_index(xf: usize, yf: usize, g: usize, n: usize) -> usize {
    let mut out = 0;
    let mut place = 1;
    let (mut xr, mut yr) = (xf, yf);
    for _ in 0..n {
        let (xi, yi) = (xr % g, yr % g);
        xr /= g;
        yr /= g;
        out += ((xi + g + g / 2 - yi) % g) * place;
        place *= g;
    }
    out
}

fn check_bilinear(a: &SymbolModel, grid: &GridSpec) -> Result<()> {
    let ar = a.arity();
    if ar.blocks != 2 || grid.blocks() != 2 || grid.n() != ar.n {
        return Err(Error::Shape("bilinear symbol and two-block grid expected".into()));
    }
    Ok(())
}

/// Materializes `T_a` densely; requires `G^n <= 64`.
pub fn adjoint_bilinear(a: &SymbolModel, slot: AdjointSlot, grid: &GridSpec) -> Result<BilinearAdjoint> {
    check_bilinear(a, grid)?;
    let b = grid.block_len();
    if b > DENSE_LIMIT {
        return Err(Error::Unsupported(format!(
            "dense trilinear tensors need G^n <= {DENSE_LIMIT}, got {b}"
        )));
    }
    let k = raw_kernel(a, grid)?;
    let ks = KernelSlice { grid: *grid, index: KernelIndex::Total, storage: k };
    let (g, n) = (grid.points(), grid.n());
    let mut tensor = vec![ZERO; b * b * b];
    for x in 0..b {
        let kx = ks.slice(x);
        for y1 in 0..b {
            let d1 = disp_index(x, y1, g, n);
            for y2 in 0..b {
                let d2 = disp_index(x, y2, g, n);
                tensor[(x * b + y1) * b + y2] = kx[d1 * b + d2];
            }
        }
    }
    Ok(BilinearAdjoint { grid: *grid, slot, tensor })
}

impl BilinearAdjoint {
    pub fn slot(&self) -> AdjointSlot {
        self.slot
    }

    fn check(&self, u: &Field, v: &Field) -> Result<()> {
        if *u.grid() != self.grid || *v.grid() != self.grid {
            return Err(Error::Shape("fields live on a different grid".into()));
        }
        Ok(())
    }

    /// `T(f, g)` from the tensor.
    pub fn forward(&self, f: &Field, g: &Field) -> Result<Field> {
        self.check(f, g)?;
        let b = self.grid.block_len();
        let cell = self.grid.spacing().powi(2 * self.grid.n() as i32);
        let (fv, gv) = (f.values(), g.values());
        let values = (0..b)
            .map(|x| {
                let mut acc = ZERO;
                for y1 in 0..b {
                    let row = &self.tensor[(x * b + y1) * b..(x * b + y1 + 1) * b];
                    let s: Complex64 = row.iter().zip(gv).map(|(t, g)| t * g).sum();
                    acc += s * fv[y1];
                }
                acc * cell
            })
            .collect();
        Field::new(self.grid, values)
    }

    /// `T*1(h, g)` for the first slot, `T*2(f, h)` for the second.
    pub fn apply(&self, u: &Field, v: &Field) -> Result<Field> {
        self.check(u, v)?;
        let b = self.grid.block_len();
        let cell = self.grid.spacing().powi(2 * self.grid.n() as i32);
        let (uv, vv) = (u.values(), v.values());
        let mut out = vec![ZERO; b];
        for x in 0..b {
            for y1 in 0..b {
                for y2 in 0..b {
                    let t = self.tensor[(x * b + y1) * b + y2].conj();
                    match self.slot {
                        AdjointSlot::First => out[y1] += t * uv[x] * vv[y2].conj(),
                        AdjointSlot::Second => out[y2] += t * uv[y1].conj() * vv[x],
                    }
                }
            }
        }
        Field::new(self.grid, out.into_iter().map(|v| v * cell).collect())
    }
}

/// Matrix-free adjoint for grids beyond dense materialization; streams one
/// kernel slice per `x`. Same argument order as [`BilinearAdjoint::apply`].
pub fn adjoint_apply_streaming(a: &SymbolModel, slot: AdjointSlot, u: &Field, v: &Field) -> Result<Field> {
    let grid = *u.grid();
    check_bilinear(a, &grid)?;
    if *v.grid() != grid {
        return Err(Error::Shape("fields live on a different grid".into()));
    }
    let ks = KernelSlice { grid, index: KernelIndex::Total, storage: raw_kernel(a, &grid)? };
    let (g, n, b) = (grid.points(), grid.n(), grid.block_len());
    let cell = grid.spacing().powi(2 * n as i32);
    let (uv, vv) = (u.values(), v.values());
    let parts: Vec<Vec<Complex64>> = (0..b)
        .into_par_iter()
        .map(|x| {
            let kx = ks.slice(x);
            let mut out = vec![ZERO; b];
            for y1 in 0..b {
                let d1 = disp_index(x, y1, g, n);
                for y2 in 0..b {
                    let t = kx[d1 * b + disp_index(x, y2, g, n)].conj();
                    match slot {
                        AdjointSlot::First => out[y1] += t * uv[x] * vv[y2].conj(),
                        AdjointSlot::Second => out[y2] += t * uv[y1].conj() * vv[x],
                    }
                }
            }
            out
        })
        .collect();
    let mut total = vec![ZERO; b];
    for p in parts {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    Field::new(grid, total.into_iter().map(|v| v * cell).collect())
}

fn s_table(a: &SymbolModel, grid: &GridSpec) -> Result<Vec<Complex64>> {
    check_bilinear(a, grid)?;
    check_table(a, grid)?;
    match a.split_x() {
        Some((None, rest)) => Ok(tabulate(&rest, a.arity(), grid, grid.product_dims())),
        _ => Err(Error::Unsupported("S is defined for x-independent symbols".into())),
    }
}

/// `S(F)(x) = (2 pi)^{-2n} sum a(xi, eta) F^(xi, eta) e^{i x.(xi + eta)}`.
pub fn apply_s(a: &SymbolModel, f: &MultiField) -> Result<Field> {
    let grid = *f.grid();
    let table = s_table(a, &grid)?;
    let spec = forward_ft(f).into_values();
    let product: Vec<Complex64> = spec.iter().zip(&table).map(|(u, s)| u * s).collect();
    Field::new(grid, diagonal_of_inverse(product, &grid))
}

/// The Hilbert-space adjoint: `(S* g)^(xi, eta) = conj(a(xi, eta)) g^(xi + eta)`.
pub fn apply_s_adjoint(a: &SymbolModel, g: &Field) -> Result<MultiField> {
    let grid = *g.grid();
    let table = s_table(a, &grid)?;
    let gh = forward_ft(g);
    let n = grid.n();
    let dims = 2 * n;
    let mut k = vec![0i64; dims];
    let mut sum = vec![0i64; n];
    let values: Vec<Complex64> = (0..grid.len(dims))
        .map(|flat| {
            lattice_k(&grid, flat, dims, &mut k);
            for ax in 0..n {
                sum[ax] = k[ax] + k[n + ax];
            }
            table[flat].conj() * gh.at_index(&sum)
        })
        .collect();
    let spec = Spectrum::new(grid, dims, values)?;
    MultiField::new(grid, inverse_values(&spec, Lattice::Shifted))
}

/// `m(zeta) = (2 pi)^{-n} (pi/L)^n sum_eta |a(zeta - eta, eta)|^2`, `zeta - eta` wrapped.
pub fn ssstar_multiplier(a: &SymbolModel, grid: &GridSpec) -> Result<Spectrum> {
    let table = s_table(a, grid)?;
    let n = grid.n();
    let b = grid.block_len();
    let g = grid.points();
    let norm = (grid.freq_spacing() / (2.0 * PI)).powi(n as i32);
    let mut zk = vec![0i64; n];
    let mut ek = vec![0i64; n];
    let values: Vec<Complex64> = (0..b)
        .map(|z| {
            lattice_k(grid, z, n, &mut zk);
            let mut s = 0.0;
            for e in 0..b {
                lattice_k(grid, e, n, &mut ek);
                let mut xi_flat = 0;
                for ax in 0..n {
                    let (c, _) = grid.wrap_freq(zk[ax] - ek[ax]);
                    xi_flat = xi_flat * g + c;
                }
                s += table[xi_flat * b + e].norm_sqr();
            }
            Complex64::new(s * norm, 0.0)
        })
        .collect();
    Spectrum::new(*grid, n, values)
}

/// `A = sup_zeta m(zeta)^{1/2}`.
pub fn a_constant(a: &SymbolModel, grid: &GridSpec) -> Result<f64> {
    let m = ssstar_multiplier(a, grid)?;
    Ok(m.values().iter().map(|v| v.re).fold(0.0, f64::max).sqrt())
}

/// Operator norm of `S` by power iteration on `S S*`, started from a seeded random field.
pub fn s_operator_norm(a: &SymbolModel, grid: &GridSpec, seed: u64, max_iter: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // white noise, so every frequency including -Nyquist has a nonzero component
    let start: Vec<Complex64> = (0..grid.block_len())
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let mut v = Field::new(grid.with_blocks(2)?, start)?;
    let mut lambda = 0.0;
    for it in 0..max_iter {
        let nv = crate::grid::lp_norm(&v, 2.0, None)?;
        if nv == 0.0 {
            return Ok(0.0);
        }
        v = v.scale(Complex64::new(1.0 / nv, 0.0));
        let w = apply_s(a, &apply_s_adjoint(a, &v)?)?;
        let next = pairing(&w, &v).re;
        let done = it > 10 && (next - lambda).abs() <= 1e-14 * next.abs();
        lambda = next;
        v = w;
        if done {
            break;
        }
    }
    Ok(lambda.max(0.0).sqrt())
}
