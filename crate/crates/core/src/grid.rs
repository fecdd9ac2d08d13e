//! Periodic lattices, Fourier transforms and norms.
//!
//! Space is the torus `[-L, L)^n` sampled at `x_j = -L + (j + 1/2) h`, `h = 2L/G`.
//! The half-cell shift keeps the origin off the lattice so negative powers of
//! `|x|` stay finite. Frequencies are `xi_c = (c - G/2) pi / L`, `c = 0..G`.
//!
//! The forward transform is the Riemann sum `h^n sum_y u(y) e^{-i xi.y}` and
//! the inverse carries `(2 pi)^{-n}`, so transforms of continuous functions
//! agree with the continuum transform up to periodization error.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{self, Direction, Lattice};
use crate::weights::WeightField;

/// Validated lattice description shared by every sampled object.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    n: usize,
    #[serde(rename = "N")]
    blocks: usize,
    #[serde(rename = "L")]
    half_period: f64,
    #[serde(rename = "G")]
    points: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridHeader {
    n: usize,
    #[serde(rename = "N")]
    blocks: usize,
    #[serde(rename = "L")]
    half_period: f64,
    #[serde(rename = "G")]
    points: usize,
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let h = GridHeader::deserialize(d)?;
        make_grid(h.n, h.blocks, h.half_period, h.points).map_err(serde::de::Error::custom)
    }
}

/// Builds a grid of `G` points per axis on `[-L, L)` for `N` blocks of dimension `n`.
pub fn make_grid(n: usize, blocks: usize, half_period: f64, points: usize) -> Result<GridSpec> {
    if n == 0 || blocks == 0 {
        return Err(Error::InvalidGrid(format!(
            "block dimension and block count must be positive (n={n}, N={blocks})"
        )));
    }
    if !(half_period.is_finite() && half_period > 0.0) {
        return Err(Error::InvalidGrid(format!("half-period must be positive, got {half_period}")));
    }
    if points < 2 || !points.is_power_of_two() {
        return Err(Error::InvalidGrid(format!(
            "points per axis must be an even power of two, got {points}"
        )));
    }
    Ok(GridSpec { n, blocks, half_period, points })
}

impl GridSpec {
    pub fn new(n: usize, blocks: usize, half_period: f64, points: usize) -> Result<Self> {
        make_grid(n, blocks, half_period, points)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Spatial spacing `h = 2L/G`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_period / self.points as f64
    }

    /// Frequency spacing `pi / L`.
    pub fn freq_spacing(&self) -> f64 {
        PI / self.half_period
    }

    /// `pi G / (2L)`, the magnitude of the most negative lattice frequency.
    pub fn nyquist(&self) -> f64 {
        PI * self.points as f64 / (2.0 * self.half_period)
    }

    /// Number of samples of a field with `dims` axes.
    pub fn len(&self, dims: usize) -> usize {
        self.points.pow(dims as u32)
    }

    pub fn block_len(&self) -> usize {
        self.len(self.n)
    }

    pub fn product_dims(&self) -> usize {
        self.n * self.blocks
    }

    pub fn with_points(&self, points: usize) -> Result<Self> {
        make_grid(self.n, self.blocks, self.half_period, points)
    }

    pub fn with_blocks(&self, blocks: usize) -> Result<Self> {
        make_grid(self.n, blocks, self.half_period, self.points)
    }

    pub fn with_half_period(&self, half_period: f64) -> Result<Self> {
        make_grid(self.n, self.blocks, half_period, self.points)
    }

    /// Spatial coordinate of index `i`: `-L + (i + 1/2) h`.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_period + (i as f64 + 0.5) * self.spacing()
    }

    /// Displacement coordinate of index `i`: `(i - G/2) h`. Contains zero.
    pub fn displacement(&self, i: usize) -> f64 {
        (i as f64 - (self.points / 2) as f64) * self.spacing()
    }

    /// Frequency of index `c`: `(c - G/2) pi / L`.
    pub fn freq(&self, c: usize) -> f64 {
        self.freq_index(c) as f64 * self.freq_spacing()
    }

    /// Signed lattice index `c - G/2` of storage index `c`.
    pub fn freq_index(&self, c: usize) -> i64 {
        c as i64 - (self.points / 2) as i64
    }

    /// Storage index and period count of an arbitrary signed frequency index.
    pub fn wrap_freq(&self, k: i64) -> (usize, i64) {
        let g = self.points as i64;
        let shifted = k + g / 2;
        (shifted.rem_euclid(g) as usize, shifted.div_euclid(g))
    }

    /// Spatial coordinates of a flat row-major index with `dims` axes.
    pub fn point(&self, flat: usize, dims: usize, out: &mut [f64]) {
        unravel(flat, self.points, dims, |a, i| out[a] = self.coord(i));
    }

    /// Frequency coordinates of a flat row-major index with `dims` axes.
    pub fn freq_point(&self, flat: usize, dims: usize, out: &mut [f64]) {
        unravel(flat, self.points, dims, |a, i| out[a] = self.freq(i));
    }

    /// Displacement coordinates of a flat row-major index with `dims` axes.
    pub fn displacement_point(&self, flat: usize, dims: usize, out: &mut [f64]) {
        unravel(flat, self.points, dims, |a, i| out[a] = self.displacement(i));
    }
}

pub(crate) fn unravel(mut flat: usize, g: usize, dims: usize, mut put: impl FnMut(usize, usize)) {
    for a in (0..dims).rev() {
        put(a, flat % g);
        flat /= g;
    }
}

pub(crate) fn ravel(idx: &[usize], g: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * g + i)
}

/// Anything sampled on a grid lattice with a known number of axes.
pub trait Sampled {
    fn grid(&self) -> &GridSpec;
    fn dims(&self) -> usize;
    fn values(&self) -> &[Complex64];
}

fn check_values(grid: &GridSpec, dims: usize, values: &[Complex64]) -> Result<()> {
    if values.len() != grid.len(dims) {
        return Err(Error::Shape(format!(
            "expected {} samples, got {}",
            grid.len(dims),
            values.len()
        )));
    }
    if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Parameter(format!("non-finite sample at index {i}")));
    }
    Ok(())
}

/// Complex samples over the `n`-dimensional x-lattice of one block.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        check_values(&grid, grid.n, &values)?;
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Field { grid, values: vec![Complex64::new(0.0, 0.0); grid.block_len()] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let mut x = vec![0.0; grid.n];
        let values = (0..grid.block_len())
            .map(|i| {
                grid.point(i, grid.n, &mut x);
                f(&x)
            })
            .collect();
        Field { grid, values }
    }

    pub fn from_real_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Discrete delta `h^{-n}` at flat index `at`.
    pub fn point_mass(grid: GridSpec, at: usize) -> Self {
        let mut u = Self::zeros(grid);
        u.values[at] = Complex64::new(grid.spacing().powi(-(grid.n as i32)), 0.0);
        u
    }

    /// Random field whose spectrum is supported in `|xi_a| <= band` on every axis.
    pub fn random_band_limited<R: Rng>(grid: GridSpec, band: f64, rng: &mut R) -> Result<Self> {
        let spec = random_spectrum(&grid, grid.n, band, rng)?;
        inverse_ft(&spec)
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Field { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}

impl Sampled for Field {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }
    fn dims(&self) -> usize {
        self.grid.n
    }
    fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Complex samples over the `nN`-dimensional product lattice.
///
/// Axes are ordered block by block, block 1 outermost, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl MultiField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        check_values(&grid, grid.product_dims(), &values)?;
        Ok(MultiField { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        MultiField { grid, values: vec![Complex64::new(0.0, 0.0); grid.len(grid.product_dims())] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let d = grid.product_dims();
        let mut x = vec![0.0; d];
        let values = (0..grid.len(d))
            .map(|i| {
                grid.point(i, d, &mut x);
                f(&x)
            })
            .collect();
        MultiField { grid, values }
    }

    /// Tensor product `u_1(x_1) ... u_N(x_N)`.
    pub fn tensor(factors: &[Field]) -> Result<Self> {
        let grid = *factors
            .first()
            .ok_or_else(|| Error::Shape("tensor product of no factors".into()))?
            .grid();
        if factors.len() != grid.blocks || factors.iter().any(|f| *f.grid() != grid) {
            return Err(Error::Shape("tensor factors must match the grid blocks".into()));
        }
        let b = grid.block_len();
        let mut values = vec![Complex64::new(1.0, 0.0)];
        for f in factors {
            let mut next = Vec::with_capacity(values.len() * b);
            for &v in &values {
                next.extend(f.values.iter().map(|&w| v * w));
            }
            values = next;
        }
        Ok(MultiField { grid, values })
    }

    pub fn random_band_limited<R: Rng>(grid: GridSpec, band: f64, rng: &mut R) -> Result<Self> {
        let spec = random_spectrum(&grid, grid.product_dims(), band, rng)?;
        inverse_ft_multi(&spec)
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        MultiField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }
}

impl Sampled for MultiField {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }
    fn dims(&self) -> usize {
        self.grid.product_dims()
    }
    fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Samples on the frequency lattice with `dims` axes.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: GridSpec,
    dims: usize,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: GridSpec, dims: usize, values: Vec<Complex64>) -> Result<Self> {
        check_values(&grid, dims, &values)?;
        Ok(Spectrum { grid, dims, values })
    }

    pub fn from_fn(grid: GridSpec, dims: usize, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let mut xi = vec![0.0; dims];
        let values = (0..grid.len(dims))
            .map(|i| {
                grid.freq_point(i, dims, &mut xi);
                f(&xi)
            })
            .collect();
        Spectrum { grid, dims, values }
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at an arbitrary signed frequency multi-index, continued periodically
    /// with the alias sign of the half-shifted x-lattice.
    pub fn at_index(&self, k: &[i64]) -> Complex64 {
        let mut flat = 0;
        let mut sign = 1.0;
        for &ka in k {
            let (c, s) = self.grid.wrap_freq(ka);
            flat = flat * self.grid.points + c;
            sign *= Lattice::Shifted.alias_sign(s);
        }
        self.values[flat] * sign
    }

    /// L^p norm with the frequency cell `(pi/L)^dims`, no `(2 pi)` factor.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        let cell = self.grid.freq_spacing().powi(self.dims as i32);
        let abs: Vec<f64> = self.values.iter().map(|v| v.norm()).collect();
        weighted_norm(&abs, None, cell, p)
    }
}

impl Sampled for Spectrum {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }
    fn dims(&self) -> usize {
        self.dims
    }
    fn values(&self) -> &[Complex64] {
        &self.values
    }
}

fn random_spectrum<R: Rng>(grid: &GridSpec, dims: usize, band: f64, rng: &mut R) -> Result<Spectrum> {
    if !(band > 0.0 && band < grid.nyquist()) {
        return Err(Error::Parameter(format!(
            "band limit {band} must lie in (0, {})",
            grid.nyquist()
        )));
    }
    let mut xi = vec![0.0; dims];
    let values = (0..grid.len(dims))
        .map(|i| {
            grid.freq_point(i, dims, &mut xi);
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            if xi.iter().all(|v| v.abs() <= band) {
                Complex64::new(re, im)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(Spectrum { grid: *grid, dims, values })
}

/// `h^d sum_y u(y) e^{-i xi.y}` on the frequency lattice.
pub fn forward_ft<S: Sampled>(u: &S) -> Spectrum {
    let grid = *u.grid();
    let mut values = u.values().to_vec();
    fft::transform(&mut values, grid.points, u.dims(), grid.spacing(), Lattice::Shifted, Direction::Forward);
    Spectrum { grid, dims: u.dims(), values }
}

pub(crate) fn inverse_values(spec: &Spectrum, lattice: Lattice) -> Vec<Complex64> {
    let grid = spec.grid;
    let mut values = spec.values.clone();
    fft::transform(&mut values, grid.points, spec.dims, grid.spacing(), lattice, Direction::Inverse);
    values
}

/// `(2 pi)^{-n} (pi/L)^n sum_xi v(xi) e^{+i xi.x}` back on the x-lattice.
pub fn inverse_ft(spec: &Spectrum) -> Result<Field> {
    if spec.dims != spec.grid.n {
        return Err(Error::Shape(format!(
            "spectrum has {} axes, a field has {}",
            spec.dims, spec.grid.n
        )));
    }
    Ok(Field { grid: spec.grid, values: inverse_values(spec, Lattice::Shifted) })
}

pub fn inverse_ft_multi(spec: &Spectrum) -> Result<MultiField> {
    if spec.dims != spec.grid.product_dims() {
        return Err(Error::Shape(format!(
            "spectrum has {} axes, the product lattice has {}",
            spec.dims,
            spec.grid.product_dims()
        )));
    }
    Ok(MultiField { grid: spec.grid, values: inverse_values(spec, Lattice::Shifted) })
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Exponent(format!("exponent must lie in [1, inf], got {p}")));
    }
    Ok(())
}

pub(crate) fn weighted_norm(abs: &[f64], w: Option<&[f64]>, cell: f64, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p.is_infinite() {
        let m = match w {
            Some(w) => abs.iter().zip(w).filter(|(_, &w)| w > 0.0).map(|(a, _)| *a).fold(0.0, f64::max),
            None => abs.iter().copied().fold(0.0, f64::max),
        };
        return Ok(m);
    }
    Ok(match w {
        Some(w) => power_sum_root(abs.iter().copied().zip(w.iter().copied()), cell, p),
        None => power_sum_root(abs.iter().map(|a| (*a, 1.0)), cell, p),
    })
}

/// `(cell sum a^p w)^{1/p}` over `(a, w)` pairs, factoring out `max a` so
/// large exponents neither overflow nor underflow.
pub(crate) fn power_sum_root(pairs: impl Iterator<Item = (f64, f64)> + Clone, cell: f64, p: f64) -> f64 {
    let m = pairs.clone().filter(|(_, w)| *w > 0.0).map(|(a, _)| a).fold(0.0, f64::max);
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    let s: f64 = pairs.filter(|(_, w)| *w > 0.0).map(|(a, w)| (a / m).powf(p) * w).sum();
    m * (s * cell).powf(1.0 / p)
}

/// `(h^d sum |u|^p w)^{1/p}`, or the grid maximum for `p = inf`.
pub fn lp_norm<S: Sampled>(u: &S, p: f64, w: Option<&WeightField>) -> Result<f64> {
    let grid = u.grid();
    if let Some(w) = w {
        if w.grid().points() != grid.points()
            || w.grid().half_period() != grid.half_period()
            || w.dims() != u.dims()
        {
            return Err(Error::Shape("weight lives on a different lattice".into()));
        }
    }
    let abs: Vec<f64> = u.values().iter().map(|v| v.norm()).collect();
    let cell = grid.spacing().powi(u.dims() as i32);
    weighted_norm(&abs, w.map(|w| w.values()), cell, p)
}

/// Iterated norm over blocks: innermost in `x_1` with `exponents[0]`,
/// outermost in `x_N` with `exponents[N-1]`.
pub fn mixed_norm(u: &MultiField, exponents: &[f64]) -> Result<f64> {
    let grid = u.grid;
    let abs: Vec<f64> = u.values.iter().map(|v| v.norm()).collect();
    mixed_norm_abs(abs, grid.points, grid.n, grid.blocks, grid.spacing(), exponents)
}

/// Mixed norm of samples on the `nN`-dimensional frequency lattice, cell `(pi/L)^n` per block.
pub fn mixed_norm_spectrum(spec: &Spectrum, exponents: &[f64]) -> Result<f64> {
    let grid = spec.grid;
    if spec.dims != grid.product_dims() {
        return Err(Error::Shape("spectrum is not on the product lattice".into()));
    }
    let abs: Vec<f64> = spec.values.iter().map(|v| v.norm()).collect();
    mixed_norm_abs(abs, grid.points, grid.n, grid.blocks, grid.freq_spacing(), exponents)
}

pub(crate) fn mixed_norm_abs(
    mut abs: Vec<f64>,
    g: usize,
    n: usize,
    blocks: usize,
    spacing: f64,
    exponents: &[f64],
) -> Result<f64> {
    if exponents.len() != blocks {
        return Err(Error::Shape(format!(
            "expected {blocks} exponents, got {}",
            exponents.len()
        )));
    }
    for &p in exponents {
        check_exponent(p)?;
    }
    let b = g.pow(n as u32);
    let cell = spacing.powi(n as i32);
    for &p in exponents {
        let rest = abs.len() / b;
        let mut next = vec![0.0; rest];
        for (r, out) in next.iter_mut().enumerate() {
            if p.is_infinite() {
                *out = (0..b).map(|i| abs[i * rest + r]).fold(0.0, f64::max);
            } else {
                *out = power_sum_root((0..b).map(|i| (abs[i * rest + r], 1.0)), cell, p);
            }
        }
        abs = next;
    }
    Ok(abs[0])
}

/// Exponents `(p, q, r)` with `1/p + 1/q = 1/r`, each in `[1, inf]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentTriple {
    #[serde(with = "ext_real")]
    pub p: f64,
    #[serde(with = "ext_real")]
    pub q: f64,
    #[serde(with = "ext_real")]
    pub r: f64,
}

impl ExponentTriple {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        let t = ExponentTriple { p, q, r };
        t.validate()?;
        Ok(t)
    }

    /// Builds the triple with `r` determined by `1/r = 1/p + 1/q`.
    pub fn from_pq(p: f64, q: f64) -> Result<Self> {
        check_exponent(p)?;
        check_exponent(q)?;
        let inv = 1.0 / p + 1.0 / q;
        let r = if inv == 0.0 { f64::INFINITY } else { 1.0 / inv };
        Self::new(p, q, r)
    }

    /// Builds the triple from `(1/p, 1/q, 1/r)`.
    pub fn from_reciprocals(a: f64, b: f64, c: f64) -> Result<Self> {
        let inv = |t: f64| if t == 0.0 { f64::INFINITY } else { 1.0 / t };
        Self::new(inv(a), inv(b), inv(c))
    }

    pub fn reciprocals(&self) -> [f64; 3] {
        [1.0 / self.p, 1.0 / self.q, 1.0 / self.r]
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.p, self.q, self.r] {
            check_exponent(v)?;
        }
        let [a, b, c] = self.reciprocals();
        if (a + b - c).abs() > 1e-12 {
            return Err(Error::Exponent(format!(
                "1/p + 1/q = {} differs from 1/r = {c}",
                a + b
            )));
        }
        Ok(())
    }

    /// Membership in the closed triangle with vertices (1/2,1/2,1), (0,1/2,1/2), (1/2,0,1/2).
    pub fn in_l2_triangle(&self) -> bool {
        let [a, b, _] = self.reciprocals();
        let tol = 1e-12;
        a <= 0.5 + tol && b <= 0.5 + tol && a + b >= 0.5 - tol
    }
}

/// Serde for extended reals: finite numbers as numbers, infinity as `"inf"`.
pub mod ext_real {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub(crate) fn parse(s: &str) -> Option<f64> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "∞" => Some(f64::INFINITY),
            t => t.parse().ok(),
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => parse(&t).ok_or_else(|| serde::de::Error::custom(format!("not an exponent: {t}"))),
        }
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                if x.is_infinite() && *x > 0.0 {
                    seq.serialize_element("inf")?;
                } else {
                    seq.serialize_element(x)?;
                }
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Ok(Vec::<Wrap>::deserialize(d)?.into_iter().map(|w| w.0).collect())
        }
    }
}

/// Writes a one-line JSON header `{n,N,L,G}` followed by little-endian `(re, im)` pairs.
pub fn write_samples<S: Sampled>(path: &Path, u: &S) -> Result<()> {
    write_raw(path, u.grid(), u.values())
}

pub(crate) fn write_raw(path: &Path, grid: &GridSpec, values: &[Complex64]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut out, grid)?;
    out.write_all(b"\n")?;
    for v in values {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a file written by [`write_samples`].
pub fn read_samples(path: &Path) -> Result<(GridSpec, Vec<Complex64>)> {
    let mut input = BufReader::new(File::open(path)?);
    let mut header = String::new();
    input.read_line(&mut header)?;
    let grid: GridSpec = serde_json::from_str(header.trim_end())?;
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() % 16 != 0 {
        return Err(Error::Shape("payload is not a whole number of complex samples".into()));
    }
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    Ok((grid, values))
}

pub fn read_field(path: &Path) -> Result<Field> {
    let (grid, values) = read_samples(path)?;
    Field::new(grid, values)
}

pub fn read_multi_field(path: &Path) -> Result<MultiField> {
    let (grid, values) = read_samples(path)?;
    MultiField::new(grid, values)
}
