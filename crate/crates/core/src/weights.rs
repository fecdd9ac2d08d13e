//! Muckenhoupt weights on the shifted lattice and their discrete `A_p` constants.
//!
//! Cubes are the centered periodic lattice cubes of odd side `2r + 1`,
//! `r = 0..G/2 - 1`, plus the whole torus; the same family as in `maximal`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{check_exponent, GridSpec};
use crate::lp_decomp::norm;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    Unit,
    Power { gamma: f64 },
    Product,
    Custom,
}

/// Serializable weight recipe used by configs and symbol classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Unit,
    Power { gamma: f64 },
}

impl WeightSpec {
    pub fn build(&self, grid: &GridSpec) -> WeightField {
        match self {
            WeightSpec::Unit => unit_weight(grid),
            WeightSpec::Power { gamma } => power_weight(*gamma, grid),
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, WeightSpec::Unit) || matches!(self, WeightSpec::Power { gamma } if *gamma == 0.0)
    }
}

/// Nonnegative samples on the x-lattice of one block.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightField {
    grid: GridSpec,
    dims: usize,
    values: Vec<f64>,
    kind: WeightKind,
}

impl WeightField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.block_len() {
            return Err(Error::Shape(format!(
                "weight needs {} samples, got {}",
                grid.block_len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Parameter("weights must be finite and nonnegative".into()));
        }
        Ok(WeightField { grid, dims: grid.n(), values, kind: WeightKind::Custom })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    pub fn scaled(&self, c: f64) -> Self {
        WeightField {
            grid: self.grid,
            dims: self.dims,
            values: self.values.iter().map(|v| v * c).collect(),
            kind: WeightKind::Custom,
        }
    }

    pub fn powf(&self, e: f64) -> Self {
        let kind = match self.kind {
            WeightKind::Unit => WeightKind::Unit,
            WeightKind::Power { gamma } => WeightKind::Power { gamma: gamma * e },
            _ => WeightKind::Custom,
        };
        WeightField {
            grid: self.grid,
            dims: self.dims,
            values: self.values.iter().map(|v| v.powf(e)).collect(),
            kind,
        }
    }
}

pub fn unit_weight(grid: &GridSpec) -> WeightField {
    WeightField { grid: *grid, dims: grid.n(), values: vec![1.0; grid.block_len()], kind: WeightKind::Unit }
}

/// `|x|^gamma` on the half-shifted lattice, finite for every `gamma`.
pub fn power_weight(gamma: f64, grid: &GridSpec) -> WeightField {
    let n = grid.n();
    let mut x = vec![0.0; n];
    let values = (0..grid.block_len())
        .map(|i| {
            grid.point(i, n, &mut x);
            if gamma == 0.0 {
                1.0
            } else {
                norm(&x).powf(gamma)
            }
        })
        .collect();
    let kind = if gamma == 0.0 { WeightKind::Unit } else { WeightKind::Power { gamma } };
    WeightField { grid: *grid, dims: n, values, kind }
}

// Periodic centered box sums of half-width r along every axis.
pub(crate) fn box_sums(values: &[f64], g: usize, dims: usize, r: usize) -> Vec<f64> {
    let mut cur = values.to_vec();
    let mut line = vec![0.0; g];
    let mut prefix = vec![0.0; 3 * g + 1];
    for axis in 0..dims {
        let stride = g.pow((dims - 1 - axis) as u32);
        let outer = cur.len() / (stride * g);
        for o in 0..outer {
            for i in 0..stride {
                let base = o * stride * g + i;
                if 2 * r + 1 >= g {
                    let s: f64 = (0..g).map(|d| cur[base + d * stride]).sum();
                    for d in 0..g {
                        cur[base + d * stride] = s;
                    }
                    continue;
                }
                for d in 0..g {
                    line[d] = cur[base + d * stride];
                }
                // prefix over three periods so every window is a difference
                prefix[0] = 0.0;
                for t in 0..3 * g {
                    prefix[t + 1] = prefix[t] + line[t % g];
                }
                for d in 0..g {
                    let c = d + g;
                    cur[base + d * stride] = prefix[c + r + 1] - prefix[c - r];
                }
            }
        }
    }
    cur
}

// Periodic centered running extremum of half-width r along every axis.
pub(crate) fn box_extreme(values: &[f64], g: usize, dims: usize, r: usize, take_max: bool) -> Vec<f64> {
    let pick = |a: f64, b: f64| if take_max { a.max(b) } else { a.min(b) };
    let mut cur = values.to_vec();
    let mut line = vec![0.0; g];
    for axis in 0..dims {
        let stride = g.pow((dims - 1 - axis) as u32);
        let outer = cur.len() / (stride * g);
        for o in 0..outer {
            for i in 0..stride {
                let base = o * stride * g + i;
                for d in 0..g {
                    line[d] = cur[base + d * stride];
                }
                if 2 * r + 1 >= g {
                    let e = line.iter().copied().reduce(pick).unwrap();
                    for d in 0..g {
                        cur[base + d * stride] = e;
                    }
                    continue;
                }
                for d in 0..g {
                    let mut e = line[d];
                    for t in 1..=r {
                        e = pick(e, line[(d + t) % g]);
                        e = pick(e, line[(d + g - t) % g]);
                    }
                    cur[base + d * stride] = e;
                }
            }
        }
    }
    cur
}

/// Half-widths of the cube family; the last entry is the whole torus.
pub(crate) fn cube_radii(g: usize) -> Vec<usize> {
    (0..g / 2).chain(std::iter::once(g / 2)).collect()
}

pub(crate) fn cube_count(g: usize, dims: usize, r: usize) -> f64 {
    let side = if 2 * r + 1 >= g { g } else { 2 * r + 1 };
    (side as f64).powi(dims as i32)
}

/// `sup_Q w_Q (w^{-1/(p-1)})_Q^{p-1}` over all centered lattice cubes;
/// for `p = 1`, `sup_Q w_Q / min_Q w`.
pub fn ap_constant(w: &WeightField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Err(Error::Exponent("A_p constants are computed for finite p".into()));
    }
    if w.values.iter().any(|v| *v <= 0.0) {
        return Ok(f64::INFINITY);
    }
    let g = w.grid.points();
    let dims = w.dims;
    let dual: Vec<f64> = if p > 1.0 {
        w.values.iter().map(|v| v.powf(-1.0 / (p - 1.0))).collect()
    } else {
        Vec::new()
    };
    let mut best: f64 = 0.0;
    for r in cube_radii(g) {
        let count = cube_count(g, dims, r);
        let wsum = box_sums(&w.values, g, dims, r);
        if p > 1.0 {
            let dsum = box_sums(&dual, g, dims, r);
            for (a, b) in wsum.iter().zip(&dsum) {
                best = best.max((a / count) * (b / count).powf(p - 1.0));
            }
        } else {
            let wmin = box_extreme(&w.values, g, dims, r, false);
            for (a, m) in wsum.iter().zip(&wmin) {
                best = best.max((a / count) / m);
            }
        }
    }
    Ok(best)
}

/// `mu = prod_j w_j^{r/q_j}`; a weight paired with `q_j = inf` must be constant.
pub fn product_weight(ws: &[WeightField], qs: &[f64], r: f64) -> Result<WeightField> {
    if ws.is_empty() || ws.len() != qs.len() {
        return Err(Error::Shape("one exponent per weight is required".into()));
    }
    if !(r > 0.0) {
        return Err(Error::Exponent(format!("target exponent must be positive, got {r}")));
    }
    let grid = ws[0].grid;
    let mut values = vec![1.0; ws[0].values.len()];
    for (w, &q) in ws.iter().zip(qs) {
        check_exponent(q)?;
        if w.grid != grid {
            return Err(Error::Shape("weights live on different grids".into()));
        }
        if q.is_infinite() {
            if !w.is_constant() {
                return Err(Error::Parameter("a weight paired with q = inf must be constant".into()));
            }
            continue;
        }
        for (v, wv) in values.iter_mut().zip(&w.values) {
            *v *= wv.powf(r / q);
        }
    }
    let kind = if ws.iter().zip(qs).all(|(w, q)| q.is_infinite() || w.kind == WeightKind::Unit) {
        WeightKind::Unit
    } else {
        WeightKind::Product
    };
    Ok(WeightField { grid, dims: ws[0].dims, values, kind })
}

/// `nu = mu^{r/p} w^{r/q}`; with `w` absent only the first factor is kept.
pub fn nu_weight(mu: &WeightField, w: Option<&WeightField>, p: f64, q: f64, r: f64) -> Result<WeightField> {
    check_exponent(p)?;
    if !(r > 0.0) {
        return Err(Error::Exponent(format!("target exponent must be positive, got {r}")));
    }
    let mut values: Vec<f64> = mu.values.iter().map(|v| v.powf(r / p)).collect();
    if let Some(w) = w {
        check_exponent(q)?;
        if w.grid != mu.grid {
            return Err(Error::Shape("weights live on different grids".into()));
        }
        if q.is_infinite() {
            if !w.is_constant() {
                return Err(Error::Parameter("a weight paired with q = inf must be constant".into()));
            }
        } else {
            for (v, wv) in values.iter_mut().zip(&w.values) {
                *v *= wv.powf(r / q);
            }
        }
    }
    Ok(WeightField { grid: mu.grid, dims: mu.dims, values, kind: WeightKind::Product })
}
