//! Configuration-driven experiment runs.
//!
//! A suite file is JSON with `"schema": 1`, shared ladder settings and a list
//! of named experiments; unknown keys are rejected everywhere.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ext_real, ExponentTriple, GridSpec};
use crate::lp_decomp::build_family;
use crate::operators::{compute_kernel, fit_kernel_decay, KernelIndex};
use crate::symbols::{ClaimedClass, FreqProfile, SymbolSpec, XFactor};
use crate::verify::{
    thm63_triples, verify_bilinear_bound, verify_convolution_majorant, verify_hausdorff_young,
    verify_lemma61, verify_linear_weighted, verify_mixed_norm, verify_pointwise_bound, verify_thm63,
    verify_weighted_bound, BoundReport, Settings,
};
use crate::weights::WeightSpec;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub schema: u32,
    #[serde(default)]
    pub settings: Settings,
    pub experiments: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub name: String,
    /// Reported, but never affects the exit status.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exploratory: bool,
    /// Overrides the suite settings for ladder experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings: Option<Settings>,
    pub experiment: Experiment,
}

fn default_triples() -> Vec<ExponentTriple> {
    thm63_triples()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    ConvolutionMajorant {
        grid: GridSpec,
        pairs: usize,
        seed: u64,
    },
    HausdorffYoung {
        #[serde(with = "ext_real::vec")]
        exponents: Vec<f64>,
        grid: GridSpec,
        trials: usize,
        seed: u64,
    },
    PointwiseBound {
        symbol: SymbolSpec,
        ps: Vec<f64>,
    },
    WeightedBound {
        symbol: SymbolSpec,
        #[serde(with = "ext_real::vec")]
        qs: Vec<f64>,
        ps: Vec<f64>,
        weights: Vec<WeightSpec>,
    },
    MixedNorm {
        symbol: SymbolSpec,
        ps: Vec<f64>,
        qs: Vec<f64>,
    },
    LinearWeighted {
        symbol: SymbolSpec,
        p: f64,
        #[serde(with = "ext_real")]
        q: f64,
        r: f64,
        mu: WeightSpec,
        w: WeightSpec,
    },
    BilinearBound {
        symbol: SymbolSpec,
        triples: Vec<ExponentTriple>,
    },
    SOperator {
        symbol: SymbolSpec,
        grid: GridSpec,
        trials: usize,
        seed: u64,
    },
    L2Triangle {
        symbol: SymbolSpec,
        #[serde(default = "default_triples")]
        triples: Vec<ExponentTriple>,
    },
    KernelDecay {
        symbol: SymbolSpec,
        grid: GridSpec,
        kernel: KernelIndex,
        orders: Vec<f64>,
    },
}

impl Experiment {
    /// The estimate an experiment probes, in words.
    pub fn claim(&self) -> &'static str {
        match self {
            Experiment::ConvolutionMajorant { .. } => "radial convolution dominated by the maximal function",
            Experiment::HausdorffYoung { .. } => "mixed-norm Hausdorff-Young inequality",
            Experiment::PointwiseBound { .. } => "pointwise bound by products of L^p maximal functions",
            Experiment::WeightedBound { .. } => "weighted multilinear boundedness",
            Experiment::MixedNorm { .. } => "mixed-norm boundedness via iterated maximal functions",
            Experiment::LinearWeighted { .. } => "weighted boundedness for symbols in L^p_mu classes",
            Experiment::BilinearBound { .. } => "bilinear boundedness below the exponent-dependent order",
            Experiment::SOperator { .. } => "L2 bound for the bilinear-to-linear operator S, sharp",
            Experiment::L2Triangle { .. } => "order-zero symbols under the local L2 condition on the L2 triangle",
            Experiment::KernelDecay { .. } => "kernel decay away from the diagonal",
        }
    }
}

pub fn parse_config(text: &str) -> Result<SuiteConfig> {
    let cfg: SuiteConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if cfg.schema != SCHEMA {
        return Err(Error::Config(format!("unsupported schema {}, expected {SCHEMA}", cfg.schema)));
    }
    let mut names: Vec<&str> = cfg.experiments.iter().map(|e| e.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Config(format!("duplicate experiment name {}", w[0])));
    }
    if let Some(e) = cfg.experiments.iter().find(|e| !valid_name(&e.name)) {
        return Err(Error::Config(format!("experiment name {:?} must use [A-Za-z0-9_-]", e.name)));
    }
    Ok(cfg)
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

pub fn load_config(path: &Path) -> Result<SuiteConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    /// Largest grid size per axis.
    pub max_grid: Option<usize>,
    pub jobs: Option<usize>,
}

fn cap_settings(mut s: Settings, opts: &RunOptions) -> Settings {
    if let Some(seed) = opts.seed {
        s.seed = seed;
    }
    if let Some(cap) = opts.max_grid {
        s.ladder.retain(|&g| g <= cap);
        if s.ladder.is_empty() {
            s.ladder.push(cap);
        }
    }
    s
}

fn cap_grid(grid: &GridSpec, opts: &RunOptions) -> Result<GridSpec> {
    match opts.max_grid {
        Some(cap) if grid.points() > cap => grid.with_points(cap),
        _ => Ok(*grid),
    }
}

// Tabulated symbols live on one lattice; keep them on the capped grid.
fn retable(spec: &SymbolSpec, grid: &GridSpec) -> SymbolSpec {
    match spec {
        SymbolSpec::RandomTable { seed, n, blocks, x_dependent, band, .. } => SymbolSpec::RandomTable {
            seed: *seed,
            n: *n,
            blocks: *blocks,
            points: grid.points(),
            half_period: grid.half_period(),
            x_dependent: *x_dependent,
            band: *band,
        },
        other => other.clone(),
    }
}

/// Runs one experiment with the given ladder settings.
pub fn run_experiment(exp: &Experiment, settings: &Settings, opts: &RunOptions) -> Result<BoundReport> {
    let seed = |s: u64| opts.seed.unwrap_or(s);
    match exp {
        Experiment::ConvolutionMajorant { grid, pairs, seed: s } => {
            verify_convolution_majorant(&cap_grid(grid, opts)?, *pairs, seed(*s))
        }
        Experiment::HausdorffYoung { exponents, grid, trials, seed: s } => {
            verify_hausdorff_young(exponents, *trials, &cap_grid(grid, opts)?, seed(*s))
        }
        Experiment::PointwiseBound { symbol, ps } => verify_pointwise_bound(&symbol.build()?, ps, settings),
        Experiment::WeightedBound { symbol, qs, ps, weights } => {
            verify_weighted_bound(&symbol.build()?, qs, ps, weights, settings)
        }
        Experiment::MixedNorm { symbol, ps, qs } => verify_mixed_norm(&symbol.build()?, ps, qs, settings),
        Experiment::LinearWeighted { symbol, p, q, r, mu, w } => {
            verify_linear_weighted(&symbol.build()?, *p, *q, *r, mu, w, settings)
        }
        Experiment::BilinearBound { symbol, triples } => verify_bilinear_bound(&symbol.build()?, triples, settings),
        Experiment::SOperator { symbol, grid, trials, seed: s } => {
            let grid = cap_grid(grid, opts)?;
            verify_lemma61(&retable(symbol, &grid).build()?, &grid, *trials, seed(*s))
        }
        Experiment::L2Triangle { symbol, triples } => verify_thm63(&symbol.build()?, triples, settings),
        Experiment::KernelDecay { symbol, grid, kernel, orders } => {
            let grid = cap_grid(grid, opts)?;
            let fam = build_family(&grid)?;
            let k = compute_kernel(&symbol.build()?, &fam, *kernel, &grid)?;
            fit_kernel_decay(&k, orders)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Invalid,
}

#[derive(Clone, Debug)]
pub struct EntryOutcome {
    pub name: String,
    pub claim: &'static str,
    pub exploratory: bool,
    pub status: Status,
    pub report: Option<BoundReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub entries: Vec<EntryOutcome>,
}

impl SuiteOutcome {
    /// 0 when every non-exploratory entry passes, 2 when any entry was
    /// rejected as invalid, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.entries.iter().any(|e| e.status == Status::Invalid) {
            2
        } else if self.entries.iter().any(|e| !e.exploratory && e.status == Status::Fail) {
            1
        } else {
            0
        }
    }

    /// `name,experiment,claim,verdict,sup,exploratory`; no timings.
    pub fn summary_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "experiment", "claim", "verdict", "sup", "exploratory"])?;
        for e in &self.entries {
            let (exp, sup) = match &e.report {
                Some(r) => (r.experiment.clone(), format!("{:.17e}", r.sup())),
                None => (String::new(), String::new()),
            };
            w.write_record([
                e.name.clone(),
                exp,
                e.claim.to_string(),
                format!("{:?}", e.status).to_lowercase(),
                sup,
                e.exploratory.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Aligned plain-text table with timings, for terminals.
    pub fn summary_table(&self) -> String {
        let width = self.entries.iter().map(|e| e.name.len()).max().unwrap_or(4).max(4);
        let mut s = String::new();
        let _ = writeln!(s, "{:<width$}  {:<8} {:>9}  claim", "name", "verdict", "seconds");
        for e in &self.entries {
            let verdict = match (&e.status, e.exploratory) {
                (Status::Pass, _) => "pass",
                (Status::Fail, true) => "fail*",
                (Status::Fail, false) => "FAIL",
                (Status::Invalid, _) => "INVALID",
            };
            let secs = e.report.as_ref().map(|r| format!("{:.2}", r.runtime_seconds)).unwrap_or_default();
            let _ = writeln!(s, "{:<width$}  {:<8} {:>9}  {}", e.name, verdict, secs, e.claim);
            if let Some(err) = &e.error {
                let _ = writeln!(s, "{:<width$}  {err}", "");
            }
        }
        if self.entries.iter().any(|e| e.exploratory) {
            s.push_str("* exploratory: does not affect the exit status\n");
        }
        s
    }
}

/// Runs every entry in order; reports are written to `out` when given.
pub fn run_suite(cfg: &SuiteConfig, opts: &RunOptions, out: Option<&Path>) -> Result<SuiteOutcome> {
    let run = || -> Result<SuiteOutcome> {
        let mut entries = Vec::with_capacity(cfg.experiments.len());
        for e in &cfg.experiments {
            let settings = cap_settings(e.settings.clone().unwrap_or_else(|| cfg.settings.clone()), opts);
            let (status, report, error) = match run_experiment(&e.experiment, &settings, opts) {
                Ok(r) => {
                    let st = if r.passed() { Status::Pass } else { Status::Fail };
                    (st, Some(r), None)
                }
                Err(err) => (Status::Invalid, None, Some(err.to_string())),
            };
            if let (Some(dir), Some(r)) = (out, &report) {
                r.write_as(dir, &e.name)?;
            }
            entries.push(EntryOutcome {
                name: e.name.clone(),
                claim: e.experiment.claim(),
                exploratory: e.exploratory,
                status,
                report,
                error,
            });
        }
        let outcome = SuiteOutcome { entries };
        if let Some(dir) = out {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("summary.csv"), outcome.summary_csv()?)?;
            fs::write(dir.join("summary.txt"), outcome.summary_table())?;
        }
        Ok(outcome)
    };
    match opts.jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run),
        None => run(),
    }
}

/// Parses descriptors such as `osc:m=-1,rho=0.5` into symbol recipes.
///
/// Kinds: `const` (value), `osc` (m, rho), `rough` (m, rho, seed, cell),
/// `gauss` (scale), `neglap`, `sep` (g, h: Gaussian widths), `modsep`
/// (`e^{i sin(freq x)}` times `sep`), `band:<inner>` for the resolved
/// dyadic band. Every kind accepts `n` and `blocks`, defaulting to `n = 1`
/// and the given number of blocks.
pub fn parse_symbol(desc: &str, default_blocks: usize) -> Result<SymbolSpec> {
    if let Some(inner) = desc.strip_prefix("band:") {
        return Ok(SymbolSpec::ResolvedBand { inner: Box::new(parse_symbol(inner, default_blocks)?) });
    }
    let (kind, rest) = desc.split_once(':').unwrap_or((desc, ""));
    let mut keys: Vec<(String, f64)> = Vec::new();
    for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value in {part:?}")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::Config(format!("not a number: {v:?}")))?;
        keys.push((k.trim().to_string(), v));
    }
    let allowed: &[&str] = match kind {
        "const" => &["value"],
        "osc" => &["m", "rho"],
        "rough" => &["m", "rho", "seed", "cell"],
        "gauss" => &["scale"],
        "neglap" => &[],
        "sep" => &["g", "h"],
        "modsep" => &["g", "h", "freq"],
        other => return Err(Error::Config(format!("unknown symbol kind {other:?}"))),
    };
    if let Some((k, _)) = keys.iter().find(|(k, _)| k != "n" && k != "blocks" && !allowed.contains(&k.as_str())) {
        return Err(Error::Config(format!("unknown key {k:?} for {kind}")));
    }
    let get = |k: &str| keys.iter().find(|(key, _)| key == k).map(|(_, v)| *v);
    let need = |k: &str| get(k).ok_or_else(|| Error::Config(format!("{kind} needs {k}")));
    let n = get("n").unwrap_or(1.0) as usize;
    let blocks = get("blocks").map(|b| b as usize).unwrap_or(default_blocks);
    let sep = || -> Result<SymbolSpec> {
        Ok(SymbolSpec::SeparableBilinear {
            g: FreqProfile::Gaussian { width: get("g").unwrap_or(1.0) },
            h: FreqProfile::Gaussian { width: get("h").unwrap_or(1.0) },
            n,
        })
    };
    Ok(match kind {
        "const" => SymbolSpec::Constant { value: need("value")?, imag: 0.0, n, blocks },
        "osc" => SymbolSpec::Oscillatory { m: need("m")?, rho: need("rho")?, n, blocks },
        "rough" => SymbolSpec::RoughX {
            m: need("m")?,
            rho: need("rho")?,
            profile: XFactor::RandomSigns { seed: get("seed").unwrap_or(7.0) as u64, cell: get("cell").unwrap_or(1.0) },
            n,
            blocks,
        },
        "gauss" => SymbolSpec::Gaussian { scale: need("scale")?, n, blocks },
        "neglap" => SymbolSpec::NegLaplacian { n, blocks },
        "sep" => sep()?,
        _ => SymbolSpec::Modulated {
            factor: XFactor::ExpISin { freq: get("freq").unwrap_or(1.0) },
            inner: Box::new(sep()?),
        },
    })
}

fn grid(n: usize, blocks: usize, l: f64, g: usize) -> GridSpec {
    GridSpec::new(n, blocks, l, g).expect("canonical grid")
}

fn triple(p: f64, q: f64, r: f64) -> ExponentTriple {
    ExponentTriple::new(p, q, r).expect("canonical triple")
}

fn entry(name: &str, experiment: Experiment) -> Entry {
    Entry { name: name.into(), exploratory: false, settings: None, experiment }
}

/// Bounded x-profile times an oscillatory symbol, claimed in `L^2 S^{-0.55}_{1/2}`.
pub fn lp_class_symbol() -> SymbolSpec {
    SymbolSpec::Reclassified {
        class: ClaimedClass::LpMuS { m: -0.55, rho: 0.5, p: 2.0, weight: WeightSpec::Unit },
        inner: Box::new(SymbolSpec::Modulated {
            factor: XFactor::Product { factors: vec![XFactor::Gaussian { width: 2.0 }, XFactor::SignSin { freq: 3.0 }] },
            inner: Box::new(SymbolSpec::Oscillatory { m: -0.55, rho: 0.5, n: 1, blocks: 1 }),
        }),
    }
}

/// `e^{i sin x} g(xi + eta) h(eta)` with Gaussian `g`, `h` of width 1.
pub fn local_l2_symbol() -> SymbolSpec {
    SymbolSpec::Modulated {
        factor: XFactor::ExpISin { freq: 1.0 },
        inner: Box::new(separable_gaussians()),
    }
}

fn separable_gaussians() -> SymbolSpec {
    SymbolSpec::SeparableBilinear {
        g: FreqProfile::Gaussian { width: 1.0 },
        h: FreqProfile::Gaussian { width: 1.0 },
        n: 1,
    }
}

/// The full canonical suite shipped as `suites/paper_full.json`.
pub fn canonical_suite() -> SuiteConfig {
    let osc = |m: f64, rho: f64, blocks: usize| SymbolSpec::Oscillatory { m, rho, n: 1, blocks };
    let unit = WeightSpec::Unit;
    let sqrt_x = WeightSpec::Power { gamma: 0.5 };
    let inf = f64::INFINITY;
    let mut ex = vec![entry(
        "convolution_majorant",
        Experiment::ConvolutionMajorant { grid: grid(1, 1, 8.0, 256), pairs: 20, seed: 0 },
    )];
    for (name, exps) in [
        ("hausdorff_young_2", vec![2.0]),
        ("hausdorff_young_1", vec![1.0]),
        ("hausdorff_young_2_1", vec![2.0, 1.0]),
        ("hausdorff_young_2_2", vec![2.0, 2.0]),
        ("hausdorff_young_1_1", vec![1.0, 1.0]),
    ] {
        let g = grid(1, exps.len(), 4.0, 16);
        ex.push(entry(name, Experiment::HausdorffYoung { exponents: exps, grid: g, trials: 200, seed: 0 }));
    }
    // threshold (rho - 1)(1/2 + 1/2) = -0.5 for p = (2, 2); margin 0.3
    ex.push(entry("pointwise_oscillatory", Experiment::PointwiseBound { symbol: osc(-0.8, 0.5, 2), ps: vec![2.0, 2.0] }));
    ex.push(entry(
        "pointwise_rough_x",
        Experiment::PointwiseBound {
            symbol: SymbolSpec::RoughX {
                m: -0.8,
                rho: 0.5,
                profile: XFactor::RandomSigns { seed: 7, cell: 1.0 },
                n: 1,
                blocks: 2,
            },
            ps: vec![2.0, 2.0],
        },
    ));
    ex.push(entry(
        "pointwise_dyadic",
        Experiment::PointwiseBound {
            symbol: SymbolSpec::ResolvedBand { inner: Box::new(osc(-0.8, 0.5, 2)) },
            ps: vec![2.0, 2.0],
        },
    ));
    ex.push(entry(
        "weighted_unit",
        Experiment::WeightedBound {
            symbol: osc(-0.8, 0.5, 2),
            qs: vec![4.0, 4.0],
            ps: vec![2.0, 2.0],
            weights: vec![unit.clone(), unit.clone()],
        },
    ));
    ex.push(entry(
        "weighted_power",
        Experiment::WeightedBound {
            symbol: osc(-0.8, 0.5, 2),
            qs: vec![4.0, 4.0],
            ps: vec![2.0, 2.0],
            weights: vec![sqrt_x.clone(), sqrt_x.clone()],
        },
    ));
    // r = 2/3: quasi-norm target; threshold -0.5 (1/1.2 + 1/1.2)
    let mut quasi = entry(
        "weighted_quasi_norm",
        Experiment::WeightedBound {
            symbol: osc(-1.15, 0.5, 2),
            qs: vec![4.0 / 3.0, 4.0 / 3.0],
            ps: vec![1.2, 1.2],
            weights: vec![unit.clone(), unit.clone()],
        },
    );
    quasi.exploratory = true;
    ex.push(quasi);
    // threshold -0.5 (1/1.5 + 1/1.5) = -2/3
    ex.push(Entry {
        settings: Some(Settings { ladder: vec![16, 32, 64], ..Settings::default() }),
        ..entry(
            "mixed_norm",
            Experiment::MixedNorm {
                symbol: SymbolSpec::Oscillatory { m: -1.0, rho: 0.5, n: 2, blocks: 1 },
                ps: vec![1.5, 1.5],
                qs: vec![2.0, 2.0],
            },
        )
    });
    for (name, q, r, w) in [
        ("linear_weighted_r1", 2.0, 1.0, unit.clone()),
        ("linear_weighted_power", 4.0, 4.0 / 3.0, sqrt_x.clone()),
        ("linear_weighted_q_inf", inf, 2.0, unit.clone()),
    ] {
        ex.push(entry(
            name,
            Experiment::LinearWeighted { symbol: lp_class_symbol(), p: 2.0, q, r, mu: unit.clone(), w },
        ));
    }
    // central triangle: threshold n(rho - 1)/2 = -0.25
    ex.push(entry(
        "bilinear_central",
        Experiment::BilinearBound {
            symbol: osc(-0.55, 0.5, 2),
            triples: vec![
                triple(2.0, 2.0, 1.0),
                triple(inf, 2.0, 2.0),
                triple(2.0, inf, 2.0),
                triple(3.0, 3.0, 1.5),
                triple(4.0, 2.0, 4.0 / 3.0),
            ],
        },
    ));
    // off-center triples: threshold -5/12 at both
    ex.push(entry(
        "bilinear_outer",
        Experiment::BilinearBound {
            symbol: osc(-0.75, 0.5, 2),
            triples: vec![triple(6.0, 6.0, 3.0), triple(1.5, 6.0, 1.2)],
        },
    ));
    ex.push(entry(
        "bilinear_rho_one",
        Experiment::BilinearBound { symbol: osc(-0.3, 1.0, 2), triples: vec![triple(2.0, 2.0, 1.0)] },
    ));
    let s_grid = grid(1, 2, 4.0, 32);
    for seed in [0u64, 1] {
        ex.push(entry(
            &format!("s_operator_random_{seed}"),
            Experiment::SOperator {
                symbol: SymbolSpec::RandomTable {
                    seed,
                    n: 1,
                    blocks: 2,
                    points: 32,
                    half_period: 4.0,
                    x_dependent: false,
                    band: None,
                },
                grid: s_grid,
                trials: 20,
                seed: 0,
            },
        ));
    }
    ex.push(entry(
        "s_operator_separable",
        Experiment::SOperator { symbol: separable_gaussians(), grid: s_grid, trials: 20, seed: 0 },
    ));
    ex.push(entry("l2_triangle", Experiment::L2Triangle { symbol: local_l2_symbol(), triples: thm63_triples() }));
    ex.push(entry(
        "l2_triangle_x_independent",
        Experiment::L2Triangle { symbol: separable_gaussians(), triples: vec![triple(2.0, 2.0, 1.0)] },
    ));
    ex.push(entry(
        "kernel_decay_oscillatory",
        Experiment::KernelDecay {
            symbol: osc(-1.0, 0.5, 1),
            grid: grid(1, 1, 16.0, 256),
            kernel: KernelIndex::Summed,
            orders: vec![2.0],
        },
    ));
    ex.push(entry(
        "kernel_decay_bilinear",
        Experiment::KernelDecay {
            symbol: osc(-1.0, 0.5, 2),
            grid: grid(1, 2, 16.0, 128),
            kernel: KernelIndex::Summed,
            orders: vec![1.0, 1.0],
        },
    ));
    SuiteConfig { schema: SCHEMA, settings: Settings::default(), experiments: ex }
}
