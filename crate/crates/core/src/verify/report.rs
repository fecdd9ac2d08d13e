use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One measured quantity. `level` is the grid size for ladder experiments
/// (or the dyadic index for scale scans), `excluded` counts guarded points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub group: String,
    pub level: usize,
    pub seed: u64,
    pub value: f64,
    pub excluded: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub group: String,
    pub level: usize,
    pub sup: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub experiment: String,
    pub claim: String,
    pub parameters: serde_json::Value,
    pub trials: Vec<TrialRecord>,
    pub levels: Vec<LevelSummary>,
    pub criterion: String,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub runtime_seconds: f64,
}

impl BoundReport {
    pub fn new(experiment: impl Into<String>, claim: impl Into<String>, parameters: serde_json::Value) -> Self {
        BoundReport {
            experiment: experiment.into(),
            claim: claim.into(),
            parameters,
            trials: Vec::new(),
            levels: Vec::new(),
            criterion: String::new(),
            verdict: Verdict::Fail,
            notes: Vec::new(),
            runtime_seconds: 0.0,
        }
    }

    pub fn record(&mut self, group: &str, level: usize, seed: u64, value: f64, excluded: usize) {
        self.trials.push(TrialRecord { group: group.to_string(), level, seed, value, excluded });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Recomputes per-(group, level) suprema in first-seen order.
    pub fn summarize(&mut self) {
        let mut levels: Vec<LevelSummary> = Vec::new();
        for t in &self.trials {
            match levels.iter_mut().find(|l| l.group == t.group && l.level == t.level) {
                Some(l) => {
                    l.sup = sup(l.sup, t.value);
                    l.trials += 1;
                }
                None => levels.push(LevelSummary {
                    group: t.group.clone(),
                    level: t.level,
                    sup: t.value,
                    trials: 1,
                }),
            }
        }
        self.levels = levels;
    }

    pub fn finish(&mut self, criterion: impl Into<String>, ok: bool) {
        self.summarize();
        self.criterion = criterion.into();
        self.verdict = Verdict::from_bool(ok);
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn groups(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for t in &self.trials {
            if !out.contains(&t.group) {
                out.push(t.group.clone());
            }
        }
        out
    }

    /// Supremum per level for one group, in ladder order.
    pub fn level_sups(&self, group: &str) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for t in self.trials.iter().filter(|t| t.group == group) {
            match out.iter_mut().find(|(l, _)| *l == t.level) {
                Some((_, s)) => *s = sup(*s, t.value),
                None => out.push((t.level, t.value)),
            }
        }
        out
    }

    pub fn sup(&self) -> f64 {
        self.trials.iter().fold(0.0, |acc, t| sup(acc, t.value))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per trial; runtime is left out so equal seeds give equal bytes.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["experiment", "group", "level", "seed", "value", "excluded"])?;
        for t in &self.trials {
            w.write_record([
                self.experiment.clone(),
                t.group.clone(),
                t.level.to_string(),
                t.seed.to_string(),
                format!("{:.17e}", t.value),
                t.excluded.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Gnuplot blocks: `level sup` per group, separated by blank lines.
    pub fn plot_data(&self) -> String {
        let mut s = String::new();
        for g in self.groups() {
            let _ = writeln!(s, "# {}", g);
            for (level, v) in self.level_sups(&g) {
                let _ = writeln!(s, "{} {:.17e}", level, v);
            }
            s.push_str("\n\n");
        }
        s
    }

    /// Writes `<experiment>.json`, `.csv` and `.dat` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        self.write_as(dir, &self.experiment)
    }

    pub fn write_as(&self, dir: &Path, stem: &str) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("{stem}.json")), self.to_json()?)?;
        fs::write(dir.join(format!("{stem}.csv")), self.to_csv()?)?;
        fs::write(dir.join(format!("{stem}.dat")), self.plot_data())?;
        Ok(())
    }
}

// NaN-propagating maximum: a NaN trial must not vanish from the summary.
fn sup(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Refinement stability: all finite, and either all zero or `max/min <= factor`.
pub fn ladder_stable(sups: &[f64], factor: f64) -> bool {
    if sups.is_empty() || sups.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return false;
    }
    let max = sups.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return true;
    }
    let min = sups.iter().copied().fold(f64::INFINITY, f64::min);
    min > 0.0 && max / min <= factor
}
