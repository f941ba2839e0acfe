use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::mediator::MediatorKind;
use crate::outcome::Estimands;
use crate::pipeline::{EstimationData, EstimatorOptions, RankPolicy};
use crate::stats::two_sided_p;
use crate::variance::{intervals, Interval, VarianceChoice};

use super::PanelDataset;

/// Fewest non-missing outcomes accepted in each arm.
pub const MIN_PER_ARM: usize = 10;

#[derive(Debug, Clone)]
pub struct EmpiricalOptions {
    pub estimators: Vec<EstimatorKind>,
    pub rank: RankPolicy,
    pub level: f64,
    pub variance: VarianceChoice,
    pub mediator: MediatorKind,
    /// Overrides the dataset's declared assignment probability.
    pub pi: Option<f64>,
}

impl Default for EmpiricalOptions {
    fn default() -> Self {
        Self {
            estimators: EstimatorKind::ALL.to_vec(),
            rank: RankPolicy::Auto,
            level: 0.95,
            variance: VarianceChoice::Default,
            mediator: MediatorKind::Fraction,
            pi: None,
        }
    }
}

/// Significance stars at the 10%, 5% and 1% levels.
pub fn stars(p: f64) -> &'static str {
    match p {
        p if p < 0.01 => "***",
        p if p < 0.05 => "**",
        p if p < 0.10 => "*",
        _ => "",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowFit {
    pub beta: [f64; 3],
    pub se: Option<[f64; 3]>,
    pub p: Option<[f64; 3]>,
    pub ci: Option<[Interval; 3]>,
    pub effects: Option<Estimands>,
    pub rank: Option<usize>,
    pub condition_number: f64,
}

impl RowFit {
    pub fn stars(&self, k: usize) -> &'static str {
        self.p.map_or("", |p| stars(p[k]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalRow {
    pub estimator: EstimatorKind,
    /// `Err` carries the message of an estimator that could not be fitted.
    pub fit: std::result::Result<RowFit, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalTable {
    pub outcome: String,
    pub analyzed: usize,
    pub dropped: usize,
    pub pi: f64,
    /// True when `pi` is the sample treated share rather than a declared value.
    pub pi_inferred: bool,
    pub level: f64,
    /// How the denoising rank was chosen, when the denoised estimator ran.
    pub rank_note: Option<String>,
    pub rows: Vec<EmpiricalRow>,
}

impl EmpiricalTable {
    pub fn row(&self, kind: EstimatorKind) -> Option<&EmpiricalRow> {
        self.rows.iter().find(|r| r.estimator == kind)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "outcome", "estimator", "coefficient", "estimate", "std_error", "p_value", "stars", "ci_lower", "ci_upper",
            "error",
        ])?;
        let fmt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x}"));
        for row in &self.rows {
            match &row.fit {
                Ok(f) => {
                    let mut lines: Vec<(String, f64, Option<f64>, Option<f64>, Option<Interval>)> = (0..3)
                        .map(|k| {
                            (
                                ["beta0", "beta1", "beta2"][k].to_string(),
                                f.beta[k],
                                f.se.map(|s| s[k]),
                                f.p.map(|p| p[k]),
                                f.ci.map(|c| c[k]),
                            )
                        })
                        .collect();
                    if let Some(e) = &f.effects {
                        for (name, v) in [("de", e.de), ("ie", e.ie), ("se", e.se), ("toe", e.toe)] {
                            lines.push((name.into(), v, None, None, None));
                        }
                    }
                    for (name, est, se, p, ci) in lines {
                        w.write_record([
                            self.outcome.clone(),
                            row.estimator.to_string(),
                            name,
                            format!("{est}"),
                            fmt(se),
                            fmt(p),
                            p.map_or("", stars).to_string(),
                            fmt(ci.map(|c| c.lower)),
                            fmt(ci.map(|c| c.upper)),
                            String::new(),
                        ])?;
                    }
                }
                Err(e) => {
                    let mut rec = vec![self.outcome.clone(), row.estimator.to_string()];
                    rec.extend(std::iter::repeat_n(String::new(), 7));
                    rec.push(e.clone());
                    w.write_record(&rec)?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Coefficients with standard errors in parentheses and stars, one
    /// estimator per row, followed by the effect decomposition.
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "## {}\n", self.outcome);
        let _ = writeln!(
            s,
            "{} units analyzed, {} dropped for missing outcome; pi = {:.4}{}.",
            self.analyzed,
            self.dropped,
            self.pi,
            if self.pi_inferred { " (inferred from the treated share)" } else { "" }
        );
        if let Some(note) = &self.rank_note {
            let _ = writeln!(s, "{note}");
        }
        s.push_str("\n| estimator | beta1 | beta2 | DE | IE | SE | ToE |\n|---|---|---|---|---|---|---|\n");
        for row in &self.rows {
            match &row.fit {
                Ok(f) => {
                    let coef = |k: usize| match f.se {
                        Some(se) => format!("{:.3}{} ({:.3})", f.beta[k], f.stars(k), se[k]),
                        None => format!("{:.3} (-)", f.beta[k]),
                    };
                    let eff = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3}"));
                    let e = f.effects.as_ref();
                    let _ = writeln!(
                        s,
                        "| {} | {} | {} | {} | {} | {} | {} |",
                        row.estimator,
                        coef(1),
                        coef(2),
                        eff(e.map(|e| e.de)),
                        eff(e.map(|e| e.ie)),
                        eff(e.map(|e| e.se)),
                        eff(e.map(|e| e.toe))
                    );
                }
                Err(msg) => {
                    let _ = writeln!(s, "| {} | failed: {msg} | | | | | |", row.estimator);
                }
            }
        }
        s.push_str("\n*** p<0.01, ** p<0.05, * p<0.10.\n");
        s
    }
}

/// Fits every requested estimator to one outcome column. Estimator failures
/// become error rows; only unusable inputs fail the whole call.
pub fn estimate_all(ds: &PanelDataset, outcome: &str, opts: &EmpiricalOptions) -> Result<EmpiricalTable> {
    let y = ds.outcome(outcome)?;
    for arm in [0u8, 1] {
        let count = ds.t.iter().zip(y).filter(|(&t, v)| t == arm && v.is_finite()).count();
        if count < MIN_PER_ARM {
            return Err(Error::InvalidInput(format!(
                "outcome `{outcome}` has {count} non-missing units with T={arm}; at least {MIN_PER_ARM} needed"
            )));
        }
    }
    let (pi, pi_inferred) = match opts.pi.or(ds.pi) {
        Some(p) => (p, false),
        None => (ds.treated_share(), true),
    };
    let mut data = EstimationData::new(&ds.a_pre, &ds.a_post, &ds.t, y, pi, opts.mediator)?;
    let est_opts = EstimatorOptions { rank: opts.rank, variance: opts.variance };
    let mut rank_note = None;
    let mut rows = Vec::with_capacity(opts.estimators.len());
    for &kind in &opts.estimators {
        let fit = data.estimate(kind, &est_opts).and_then(|est| {
            let (se, p, ci) = match &est.cov {
                Some(c) => {
                    let p = [0, 1, 2].map(|k| two_sided_p(est.fit.beta_hat[k] / c.se[k]));
                    (Some(c.se), Some(p), Some(intervals(&est.fit.beta_hat, &c.se, opts.level)?))
                }
                None => (None, None, None),
            };
            if let Some(choice) = est.rank {
                rank_note = Some(match opts.rank {
                    RankPolicy::Fixed(r) => format!("Denoising rank fixed at {r}."),
                    RankPolicy::Auto => format!(
                        "Denoising rank {} chosen by the largest relative eigen-gap ({:.3}){}.",
                        choice.rank,
                        choice.relative_gap,
                        if choice.degenerate { "; spectrum degenerate" } else { "" }
                    ),
                });
            }
            Ok(RowFit {
                beta: est.fit.beta_hat,
                se,
                p,
                ci,
                effects: est.effects,
                rank: est.rank.map(|r| r.rank),
                condition_number: est.fit.condition_number,
            })
        });
        if let Err(e) = &fit {
            log::warn!("{outcome}: {kind} failed: {e}");
        }
        rows.push(EmpiricalRow { estimator: kind, fit: fit.map_err(|e| e.to_string()) });
    }
    Ok(EmpiricalTable {
        outcome: outcome.to_string(),
        analyzed: data.analyzed(),
        dropped: data.dropped(),
        pi,
        pi_inferred,
        level: opts.level,
        rank_note,
        rows,
    })
}

/// [`estimate_all`] over several outcome columns in parallel.
pub fn estimate_columns(ds: &PanelDataset, outcomes: &[String], opts: &EmpiricalOptions) -> Vec<Result<EmpiricalTable>> {
    outcomes.par_iter().map(|o| estimate_all(ds, o, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirical::synthetic_panel;

    #[test]
    fn star_thresholds() {
        assert_eq!(stars(0.04), "**");
        assert_eq!(stars(0.005), "***");
        assert_eq!(stars(0.07), "*");
        assert_eq!(stars(0.10), "");
        assert_eq!(stars(f64::NAN), "");
    }

    #[test]
    fn battery_on_synthetic_panel() {
        let ds = synthetic_panel(2).unwrap();
        let table = estimate_all(&ds, "y", &EmpiricalOptions::default()).unwrap();
        assert_eq!(table.rows.len(), EstimatorKind::ALL.len());
        assert!(!table.pi_inferred);
        let ols = table.row(EstimatorKind::Ols).unwrap().fit.as_ref().unwrap();
        assert!((ols.beta[1] - 1.0).abs() < 0.2);
        assert!(table.to_markdown().contains("| ols |"));
        assert!(table.to_csv().unwrap().lines().count() > 10);
    }

    #[test]
    fn too_few_units_per_arm() {
        let mut ds = synthetic_panel(2).unwrap();
        let y = &mut ds.outcomes[0].1;
        for (i, &t) in ds.t.iter().enumerate() {
            if t == 1 {
                y[i] = f64::NAN;
            }
        }
        assert!(matches!(estimate_all(&ds, "y", &EmpiricalOptions::default()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn pi_inferred_when_undeclared() {
        let mut ds = synthetic_panel(4).unwrap();
        ds.pi = None;
        let table = estimate_all(&ds, "y", &EmpiricalOptions::default()).unwrap();
        assert!(table.pi_inferred);
        assert!((table.pi - ds.treated_share()).abs() < 1e-15);
    }
}
