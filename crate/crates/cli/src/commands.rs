//! The five subcommands. Each produces a JSON value, a table for CSV output
//! and an exit code.

use hslab_core::constsearch::{evaluate_at, maximize_ratio};
use hslab_core::inequalities::{ratio_report, validate_params};
use hslab_core::opalg::suite::{run_identity_suite, IdentitySuiteConfig};
use hslab_core::quadrature::QuadOptions;
use hslab_core::rational::format_rational;
use hslab_core::sharpness::{
    canceling_demo, critical_failure_demo, decade_grid, family_stability, scaling_sweep, Growth,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    check_lambda_grid, CancelingConfig, CheckConfig, CriticalConfig, EstimateConfig,
    IdentityConfig, SharpnessConfig, TrialSpec,
};
use crate::error::{
    code_for, worst, CliError, EXIT_MATH, EXIT_NONCONVERGENCE, EXIT_OK, EXIT_USAGE,
};

/// Rows for CSV output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct Section {
    pub name: &'static str,
    pub json: Value,
    pub table: Table,
    pub code: i32,
    pub problems: Vec<String>,
}

impl Section {
    fn new(name: &'static str) -> Self {
        Section {
            name,
            json: Value::Null,
            table: Table::default(),
            code: EXIT_OK,
            problems: Vec::new(),
        }
    }

    fn flag(&mut self, code: i32, msg: String) {
        self.code = worst(self.code, code);
        self.problems.push(msg);
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn identity(
    cfg: &IdentityConfig,
    seed: Option<u64>,
    perturb: bool,
) -> Result<Section, CliError> {
    let suite = IdentitySuiteConfig {
        k_max: cfg.k_max,
        n_max: cfg.n_max,
        trials: cfg.trials,
        seed: seed.unwrap_or(cfg.seed),
        perturb,
    };
    let report = run_identity_suite(&suite)?;
    let mut s = Section::new("identity");
    s.table = Table::new(&["section", "checked", "failures"]);
    for sec in &report.sections {
        s.table.push(vec![
            sec.name.clone(),
            sec.checked.to_string(),
            sec.failures.len().to_string(),
        ]);
        for f in &sec.failures {
            s.flag(EXIT_MATH, format!("{}: {f}", sec.name));
        }
    }
    s.json = json!({
        "passed": report.passed(),
        "total_checked": report.total_checked(),
        "report": report,
    });
    Ok(s)
}

#[derive(Serialize)]
struct CaseOutcome {
    index: usize,
    description: String,
    case: hslab_core::inequalities::InequalityCase,
    verdict: hslab_core::inequalities::Verdict,
    /// False when the hypotheses fail; the ratio is then informational.
    binding: bool,
    trial: Option<String>,
    ratio: Option<f64>,
    ratio_tight: Option<f64>,
    relative_change: Option<f64>,
    stable: Option<bool>,
    flag: Option<String>,
    error: Option<String>,
    #[serde(skip)]
    code: i32,
}

fn check_one(
    index: usize,
    cc: &crate::config::CheckCase,
    stability: f64,
    opts: &QuadOptions,
) -> CaseOutcome {
    let verdict = validate_params(&cc.case);
    let binding = verdict.valid;
    let mut out = CaseOutcome {
        index,
        description: cc.case.describe(),
        case: cc.case.clone(),
        verdict,
        binding,
        trial: None,
        ratio: None,
        ratio_tight: None,
        relative_change: None,
        stable: None,
        flag: None,
        error: None,
        code: EXIT_OK,
    };
    let spec = cc
        .trial
        .clone()
        .unwrap_or_else(|| TrialSpec::default_for(&cc.case));
    let mut run = || -> hslab_core::Result<()> {
        let u = spec.build()?;
        out.trial = Some(u.describe());
        let coarse = ratio_report(&cc.case, &u, opts)?;
        out.flag = coarse.flag.clone();
        out.ratio = coarse.ratio;
        if coarse.ratio.is_some() {
            let fine = ratio_report(&cc.case, &u, &opts.with_tol(opts.tol / 10.0))?;
            out.ratio_tight = fine.ratio;
        }
        Ok(())
    };
    if let Err(e) = run() {
        let code = code_for(&e);
        out.error = Some(e.to_string());
        if binding || code == EXIT_USAGE {
            out.code = code;
        }
        return out;
    }
    match (out.ratio, out.ratio_tight) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => {
            let rel = (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
            out.relative_change = Some(rel);
            out.stable = Some(rel <= stability);
            if binding && rel > stability {
                out.code = EXIT_NONCONVERGENCE;
            }
        }
        _ => {
            if binding {
                out.code = EXIT_MATH;
            }
        }
    }
    out
}

pub fn check(cfg: &CheckConfig, opts: &QuadOptions) -> Result<Section, CliError> {
    if !(cfg.stability > 0.0) {
        return Err(CliError::Usage("check.stability must be positive".into()));
    }
    let outcomes: Vec<CaseOutcome> = cfg
        .cases
        .par_iter()
        .enumerate()
        .map(|(i, cc)| check_one(i, cc, cfg.stability, opts))
        .collect();
    let mut s = Section::new("check");
    s.table = Table::new(&[
        "index",
        "case",
        "valid",
        "violated",
        "boundary",
        "ratio",
        "ratio_tight",
        "stable",
        "flag",
        "error",
    ]);
    for o in &outcomes {
        s.table.push(vec![
            o.index.to_string(),
            o.description.clone(),
            o.verdict.valid.to_string(),
            o.verdict.violated.join(";"),
            o.verdict.boundary.join(";"),
            opt_num(o.ratio),
            opt_num(o.ratio_tight),
            o.stable.map(|b| b.to_string()).unwrap_or_default(),
            o.flag.clone().unwrap_or_default(),
            o.error.clone().unwrap_or_default(),
        ]);
        if o.code != EXIT_OK {
            let why = o
                .error
                .clone()
                .or_else(|| o.flag.clone())
                .unwrap_or_else(|| {
                    format!(
                        "ratio changed by {:e} under refinement",
                        o.relative_change.unwrap_or(f64::NAN)
                    )
                });
            s.flag(
                o.code,
                format!("case {} ({}): {why}", o.index, o.description),
            );
        }
    }
    s.json = json!({ "stability": cfg.stability, "cases": to_json(&outcomes) });
    Ok(s)
}

fn critical(
    cfg: &CriticalConfig,
    s: &mut Section,
    rule: &hslab_core::sharpness::DivergenceRule,
    opts: &QuadOptions,
) -> Value {
    let grid = decade_grid(cfg.eps_decades.0, cfg.eps_decades.1);
    match critical_failure_demo(cfg.p, &cfg.alpha_grid, cfg.eps_cut, &grid, rule, opts) {
        Ok(demo) => {
            for row in &demo.rows {
                if !row.matches_oracle {
                    s.flag(
                        EXIT_MATH,
                        format!(
                            "critical alpha_log={}: numerator {:?}, oracle divergent {}",
                            row.alpha_log, row.numerator.class, row.oracle_divergent
                        ),
                    );
                }
                for &(eps, ratio) in &row.ratios {
                    let value = row
                        .numerator_probe
                        .iter()
                        .find(|p| p.0 == eps)
                        .map(|p| p.1)
                        .unwrap_or(f64::NAN);
                    s.table.push(vec![
                        format!("critical alpha_log={}", row.alpha_log),
                        num(eps),
                        num(value),
                        num(row.denominator),
                        num(ratio),
                    ]);
                }
            }
            to_json(&demo)
        }
        Err(e) => {
            s.flag(code_for(&e), format!("critical demo: {e}"));
            json!({ "error": e.to_string() })
        }
    }
}

fn canceling(
    cfg: &CancelingConfig,
    s: &mut Section,
    rule: &hslab_core::sharpness::DivergenceRule,
    opts: &QuadOptions,
) -> Value {
    let grid = decade_grid(cfg.eps_decades.0, cfg.eps_decades.1);
    let demo = canceling_demo(
        &cfg.p,
        cfg.m,
        cfg.k,
        cfg.alpha_log,
        cfg.eps_cut,
        &grid,
        rule,
        opts,
    );
    let fam = family_stability(
        &cfg.p,
        cfg.m,
        cfg.k,
        &cfg.family_alpha_grid,
        cfg.family_eps_cut,
        opts,
    );
    let mut out = json!({ "p": format_rational(&cfg.p), "m": cfg.m, "k": cfg.k });
    match demo {
        Ok(rep) => {
            if !rep.lossy {
                s.flag(
                    EXIT_MATH,
                    format!(
                        "canceling: quotient term {:?}, divergent terms {:?}",
                        rep.quotient_term.growth.class, rep.divergent_terms
                    ),
                );
            }
            for t in std::iter::once(&rep.quotient_term).chain(&rep.expanded_terms) {
                for &(eps, v) in &t.probe {
                    s.table.push(vec![
                        format!("canceling {}", t.name),
                        num(eps),
                        num(v),
                        String::new(),
                        String::new(),
                    ]);
                }
            }
            let summary: Vec<Value> = std::iter::once(&rep.quotient_term)
                .chain(&rep.expanded_terms)
                .map(|t| json!({ "term": t.name, "bounded": t.growth.class == Growth::Bounded }))
                .collect();
            out["classification"] = Value::Array(summary);
            out["report"] = to_json(&rep);
        }
        Err(e) => {
            s.flag(code_for(&e), format!("canceling demo: {e}"));
            out["error"] = json!(e.to_string());
        }
    }
    match fam {
        Ok(f) => {
            if !(f.relative_change < cfg.family_tolerance) {
                s.flag(
                    EXIT_MATH,
                    format!(
                        "canceling family changed by {:.3}% when the cutoff halved",
                        100.0 * f.relative_change
                    ),
                );
            }
            out["family"] = to_json(&f);
        }
        Err(e) => {
            s.flag(code_for(&e), format!("family stability: {e}"));
        }
    }
    out
}

pub fn sharpness(
    cfg: &SharpnessConfig,
    lambda_grid: Option<&[f64]>,
    opts: &QuadOptions,
) -> Result<Section, CliError> {
    let grid = lambda_grid.unwrap_or(&cfg.lambda_grid).to_vec();
    check_lambda_grid(&grid)?;
    let mut s = Section::new("sharpness");
    s.table = Table::new(&["series", "x", "lhs", "rhs", "ratio"]);
    let runs: Vec<_> = cfg
        .sweeps
        .par_iter()
        .map(|sw| {
            let n = sw.case.n.unwrap_or(1).max(1) as usize;
            let spec = sw
                .trial
                .clone()
                .unwrap_or_else(|| TrialSpec::default_sweep(sw.setting, n));
            spec.build()
                .and_then(|u| scaling_sweep(&sw.case, sw.setting, &u, &grid, opts))
        })
        .collect();
    let mut sweeps = Vec::new();
    for (i, (sw, run)) in cfg.sweeps.iter().zip(runs).enumerate() {
        let label = format!(
            "sweep {i} {} {}",
            sw.setting.condition(),
            sw.case.describe()
        );
        match run {
            Ok(ex) => {
                if !ex.slopes_match {
                    s.flag(
                        EXIT_MATH,
                        format!(
                            "{label}: fitted slopes {:.4}/{:.4}, predicted {:.4}/{:.4}",
                            ex.lhs_fit.slope,
                            ex.rhs_fit.slope,
                            ex.predicted_lhs_exponent,
                            ex.predicted_rhs_exponent
                        ),
                    );
                }
                if !ex.verdict_matches {
                    s.flag(
                        EXIT_MATH,
                        format!(
                            "{label}: blow-up {} but condition violated {}",
                            ex.blow_up, ex.condition_violated
                        ),
                    );
                }
                for [lam, l, r, q] in ex.rows() {
                    s.table
                        .push(vec![label.clone(), num(lam), num(l), num(r), num(q)]);
                }
                sweeps.push(to_json(&ex));
            }
            Err(e) => {
                s.flag(code_for(&e), format!("{label}: {e}"));
                sweeps.push(
                    json!({ "case": sw.case, "setting": sw.setting, "error": e.to_string() }),
                );
            }
        }
    }
    let mut body = json!({ "lambda_grid": grid, "rule": cfg.rule, "sweeps": sweeps });
    if cfg.critical.enabled {
        body["critical"] = critical(&cfg.critical, &mut s, &cfg.rule, opts);
    }
    if cfg.canceling.enabled {
        body["canceling"] = canceling(&cfg.canceling, &mut s, &cfg.rule, opts);
    }
    s.json = body;
    Ok(s)
}

pub fn estimate(
    cfg: &EstimateConfig,
    seed: Option<u64>,
    opts: &QuadOptions,
) -> Result<Section, CliError> {
    let mut space = cfg.space.clone();
    if let Some(seed) = seed {
        space.seed = seed;
    }
    let res = maximize_ratio(&cfg.case, &space, cfg.tol, opts)?;
    let mut s = Section::new("estimate");
    let mut header = vec!["index".to_string()];
    header.extend(res.param_names.iter().cloned());
    header.extend(["ratio".to_string(), "best_so_far".to_string()]);
    s.table = Table {
        header,
        rows: Vec::new(),
    };
    for e in &res.trace {
        let mut row = vec![e.index.to_string()];
        row.extend(e.params.iter().map(|&v| num(v)));
        row.push(opt_num(e.ratio));
        row.push(num(e.best_so_far));
        s.table.push(row);
    }
    if let Some(b) = res.analytic_upper_bound {
        if res.best_ratio > b + 1e-6 {
            s.flag(
                EXIT_MATH,
                format!(
                    "best ratio {} exceeds the analytic bound {b}",
                    res.best_ratio
                ),
            );
        }
    }
    let tight = opts.with_tol(opts.tol / 10.0);
    let again = evaluate_at(&cfg.case, &space, &res.best_params, &tight);
    let drift = match &again {
        Ok(v) => {
            let d = (v - res.best_ratio).abs() / v.abs();
            if !(d <= 5e-3) {
                s.flag(
                    EXIT_NONCONVERGENCE,
                    format!("re-evaluation drifted by {d:e}"),
                );
            }
            Some(d)
        }
        Err(e) => {
            s.flag(code_for(e), format!("re-evaluation failed: {e}"));
            None
        }
    };
    s.json = json!({
        "search_tol": cfg.tol,
        "space": space,
        "result": res,
        "reevaluated_ratio": again.ok(),
        "reevaluation_drift": drift,
    });
    Ok(s)
}
