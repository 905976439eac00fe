//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use hslab_core::constsearch::{evaluate_at, maximize_ratio, Bounds, SearchSpace};
use hslab_core::funcspace::{make_poly_bump, make_transverse_bump, tensorize, TrialFunctionND};
use hslab_core::inequalities::{
    hardy_upper_bound, ratio_report, taylor_representation_check, validate_params, InequalityCase,
    Verdict,
};
use hslab_core::norms::Domain;
use hslab_core::opalg::phi_k;
use hslab_core::opalg::suite::{run_identity_suite, IdentitySuiteConfig};
use hslab_core::quadrature::QuadOptions;
use hslab_core::rational::{frac, int, random_small, to_f64};
use hslab_core::sharpness::{
    canceling_demo, critical_failure_demo, decade_grid, family_stability, scaling_sweep,
    DivergenceRule, Growth, Setting,
};
use hslab_core::Rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn c1_exact_identities() -> Outcome {
    let cfg = IdentitySuiteConfig {
        k_max: 8,
        n_max: 4,
        trials: 100,
        seed: 7,
        perturb: false,
    };
    let t = Instant::now();
    let rep = run_identity_suite(&cfg).map_err(err)?;
    let secs = t.elapsed().as_secs_f64();
    for s in &rep.sections {
        ensure(s.failures.is_empty(), || {
            format!(
                "{}: {} failures, first {}",
                s.name,
                s.failures.len(),
                s.failures[0]
            )
        })?;
    }
    let ops = rep
        .sections
        .iter()
        .find(|s| s.name == "operator_decomposition")
        .map(|s| s.checked)
        .unwrap_or(0);
    ensure(ops >= 4 + 16 + 64 + 256, || {
        format!("only {ops} operator tuples checked")
    })?;
    ensure(secs < 30.0, || format!("took {secs:.1}s"))?;
    let counts: Vec<String> = rep
        .sections
        .iter()
        .map(|s| format!("{}={}", s.name, s.checked))
        .collect();
    Ok(format!("{} in {secs:.2}s", counts.join(" ")))
}

fn c2_phi_constancy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for k in 1..=8 {
        for _ in 0..50 {
            let a: Vec<Rational> = (0..k).map(|_| random_small(&mut rng)).collect();
            let (s1, s2) = (random_small(&mut rng), random_small(&mut rng));
            let (x, y) = (phi_k(&a, &s1).map_err(err)?, phi_k(&a, &s2).map_err(err)?);
            ensure(x == y, || format!("k={k}: phi differs between shifts"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} exact comparisons"))
}

fn c3_taylor() -> Outcome {
    let t = Instant::now();
    let opts = QuadOptions::default();
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for m in 2..=5u32 {
        for (a, b, extra) in [(1.0, 2.0, 1u32), (0.5, 1.5, 3), (0.2, 3.0, 5)] {
            let f = make_poly_bump(a, b, m + extra).map_err(err)?;
            let radii: Vec<f64> = (1..=10)
                .map(|i| a + (b - a) * 1.25 * i as f64 / 10.0)
                .collect();
            for k in 1..m {
                let gap = taylor_representation_check(&f, m, k, &radii, &opts).map_err(err)?;
                worst = worst.max(gap);
                runs += 1;
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(worst < 1e-6, || format!("max discrepancy {worst:e}"))?;
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "{runs} (m,k,bump) runs x 10 radii, max discrepancy {worst:.2e}, {secs:.2}s"
    ))
}

fn c4_hardy_constants() -> Outcome {
    let opts = QuadOptions::default();
    let tuples = [
        (2u32, 1u32, int(2), int(0)),
        (3, 1, int(1), int(0)),
        (3, 2, int(2), frac(1, 2)),
        (4, 1, frac(3, 2), int(0)),
    ];
    let mut parts = Vec::new();
    for (m, k, p, alpha) in tuples {
        let case = InequalityCase::one_d(m, k, p.clone(), alpha.clone());
        let bound = to_f64(&hardy_upper_bound(m, k, &p, &alpha).map_err(err)?);
        let mut best: f64 = 0.0;
        let mut count = 0;
        for a in [0.02, 0.1, 0.5, 1.0, 2.0] {
            for len in [0.5, 3.0, 20.0] {
                for degree in [m + 1, m + 4] {
                    let u = tensorize(make_poly_bump(a, a + len, degree).map_err(err)?, vec![], 1)
                        .map_err(err)?;
                    let rep = ratio_report(&case, &u, &opts).map_err(err)?;
                    let ratio = rep.ratio.ok_or("missing ratio")?;
                    ensure(ratio <= bound + 1e-6, || {
                        format!(
                            "{}: ratio {ratio} > {bound} at a={a} len={len} deg={degree}",
                            case.describe()
                        )
                    })?;
                    best = best.max(ratio);
                    count += 1;
                }
            }
        }
        ensure(count == 30, || format!("family size {count}"))?;
        parts.push(format!(
            "(m={m},k={k},p={p},a={alpha}) max {best:.4} <= {bound:.4}"
        ));
    }
    Ok(parts.join("; "))
}

fn sweep_trial(n: usize, setting: Setting) -> hslab_core::Result<TrialFunctionND> {
    match setting {
        Setting::Prop33 => tensorize(
            make_poly_bump(0.05, 0.1, 6)?,
            (1..n)
                .map(|_| make_transverse_bump(0.0, 0.1, 6))
                .collect::<hslab_core::Result<_>>()?,
            n,
        ),
        Setting::Prop32 => tensorize(
            make_poly_bump(0.4, 0.6, 6)?,
            (1..n)
                .map(|_| make_transverse_bump(0.0, 0.1, 6))
                .collect::<hslab_core::Result<_>>()?,
            n,
        ),
    }
}

/// Ten strip-scaling points around the r boundary and ten interior points
/// around the pq boundary.
fn sweep_grid() -> Vec<(InequalityCase, Setting)> {
    let mut v = Vec::new();
    for r in [
        frac(0, 1),
        frac(1, 2),
        frac(3, 4),
        int(1),
        frac(5, 4),
        frac(3, 2),
        int(2),
    ] {
        v.push((
            InequalityCase::main_thm(2, 2, 1, int(2), int(2), r),
            Setting::Prop33,
        ));
    }
    v.push((
        InequalityCase::main_thm(3, 2, 1, int(2), int(2), int(0)),
        Setting::Prop33,
    ));
    v.push((
        InequalityCase::main_thm(2, 3, 1, int(2), int(3), int(2)),
        Setting::Prop33,
    ));
    v.push((
        InequalityCase::main_thm(1, 2, 1, int(2), int(2), frac(1, 2)).with_domain(Domain::Interval),
        Setting::Prop33,
    ));
    for q in [2, 4, 5, 6, 7, 8, 12] {
        v.push((
            InequalityCase::main_thm(3, 2, 1, int(2), int(q), int(1)),
            Setting::Prop32,
        ));
    }
    for q in [3, 6, 8] {
        v.push((
            InequalityCase::main_thm(2, 2, 1, frac(3, 2), int(q), int(1)),
            Setting::Prop32,
        ));
    }
    v
}

fn c5_scaling() -> Outcome {
    let t = Instant::now();
    let opts = QuadOptions::default().with_tol(1e-6);
    let grid = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let cases = sweep_grid();
    let (mut violating, mut blowups) = (0, 0);
    for (case, setting) in &cases {
        let u = sweep_trial(case.n.unwrap_or(1) as usize, *setting).map_err(err)?;
        let ex = scaling_sweep(case, *setting, &u, &grid, &opts)
            .map_err(|e| format!("{}: {e}", case.describe()))?;
        ensure(ex.slopes_match, || {
            format!(
                "{} {:?}: slopes {:.4}/{:.4} vs predicted {:.4}/{:.4}",
                case.describe(),
                setting,
                ex.lhs_fit.slope,
                ex.rhs_fit.slope,
                ex.predicted_lhs_exponent,
                ex.predicted_rhs_exponent
            )
        })?;
        ensure(ex.verdict_matches, || {
            format!(
                "{} {:?}: blow_up={} but violated={} (ratio slope {:.4})",
                case.describe(),
                setting,
                ex.blow_up,
                ex.condition_violated,
                ex.ratio_fit.slope
            )
        })?;
        violating += ex.condition_violated as usize;
        blowups += ex.blow_up as usize;
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(cases.len() == 20, || {
        format!("grid has {} points", cases.len())
    })?;
    ensure(violating > 0 && violating < cases.len(), || {
        "grid does not straddle".into()
    })?;
    ensure(secs < 300.0, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "{} points, {violating} violating, {blowups} blow-ups, all slopes within tolerance, {secs:.1}s",
        cases.len()
    ))
}

fn c6_critical() -> Outcome {
    let opts = QuadOptions::default();
    let rule = DivergenceRule::default();
    let eps = decade_grid(3, 10);
    let alphas = [1.0, 0.8, 0.6, 0.5, 0.45, 0.4, 0.3];
    let demo = critical_failure_demo(2.0, &alphas, 0.01, &eps, &rule, &opts).map_err(err)?;
    for row in &demo.rows {
        ensure(row.matches_oracle, || {
            format!(
                "alpha_log={}: numerator {:?} (oracle divergent={}), denominators {:?}",
                row.alpha_log,
                row.numerator.class,
                row.oracle_divergent,
                row.denominator_terms
                    .iter()
                    .map(|t| t.class)
                    .collect::<Vec<_>>()
            )
        })?;
    }
    let half = demo
        .rows
        .iter()
        .find(|r| r.alpha_log == 0.5)
        .ok_or("no 1/2 row")?;
    let one = demo
        .rows
        .iter()
        .find(|r| r.alpha_log == 1.0)
        .ok_or("no 1 row")?;
    ensure(half.numerator.class == Growth::Unbounded, || {
        "alpha 1/2 not unbounded".into()
    })?;
    ensure(one.numerator.class == Growth::Bounded, || {
        "alpha 1 not bounded".into()
    })?;
    let ratio_at = |e: f64| {
        half.ratios
            .iter()
            .find(|r| (r.0 / e - 1.0).abs() < 1e-9)
            .map(|r| r.1)
    };
    let factor = ratio_at(1e-8)
        .zip(ratio_at(1e-3))
        .map(|(a, b)| a / b)
        .ok_or("missing eps")?;
    ensure(factor > 1.7, || format!("growth factor {factor:.3}"))?;
    Ok(format!(
        "{} alpha_log points match the antiderivative oracle; ratio(1e-8)/ratio(1e-3) = {factor:.3}",
        demo.rows.len()
    ))
}

fn c7_canceling() -> Outcome {
    let opts = QuadOptions::default();
    let rule = DivergenceRule::default();
    let rep =
        canceling_demo(&int(2), 2, 1, 0.5, 0.01, &decade_grid(3, 10), &rule, &opts).map_err(err)?;
    ensure(rep.quotient_term.growth.class == Growth::Bounded, || {
        format!("quotient term {:?}", rep.quotient_term.growth.class)
    })?;
    for t in &rep.expanded_terms {
        ensure(t.growth.class == Growth::Unbounded, || {
            format!("{} is {:?}", t.name, t.growth.class)
        })?;
    }
    let (v1, v2) = rep.quotient_value;
    ensure((v1 - v2).abs() <= 1e-6 * v2.abs(), || {
        format!("quotient value unstable {v1} vs {v2}")
    })?;
    let fam = family_stability(&int(2), 2, 1, &[0.25, 0.5, 0.75, 1.0], 0.1, &opts).map_err(err)?;
    ensure(fam.relative_change < 0.05, || {
        format!("family change {:.4}", fam.relative_change)
    })?;
    Ok(format!(
        "quotient bounded, {} divergent, family max ratio {:.4} -> {:.4} ({:.2}%)",
        rep.divergent_terms.join(" & "),
        fam.max_ratio.0,
        fam.max_ratio.1,
        100.0 * fam.relative_change
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureRow {
    case: InequalityCase,
    valid: bool,
    violated: Vec<String>,
    boundary: Vec<String>,
}

fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v
}

fn c8_validator() -> Outcome {
    let text = include_str!("fixtures/validator_cases.json");
    let rows: Vec<FixtureRow> = serde_json::from_str(text).map_err(err)?;
    ensure(rows.len() == 25, || {
        format!("fixture has {} rows", rows.len())
    })?;
    let mut names = std::collections::BTreeSet::new();
    for (i, row) in rows.iter().enumerate() {
        let Verdict {
            valid,
            violated,
            boundary,
        } = validate_params(&row.case);
        let got = (valid, sorted(violated), sorted(boundary));
        let want = (
            row.valid,
            sorted(row.violated.clone()),
            sorted(row.boundary.clone()),
        );
        ensure(got == want, || {
            format!(
                "row {}: {}: got {got:?}, want {want:?}",
                i + 1,
                row.case.describe()
            )
        })?;
        names.extend(want.1.into_iter().chain(want.2));
    }
    Ok(format!(
        "25 cases agree, {} distinct conditions exercised",
        names.len()
    ))
}

fn c9_search() -> Outcome {
    let opts = QuadOptions::default();
    let case = InequalityCase::one_d(2, 1, int(2), int(0));
    let space = SearchSpace::bump_1d(3, Bounds::new(0.01, 1.0), Bounds::new(0.1, 10.0), 200, 7);
    let first = maximize_ratio(&case, &space, 1e-6, &opts).map_err(err)?;
    let second = maximize_ratio(&case, &space, 1e-6, &opts).map_err(err)?;
    ensure(first == second, || {
        "rerun with the same seed differs".into()
    })?;
    ensure(first.trace.len() <= 200, || {
        "trace longer than budget".into()
    })?;
    ensure(
        first
            .trace
            .windows(2)
            .all(|w| w[1].best_so_far >= w[0].best_so_far),
        || "best decreased".into(),
    )?;
    let bound = 2.0 / 3.0;
    ensure(first.best_ratio <= bound + 1e-6, || {
        format!("best {} above bound", first.best_ratio)
    })?;
    let tight = opts.with_tol(opts.tol / 10.0);
    let again = evaluate_at(&case, &space, &first.best_params, &tight).map_err(err)?;
    let rel = (again - first.best_ratio).abs() / again;
    ensure(rel < 5e-3, || format!("re-evaluation differs by {rel:e}"))?;
    ensure(first.best_ratio >= 0.3, || {
        format!("best {} under the 0.3 floor", first.best_ratio)
    })?;

    let others = [
        (3u32, 1u32, int(1), int(0)),
        (3, 2, int(2), frac(1, 2)),
        (4, 1, frac(3, 2), int(0)),
    ];
    let mut extra = Vec::new();
    for (m, k, p, alpha) in others {
        let c = InequalityCase::one_d(m, k, p.clone(), alpha.clone());
        let b = to_f64(&hardy_upper_bound(m, k, &p, &alpha).map_err(err)?);
        let s = SearchSpace::bump_1d(6, Bounds::new(0.01, 1.0), Bounds::new(0.1, 10.0), 60, 7);
        let r = maximize_ratio(&c, &s, 1e-6, &opts).map_err(err)?;
        ensure(r.best_ratio <= b + 1e-6, || {
            format!("{}: {} > {b}", c.describe(), r.best_ratio)
        })?;
        let re = evaluate_at(&c, &s, &r.best_params, &tight).map_err(err)?;
        ensure((re - r.best_ratio).abs() / re < 5e-3, || {
            format!("{}: re-evaluation drift", c.describe())
        })?;
        extra.push(format!("{:.4}<={b:.4}", r.best_ratio));
    }
    Ok(format!(
        "best {:.6} in {} evaluations ({}), re-eval drift {rel:.1e}; other tuples {}",
        first.best_ratio,
        first.evaluations,
        first.stop_reason,
        extra.join(", ")
    ))
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("C1", "exact identities", c1_exact_identities),
        ("C2", "phi constancy", c2_phi_constancy),
        ("C3", "Taylor representation", c3_taylor),
        ("C4", "1D Hardy constants", c4_hardy_constants),
        ("C5", "scaling sharpness", c5_scaling),
        ("C6", "critical-case failure", c6_critical),
        ("C7", "canceling effect", c7_canceling),
        ("C8", "hypothesis validator", c8_validator),
        ("C9", "constant search soundness", c9_search),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let t = Instant::now();
        match run() {
            Ok(detail) => println!(
                "[PASS] {id} {name}: {detail} [{:.1}s]",
                t.elapsed().as_secs_f64()
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "[FAIL] {id} {name}: {why} [{:.1}s]",
                    t.elapsed().as_secs_f64()
                );
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
