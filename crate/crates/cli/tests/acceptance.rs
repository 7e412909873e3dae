//! Acceptance suite: one PASS/FAIL line per primary criterion.
//!
//! Runs every check even when an earlier one fails, prints the verdicts and
//! then fails the test if any criterion failed.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rwl_core::experiments::blowup::{run_blowup_ode, BlowupConfig};
use rwl_core::experiments::channel::{run_channel, ChannelConfig};
use rwl_core::experiments::conservation::{run_conservation, ConservationConfig};
use rwl_core::experiments::finite_speed::{run_finite_speed, FiniteSpeedConfig};
use rwl_core::experiments::huygens::{run_huygens, HuygensConfig};
use rwl_core::experiments::linear::{run_linear_exactness, LinearExactnessConfig};
use rwl_core::experiments::norms::{run_norms, NormsConfig};
use rwl_core::experiments::operator_bounds::{run_operator_bounds, OperatorBoundsConfig};
use rwl_core::experiments::smalldata::{run_smalldata, SmallDataConfig};
use rwl_core::experiments::stationary_suite::{run_stationary_suite, StationarySuiteConfig};
use rwl_core::experiments::ExperimentOutput;
use rwl_core::{Params, Sign};

struct Verdict {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn p7() -> Params {
    Params::new(7.0, Sign::Focusing).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn metrics(out: &ExperimentOutput, keys: &[&str]) -> String {
    keys.iter()
        .map(|k| match out.report.metrics.get(*k) {
            Some(v) => format!("{k}={v:.3e}"),
            None => format!("{k}=undefined"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn experiment(
    name: &'static str,
    budget: Option<Duration>,
    keys: &[&str],
    run: impl FnOnce() -> rwl_core::Result<ExperimentOutput>,
) -> Verdict {
    let (res, elapsed) = timed(run);
    match res {
        Ok(out) => {
            let in_time = budget.is_none_or(|b| elapsed <= b);
            let budget_txt = budget.map(|b| format!(" (budget {:.0?})", b)).unwrap_or_default();
            Verdict {
                name,
                pass: out.report.pass && in_time,
                detail: format!("{} runtime={elapsed:.2?}{budget_txt}", metrics(&out, keys)),
            }
        }
        Err(e) => Verdict { name, pass: false, detail: format!("error: {e}") },
    }
}

fn read_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_path_buf();
                files.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    files
}

fn determinism() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let run = |dir: &str| {
        Command::new(env!("CARGO_BIN_EXE_rwl"))
            .args(["all", "--seed", "42", "--quiet", "--out"])
            .arg(tmp.path().join(dir))
            .status()
            .unwrap()
    };
    let (a, b) = (run("a"), run("b"));
    let (ta, tb) = (read_tree(&tmp.path().join("a")), read_tree(&tmp.path().join("b")));
    let identical = ta == tb && !ta.is_empty();
    Verdict {
        name: "determinism",
        pass: identical && a.code() == b.code() && a.code().is_some(),
        detail: format!("files={} identical={identical} exit={:?}/{:?}", ta.len(), a.code(), b.code()),
    }
}

#[test]
fn primary_criteria() {
    let mut verdicts = Vec::new();

    verdicts.push(experiment(
        "dalembert_exactness",
        Some(Duration::from_secs(2)),
        &["max_abs_error"],
        || run_linear_exactness(p7(), &LinearExactnessConfig::default()),
    ));

    let conservation: Vec<_> = [7.0, 9.0]
        .iter()
        .map(|&p| run_conservation(Params::new(p, Sign::Focusing).unwrap(), &ConservationConfig::default()))
        .collect();
    verdicts.push(Verdict {
        name: "energy_conservation",
        pass: conservation.iter().all(|r| r.as_ref().is_ok_and(|o| o.report.pass)),
        detail: conservation
            .iter()
            .zip(["p=7", "p=9"])
            .map(|(r, tag)| match r {
                Ok(o) => format!("{tag}: {}", metrics(o, &["surrogate_drift", "ratio_min", "ratio_max"])),
                Err(e) => format!("{tag}: error {e}"),
            })
            .collect::<Vec<_>>()
            .join("; "),
    });

    verdicts.push(experiment(
        "channel_dichotomy",
        Some(Duration::from_secs(30)),
        &["failures", "worst_margin", "worst_grid_margin"],
        || run_channel(p7(), &ChannelConfig::default()),
    ));

    verdicts.push(experiment(
        "hardy_utov",
        None,
        &["hardy_origin_constant", "hardy_derivative_constant", "hardy_infinity_constant", "utov2_max_rel_defect"],
        || run_norms(p7(), &NormsConfig::default()),
    ));

    verdicts.push(experiment(
        "stationary_solutions",
        Some(Duration::from_secs(5)),
        &["branch_violations", "R_ell[defocusing,1]", "max_r2_defect_outer", "tolerance_robustness", "max_radius_ratio_defect"],
        || run_stationary_suite(p7(), &StationarySuiteConfig::default()),
    ));

    verdicts.push(experiment("grid_finite_speed", None, &["max_discrepancy"], || {
        run_finite_speed(p7(), &FiniteSpeedConfig::default())
    }));

    verdicts.push(experiment(
        "ode_blowup_oracle",
        None,
        &["trace_error", "t_star_error_steps", "selfsim_exponent_rel_error", "c_p_rel_error"],
        || run_blowup_ode(p7(), &BlowupConfig::default()),
    ));

    verdicts.push(experiment(
        "small_data_rate",
        Some(Duration::from_secs(60)),
        &["fitted_slope", "target_slope"],
        || run_smalldata(p7(), &SmallDataConfig::default()),
    ));

    verdicts.push(experiment(
        "huygens_localization",
        None,
        &["residual_rel_outside_support_shell", "residual_rel_at_largest_r"],
        || run_huygens(p7(), &HuygensConfig::default()),
    ));

    verdicts.push(experiment(
        "operator_bounds",
        None,
        &["truncation_spread", "indicator_spread", "continuity_final_rel"],
        || run_operator_bounds(p7(), &OperatorBoundsConfig::default()),
    ));

    verdicts.push(determinism());

    println!();
    for v in &verdicts {
        println!("{} {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    let failed: Vec<_> = verdicts.iter().filter(|v| !v.pass).map(|v| v.name).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
