//! Config runner and subcommand back ends for the `dioph` binary.

pub mod config;
pub mod tasks;

use config::{ConfigError, Overrides, Task};
use serde_json::{json, Map, Value as Json};
use std::time::Instant;
use tasks::{Outcome, TaskStatus};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Runs tasks concurrently and assembles the report in task order.
pub fn run_tasks(seed: u64, tasks: &[Task], timings: bool) -> (Json, bool) {
    let results: Vec<(Outcome, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = tasks
            .iter()
            .map(|t| {
                s.spawn(move || {
                    let start = Instant::now();
                    let out = tasks::run_kind(&t.kind, t.seed).unwrap_or_else(|e| Outcome::error(&e));
                    (out, start.elapsed().as_secs_f64() * 1000.0)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("task thread panicked")).collect()
    });
    let mut entries = Map::new();
    let mut all_pass = true;
    for (t, (out, ms)) in tasks.iter().zip(results) {
        all_pass &= out.status == TaskStatus::Pass;
        let mut e = json!({
            "status": out.status,
            "details": out.details,
            "checks": out.checks,
        });
        if timings {
            e["timings"] = json!({"ms": ms});
        }
        entries.insert(t.name.clone(), e);
    }
    (json!({"seed": seed, "tasks": entries}), all_pass)
}

/// Loads and runs a config document; returns the report and exit code.
pub fn run_config(text: &str, ov: &Overrides, timings: bool) -> Result<(Json, i32), ConfigError> {
    let (seed, tasks) = config::load(text, ov)?;
    let (report, pass) = run_tasks(seed, &tasks, timings);
    Ok((report, if pass { EXIT_PASS } else { EXIT_FAIL }))
}

/// Removes every "timings" entry, for comparing reports across runs.
pub fn strip_timings(v: &mut Json) {
    match v {
        Json::Object(m) => {
            m.remove("timings");
            m.values_mut().for_each(strip_timings);
        }
        Json::Array(a) => a.iter_mut().for_each(strip_timings),
        _ => {}
    }
}
