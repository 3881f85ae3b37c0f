//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Duration;

use serde_json::Value as Json;
use strictlin::repro::{reproduce, ReproOutput};

fn golden(name: &str) -> Vec<String> {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{path}: {e}"))
        .lines()
        .map(str::to_string)
        .collect()
}

fn strings(v: &Json) -> Vec<String> {
    v.as_array()
        .map(|a| a.iter().filter_map(|s| s.as_str().map(str::to_string)).collect())
        .unwrap_or_default()
}

/// Extra checks on the reproduction's details, beyond its own verdict.
fn exact(out: &ReproOutput) -> Result<(), String> {
    let d = &out.details;
    let expect = |ok: bool, what: &str| if ok { Ok(()) } else { Err(what.to_string()) };
    match out.criterion {
        1 => {
            expect(strings(&d["concrete"]) == golden("fig2_hw_states.txt"), "hw-queue states differ from golden")?;
            expect(strings(&d["atomic"]) == golden("fig2_atomic_states.txt"), "atomic states differ from golden")
        }
        2 => {
            expect(d["recorded_final"] == "back=3 items=[c,·,·,·]", "recorded final state")?;
            expect(strings(&d["legal_finals"]) == ["back=3 items=[·,c,·,·]"], "legal final states")?;
            expect(d["strict"] == false && d["general"] == true, "strict/general verdicts")?;
            expect(d["orders"] == d["brute_force_orders"], "search tree and permutation oracle disagree")
        }
        3 => {
            expect(strings(&d["hw_queue"]) == ["'c'"], "y on hw-queue")?;
            expect(strings(&d["adt_queue"]) == ["'c'", "EMPTY"], "y on adt-queue")
        }
        4 => expect(
            d["concrete"]["object_divergent"] == true && d["atomic"]["object_divergent"] == false,
            "divergence classification",
        ),
        5 => expect(d["triples"] == 1000 && d["failures"] == 0, "fuzz counts"),
        6 => expect(d["disagreements"] == 0 && d["histories"].as_u64() > Some(0), "oracle counts"),
        7 => expect(
            d["strict"] == true
                && d["pseudo_queue"] == true
                && d["af_pseudo_collisions"] == 0
                && d["multiset"] == true,
            "appendix checks",
        ),
        8 => expect(d["hw_ms_equal"] == false && d["coarse"].as_array().map(Vec::len) == Some(4), "control programs"),
        _ => Err("unknown criterion".into()),
    }
}

const CRITERIA: &[(u8, &str, u64)] = &[
    (1, "fig2", 10),
    (2, "fig3", 10),
    (3, "sec62-observation", 5),
    (4, "sec52-divergence", 60),
    (5, "prop2-fuzz", 10),
    (6, "oracle-equivalence", 120),
    (7, "propH-msqueue-strict", 300),
    (8, "theorem6-control", 60),
];

fn main() -> ExitCode {
    let mut failures = 0;
    for &(criterion, name, limit_secs) in CRITERIA {
        let line = match reproduce(name) {
            Ok(out) => {
                let within = Duration::from_millis(out.millis as u64) < Duration::from_secs(limit_secs);
                let verdict = if !out.passed {
                    Err("reproduction failed".to_string())
                } else if !within {
                    Err(format!("over the {limit_secs} s limit"))
                } else {
                    exact(&out)
                };
                match verdict {
                    Ok(()) => format!("criterion {criterion} ({name}): PASS {} [{} ms]", out.summary, out.millis),
                    Err(why) => {
                        failures += 1;
                        format!("criterion {criterion} ({name}): FAIL {why}; {} [{} ms]\n{}", out.summary, out.millis, out.text)
                    }
                }
            }
            Err(e) => {
                failures += 1;
                format!("criterion {criterion} ({name}): FAIL {e}")
            }
        };
        println!("{line}");
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
