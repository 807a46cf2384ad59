//! Runs every acceptance criterion and prints one PASS/FAIL line for each.
//! Check-level detail goes to stderr; the process fails if any criterion does.

use std::process::ExitCode;

use dgfv_core::verify::{run_suite, Suite};

const CRITERIA: [(u8, &str, Suite); 7] = [
    (1, "operator algebra", Suite::Operators),
    (2, "two-point flux properties", Suite::Fluxes),
    (3, "free-stream preservation on moving meshes", Suite::Freestream),
    (4, "h/p convergence on moving meshes", Suite::Convergence),
    (5, "entropy conservation and stability (Taylor-Green)", Suite::Entropy),
    (6, "moving piston shock", Suite::Piston),
    (7, "conservation and determinism", Suite::Conservation),
];

fn main() -> ExitCode {
    let mut all = true;
    for (id, title, suite) in CRITERIA {
        let line = match run_suite(suite) {
            Ok(report) => {
                for c in &report.checks {
                    eprintln!("  [{id}] {c}");
                }
                all &= report.passed();
                let status = if report.passed() { "PASS" } else { "FAIL" };
                format!("criterion {id} {status}: {title} ({:.1} s)", report.elapsed.as_secs_f64())
            }
            Err(e) => {
                all = false;
                format!("criterion {id} FAIL: {title} aborted: {e}")
            }
        };
        println!("{line}");
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
