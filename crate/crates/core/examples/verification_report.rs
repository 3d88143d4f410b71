// Runs a verification suite in process and exports a grid function, the
// same work `bhk run` and `bhk emit` do.

use bhk::emit::emit_grid;
use bhk::report::RunConfig;
use bhk::suites::{run_suite, Suite};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig::from_json(r#"{"grid": {"x_max": 8, "points": 32}}"#)?;
    let (report, timings) = run_suite(&config, Suite::Special)?;
    for row in report.rows.iter().take(4) {
        println!("{:<26} computed {:+.3e} expected {:+.3e} pass {}", row.check, row.computed, row.expected, row.pass);
    }
    println!("{:?} in {} groups", report.summary, timings.len());
    assert!(report.all_passed());

    let dir = std::env::temp_dir().join(format!("bhk-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    for path in emit_grid(&config, "b-harmonic-k2", &dir.join("p2.csv"), true)? {
        println!("wrote {} ({} lines)", path.display(), std::fs::read_to_string(&path)?.lines().count());
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() {
    run_example().unwrap();
}
