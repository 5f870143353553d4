//! Runs every invariant suite and prints a one-line summary per check.

use fisherflow::check::{run_checks, Suite};

fn main() -> fisherflow::error::Result<()> {
    let report = run_checks(Suite::All, 8, 7)?;
    for item in &report.items {
        let mark = if item.passed { "ok  " } else { "FAIL" };
        println!(
            "{mark} {:<12} {:<40} {:.3e}",
            item.suite, item.name, item.value
        );
    }
    println!("all passed: {}", report.passed);
    Ok(())
}
