//! Acceptance gate: every verification criterion must pass. One report line
//! is printed per criterion; run with `-- --nocapture` to see them all.

use extriang::verify::{run_all, CRITERIA};

#[test]
fn acceptance() {
    let outcomes = run_all(0x5eed);
    assert_eq!(outcomes.len(), CRITERIA.len());
    let mut failures = Vec::new();
    for o in &outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:2} {verdict} — {} — {}", o.id, o.title, o.detail);
        if !o.passed {
            failures.push(format!("criterion {}: {}", o.id, o.detail));
        }
    }
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
