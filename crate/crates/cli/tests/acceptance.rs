//! Runs every registered check, long-running ones included, and prints one
//! PASS/FAIL line per acceptance criterion.
//!
//! A criterion passes when each of its theorem and conjecture checks
//! matches. Exploratory checks are listed but do not decide the verdict.

use std::collections::BTreeMap;
use std::io::Write;

use ctasep_cli::report::{Severity, VerificationReport};
use ctasep_cli::suite::run_suite;

/// Criteria whose failure is a recorded finding rather than a defect.
const KNOWN_FINDINGS: &[(u8, &str)] = &[(6, "harmonic-n5")];

fn verdict(reports: &[&VerificationReport]) -> bool {
    reports
        .iter()
        .filter(|r| r.kind != Severity::Exploratory)
        .all(|r| !r.is_mismatch())
}

#[test]
fn acceptance() {
    let reports = run_suite("*", true).expect("registry is non-empty");
    let mut by_criterion: BTreeMap<u8, Vec<&VerificationReport>> = BTreeMap::new();
    for r in &reports {
        by_criterion.entry(r.criterion).or_default().push(r);
    }
    assert_eq!(
        by_criterion.keys().copied().collect::<Vec<_>>(),
        (1..=12).collect::<Vec<_>>()
    );

    let mut unexpected = Vec::new();
    let mut summary = String::new();
    for (criterion, rs) in &by_criterion {
        let pass = verdict(rs);
        let ms: u64 = rs.iter().map(|r| r.runtime_ms).sum();
        let line = format!(
            "criterion {criterion:>2}: {} ({} checks, {ms} ms)",
            if pass { "PASS" } else { "FAIL" },
            rs.len()
        );
        println!("{line}");
        summary.push_str(&line);
        summary.push('\n');
        for r in rs {
            let first = r
                .witnesses
                .first()
                .map(|w| format!(" first at {}", w.witness))
                .unwrap_or_default();
            println!(
                "    {:<16} {:<12} {:<16} {} checked{first}",
                r.id, r.kind, r.status, r.checked
            );
            if let Some(note) = &r.note {
                println!("        {note}");
            }
            let known = KNOWN_FINDINGS.contains(&(*criterion, r.id.as_str()));
            if r.kind != Severity::Exploratory && r.is_mismatch() && !known {
                unexpected.push(r.id.clone());
            }
        }
    }
    // the harness captures print! but not direct writes, so the verdicts
    // show up in a plain `cargo test` log
    std::io::stdout()
        .lock()
        .write_all(summary.as_bytes())
        .unwrap();
    assert!(
        unexpected.is_empty(),
        "unexpected mismatches: {unexpected:?}"
    );
}
