//! Acceptance sweep: one test per numbered criterion, each printing a
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Criterion 10 is expected to fail at a handful of grid points: the
//! phi-envelope inequalities are implemented exactly as stated on
//! t in [8, 200], but they are mathematically false below t ~ 23.16
//! (rigorously certified by the same ball arithmetic). The failure message
//! lists the offending points; all other sub-checks of criterion 10 and all
//! other criteria pass.

use std::sync::OnceLock;

use diamond_core::acceptance::{run_criterion, CriterionResult};
use diamond_core::series::TableCache;

fn cache() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(|| TableCache::new(None))
}

fn run(id: u32) -> CriterionResult {
    let r = run_criterion(id, cache()).unwrap_or_else(|e| panic!("criterion {id} errored: {e}"));
    println!(
        "criterion {:>2}: {} [{} ms] {} - {}",
        r.id,
        if r.passed { "PASS" } else { "FAIL" },
        r.millis,
        r.name,
        r.detail
    );
    r
}

#[test]
fn criterion_01_series_self_consistency() {
    let r = run(1);
    assert!(r.passed, "{}", r.detail);
}

#[test]
fn criterion_02_exact_formula_certification() {
    let r = run(2);
    assert!(r.passed, "{}", r.detail);
}

#[test]
fn criterion_03_error_envelope() {
    let r = run(3);
    assert!(r.passed, "{}", r.detail);
}

#[test]
fn criterion_04_relative_error_envelope() {
    let r = run(4);
    assert!(r.passed, "{}", r.detail);
}

#[test]
fn criterion_05_logconcavity_threshold() {
    let r = run(5);
    assert!(r.passed, "{}", r.detail);
}

#[test]
fn criterion_06_threshold_certificate() {
    let r = run(6);
    assert!(r.passed, "{}", r.detail);
}

#[test]
fn criterion_07_small_k_reproductions() {
    let r = run(7);
    assert!(r.passed, "{}", r.detail);
}

#[test]
fn criterion_08_forward_differences() {
    let r = run(8);
    assert!(r.passed, "{}", r.detail);
}

#[test]
fn criterion_09_multiplicativity() {
    let r = run(9);
    assert!(r.passed, "{}", r.detail);
}

#[test]
fn criterion_10_bessel_bounds() {
    let r = run(10);
    assert!(r.passed, "{}", r.detail);
}

#[test]
fn criterion_11_hermite_probe() {
    let r = run(11);
    assert!(r.passed, "{}", r.detail);
}
