//! Acceptance criteria 1–12. Each test prints one `PASS`/`FAIL` line with the
//! measured quantities and then asserts the verdict.

use std::sync::LazyLock;

use nehari_core::verify::{Level, Session, VerifyOptions};

static SESSION: LazyLock<Session> = LazyLock::new(|| {
    Session::new(VerifyOptions {
        level: Level::Full,
        ..Default::default()
    })
});

fn accept(k: usize) {
    let outcome = SESSION.criterion(k);
    println!("{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn c01_scalar_soliton() {
    accept(1);
}

#[test]
fn c02_scaling_law() {
    accept(2);
}

#[test]
fn c03_nehari_machinery() {
    accept(3);
}

#[test]
fn c04_gradient_finite_differences() {
    accept(4);
}

#[test]
fn c05_symmetrization() {
    accept(5);
}

#[test]
fn c06_threshold_constants() {
    accept(6);
}

#[test]
fn c07_epsilon_optimization() {
    accept(7);
}

#[test]
fn c08_trial_state_algebra() {
    accept(8);
}

#[test]
fn c09_sublinear_regime() {
    accept(9);
}

#[test]
fn c10_coupling_flip() {
    accept(10);
}

#[test]
fn c11_superquadratic_regime() {
    accept(11);
}

#[test]
fn c12_competitor_dominance() {
    accept(12);
}
