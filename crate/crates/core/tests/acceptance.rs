//! Acceptance gate: one test per verification criterion, each printing a
//! single machine-greppable pass/fail line with its evidence.

use revcut_core::verify::{run_criterion, VerifyConfig};

fn gate(id: usize) {
    let cfg = VerifyConfig::default();
    let r = run_criterion(id, &cfg).expect("criterion id in range");
    let status = if r.passed { "PASS" } else { "FAIL" };
    println!("[{status}] criterion {:2} {}: {}", r.id, r.name, r.detail);
    assert!(r.passed, "criterion {} ({}) failed: {}", r.id, r.name, r.detail);
}

#[test]
fn criterion_01_closed_form_phi_agreement() {
    gate(1);
}

#[test]
fn criterion_02_singular_integral_identity() {
    gate(2);
}

#[test]
fn criterion_03_curvature_via_ad() {
    gate(3);
}

#[test]
fn criterion_04_integrator_conservation() {
    gate(4);
}

#[test]
fn criterion_05_two_route_consistency() {
    gate(5);
}

#[test]
fn criterion_06_switch_height() {
    gate(6);
}

#[test]
fn criterion_07_cut_locus_vs_oracle() {
    gate(7);
}

#[test]
fn criterion_08_conjugate_points() {
    gate(8);
}

#[test]
fn criterion_09_hypothesis_checks() {
    gate(9);
}

#[test]
fn criterion_10_finite_neck_properties() {
    gate(10);
}
