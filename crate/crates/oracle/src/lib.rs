//! Reference implementations kept deliberately naive: brute force where the
//! problem allows it, plain scalar arithmetic everywhere else. They share no
//! code paths with `swarmform-core` beyond its data types.

pub mod dynamics;
pub mod edt;
pub mod formulas;
pub mod harness;
pub mod permutations;
pub mod similarity;
pub mod suites;

/// `|got - want| <= tol * max(1, |want|)`; two equal infinities agree.
pub fn close(got: f64, want: f64, tol: f64) -> bool {
    if got == want {
        return true;
    }
    (got - want).abs() <= tol * want.abs().max(1.0)
}
