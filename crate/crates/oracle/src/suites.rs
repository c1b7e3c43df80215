//! Oracle suites run by `swarmform --mode oracle-check` and the tests.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swarmform_core::assignment::{auction_assign, swap_improvement_check, Assignment, AssignmentProblem};
use swarmform_core::formation::evaluate_fc;
use swarmform_core::mppi::{propagate, running_cost, wrap_angle, ControlInput, UavState};
use swarmform_core::sim::formation_similarity;
use swarmform_core::world::{build_edt, squared_cell_distances, OccupancyGrid};
use swarmform_core::Vec3;

use crate::dynamics::matrix_power_rollout;
use crate::edt::{brute_force_point_distance, brute_force_squared, random_grid};
use crate::formulas::{front_cost_reference, random_front_case, random_running_case, running_cost_reference};
use crate::permutations::exhaustive_optimum;
use crate::similarity::nested_similarity;
use crate::close;

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// First mismatch, for the log.
    pub first_failure: Option<String>,
    pub elapsed: Duration,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} ({} cases, {} failures, {:.2}s)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.failures,
            self.elapsed.as_secs_f64()
        )?;
        if let Some(msg) = &self.first_failure {
            write!(f, ": {msg}")?;
        }
        Ok(())
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    failures: usize,
    first_failure: Option<String>,
    start: Instant,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            failures: 0,
            first_failure: None,
            start: Instant::now(),
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(msg());
            }
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            first_failure: self.first_failure,
            elapsed: self.start.elapsed(),
        }
    }
}

pub fn edt_suite() -> SuiteResult {
    edt_suite_with(squared_cell_distances)
}

/// 20 random grids up to 48 cells a side: squared cell distances compared
/// bitwise with the all-pairs search, then 100 interpolated queries per grid
/// held within one resolution of the point-to-cell-center distance.
pub fn edt_suite_with(squared: impl Fn(&OccupancyGrid) -> Vec<f64>) -> SuiteResult {
    let mut t = Tally::new("edt");
    let mut rng = ChaCha8Rng::seed_from_u64(0xed7);
    for g in 0..20 {
        let dims = if g == 0 {
            [48, 48, 48]
        } else {
            [rng.random_range(8..=48), rng.random_range(8..=48), rng.random_range(8..=48)]
        };
        let occupancy = rng.random_range(0.01..0.05);
        let resolution = [0.1, 0.2, 0.25][g % 3];
        let grid = random_grid(&mut rng, dims, resolution, occupancy);
        let got = squared(&grid);
        let want = brute_force_squared(&grid);
        let exact = match &want {
            None => got.iter().all(|d| d.is_infinite()),
            Some(w) => got.len() == w.len() && got.iter().zip(w).all(|(a, b)| *a == *b as f64),
        };
        t.check(exact, || format!("grid {g} ({dims:?}) differs from brute force"));

        let field = build_edt(&grid, 1e9).expect("positive cap");
        // Stay between the outermost cell centers, where interpolation is
        // never clamped.
        let half = Vec3::repeat(resolution / 2.0);
        let lo = grid.min_corner() + half;
        let hi = grid.max_corner() - half;
        for _ in 0..100 {
            let p = Vec3::new(
                rng.random_range(lo.x..hi.x),
                rng.random_range(lo.y..hi.y),
                rng.random_range(lo.z..hi.z),
            );
            let d = field.query(&p);
            let want = brute_force_point_distance(&grid, &p);
            t.check((d - want).abs() <= resolution, || {
                format!("grid {g}: query {p:?} gave {d}, brute force {want}")
            });
        }
    }
    t.finish()
}

/// 500 random instances with up to 7 people against exhaustive search, plus
/// 200 instances on which the pairwise-swap test must agree with the
/// exhaustive optimum.
pub fn assignment_suite() -> SuiteResult {
    let mut t = Tally::new("assignment");
    let mut rng = ChaCha8Rng::seed_from_u64(0xa55);
    let eps = 1e-6;
    for case in 0..500 {
        let n = rng.random_range(1..=7);
        // Every fourth instance uses small integers so ties are common.
        let costs: Vec<f64> = (0..n * n)
            .map(|_| {
                if case % 4 == 0 {
                    rng.random_range(0..4) as f64
                } else {
                    rng.random_range(0.0..10.0)
                }
            })
            .collect();
        let problem = AssignmentProblem::from_flat(n, costs).unwrap();
        let got = auction_assign(&problem, eps).unwrap();
        let (best_perm, best, gap) = exhaustive_optimum(&problem);
        let bound = n as f64 * eps;
        let within = got.total_cost - best <= bound + 1e-12;
        t.check(within, || {
            format!("case {case}: auction {} vs optimum {best}", got.total_cost)
        });
        if gap > bound {
            t.check(got.perm == best_perm, || {
                format!("case {case}: unique optimum {best_perm:?} missed, got {:?}", got.perm)
            });
        }
    }
    for case in 0..200 {
        let n = rng.random_range(2..=7);
        let costs: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.0..10.0)).collect();
        let problem = AssignmentProblem::from_flat(n, costs).unwrap();
        let (best_perm, best, _) = exhaustive_optimum(&problem);
        let optimum = Assignment {
            total_cost: best,
            perm: best_perm,
        };
        t.check(swap_improvement_check(&problem, &optimum, eps), || {
            format!("case {case}: swap test rejects the exhaustive optimum")
        });
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let candidate = Assignment {
            total_cost: problem.total_cost(&perm),
            perm,
        };
        // A failed swap test must mean the oracle finds something cheaper.
        if !swap_improvement_check(&problem, &candidate, eps) {
            t.check(candidate.total_cost > best, || {
                format!("case {case}: swap test rejects an optimal assignment")
            });
        }
    }
    t.finish()
}

pub fn front_suite() -> SuiteResult {
    let mut t = Tally::new("front_cost");
    let mut rng = ChaCha8Rng::seed_from_u64(0xf70);
    for case in 0..1000 {
        let c = random_front_case(&mut rng);
        let got = evaluate_fc(&c.fc, &c.context()).total();
        let want = front_cost_reference(&c);
        t.check(close(got, want, 1e-12), || format!("case {case}: {got} vs {want}"));
    }
    t.finish()
}

pub fn running_suite() -> SuiteResult {
    let mut t = Tally::new("running_cost");
    let mut rng = ChaCha8Rng::seed_from_u64(0x2c0);
    let grid = random_grid(&mut rng, [40, 40, 15], 0.2, 0.02);
    let field = build_edt(&grid, 5.0).unwrap();
    for case in 0..1000 {
        let c = random_running_case(&mut rng, &field);
        let got = running_cost(&c.x, &c.u, c.k, &c.context(&field));
        let want = running_cost_reference(&c, field.query(&c.x.p));
        t.check(close(got, want, 1e-12), || format!("case {case}: {got} vs {want}"));
    }
    t.finish()
}

/// Random shapes observed through a scale, a translation and noise; every
/// tenth instance is mirrored so the best scale is negative.
pub fn similarity_suite() -> SuiteResult {
    let mut t = Tally::new("similarity");
    let mut rng = ChaCha8Rng::seed_from_u64(0x51a);
    for case in 0..100 {
        let n = rng.random_range(2..=8);
        let shape: Vec<Vec3> = (0..n)
            .map(|_| Vec3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0)))
            .collect();
        let sigma = if case % 10 == 9 { -0.8 } else { rng.random_range(0.3..1.5) };
        let shift = Vec3::new(rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0), rng.random_range(0.0..3.0));
        let noise = rng.random_range(0.0..0.5);
        let points: Vec<Vec3> = shape
            .iter()
            .map(|d| {
                sigma * d
                    + shift
                    + noise * Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            })
            .collect();
        let got = formation_similarity(&points, &shape).ok();
        let want = nested_similarity(&points, &shape);
        let ok = match (got, want) {
            (Some(g), Some(w)) => close(g, w, 1e-9),
            (None, None) => true,
            _ => false,
        };
        t.check(ok, || format!("case {case}: {got:?} vs {want:?}"));
    }
    t.finish()
}

/// 20 chained Euler steps against the matrix-power closed form.
pub fn dynamics_suite() -> SuiteResult {
    let mut t = Tally::new("dynamics");
    let mut rng = ChaCha8Rng::seed_from_u64(0xd70);
    let v = |rng: &mut ChaCha8Rng, s: f64| {
        Vec3::new(rng.random_range(-s..s), rng.random_range(-s..s), rng.random_range(-s..s))
    };
    for case in 0..200 {
        let dt = rng.random_range(0.01..0.2);
        let x0 = UavState {
            p: v(&mut rng, 20.0),
            v: v(&mut rng, 1.5),
            a: v(&mut rng, 3.0),
            psi: rng.random_range(-3.0..3.0),
        };
        let controls: Vec<ControlInput> = (0..20)
            .map(|_| ControlInput::new(v(&mut rng, 6.0), rng.random_range(-2.0..2.0)))
            .collect();
        let chained = controls.iter().fold(x0, |x, u| propagate(&x, u, dt));
        let closed = matrix_power_rollout(&x0, &controls, dt);
        let mut ok = wrap_angle(chained.psi - closed.psi).abs() <= 1e-12;
        for k in 0..3 {
            ok &= close(chained.p[k], closed.p[k], 1e-12)
                && close(chained.v[k], closed.v[k], 1e-12)
                && close(chained.a[k], closed.a[k], 1e-12);
        }
        t.check(ok, || format!("case {case}: {chained:?} vs {closed:?}"));
    }
    t.finish()
}

pub fn run_all() -> Vec<SuiteResult> {
    vec![
        edt_suite(),
        assignment_suite(),
        front_suite(),
        running_suite(),
        similarity_suite(),
        dynamics_suite(),
    ]
}
