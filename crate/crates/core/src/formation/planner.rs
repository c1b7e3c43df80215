//! Leader-side guidance: sample `sequences` formation-configuration
//! sequences, keep the cheapest, assign UAVs to slots on its first
//! configuration and unroll it into per-UAV waypoint paths.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::assignment::{auction_assign, Assignment, AssignmentProblem};
use crate::corridor::FormationSafeRegion;
use crate::Vec3;

use super::cost::{evaluate_fc, EvalContext, PrevStep};
use super::{sample_step, FormationConfig, FormationError, FormationShape, FrontWeights, SampleParams};

/// One sampled sequence and its accumulated cost (including the suspension
/// penalty for steps it did not complete).
#[derive(Debug, Clone, PartialEq)]
pub struct FormationSequence {
    pub configs: Vec<FormationConfig>,
    pub total_cost: f64,
    pub steps_completed: usize,
}

/// Per-UAV waypoint paths, all of the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct GuidancePathSet {
    pub paths: Vec<Vec<Vec3>>,
}

impl GuidancePathSet {
    pub fn uav_count(&self) -> usize {
        self.paths.len()
    }

    pub fn steps(&self) -> usize {
        self.paths.first().map_or(0, Vec::len)
    }

    pub fn path(&self, uav: usize) -> &[Vec3] {
        &self.paths[uav]
    }

    /// Every UAV holds `positions[i]` for `steps` waypoints.
    pub fn hold(positions: &[Vec3], steps: usize) -> Self {
        Self {
            paths: positions.iter().map(|p| vec![*p; steps]).collect(),
        }
    }
}

/// Inputs of one planning call.
#[derive(Debug, Clone, Copy)]
pub struct PlanRequest<'a> {
    /// Initial sampling center `c_0`.
    pub start_center: Vec3,
    /// First scale of the previously selected sequence, `s_0`.
    pub start_scale: f64,
    pub region: &'a FormationSafeRegion,
    /// Previous optimal assignment `sigma_0`, UAV id -> slot.
    pub assignment: &'a [usize],
    pub positions: &'a [Vec3],
    pub d_obs: &'a [f64],
    pub goal_center: Vec3,
    pub shape: &'a FormationShape,
    /// Direction of the previous cycle's first segment, if any.
    pub prev_direction: Option<Vec3>,
    pub assignment_epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome {
    pub paths: GuidancePathSet,
    /// Assignment the paths were built with.
    pub assignment: Assignment,
    /// True when the freshly solved assignment would have put a waypoint
    /// outside its owner's corridor and the previous one was kept instead.
    pub kept_previous_assignment: bool,
    pub sequence: FormationSequence,
    pub winner: usize,
    /// Total cost of every sampled sequence, by sequence index.
    pub sequence_costs: Vec<f64>,
    pub sequence_steps: Vec<usize>,
    /// The forward batch fell short and an unrestricted batch was drawn;
    /// its sequences follow the forward ones in the cost and step lists.
    pub backtracked: bool,
}

pub fn plan_formation_paths(
    request: &PlanRequest<'_>,
    params: &SampleParams,
    weights: &FrontWeights,
) -> Result<PlanOutcome, FormationError> {
    params.validate()?;
    weights.validate(params.s_min, params.s_max)?;
    let n = request.region.len();
    if request.positions.len() != n
        || request.d_obs.len() != n
        || request.assignment.len() != n
        || request.shape.len() != n
    {
        return Err(FormationError::SizeMismatch);
    }

    let scales = params.scale_grid();
    let ctx = EvalContext {
        goal_center: request.goal_center,
        region: request.region,
        previous: None,
        positions: request.positions,
        d_obs: request.d_obs,
        assignment: request.assignment,
        weights,
    };

    let sample_batch = |offset: usize, forward: bool| -> Vec<FormationSequence> {
        (offset..offset + params.sequences)
            .into_par_iter()
            .map(|i| sample_sequence(i as u64, request, params, &scales, &ctx, forward))
            .collect::<Vec<_>>()
    };
    let mut sequences = sample_batch(0, true);
    let best_steps = sequences.iter().map(|s| s.steps_completed).max().unwrap_or(0);
    let backtracked = best_steps < params.backtrack_below;
    if backtracked {
        sequences.extend(sample_batch(params.sequences, false));
    }

    // Empty sequences carry no guidance and cannot win. Ties go to the lowest
    // sequence index.
    let winner = sequences
        .iter()
        .enumerate()
        .filter(|(_, s)| s.steps_completed > 0)
        .fold(None::<(usize, f64)>, |best, (i, s)| match best {
            Some((_, c)) if c <= s.total_cost => best,
            _ => Some((i, s.total_cost)),
        })
        .map(|(i, _)| i)
        .ok_or(FormationError::NoSafeStep)?;

    let sequence_costs = sequences.iter().map(|s| s.total_cost).collect();
    let sequence_steps = sequences.iter().map(|s| s.steps_completed).collect();
    let mut sequence = sequences[winner].clone();

    let first = sequence.configs[0].targets();
    let problem = AssignmentProblem::from_distances(request.positions, &first)?;
    let fresh = auction_assign(&problem, request.assignment_epsilon)?;

    let admits_all = |perm: &[usize]| {
        sequence
            .configs
            .iter()
            .all(|fc| request.region.admits(&fc.targets(), perm))
    };
    let (assignment, kept_previous_assignment) = if admits_all(&fresh.perm) {
        (fresh, false)
    } else {
        let perm = request.assignment.to_vec();
        let total_cost = problem.total_cost(&perm);
        (Assignment { perm, total_cost }, true)
    };

    // Hold the last safe configuration when the winner halted early.
    let last = sequence.configs.last().cloned().expect("winner is non-empty");
    sequence.configs.resize(params.steps, last);
    sequence.configs.truncate(params.steps);
    let paths = GuidancePathSet {
        paths: (0..n)
            .map(|uav| {
                let slot = assignment.perm[uav];
                sequence.configs.iter().map(|fc| fc.target(slot)).collect()
            })
            .collect(),
    };
    sequence.configs.truncate(sequence.steps_completed);

    Ok(PlanOutcome {
        paths,
        assignment,
        kept_previous_assignment,
        sequence,
        winner,
        sequence_costs,
        sequence_steps,
        backtracked,
    })
}

fn sample_sequence(
    index: u64,
    request: &PlanRequest<'_>,
    params: &SampleParams,
    scales: &[f64],
    base: &EvalContext<'_>,
    forward: bool,
) -> FormationSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(index);

    let mut prev = PrevStep {
        center: request.start_center,
        scale: request.start_scale,
        direction: request.prev_direction,
    };
    let mut configs = Vec::with_capacity(params.steps);
    let mut total = 0.0;

    for _ in 0..params.steps {
        let center = sample_step(&prev.center, &request.goal_center, params, forward, &mut rng);
        let ctx = EvalContext {
            previous: Some(prev),
            ..*base
        };
        let (fc, cost) = scales
            .iter()
            .map(|&s| {
                let fc = FormationConfig::new(s, center, request.shape.clone());
                let cost = evaluate_fc(&fc, &ctx);
                (fc, cost)
            })
            .fold(None::<(FormationConfig, super::FcCost)>, |best, cand| match best {
                Some(ref b) if b.1.total() <= cand.1.total() => best,
                _ => Some(cand),
            })
            .expect("scale grid is non-empty");
        if !cost.is_safe() {
            break;
        }
        total += cost.total();
        let step = center - prev.center;
        prev = PrevStep {
            center,
            scale: fc.scale,
            direction: if step.norm_squared() > 0.0 { Some(step) } else { prev.direction },
        };
        configs.push(fc);
    }

    let steps_completed = configs.len();
    total += weights_penalty(base, params.steps - steps_completed);
    FormationSequence {
        configs,
        total_cost: total,
        steps_completed,
    }
}

fn weights_penalty(ctx: &EvalContext<'_>, remaining: usize) -> f64 {
    ctx.weights.suspend_penalty_per_step * remaining as f64
}
