use swarmform_core::assignment::AssignmentProblem;

/// Every permutation of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                prefix.push(j);
                rec(prefix, used, out);
                prefix.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn cost(problem: &AssignmentProblem, perm: &[usize]) -> f64 {
    let mut total = 0.0;
    for (i, &j) in perm.iter().enumerate() {
        total += problem.cost(i, j);
    }
    total
}

/// Optimal permutation, its cost, and the gap to the next-best permutation
/// (zero when the optimum is tied, infinity for a single permutation).
pub fn exhaustive_optimum(problem: &AssignmentProblem) -> (Vec<usize>, f64, f64) {
    let perms = all_permutations(problem.size());
    let costs: Vec<f64> = perms.iter().map(|p| cost(problem, p)).collect();
    let (best_idx, best) = costs
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, c)| if c < b.1 { (i, c) } else { b });
    let second = costs
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best_idx)
        .fold(f64::INFINITY, |m, (_, &c)| m.min(c));
    (perms[best_idx].clone(), best, second - best)
}
