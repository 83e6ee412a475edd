use super::{class_support, ClassResult, Method};
use crate::error::{Error, Result};
use crate::homodyne::{
    outcome_density, rng_from_seed, ClassTarget, DecisionRule, OutcomeSampler, ProjectionModel,
    TargetProjector,
};
use crate::hybrid_state::HybridState;

/// Minimum count on either side of a class for the normal approximation of
/// its standard error to be trusted.
const MIN_COUNT: u64 = 5;

/// Per-class probabilities from `trials` sampled outcomes, with binomial
/// standard errors. Fidelities average `<T|rho(v)|T>` over the outcomes
/// that landed in each class.
pub fn monte_carlo_estimate(
    state: &HybridState,
    rule: &DecisionRule,
    trials: u64,
    seed: u64,
    model: ProjectionModel,
) -> Result<Vec<ClassResult>> {
    if trials == 0 {
        return Err(Error::InvalidParameter(
            "Monte Carlo needs at least one trial".into(),
        ));
    }
    if state.n() != rule.n() {
        return Err(Error::InvalidParameter(format!(
            "state has {} qubits but the rule expects {}",
            state.n(),
            rule.n()
        )));
    }
    let q = rule.quadrature;
    let sampler = OutcomeSampler::new(state, q)?;
    let projectors = rule
        .classes
        .iter()
        .map(|c| TargetProjector::new(state, q, class_support(state.n(), c), model))
        .collect::<Result<Vec<_>>>()?;

    let m = rule.classes.len();
    let mut counts = vec![0u64; m];
    let mut fid_sums = vec![0.0; m];
    let mut fid_counts = vec![0u64; m];
    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        let v = sampler.sample(&mut rng);
        let i = rule.class_index(v);
        counts[i] += 1;
        let c = &rule.classes[i];
        if c.target == ClassTarget::Undetermined {
            continue;
        }
        let density = outcome_density(state, q, v);
        if density > 0.0 {
            let t = c.target.at(q, v, model.phase).expect("class has a target");
            fid_sums[i] += projectors[i].weight(&t, v) / density;
            fid_counts[i] += 1;
        }
    }

    let n = trials as f64;
    Ok(rule
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let p = counts[i] as f64 / n;
            ClassResult {
                parity: c.parity.to_string(),
                target: c.target_name(),
                success_prob: p,
                fidelity: (fid_counts[i] > 0)
                    .then(|| (fid_sums[i] / fid_counts[i] as f64).clamp(0.0, 1.0)),
                method: Method::MonteCarlo,
                mc_stderr: Some((p * (1.0 - p) / n).sqrt()),
                mc_unreliable: counts[i] < MIN_COUNT || trials - counts[i] < MIN_COUNT,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homodyne::Scenario;
    use crate::metrics::prepare;

    #[test]
    fn two_qubit_half() {
        let p = prepare(Scenario::TwoQubitX, 1.0, 2.0 / 3.0, 0.0).unwrap();
        let r = monte_carlo_estimate(&p.state, &p.rule, 100_000, 11, ProjectionModel::default())
            .unwrap();
        let psi = &r[1];
        assert_eq!(psi.target, "psi+");
        assert!((psi.success_prob - 0.5).abs() < 3.0 * psi.mc_stderr.unwrap());
        assert!(!psi.mc_unreliable);
    }

    #[test]
    fn single_trial_is_flagged() {
        let p = prepare(Scenario::TwoQubitX, 1.0, 1.0, 0.0).unwrap();
        let r = monte_carlo_estimate(&p.state, &p.rule, 1, 3, ProjectionModel::default()).unwrap();
        assert!(r.iter().all(|c| c.mc_unreliable));
        assert_eq!(r.iter().map(|c| c.success_prob).sum::<f64>(), 1.0);
    }

    #[test]
    fn zero_trials_rejected() {
        let p = prepare(Scenario::TwoQubitX, 1.0, 1.0, 0.0).unwrap();
        assert!(monte_carlo_estimate(&p.state, &p.rule, 0, 3, ProjectionModel::default()).is_err());
    }

    #[test]
    fn seeded_runs_repeat() {
        let p = prepare(Scenario::ThreeQubitP, 2.0, 2.0 / 3.0, 0.0).unwrap();
        let a =
            monte_carlo_estimate(&p.state, &p.rule, 2000, 5, ProjectionModel::default()).unwrap();
        let b =
            monte_carlo_estimate(&p.state, &p.rule, 2000, 5, ProjectionModel::default()).unwrap();
        assert_eq!(a, b);
    }
}
