//! Prediction-free Round-Robin and its combination with another policy.

use learnaug_core::{Problem, Rational, RunRecord};

use crate::error::SchedError;
use crate::model::{sjf_opt, SchedInstance};
use crate::realizable::SchedRun;
use crate::sim::{simulate, RoundRobin, SchedPolicy, SpeedSplit};

fn finish(instance: &SchedInstance, policy: &mut dyn SchedPolicy, pipeline: &str) -> Result<SchedRun, SchedError> {
    let sim = simulate(instance, policy)?;
    let (opt, _) = sjf_opt(instance);
    let switches = policy.switches();
    let mut record = RunRecord::new(Problem::Sched, sim.total_completion(), opt)
        .with_meta("pipeline", pipeline)
        .with_meta("sigma", switches)
        .with_meta("preemptions", sim.preemptions);
    record.switches = switches as u64;
    Ok(SchedRun { record, sim, switches })
}

pub fn round_robin(instance: &SchedInstance) -> Result<SchedRun, SchedError> {
    finish(instance, &mut RoundRobin, "round_robin")
}

/// Runs `inner` at speed `1 − δ` alongside Round-Robin at speed `δ`.
pub fn speed_split<P: SchedPolicy>(instance: &SchedInstance, inner: P, delta: Rational) -> Result<SchedRun, SchedError> {
    let mut policy = SpeedSplit::new(inner, delta)?;
    finish(instance, &mut policy, "speed_split").map(|mut run| {
        run.record.set_meta("delta_speed", delta);
        run
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::FixedOrder;

    #[test]
    fn round_robin_example() {
        let inst = SchedInstance::new(vec![Rational::frac(1, 2), Rational::ONE]).unwrap();
        let run = round_robin(&inst).unwrap();
        assert_eq!(run.record.objective, Rational::frac(5, 2));
        assert_eq!(run.record.ratio(), Some(Rational::frac(5, 4)));
    }

    #[test]
    fn speed_split_with_shortest_first_inner() {
        let inst = SchedInstance::new(vec![Rational::frac(1, 2), Rational::ONE]).unwrap();
        let delta = Rational::frac(1, 2);
        let run = speed_split(&inst, FixedOrder::new(vec![0, 1]), delta).unwrap();
        let cap = Rational::from(2u64) * run.record.opt / (Rational::ONE - delta);
        assert!(run.record.objective <= cap);
    }
}
