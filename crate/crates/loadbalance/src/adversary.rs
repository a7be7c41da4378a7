//! Restricted-assignment adversary against deterministic online policies.
//!
//! With `ℓ` machines the adversary plays `log2 ℓ` rounds. Round `j` issues
//! `c·ℓ/2^j` unit jobs that may only run on the machines whose index agrees
//! with the bits fixed so far; it then fixes the next bit towards the half
//! carrying more load. The average load of the surviving machines grows by
//! at least `c/2` per round, so the last one ends with load at least
//! `(c/2)·log2 ℓ`, while sending every round's jobs to the abandoned half
//! gives a schedule of makespan `c`.

use learnaug_core::Rational;

use crate::error::LbError;
use crate::model::{JobType, Schedule, TypeSet};
use crate::online::LbPolicy;

#[derive(Clone, Debug)]
pub struct LbAdversaryRun {
    pub types: TypeSet,
    pub feed: Vec<usize>,
    /// The policy's schedule.
    pub schedule: Schedule,
    /// The machine singled out by the fixed bits.
    pub target: usize,
    /// Load of `target` under the policy.
    pub target_load: Rational,
    /// A valid schedule of the same jobs with makespan `c`.
    pub witness: Schedule,
}

impl LbAdversaryRun {
    /// Makespan of the witness schedule, an upper bound on the optimum.
    pub fn opt_bound(&self) -> Rational {
        self.witness.makespan
    }
}

fn log2_exact(x: usize, what: &'static str) -> Result<u32, LbError> {
    if x == 0 || !x.is_power_of_two() {
        return Err(LbError::NotPowerOfTwo(what));
    }
    Ok(x.trailing_zeros())
}

pub fn lb_adversary(ell: usize, c: u64, policy: &mut dyn LbPolicy) -> Result<LbAdversaryRun, LbError> {
    let bits = log2_exact(ell, "machine count")?;
    if c == 0 {
        return Err(LbError::NonPositiveTime);
    }
    let ell_u = ell as u64;
    if c.checked_mul(ell_u).is_none() {
        return Err(LbError::TooLarge(format!("{c} x {ell} jobs")));
    }
    let mut types = TypeSet::new(ell, Vec::new())?;
    let mut feed = Vec::new();
    let mut schedule = Schedule::empty(ell);
    let mut witness = Schedule::empty(ell);
    // Candidate machines are [lo, lo + width).
    let mut lo = 0usize;
    let mut width = ell;
    for j in 1..=bits {
        let jobs = c * ell_u >> j;
        let ty = types.intern(JobType::restricted(ell, |i| i >= lo && i < lo + width)?)?;
        let half = width / 2;
        let mass = |s: &Schedule, from: usize| -> Rational { s.loads[from..from + half].iter().copied().sum() };
        for _ in 0..jobs {
            let i = policy.assign(types.get(ty));
            schedule.place(types.get(ty), i);
            feed.push(ty);
        }
        let lower = mass(&schedule, lo) > mass(&schedule, lo + half);
        let abandoned = if lower { lo + half } else { lo };
        if !lower {
            lo += half;
        }
        // c jobs per abandoned machine
        for k in 0..jobs as usize {
            witness.place(types.get(ty), abandoned + k / c as usize);
        }
        width = half;
    }
    let target = lo;
    Ok(LbAdversaryRun {
        target_load: schedule.loads[target],
        types,
        feed,
        schedule,
        target,
        witness,
    })
}
