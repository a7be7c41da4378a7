//! Randomized combination of several online policies into one integral
//! schedule.
//!
//! All policies are simulated on the feed. The combiner keeps a guess `c` of
//! the best policy's makespan and follows a uniformly random policy whose
//! simulated makespan is still at most `c`; when the followed policy exceeds
//! `c` it redraws among the survivors, and when none survive it doubles `c`.

use learnaug_core::{Rational, RngStream};

use crate::error::LbError;
use crate::model::{Schedule, TypeSet};
use crate::online::LbPolicy;

#[derive(Clone, Debug)]
pub struct PortfolioRun {
    pub schedule: Schedule,
    /// Redraws of the followed policy within a guess (the first draw under
    /// each guess is not counted).
    pub switches: usize,
    /// Switches made while each guess was current.
    pub switches_per_guess: Vec<usize>,
    pub c0: Rational,
    pub c_final: Rational,
    /// Final simulated makespan of every policy.
    pub policy_makespans: Vec<Rational>,
}

impl PortfolioRun {
    /// Smallest simulated makespan among the policies.
    pub fn best(&self) -> Rational {
        self.policy_makespans.iter().copied().min().unwrap_or(Rational::ZERO)
    }
}

pub fn portfolio_combiner(
    types: &TypeSet,
    mut policies: Vec<Box<dyn LbPolicy + '_>>,
    feed: &[usize],
    mut rng: RngStream,
) -> Result<PortfolioRun, LbError> {
    if policies.is_empty() {
        return Err(LbError::EmptyClass);
    }
    let mut schedule = Schedule::empty(types.machines());
    let mut run = PortfolioRun {
        schedule: Schedule::empty(types.machines()),
        switches: 0,
        switches_per_guess: vec![0],
        c0: Rational::ZERO,
        c_final: Rational::ZERO,
        policy_makespans: Vec::new(),
    };
    let mut c = Rational::ZERO;
    let mut followed = usize::MAX;
    for (t, &p) in feed.iter().enumerate() {
        if p >= types.len() {
            return Err(LbError::UnknownType(p));
        }
        let ty = types.get(p);
        let choices: Vec<usize> = policies.iter_mut().map(|pol| pol.assign(ty)).collect();
        if t == 0 {
            c = policies.iter().map(|pol| pol.makespan()).min().expect("non-empty");
            run.c0 = c;
        }
        if followed == usize::MAX || policies[followed].makespan() > c {
            let mut alive: Vec<usize> = (0..policies.len()).filter(|&i| policies[i].makespan() <= c).collect();
            let mut new_guess = followed == usize::MAX;
            while alive.is_empty() {
                c = c * Rational::from(2u64);
                run.switches_per_guess.push(0);
                new_guess = true;
                alive = (0..policies.len()).filter(|&i| policies[i].makespan() <= c).collect();
            }
            // the first draw under a guess is not a switch
            if !new_guess {
                run.switches += 1;
                *run.switches_per_guess.last_mut().expect("non-empty") += 1;
            }
            followed = alive[rng.uniform_index(alive.len())?];
        }
        schedule.place(ty, choices[followed]);
    }
    run.c_final = c;
    run.policy_makespans = policies.iter().map(|p| p.makespan()).collect();
    run.schedule = schedule;
    Ok(run)
}
