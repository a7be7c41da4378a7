use learnaug_caching::*;
use learnaug_core::{mean_stderr, Rational, RngStream};
use proptest::prelude::*;

fn random_seq(rng: &mut RngStream, len: usize, universe: usize) -> Vec<PageId> {
    (0..len).map(|_| rng.uniform_index(universe).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realizable_regret_at_most_k_log_ell(seed in 0u64..10_000, k in 1usize..5, log_ell in 0u32..4) {
        let ell = 1usize << log_ell;
        let mut rng = RngStream::new(seed, 0);
        let hyps: Vec<Vec<PageId>> = (0..ell).map(|_| random_seq(&mut rng, 40, 7)).collect();
        let truth = rng.uniform_index(ell).unwrap();
        let class = CacheHypothesisClass::new(hyps.clone(), 7).unwrap();
        let inst = CachingInstance::new(7, k, hyps[truth].clone()).unwrap();
        let mut p = MajorityPredictor::new(class);
        let rec = serve_with_prediction(&inst, MajorityPredictor::new(CacheHypothesisClass::new(hyps, 7).unwrap()), ServeMode::Realizable, seed).unwrap();
        prop_assert!(rec.switches <= log_ell as u64);
        prop_assert!(rec.objective <= rec.opt + Rational::from(k as u64 * log_ell as u64));
        for (t, &r) in inst.requests.iter().enumerate() {
            p.observe(t, r).unwrap();
        }
        for w in p.active_sizes().windows(2) {
            prop_assert!(w[1] <= w[0].div_ceil(2));
        }
    }

    #[test]
    fn agnostic_run_within_regret_bound(seed in 0u64..10_000, k in 1usize..5) {
        let mut rng = RngStream::new(seed, 1);
        let hyps: Vec<Vec<PageId>> = (0..4).map(|_| random_seq(&mut rng, 30, 6)).collect();
        let truth = random_seq(&mut rng, 30, 6);
        let class = CacheHypothesisClass::new(hyps, 6).unwrap();
        let inst = CachingInstance::new(6, k, truth).unwrap();
        let maj = serve_with_prediction(&inst, MajorityPredictor::new(class.clone()), ServeMode::Agnostic, seed).unwrap();
        let hedge = serve_with_prediction(&inst, HedgePredictor::new(class, k, rng.split(9)), ServeMode::Agnostic, seed).unwrap();
        for rec in [maj, hedge] {
            let bound = rec.opt + Rational::from(4u64) * rec.mistakes + Rational::from(k as u64 * rec.switches);
            prop_assert!(rec.objective <= bound);
            prop_assert!(rec.objective >= rec.opt);
        }
    }
}

/// A class of `ell` random sequences whose best member is `mu` edits away from the input.
fn planted(rng: &mut RngStream, ell: usize, len: usize, universe: usize, mu: usize) -> (CacheHypothesisClass, Vec<PageId>) {
    let truth = random_seq(rng, len, universe);
    let mut hyps = Vec::new();
    for i in 0..ell {
        let mut h = truth.clone();
        let edits = if i == 0 { mu } else { mu + len / 4 };
        let mut pos: Vec<usize> = (0..len).collect();
        rng.shuffle(&mut pos);
        for &p in &pos[..edits] {
            h[p] = (h[p] + 1 + rng.uniform_index(universe - 1).unwrap()) % universe;
        }
        hyps.push(h);
    }
    rng.shuffle(&mut hyps);
    (CacheHypothesisClass::new(hyps, universe).unwrap(), truth)
}

#[test]
fn hedge_mistakes_and_switch_rate() {
    let k = 5;
    let ell = 8;
    let mut mistakes = Vec::new();
    let mut switch_gap = Vec::new();
    for seed in 0..200 {
        let mut rng = RngStream::new(seed, 2);
        let (class, truth) = planted(&mut rng, ell, 80, 10, 5);
        let mu_star = class.best_mistakes(&truth) as f64;
        let mut p = HedgePredictor::new(class, k, rng.split(1));
        for (t, &r) in truth.iter().enumerate() {
            p.observe(t, r).unwrap();
        }
        let s = p.stream();
        mistakes.push(s.mistakes() as f64 - ((1.0 + 1.0 / k as f64) * mu_star + k as f64 * (ell as f64).ln()));
        switch_gap.push(s.switches() as f64 - p.expected_switches());
    }
    let (m, se) = mean_stderr(&mistakes);
    assert!(m <= 3.0 * se, "mistake excess {m} (stderr {se})");
    let (g, se) = mean_stderr(&switch_gap);
    assert!(g.abs() <= 3.0 * se.max(1e-9), "switches minus sum of TVD: {g} (stderr {se})");
}
