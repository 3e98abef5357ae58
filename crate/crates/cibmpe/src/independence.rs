//! Computational verification of strategy independence of beliefs.
//!
//! The solvers rely on the common-information belief update depending
//! only on the realized increment, never on which prescriptions produced
//! it. That property is never trusted from a structure's claim: this
//! checker enumerates, stage by stage, every belief reachable under any
//! pure prescription pair and tests that all pairs giving an increment
//! positive probability agree on the posterior. A failure comes with a
//! concrete witness.
//!
//! By default only pure pairs are tested; for the built-in structures
//! that is exhaustive for behavioral play as well, and a randomized
//! behavioral re-test is available as defense in depth for custom
//! structures (whether pure coverage implies behavioral coverage in
//! general is open; the sampling mode documents rather than resolves
//! that).

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::belief::{
    initial_belief, joint_forward_distribution, pure_prescriptions, Belief, Prescription,
};
use crate::error::{Error, Result};
use crate::game::ValidatedGame;
use crate::info::InformationStructure;
use crate::rational::{zero, Rational};

#[derive(Debug, Clone)]
pub struct IndependenceOptions {
    /// Frontier cap per stage; exceeding it makes the check inconclusive.
    pub max_beliefs_per_stage: usize,
    /// Number of randomized fully-mixed behavioral pairs re-tested per
    /// reachable belief (0 disables the re-test).
    pub behavioral_samples: usize,
    /// Seed for the behavioral sampling.
    pub seed: u64,
}

impl Default for IndependenceOptions {
    fn default() -> Self {
        IndependenceOptions {
            max_beliefs_per_stage: 100_000,
            behavioral_samples: 0,
            seed: 0x5eed_cafe,
        }
    }
}

/// A concrete violation: two prescription pairs that both give the
/// increment positive probability but disagree on the posterior.
#[derive(Debug, Clone)]
pub struct IndependenceWitness {
    /// 0-based boundary index (`stage -> stage + 1`).
    pub stage: usize,
    pub belief: Belief,
    pub z: usize,
    pub z_label: String,
    pub pair_a: (Vec<usize>, Vec<usize>),
    pub pair_b: (Vec<usize>, Vec<usize>),
    pub posterior_a: Belief,
    pub posterior_b: Belief,
}

impl IndependenceWitness {
    pub fn describe(&self) -> String {
        format!(
            "boundary {} -> {}: from belief [{}], increment `{}` yields posterior [{}] under \
             prescriptions ({:?}, {:?}) but [{}] under ({:?}, {:?})",
            self.stage + 1,
            self.stage + 2,
            self.belief.canonical_string(),
            self.z_label,
            self.posterior_a.canonical_string(),
            self.pair_a.0,
            self.pair_a.1,
            self.posterior_b.canonical_string(),
            self.pair_b.0,
            self.pair_b.1,
        )
    }
}

#[derive(Debug, Clone)]
pub enum IndependenceOutcome {
    Pass,
    Fail(Box<IndependenceWitness>),
    Inconclusive { stage: usize, frontier: usize },
}

#[derive(Debug, Clone)]
pub struct IndependenceReport {
    pub structure: String,
    pub outcome: IndependenceOutcome,
    pub stages_checked: usize,
    pub beliefs_checked: usize,
    pub pure_pairs_checked: usize,
    pub behavioral_samples: usize,
}

impl IndependenceReport {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, IndependenceOutcome::Pass)
    }
}

/// Per-belief result: the posterior recorded per increment (in
/// first-encounter order), the number of pure pairs tested, and a
/// witness if two pairs disagreed.
type CellOutcome = Result<(Vec<(usize, Belief)>, usize, Option<Box<IndependenceWitness>>), Error>;

fn check_belief(
    game: &ValidatedGame,
    s: &InformationStructure,
    t: usize,
    belief: &Belief,
    options: &IndependenceOptions,
    cell_seed: u64,
) -> CellOutcome {
    let sup1 = belief.type_support(0);
    let sup2 = belief.type_support(1);
    let all1 = pure_prescriptions(&sup1, s.private_count(0, t), game.actions(0).len());
    let all2 = pure_prescriptions(&sup2, s.private_count(1, t), game.actions(1).len());

    let mut per_z: HashMap<usize, (Belief, (Vec<usize>, Vec<usize>))> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    let mut pairs = 0usize;

    fn check_pair(
        game: &ValidatedGame,
        s: &InformationStructure,
        t: usize,
        belief: &Belief,
        g1: &Prescription,
        g2: &Prescription,
        raw_pair: (Vec<usize>, Vec<usize>),
        per_z: &mut HashMap<usize, (Belief, (Vec<usize>, Vec<usize>))>,
        order: &mut Vec<usize>,
    ) -> Result<Option<Box<IndependenceWitness>>> {
        let fwd = joint_forward_distribution(game, s, belief, g1, g2)?;
        for (z, mass) in fwd.z_marginal().into_iter().enumerate() {
            if mass == zero() {
                continue;
            }
            let posterior = fwd.next_belief_given(z, s.increment_space(t).label(z))?;
            match per_z.get(&z) {
                None => {
                    per_z.insert(z, (posterior, raw_pair.clone()));
                    order.push(z);
                }
                Some((existing, first_pair)) => {
                    if existing != &posterior {
                        return Ok(Some(Box::new(IndependenceWitness {
                            stage: t,
                            belief: belief.clone(),
                            z,
                            z_label: s.increment_space(t).label(z).to_string(),
                            pair_a: first_pair.clone(),
                            pair_b: raw_pair,
                            posterior_a: existing.clone(),
                            posterior_b: posterior,
                        })));
                    }
                }
            }
        }
        Ok(None)
    }

    for a1 in &all1 {
        for a2 in &all2 {
            pairs += 1;
            let g1 = Prescription::Pure(a1.clone());
            let g2 = Prescription::Pure(a2.clone());
            if let Some(w) = check_pair(
                game,
                s,
                t,
                belief,
                &g1,
                &g2,
                (a1.clone(), a2.clone()),
                &mut per_z,
                &mut order,
            )? {
                let posteriors = order.iter().map(|&z| (z, per_z[&z].0.clone())).collect();
                return Ok((posteriors, pairs, Some(w)));
            }
        }
    }

    // Randomized behavioral re-test with fully mixed prescriptions: such
    // a pair reaches every increment some pure pair reaches, so each of
    // its posteriors must match the recorded one.
    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed);
    for _ in 0..options.behavioral_samples {
        let mut sample = |n_types: usize, n_actions: usize| {
            let rows: Vec<Vec<Rational>> = (0..n_types)
                .map(|_| {
                    let raw: Vec<i64> = (0..n_actions).map(|_| rng.gen_range(1..=5)).collect();
                    let total: i64 = raw.iter().sum();
                    raw.into_iter().map(|w| crate::rational::rat(w, total)).collect()
                })
                .collect();
            Prescription::Behavioral(rows)
        };
        let g1 = sample(s.private_count(0, t), game.actions(0).len());
        let g2 = sample(s.private_count(1, t), game.actions(1).len());
        if let Some(w) = check_pair(
            game,
            s,
            t,
            belief,
            &g1,
            &g2,
            (Vec::new(), Vec::new()),
            &mut per_z,
            &mut order,
        )? {
            let posteriors = order.iter().map(|&z| (z, per_z[&z].0.clone())).collect();
            return Ok((posteriors, pairs, Some(w)));
        }
    }

    let posteriors = order.iter().map(|&z| (z, per_z[&z].0.clone())).collect();
    Ok((posteriors, pairs, None))
}

/// Enumerates every belief reachable under any pure prescription pair
/// and verifies that the posterior after each increment is the same for
/// all pairs that give the increment positive probability.
pub fn check_strategy_independence(
    game: &ValidatedGame,
    s: &InformationStructure,
    options: &IndependenceOptions,
) -> Result<IndependenceReport> {
    s.check_game(game)?;
    let mut frontier = vec![initial_belief(game, s)?];
    let mut beliefs_checked = 0usize;
    let mut pure_pairs_checked = 0usize;
    let mut behavioral_samples = 0usize;

    for t in 0..game.horizon().saturating_sub(1) {
        beliefs_checked += frontier.len();
        let cells: Vec<CellOutcome> = frontier
            .par_iter()
            .enumerate()
            .map(|(idx, belief)| {
                check_belief(
                    game,
                    s,
                    t,
                    belief,
                    options,
                    options
                        .seed
                        .wrapping_add((t as u64) << 32)
                        .wrapping_add(idx as u64),
                )
            })
            .collect();

        let mut next: Vec<Belief> = Vec::new();
        let mut seen: HashMap<Belief, usize> = HashMap::new();
        for cell in cells {
            let (posteriors, pairs, witness) = cell?;
            pure_pairs_checked += pairs;
            behavioral_samples += options.behavioral_samples;
            if let Some(w) = witness {
                return Ok(IndependenceReport {
                    structure: s.name().to_string(),
                    outcome: IndependenceOutcome::Fail(w),
                    stages_checked: t + 1,
                    beliefs_checked,
                    pure_pairs_checked,
                    behavioral_samples,
                });
            }
            for (_z, posterior) in posteriors {
                if !seen.contains_key(&posterior) {
                    seen.insert(posterior.clone(), next.len());
                    next.push(posterior);
                }
            }
        }

        if next.len() > options.max_beliefs_per_stage {
            return Ok(IndependenceReport {
                structure: s.name().to_string(),
                outcome: IndependenceOutcome::Inconclusive {
                    stage: t + 1,
                    frontier: next.len(),
                },
                stages_checked: t + 1,
                beliefs_checked,
                pure_pairs_checked,
                behavioral_samples,
            });
        }
        frontier = next;
    }

    Ok(IndependenceReport {
        structure: s.name().to_string(),
        outcome: IndependenceOutcome::Pass,
        stages_checked: game.horizon().saturating_sub(1),
        beliefs_checked,
        pure_pairs_checked,
        behavioral_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{build_information_structure, DelayCase, StructureKind};
    use crate::testgames;

    fn check(game: &ValidatedGame, kind: &StructureKind) -> IndependenceReport {
        let s = build_information_structure(kind, game).unwrap();
        check_strategy_independence(game, &s, &IndependenceOptions::default()).unwrap()
    }

    #[test]
    fn one_step_delay_passes_on_the_example() {
        let game = testgames::bsc_delayed_sharing(3);
        let report = check(&game, &StructureKind::OneStepDelay);
        assert!(report.passed(), "{:?}", report.outcome);
        assert!(report.beliefs_checked >= 4);
    }

    #[test]
    fn uncontrolled_passes_with_delay_two() {
        let game = testgames::uncontrolled_game(3);
        let report = check(&game, &StructureKind::Uncontrolled { delay: 2 });
        assert!(report.passed(), "{:?}", report.outcome);
    }

    #[test]
    fn builtin_structures_pass_on_compatible_games() {
        let game = testgames::bsc_delayed_sharing(3);
        for kind in [
            StructureKind::OneStepDelay,
            StructureKind::OneDirectionalOneStep,
            StructureKind::Symmetric,
        ] {
            let report = check(&game, &kind);
            assert!(report.passed(), "{kind:?}: {:?}", report.outcome);
        }
        let game = testgames::single_controller_game(3);
        for case in [DelayCase::A, DelayCase::B] {
            let report = check(
                &game,
                &StructureKind::SingleControllerDelay { case, delay: 2 },
            );
            assert!(report.passed(), "{case:?}: {:?}", report.outcome);
        }
        for noisy in [false, true] {
            let (game, split) = testgames::global_local_game(3, noisy);
            let report = check(&game, &StructureKind::GlobalLocal(split));
            assert!(report.passed(), "noisy={noisy}: {:?}", report.outcome);
        }
    }

    #[test]
    fn two_step_delay_fails_with_witness() {
        let game = testgames::bsc_delayed_sharing(2);
        let report = check(&game, &StructureKind::TwoStepDelay);
        match report.outcome {
            IndependenceOutcome::Fail(w) => {
                assert_eq!(w.stage, 0);
                assert_ne!(w.posterior_a, w.posterior_b);
                assert_ne!(w.pair_a, w.pair_b);
                assert!(w.describe().contains("increment"));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    /// The shared-channel pattern with a noisy channel only keeps the
    /// belief strategy independent when next local states are drawn
    /// independently of the next global state; with a correlated kernel
    /// the checker must find a witness.
    #[test]
    fn noisy_global_local_with_correlated_kernel_fails() {
        let (game, split) = testgames::global_local_game_correlated_noisy();
        let s = build_information_structure(&StructureKind::GlobalLocal(split), &game).unwrap();
        let report =
            check_strategy_independence(&game, &s, &IndependenceOptions::default()).unwrap();
        assert!(
            matches!(report.outcome, IndependenceOutcome::Fail(_)),
            "{:?}",
            report.outcome
        );
    }

    #[test]
    fn behavioral_sampling_agrees_on_independent_structures() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = build_information_structure(&StructureKind::OneStepDelay, &game).unwrap();
        let report = check_strategy_independence(
            &game,
            &s,
            &IndependenceOptions {
                behavioral_samples: 5,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(report.passed());
        assert!(report.behavioral_samples > 0);
    }

    #[test]
    fn budget_yields_inconclusive() {
        let game = testgames::bsc_delayed_sharing(3);
        let s = build_information_structure(&StructureKind::OneStepDelay, &game).unwrap();
        let report = check_strategy_independence(
            &game,
            &s,
            &IndependenceOptions {
                max_beliefs_per_stage: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(matches!(
            report.outcome,
            IndependenceOutcome::Inconclusive { .. }
        ));
    }
}
