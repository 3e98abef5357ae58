//! Backward-induction drivers over the reachable-belief graph.
//!
//! Three solve modes share one sweep: for each stage from the horizon
//! backwards, every reachable belief gets a one-stage Bayesian game
//! built against the next stage's value table and solved — exhaustively
//! for pure equilibria (with a pluggable selection rule among them), by
//! support enumeration for behavioral equilibria, or by joint
//! minimization over prescription pairs for teams (which needs no
//! strategy independence and therefore runs on the general-mode graph).

use rayon::prelude::*;

use crate::belief::{
    belief_update_general, enumerate_reachable_beliefs, pure_prescriptions, Belief, BeliefGraph,
    EnumerationMode, EnumerationOptions, Prescription,
};
use crate::error::{Error, Result};
use crate::game::{Controller, ValidatedGame};
use crate::independence::IndependenceReport;
use crate::info::InformationStructure;
use crate::rational::{format_rational, zero, Rational};
use crate::stage_game::{
    build_stage_game, enumerate_pure_bne, solve_mixed_bne, StageEquilibrium, ValueLookup,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    Pure,
    Behavioral,
    Team,
}

impl SolveMode {
    pub fn name(&self) -> &'static str {
        match self {
            SolveMode::Pure => "pure",
            SolveMode::Behavioral => "behavioral",
            SolveMode::Team => "team",
        }
    }
}

/// Proof that the strategy-independence requirement was addressed: either
/// a passing report or an explicit decision to skip the check.
#[derive(Debug, Clone)]
pub enum IndependenceGate {
    Verified(IndependenceReport),
    Forced,
}

impl IndependenceGate {
    fn ensure(&self) -> Result<()> {
        match self {
            IndependenceGate::Forced => Ok(()),
            IndependenceGate::Verified(report) => match &report.outcome {
                crate::independence::IndependenceOutcome::Pass => Ok(()),
                crate::independence::IndependenceOutcome::Fail(w) => {
                    Err(Error::IndependenceFailed(w.describe()))
                }
                crate::independence::IndependenceOutcome::Inconclusive { stage, frontier } => {
                    Err(Error::IndependenceInconclusive {
                        stage: *stage,
                        frontier: *frontier,
                    })
                }
            },
        }
    }
}

/// How to pick among multiple pure stage equilibria.
#[derive(Debug, Clone)]
pub enum SelectionRule {
    /// First equilibrium in prescription-encoding order (the default).
    LexFirst,
    /// The same index at every belief.
    ByIndex(usize),
    /// Explicit per-stage / per-belief overrides; the first matching
    /// override applies, everything else falls back to lex-first.
    Overrides(Vec<SelectionOverride>),
}

#[derive(Debug, Clone)]
pub struct SelectionOverride {
    /// 0-based stage this override applies to (`None` = any stage).
    pub stage: Option<usize>,
    /// Canonical weight string of the belief (`None` = any belief).
    pub belief: Option<String>,
    pub pick: SelectionPick,
}

#[derive(Debug, Clone)]
pub enum SelectionPick {
    Index(usize),
    /// Select the equilibrium with exactly this pure prescription pair.
    Prescriptions(Vec<usize>, Vec<usize>),
}

fn apply_selection(
    rule: &SelectionRule,
    t: usize,
    belief: &Belief,
    eqs: &[StageEquilibrium],
) -> Result<usize> {
    let fail = |reason: String| Error::SelectionFailed {
        stage: t + 1,
        belief: belief.canonical_string(),
        reason,
    };
    match rule {
        SelectionRule::LexFirst => Ok(0),
        SelectionRule::ByIndex(k) => {
            if *k < eqs.len() {
                Ok(*k)
            } else {
                Err(fail(format!("index {k} out of {} equilibria", eqs.len())))
            }
        }
        SelectionRule::Overrides(overrides) => {
            for o in overrides {
                let stage_ok = o.stage.is_none_or(|s| s == t);
                let belief_ok = o
                    .belief
                    .as_ref()
                    .is_none_or(|b| *b == belief.canonical_string());
                if !(stage_ok && belief_ok) {
                    continue;
                }
                return match &o.pick {
                    SelectionPick::Index(k) => {
                        if *k < eqs.len() {
                            Ok(*k)
                        } else {
                            Err(fail(format!("index {k} out of {} equilibria", eqs.len())))
                        }
                    }
                    SelectionPick::Prescriptions(a1, a2) => eqs
                        .iter()
                        .position(|e| {
                            e.prescriptions
                                == (
                                    Prescription::Pure(a1.clone()),
                                    Prescription::Pure(a2.clone()),
                                )
                        })
                        .ok_or_else(|| {
                            fail(format!(
                                "no stage equilibrium with prescriptions ({a1:?}, {a2:?})"
                            ))
                        }),
                };
            }
            Ok(0)
        }
    }
}

/// The packaged output of a solve: the belief graph, per-belief value
/// and policy tables, and (in pure mode) every stage equilibrium found
/// along with the index the selection rule chose.
#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    pub mode: SolveMode,
    pub graph: BeliefGraph,
    /// Per stage, per graph node. In team mode both entries carry the
    /// single team value.
    pub values: Vec<Vec<(Rational, Rational)>>,
    pub policies: Vec<Vec<(Prescription, Prescription)>>,
    /// Pure mode only: all pure stage equilibria per node.
    pub all_equilibria: Option<Vec<Vec<Vec<StageEquilibrium>>>>,
    /// Pure mode only: which equilibrium index was selected per node.
    pub selection_trace: Option<Vec<Vec<usize>>>,
}

impl EquilibriumResult {
    /// The value pair at the (unique) initial belief.
    pub fn stage1_values(&self) -> (Rational, Rational) {
        self.values[0][0].clone()
    }

    /// Continuation lookup for rebuilding stage games at stage `t`.
    pub fn value_lookup(&self, t: usize) -> ValueLookup {
        let mut table = ValueLookup::new();
        for (idx, belief) in self.graph.beliefs(t).iter().enumerate() {
            table.insert(belief.clone(), self.values[t][idx].clone());
        }
        table
    }
}

fn graph_or_budget_error(graph: BeliefGraph) -> Result<BeliefGraph> {
    if let Some(stage) = graph.budget_stage() {
        return Err(Error::BudgetExceeded {
            stage: stage + 1,
            frontier: graph.count(stage),
        });
    }
    Ok(graph)
}

struct NodeSolved {
    values: (Rational, Rational),
    policy: (Prescription, Prescription),
    all: Vec<StageEquilibrium>,
    chosen: usize,
}

/// Backward induction with pure stage equilibria. Fails with the
/// offending stage and belief if some stage game has none (the signal to
/// use the behavioral solver instead).
pub fn solve_pure(
    game: &ValidatedGame,
    s: &InformationStructure,
    selection: &SelectionRule,
    gate: &IndependenceGate,
    options: &EnumerationOptions,
) -> Result<EquilibriumResult> {
    gate.ensure()?;
    let graph = graph_or_budget_error(enumerate_reachable_beliefs(
        game,
        s,
        EnumerationMode::StrategyFree,
        options,
    )?)?;
    let horizon = game.horizon();
    let mut values: Vec<Vec<(Rational, Rational)>> = vec![Vec::new(); horizon];
    let mut policies: Vec<Vec<(Prescription, Prescription)>> = vec![Vec::new(); horizon];
    let mut all_equilibria: Vec<Vec<Vec<StageEquilibrium>>> = vec![Vec::new(); horizon];
    let mut trace: Vec<Vec<usize>> = vec![Vec::new(); horizon];

    for t in (0..horizon).rev() {
        let lookup = if t + 1 < horizon {
            let mut table = ValueLookup::new();
            for (idx, belief) in graph.beliefs(t + 1).iter().enumerate() {
                table.insert(belief.clone(), values[t + 1][idx].clone());
            }
            Some(table)
        } else {
            None
        };
        let solved: Vec<Result<NodeSolved>> = graph
            .beliefs(t)
            .par_iter()
            .map(|belief| {
                let sg = build_stage_game(game, s, belief, lookup.as_ref())?;
                let eqs = enumerate_pure_bne(&sg);
                if eqs.is_empty() {
                    return Err(Error::NoPureEquilibrium {
                        stage: t + 1,
                        belief: belief.canonical_string(),
                    });
                }
                let chosen = apply_selection(selection, t, belief, &eqs)?;
                Ok(NodeSolved {
                    values: eqs[chosen].values.clone(),
                    policy: eqs[chosen].prescriptions.clone(),
                    all: eqs,
                    chosen,
                })
            })
            .collect();
        for node in solved {
            let node = node?;
            values[t].push(node.values);
            policies[t].push(node.policy);
            all_equilibria[t].push(node.all);
            trace[t].push(node.chosen);
        }
    }

    Ok(EquilibriumResult {
        mode: SolveMode::Pure,
        graph,
        values,
        policies,
        all_equilibria: Some(all_equilibria),
        selection_trace: Some(trace),
    })
}

/// Backward induction with (possibly mixed) behavioral stage equilibria;
/// succeeds on every validated input.
pub fn solve_behavioral(
    game: &ValidatedGame,
    s: &InformationStructure,
    gate: &IndependenceGate,
    options: &EnumerationOptions,
) -> Result<EquilibriumResult> {
    gate.ensure()?;
    let graph = graph_or_budget_error(enumerate_reachable_beliefs(
        game,
        s,
        EnumerationMode::StrategyFree,
        options,
    )?)?;
    let horizon = game.horizon();
    let mut values: Vec<Vec<(Rational, Rational)>> = vec![Vec::new(); horizon];
    let mut policies: Vec<Vec<(Prescription, Prescription)>> = vec![Vec::new(); horizon];

    for t in (0..horizon).rev() {
        let lookup = if t + 1 < horizon {
            let mut table = ValueLookup::new();
            for (idx, belief) in graph.beliefs(t + 1).iter().enumerate() {
                table.insert(belief.clone(), values[t + 1][idx].clone());
            }
            Some(table)
        } else {
            None
        };
        let solved: Vec<Result<(Prescription, Prescription, (Rational, Rational))>> = graph
            .beliefs(t)
            .par_iter()
            .map(|belief| {
                let sg = build_stage_game(game, s, belief, lookup.as_ref())?;
                let eq = solve_mixed_bne(&sg)?;
                Ok((eq.prescriptions.0, eq.prescriptions.1, eq.values))
            })
            .collect();
        for node in solved {
            let (g1, g2, v) = node?;
            values[t].push(v);
            policies[t].push((g1, g2));
        }
    }

    Ok(EquilibriumResult {
        mode: SolveMode::Behavioral,
        graph,
        values,
        policies,
        all_equilibria: None,
        selection_trace: None,
    })
}

/// Joint-minimization dynamic program for teams (identical cost
/// tensors). Belief updates depend on the prescriptions here, so the
/// sweep runs over the general-mode graph and needs no independence
/// check. Restricting to pure prescription pairs is lossless: a finite
/// team always has a deterministic globally optimal profile.
pub fn solve_team(
    game: &ValidatedGame,
    s: &InformationStructure,
    options: &EnumerationOptions,
) -> Result<EquilibriumResult> {
    for x in 0..game.states().len() {
        for u1 in 0..game.actions(0).len() {
            for u2 in 0..game.actions(1).len() {
                let (c1, c2) = (game.cost(0, x, u1, u2), game.cost(1, x, u1, u2));
                if c1 != c2 {
                    return Err(Error::NotATeam {
                        x: game.states().name(x).to_string(),
                        u1: game.actions(0).name(u1).to_string(),
                        u2: game.actions(1).name(u2).to_string(),
                        c1: format_rational(c1),
                        c2: format_rational(c2),
                    });
                }
            }
        }
    }

    let graph = graph_or_budget_error(enumerate_reachable_beliefs(
        game,
        s,
        EnumerationMode::General,
        options,
    )?)?;
    let horizon = game.horizon();
    let mut values: Vec<Vec<(Rational, Rational)>> = vec![Vec::new(); horizon];
    let mut policies: Vec<Vec<(Prescription, Prescription)>> = vec![Vec::new(); horizon];

    for t in (0..horizon).rev() {
        let next_values: Vec<Rational> = if t + 1 < horizon {
            values[t + 1].iter().map(|(v, _)| v.clone()).collect()
        } else {
            Vec::new()
        };
        let solved: Vec<Result<(Prescription, Prescription, Rational)>> = graph
            .beliefs(t)
            .par_iter()
            .map(|belief| {
                let sup1 = belief.type_support(0);
                let sup2 = belief.type_support(1);
                let all1 = pure_prescriptions(&sup1, s.private_count(0, t), game.actions(0).len());
                let all2 = pure_prescriptions(&sup2, s.private_count(1, t), game.actions(1).len());
                let mut best: Option<(Rational, (Vec<usize>, Vec<usize>))> = None;
                for a1 in &all1 {
                    for a2 in &all2 {
                        let mut total = zero();
                        for (x, p1, p2, w) in belief.support() {
                            total += w.clone() * game.cost(0, x, a1[p1], a2[p2]);
                        }
                        if t + 1 < horizon {
                            let g1 = Prescription::Pure(a1.clone());
                            let g2 = Prescription::Pure(a2.clone());
                            let fwd = crate::belief::joint_forward_distribution(
                                game, s, belief, &g1, &g2,
                            )?;
                            for (z, mass) in fwd.z_marginal().into_iter().enumerate() {
                                if mass == zero() {
                                    continue;
                                }
                                let next =
                                    fwd.next_belief_given(z, s.increment_space(t).label(z))?;
                                let idx = graph.find(&next).ok_or_else(|| {
                                    Error::Internal(format!(
                                        "successor belief missing from graph: [{}]",
                                        next.canonical_string()
                                    ))
                                })?;
                                total += mass * &next_values[idx];
                            }
                        }
                        let better = match &best {
                            None => true,
                            Some((b, _)) => total < *b,
                        };
                        if better {
                            best = Some((total, (a1.clone(), a2.clone())));
                        }
                    }
                }
                let (value, (a1, a2)) = best.expect("nonempty prescription sets");
                Ok((Prescription::Pure(a1), Prescription::Pure(a2), value))
            })
            .collect();
        for node in solved {
            let (g1, g2, v) = node?;
            values[t].push((v.clone(), v));
            policies[t].push((g1, g2));
        }
    }

    Ok(EquilibriumResult {
        mode: SolveMode::Team,
        graph,
        values,
        policies,
        all_equilibria: None,
        selection_trace: None,
    })
}

/// A full strategy profile for both controllers, keyed by (stage,
/// belief-graph node) with replay of common-information increments as
/// the resolver from common information to beliefs. Controller `i`'s
/// control law at stage `t` maps `(p, c)` to the stage prescription at
/// the belief reached by `c`, applied to `p`.
#[derive(Debug, Clone)]
pub struct StrategyProfile {
    mode: SolveMode,
    graph: BeliefGraph,
    policies: Vec<Vec<(Prescription, Prescription)>>,
}

impl StrategyProfile {
    pub fn mode(&self) -> SolveMode {
        self.mode
    }

    pub fn graph(&self) -> &BeliefGraph {
        &self.graph
    }

    pub fn stage_count(&self) -> usize {
        self.policies.len()
    }

    pub fn prescriptions(&self, t: usize, node: usize) -> &(Prescription, Prescription) {
        &self.policies[t][node]
    }

    pub fn policies(&self) -> &[Vec<(Prescription, Prescription)>] {
        &self.policies
    }

    /// The action distribution of controller `i` at stage `t`, node
    /// `node`, private realization `p`.
    pub fn action_weights(&self, i: Controller, t: usize, node: usize, p: usize) -> Vec<(usize, Rational)> {
        let (g1, g2) = &self.policies[t][node];
        if i == 0 { g1.support_of(p) } else { g2.support_of(p) }
    }

    /// Follows the increment `z` out of `(t, node)`. For strategy-free
    /// graphs the increment alone identifies the edge; for team profiles
    /// the edge must additionally match the policy's prescription pair.
    pub fn advance(&self, t: usize, node: usize, z: usize) -> Result<usize> {
        let found = match self.mode {
            SolveMode::Team => {
                let (g1, g2) = &self.policies[t][node];
                let (Prescription::Pure(a1), Prescription::Pure(a2)) = (g1, g2) else {
                    return Err(Error::Internal("team policy must be pure".to_string()));
                };
                self.graph
                    .successor_with_pair(t, node, (a1.as_slice(), a2.as_slice()), z)
            }
            _ => self.graph.successor(t, node, z),
        };
        found.ok_or_else(|| {
            Error::MissingProfileEntry(format!(
                "stage {}, belief node {}, increment index {}",
                t + 1,
                node,
                z
            ))
        })
    }

    /// Builds a profile directly from per-node prescription tables (used
    /// when loading a serialized profile).
    pub fn from_parts(
        mode: SolveMode,
        graph: BeliefGraph,
        policies: Vec<Vec<(Prescription, Prescription)>>,
    ) -> Self {
        StrategyProfile { mode, graph, policies }
    }
}

/// Converts a solve result into the controllers' strategy profile.
pub fn policy_to_control_laws(
    result: &EquilibriumResult,
    s: &InformationStructure,
) -> Result<StrategyProfile> {
    if result.policies.len() != s.horizon() {
        return Err(Error::ProfileMismatch(format!(
            "result has {} stages, structure has {}",
            result.policies.len(),
            s.horizon()
        )));
    }
    Ok(StrategyProfile {
        mode: result.mode,
        graph: result.graph.clone(),
        policies: result.policies.clone(),
    })
}
