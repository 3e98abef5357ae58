//! Common-information beliefs and their exact dynamics.
//!
//! A [`Belief`] is the conditional distribution over (state, private
//! info 1, private info 2) given the common information, held in a
//! canonical dense vector of reduced rationals — two beliefs are equal
//! iff their stage and weight vectors are identical. The forward model
//! is a single exact sum over actions, next states and next
//! observations ([`joint_forward_distribution`]); every update operation
//! is a marginal or conditional of it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::game::{Controller, ValidatedGame};
use crate::info::{apply_increment_map, apply_private_update, InformationStructure};
use crate::rational::{format_vector, one, zero, Rational};

/// Exact probability vector over `(x, p1, p2)` at a fixed stage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Belief {
    stage: usize,
    dims: (usize, usize, usize),
    weights: Vec<Rational>,
}

impl Belief {
    pub fn new(stage: usize, dims: (usize, usize, usize), weights: Vec<Rational>) -> Result<Self> {
        let expected = dims.0 * dims.1 * dims.2;
        if weights.len() != expected {
            return Err(Error::ShapeMismatch {
                what: "belief weights".to_string(),
                expected: format!("{expected} entries"),
                got: format!("{}", weights.len()),
            });
        }
        let total: Rational = weights.iter().cloned().sum();
        if total != one() || weights.iter().any(|w| w < &zero()) {
            return Err(Error::ShapeMismatch {
                what: "belief weights".to_string(),
                expected: "a nonnegative vector summing to 1".to_string(),
                got: format!("total {}", crate::rational::format_rational(&total)),
            });
        }
        Ok(Belief { stage, dims, weights })
    }

    /// 0-based stage this belief lives at.
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    fn offset(&self, x: usize, p1: usize, p2: usize) -> usize {
        (x * self.dims.1 + p1) * self.dims.2 + p2
    }

    pub fn weight(&self, x: usize, p1: usize, p2: usize) -> &Rational {
        &self.weights[self.offset(x, p1, p2)]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// Support atoms in declared order.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize, usize, &Rational)> {
        let (_, np1, np2) = self.dims;
        self.weights.iter().enumerate().filter_map(move |(k, w)| {
            if w > &zero() {
                let p2 = k % np2;
                let p1 = (k / np2) % np1;
                let x = k / (np1 * np2);
                Some((x, p1, p2, w))
            } else {
                None
            }
        })
    }

    /// Type indices of controller `i` with positive marginal mass.
    pub fn type_support(&self, i: Controller) -> Vec<usize> {
        let n = if i == 0 { self.dims.1 } else { self.dims.2 };
        let mut present = vec![false; n];
        for (_, p1, p2, _) in self.support() {
            present[if i == 0 { p1 } else { p2 }] = true;
        }
        (0..n).filter(|&p| present[p]).collect()
    }

    /// Marginal probability of controller `i` having type `p`.
    pub fn type_marginal(&self, i: Controller, p: usize) -> Rational {
        let mut total = zero();
        for (_, p1, p2, w) in self.support() {
            if (if i == 0 { p1 } else { p2 }) == p {
                total += w;
            }
        }
        total
    }

    /// Marginal over states (useful in reports).
    pub fn state_marginal(&self, x: usize) -> Rational {
        let mut total = zero();
        for (xx, _, _, w) in self.support() {
            if xx == x {
                total += w;
            }
        }
        total
    }

    /// Canonical printable form: the full weight vector as `p/q` entries.
    pub fn canonical_string(&self) -> String {
        format_vector(&self.weights)
    }
}

/// A virtual player's prescription: one action (or one exact action
/// distribution) per private-information realization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Prescription {
    Pure(Vec<usize>),
    Behavioral(Vec<Vec<Rational>>),
}

impl Prescription {
    pub fn n_types(&self) -> usize {
        match self {
            Prescription::Pure(v) => v.len(),
            Prescription::Behavioral(v) => v.len(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, Prescription::Pure(_))
    }

    /// The actions of type `p` that carry positive weight.
    pub fn support_of(&self, p: usize) -> Vec<(usize, Rational)> {
        match self {
            Prescription::Pure(v) => vec![(v[p], one())],
            Prescription::Behavioral(rows) => rows[p]
                .iter()
                .enumerate()
                .filter(|(_, w)| *w > &zero())
                .map(|(u, w)| (u, w.clone()))
                .collect(),
        }
    }

    pub fn weight(&self, p: usize, u: usize) -> Rational {
        match self {
            Prescription::Pure(v) => {
                if v[p] == u {
                    one()
                } else {
                    zero()
                }
            }
            Prescription::Behavioral(rows) => rows[p][u].clone(),
        }
    }

    /// Totality and exact normalization of behavioral rows.
    pub fn validate(&self, n_types: usize, n_actions: usize) -> Result<()> {
        if self.n_types() != n_types {
            return Err(Error::ShapeMismatch {
                what: "prescription".to_string(),
                expected: format!("{n_types} types"),
                got: format!("{}", self.n_types()),
            });
        }
        match self {
            Prescription::Pure(v) => {
                if let Some(&u) = v.iter().find(|&&u| u >= n_actions) {
                    return Err(Error::OutOfRange {
                        what: "prescription action".to_string(),
                        detail: format!("index {u} with {n_actions} actions"),
                    });
                }
            }
            Prescription::Behavioral(rows) => {
                for (p, row) in rows.iter().enumerate() {
                    if row.len() != n_actions {
                        return Err(Error::ShapeMismatch {
                            what: format!("behavioral row of type {p}"),
                            expected: format!("{n_actions} weights"),
                            got: format!("{}", row.len()),
                        });
                    }
                    let total: Rational = row.iter().cloned().sum();
                    if total != one() || row.iter().any(|w| w < &zero()) {
                        return Err(Error::ShapeMismatch {
                            what: format!("behavioral row of type {p}"),
                            expected: "nonnegative weights summing to 1".to_string(),
                            got: format!("total {}", crate::rational::format_rational(&total)),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Enumerates all pure prescriptions over the given support slots in
/// lexicographic encoding order (earlier support type most significant,
/// actions ascending); types outside the support are pinned to action 0.
pub(crate) fn pure_prescriptions(
    support: &[usize],
    n_types: usize,
    n_actions: usize,
) -> Vec<Vec<usize>> {
    let count = n_actions.checked_pow(support.len() as u32).unwrap_or(usize::MAX);
    let mut out = Vec::with_capacity(count);
    let mut assignment = vec![0usize; support.len()];
    loop {
        let mut full = vec![0usize; n_types];
        for (slot, &p) in support.iter().enumerate() {
            full[p] = assignment[slot];
        }
        out.push(full);
        let mut axis = support.len();
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            assignment[axis] += 1;
            if assignment[axis] < n_actions {
                break;
            }
            assignment[axis] = 0;
        }
        if support.is_empty() {
            return out;
        }
    }
}

/// Key of the joint forward distribution: `(x, p1, p2, x', p1', p2', z)`.
pub type JointKey = (usize, usize, usize, usize, usize, usize, usize);

/// Exact one-step joint distribution of (current atom, next atom,
/// increment) given a belief and a prescription pair.
#[derive(Debug, Clone)]
pub struct JointForward {
    stage: usize,
    next_dims: (usize, usize, usize),
    z_count: usize,
    entries: BTreeMap<JointKey, Rational>,
}

impl JointForward {
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn entries(&self) -> impl Iterator<Item = (&JointKey, &Rational)> {
        self.entries.iter()
    }

    pub fn total_mass(&self) -> Rational {
        self.entries.values().cloned().sum()
    }

    /// Marginal over the increment, as a dense vector.
    pub fn z_marginal(&self) -> Vec<Rational> {
        let mut out = vec![zero(); self.z_count];
        for (&(_, _, _, _, _, _, z), w) in &self.entries {
            out[z] += w;
        }
        out
    }

    /// Marginal over the next atom `(x', p1', p2')`, as a dense vector in
    /// next-stage belief layout.
    pub fn next_marginal(&self) -> Vec<Rational> {
        let (_, np1, np2) = self.next_dims;
        let mut out = vec![zero(); self.next_dims.0 * np1 * np2];
        for (&(_, _, _, xn, p1n, p2n, _), w) in &self.entries {
            out[(xn * np1 + p1n) * np2 + p2n] += w;
        }
        out
    }

    /// The next-stage belief conditioned on the increment `z`.
    pub fn next_belief_given(&self, z: usize, z_label: &str) -> Result<Belief> {
        let (nx, np1, np2) = self.next_dims;
        let mut weights = vec![zero(); nx * np1 * np2];
        let mut mass = zero();
        for (&(_, _, _, xn, p1n, p2n, zz), w) in &self.entries {
            if zz == z {
                weights[(xn * np1 + p1n) * np2 + p2n] += w;
                mass += w;
            }
        }
        if mass == zero() {
            return Err(Error::ZeroProbabilityIncrement {
                stage: self.stage + 1,
                z: z_label.to_string(),
            });
        }
        for w in &mut weights {
            *w /= mass.clone();
        }
        Belief::new(self.stage + 1, self.next_dims, weights)
    }
}

fn check_stage_and_shapes(
    game: &ValidatedGame,
    s: &InformationStructure,
    belief: &Belief,
    pair: Option<(&Prescription, &Prescription)>,
) -> Result<()> {
    s.check_game(game)?;
    let t = belief.stage();
    if t + 1 >= game.horizon() {
        return Err(Error::StageMismatch {
            expected: game.horizon().saturating_sub(1),
            got: t + 1,
        });
    }
    let dims = (
        game.states().len(),
        s.private_count(0, t),
        s.private_count(1, t),
    );
    if belief.dims() != dims {
        return Err(Error::ShapeMismatch {
            what: "belief".to_string(),
            expected: format!("dims {dims:?}"),
            got: format!("dims {:?}", belief.dims()),
        });
    }
    if let Some((g1, g2)) = pair {
        g1.validate(s.private_count(0, t), game.actions(0).len())?;
        g2.validate(s.private_count(1, t), game.actions(1).len())?;
    }
    Ok(())
}

/// The belief over `(x, p1, p2)` at stage 1, derived from the initial
/// state distribution, the stage-1 observation kernels and the stage-1
/// private-information rule.
pub fn initial_belief(game: &ValidatedGame, s: &InformationStructure) -> Result<Belief> {
    s.check_game(game)?;
    let nx = game.states().len();
    let (np1, np2) = (s.private_count(0, 0), s.private_count(1, 0));
    let mut weights = vec![zero(); nx * np1 * np2];
    for x in 0..nx {
        let base = game.initial_dist()[x].clone();
        if base == zero() {
            continue;
        }
        for y1 in 0..game.observations(0).len() {
            let q1 = game.obs_prob(0, 0, x, y1);
            if *q1 == zero() {
                continue;
            }
            for y2 in 0..game.observations(1).len() {
                let q2 = game.obs_prob(1, 0, x, y2);
                if *q2 == zero() {
                    continue;
                }
                let p1 = s.initial_private(0, y1)?;
                let p2 = s.initial_private(1, y2)?;
                weights[(x * np1 + p1) * np2 + p2] += base.clone() * q1 * q2;
            }
        }
    }
    Belief::new(0, (nx, np1, np2), weights)
}

/// The exact joint distribution over `(x, p1, p2, x', p1', p2', z)`
/// induced by a belief and a prescription pair at stage `t < T`.
pub fn joint_forward_distribution(
    game: &ValidatedGame,
    s: &InformationStructure,
    belief: &Belief,
    g1: &Prescription,
    g2: &Prescription,
) -> Result<JointForward> {
    check_stage_and_shapes(game, s, belief, Some((g1, g2)))?;
    let t = belief.stage();
    let nx = game.states().len();
    let next_dims = (nx, s.private_count(0, t + 1), s.private_count(1, t + 1));
    let mut entries: BTreeMap<JointKey, Rational> = BTreeMap::new();

    for (x, p1, p2, w) in belief.support() {
        for (u1, w1) in g1.support_of(p1) {
            for (u2, w2) in g2.support_of(p2) {
                let base = w.clone() * &w1 * &w2;
                for xn in 0..nx {
                    let pt = game.transition(t, x, u1, u2, xn);
                    if *pt == zero() {
                        continue;
                    }
                    for y1n in 0..game.observations(0).len() {
                        let q1 = game.obs_prob(0, t + 1, xn, y1n);
                        if *q1 == zero() {
                            continue;
                        }
                        for y2n in 0..game.observations(1).len() {
                            let q2 = game.obs_prob(1, t + 1, xn, y2n);
                            if *q2 == zero() {
                                continue;
                            }
                            let z = apply_increment_map(s, t, p1, p2, u1, u2, y1n, y2n)?;
                            let p1n = apply_private_update(s, t, 0, p1, u1, y1n)?;
                            let p2n = apply_private_update(s, t, 1, p2, u2, y2n)?;
                            let mass = base.clone() * pt * q1 * q2;
                            *entries
                                .entry((x, p1, p2, xn, p1n, p2n, z))
                                .or_insert_with(zero) += mass;
                        }
                    }
                }
            }
        }
    }

    Ok(JointForward {
        stage: t,
        next_dims,
        z_count: s.increment_count(t),
        entries,
    })
}

/// One-step belief update given the prescriptions actually used and the
/// realized increment. Errors if the increment has probability zero.
pub fn belief_update_general(
    game: &ValidatedGame,
    s: &InformationStructure,
    belief: &Belief,
    g1: &Prescription,
    g2: &Prescription,
    z: usize,
) -> Result<Belief> {
    check_stage_and_shapes(game, s, belief, Some((g1, g2)))?;
    let t = belief.stage();
    if z >= s.increment_count(t) {
        return Err(Error::OutOfDomain(format!("increment index {z}")));
    }
    let fwd = joint_forward_distribution(game, s, belief, g1, g2)?;
    fwd.next_belief_given(z, s.increment_space(t).label(z))
}

/// Strategy-free update `F_t(pi, z)`: valid when the structure passes
/// the strategy-independence check, in which case the result equals
/// [`belief_update_general`] for every admissible prescription pair.
/// Implemented by synthesizing one admissible pure pair from the
/// increment's consistency constraints and delegating.
pub fn belief_update_strategy_free(
    game: &ValidatedGame,
    s: &InformationStructure,
    belief: &Belief,
    z: usize,
) -> Result<Belief> {
    check_stage_and_shapes(game, s, belief, None)?;
    let t = belief.stage();
    if z >= s.increment_count(t) {
        return Err(Error::OutOfDomain(format!("increment index {z}")));
    }
    let nx = game.states().len();
    for (x, p1, p2, _) in belief.support() {
        for u1 in 0..game.actions(0).len() {
            for u2 in 0..game.actions(1).len() {
                for xn in 0..nx {
                    if *game.transition(t, x, u1, u2, xn) == zero() {
                        continue;
                    }
                    for y1n in 0..game.observations(0).len() {
                        if *game.obs_prob(0, t + 1, xn, y1n) == zero() {
                            continue;
                        }
                        for y2n in 0..game.observations(1).len() {
                            if *game.obs_prob(1, t + 1, xn, y2n) == zero() {
                                continue;
                            }
                            if apply_increment_map(s, t, p1, p2, u1, u2, y1n, y2n)? == z {
                                // Witness found: pin the witnessing types to
                                // the witnessing actions, everything else to
                                // the first action.
                                let mut a1 = vec![0usize; s.private_count(0, t)];
                                let mut a2 = vec![0usize; s.private_count(1, t)];
                                a1[p1] = u1;
                                a2[p2] = u2;
                                return belief_update_general(
                                    game,
                                    s,
                                    belief,
                                    &Prescription::Pure(a1),
                                    &Prescription::Pure(a2),
                                    z,
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    Err(Error::UnreachableIncrement {
        stage: t + 1,
        z: s.increment_space(t).label(z).to_string(),
    })
}

/// The exact distribution of the next increment under a belief and a
/// prescription pair (the `z`-marginal of the joint forward model).
pub fn increment_distribution(
    game: &ValidatedGame,
    s: &InformationStructure,
    belief: &Belief,
    g1: &Prescription,
    g2: &Prescription,
) -> Result<Vec<Rational>> {
    Ok(joint_forward_distribution(game, s, belief, g1, g2)?.z_marginal())
}

/// How reachable beliefs are expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMode {
    /// One edge per increment; requires strategy independence.
    StrategyFree,
    /// One edge per (pure prescription pair, increment); always valid.
    General,
}

#[derive(Debug, Clone)]
pub struct EnumerationOptions {
    /// Hard cap on deduplicated beliefs per stage; exceeding it yields a
    /// partial graph flagged incomplete.
    pub max_beliefs_per_stage: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            max_beliefs_per_stage: 100_000,
        }
    }
}

/// An edge of the reachable-belief graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphEdge {
    pub src: usize,
    pub z: usize,
    pub dst: usize,
    /// Present in general mode: the pure pair that generates this edge.
    pub pair: Option<(Vec<usize>, Vec<usize>)>,
}

/// Deduplicated reachable beliefs per stage plus labeled transitions.
#[derive(Debug, Clone)]
pub struct BeliefGraph {
    mode: EnumerationMode,
    stages: Vec<Vec<Belief>>,
    index: Vec<HashMap<Belief, usize>>,
    edges: Vec<Vec<GraphEdge>>,
    complete: bool,
    budget_stage: Option<usize>,
}

impl BeliefGraph {
    pub fn mode(&self) -> EnumerationMode {
        self.mode
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    pub fn beliefs(&self, t: usize) -> &[Belief] {
        &self.stages[t]
    }

    pub fn count(&self, t: usize) -> usize {
        self.stages[t].len()
    }

    pub fn node(&self, t: usize, idx: usize) -> &Belief {
        &self.stages[t][idx]
    }

    pub fn find(&self, belief: &Belief) -> Option<usize> {
        self.index.get(belief.stage())?.get(belief).copied()
    }

    /// Edges leaving stage `t` (boundary `t -> t+1`).
    pub fn edges(&self, t: usize) -> &[GraphEdge] {
        &self.edges[t]
    }

    /// Strategy-free successor lookup by increment.
    pub fn successor(&self, t: usize, src: usize, z: usize) -> Option<usize> {
        self.edges[t]
            .iter()
            .find(|e| e.src == src && e.z == z)
            .map(|e| e.dst)
    }

    /// General-mode successor lookup restricted to a prescription pair.
    pub fn successor_with_pair(
        &self,
        t: usize,
        src: usize,
        pair: (&[usize], &[usize]),
        z: usize,
    ) -> Option<usize> {
        self.edges[t]
            .iter()
            .find(|e| {
                e.src == src
                    && e.z == z
                    && e.pair
                        .as_ref()
                        .is_some_and(|(a, b)| a.as_slice() == pair.0 && b.as_slice() == pair.1)
            })
            .map(|e| e.dst)
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn budget_stage(&self) -> Option<usize> {
        self.budget_stage
    }
}

/// Breadth-first closure of reachable beliefs from the initial belief.
pub fn enumerate_reachable_beliefs(
    game: &ValidatedGame,
    s: &InformationStructure,
    mode: EnumerationMode,
    options: &EnumerationOptions,
) -> Result<BeliefGraph> {
    s.check_game(game)?;
    let horizon = game.horizon();
    let root = initial_belief(game, s)?;
    let mut stages: Vec<Vec<Belief>> = vec![vec![root.clone()]];
    let mut index: Vec<HashMap<Belief, usize>> = vec![HashMap::from([(root, 0usize)])];
    let mut edges: Vec<Vec<GraphEdge>> = Vec::new();
    let mut complete = true;
    let mut budget_stage = None;

    'stages: for t in 0..horizon.saturating_sub(1) {
        let mut next_nodes: Vec<Belief> = Vec::new();
        let mut next_index: HashMap<Belief, usize> = HashMap::new();
        let mut stage_edges: Vec<GraphEdge> = Vec::new();

        for src in 0..stages[t].len() {
            let belief = stages[t][src].clone();
            match mode {
                EnumerationMode::StrategyFree => {
                    let mut reachable: BTreeSet<usize> = BTreeSet::new();
                    let nx = game.states().len();
                    for (x, p1, p2, _) in belief.support() {
                        for u1 in 0..game.actions(0).len() {
                            for u2 in 0..game.actions(1).len() {
                                for xn in 0..nx {
                                    if *game.transition(t, x, u1, u2, xn) == zero() {
                                        continue;
                                    }
                                    for y1n in 0..game.observations(0).len() {
                                        if *game.obs_prob(0, t + 1, xn, y1n) == zero() {
                                            continue;
                                        }
                                        for y2n in 0..game.observations(1).len() {
                                            if *game.obs_prob(1, t + 1, xn, y2n) == zero() {
                                                continue;
                                            }
                                            reachable.insert(apply_increment_map(
                                                s, t, p1, p2, u1, u2, y1n, y2n,
                                            )?);
                                        }
                                    }
                                }
                            }
                        }
                    }
                    for z in reachable {
                        let next = belief_update_strategy_free(game, s, &belief, z)?;
                        let dst = *next_index.entry(next.clone()).or_insert_with(|| {
                            next_nodes.push(next.clone());
                            next_nodes.len() - 1
                        });
                        stage_edges.push(GraphEdge { src, z, dst, pair: None });
                    }
                }
                EnumerationMode::General => {
                    let sup1 = belief.type_support(0);
                    let sup2 = belief.type_support(1);
                    let all1 =
                        pure_prescriptions(&sup1, s.private_count(0, t), game.actions(0).len());
                    let all2 =
                        pure_prescriptions(&sup2, s.private_count(1, t), game.actions(1).len());
                    for a1 in &all1 {
                        let g1 = Prescription::Pure(a1.clone());
                        for a2 in &all2 {
                            let g2 = Prescription::Pure(a2.clone());
                            let fwd = joint_forward_distribution(game, s, &belief, &g1, &g2)?;
                            for (z, mass) in fwd.z_marginal().into_iter().enumerate() {
                                if mass == zero() {
                                    continue;
                                }
                                let next =
                                    fwd.next_belief_given(z, s.increment_space(t).label(z))?;
                                let dst = *next_index.entry(next.clone()).or_insert_with(|| {
                                    next_nodes.push(next.clone());
                                    next_nodes.len() - 1
                                });
                                stage_edges.push(GraphEdge {
                                    src,
                                    z,
                                    dst,
                                    pair: Some((a1.clone(), a2.clone())),
                                });
                            }
                        }
                    }
                }
            }
            if next_nodes.len() > options.max_beliefs_per_stage {
                complete = false;
                budget_stage = Some(t + 1);
                edges.push(stage_edges);
                stages.push(next_nodes);
                index.push(next_index);
                break 'stages;
            }
        }

        edges.push(stage_edges);
        stages.push(next_nodes);
        index.push(next_index);
    }

    Ok(BeliefGraph {
        mode,
        stages,
        index,
        edges,
        complete,
        budget_stage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{validate_game_spec, GameSpec};
    use crate::info::{build_information_structure, StructureKind};
    use crate::rational::{rat, rat_int};
    use crate::testgames;

    fn one_step(game: &ValidatedGame) -> InformationStructure {
        build_information_structure(&StructureKind::OneStepDelay, game).unwrap()
    }

    fn find_z(s: &InformationStructure, t: usize, label: &str) -> usize {
        (0..s.increment_count(t))
            .find(|&z| s.increment_space(t).label(z) == label)
            .unwrap_or_else(|| panic!("no increment labeled {label}"))
    }

    fn flip_pair() -> (Prescription, Prescription) {
        (
            Prescription::Pure(vec![1, 0]),
            Prescription::Pure(vec![1, 0]),
        )
    }

    #[test]
    fn initial_belief_of_the_delayed_sharing_example() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        assert_eq!(pi.stage(), 0);
        assert_eq!(pi.dims(), (2, 2, 2));
        assert_eq!(*pi.weight(0, 0, 0), rat(1, 3));
        assert_eq!(*pi.weight(0, 0, 1), rat(1, 6));
        assert_eq!(*pi.weight(1, 1, 0), rat(1, 6));
        assert_eq!(*pi.weight(1, 1, 1), rat(1, 3));
        assert_eq!(*pi.weight(0, 1, 0), rat_int(0));
        assert_eq!(pi.type_support(0), vec![0, 1]);
        assert_eq!(pi.type_marginal(1, 0), rat(1, 2));
    }

    #[test]
    fn deterministic_game_gives_point_mass_belief() {
        let spec = GameSpec::stationary(
            1,
            vec!["a".into(), "b".into()],
            [vec!["u".into()], vec!["u".into()]],
            [
                vec!["a".into(), "b".into()],
                vec!["a".into(), "b".into()],
            ],
            vec![rat_int(0), rat_int(1)],
            vec![],
            [
                vec![rat_int(1), rat_int(0), rat_int(0), rat_int(1)],
                vec![rat_int(1), rat_int(0), rat_int(0), rat_int(1)],
            ],
            [vec![rat_int(0); 2], vec![rat_int(0); 2]],
        );
        let game = validate_game_spec(spec).unwrap();
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        assert_eq!(*pi.weight(1, 1, 1), rat_int(1));
    }

    #[test]
    fn symmetric_initial_belief_is_the_state_marginal() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = build_information_structure(&StructureKind::Symmetric, &game).unwrap();
        let pi = initial_belief(&game, &s).unwrap();
        assert_eq!(pi.dims(), (2, 1, 1));
        assert_eq!(*pi.weight(0, 0, 0), rat(1, 2));
        assert_eq!(*pi.weight(1, 0, 0), rat(1, 2));
    }

    #[test]
    fn joint_forward_mass_is_one_and_z_marginal_matches() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        let (g1, g2) = flip_pair();
        let fwd = joint_forward_distribution(&game, &s, &pi, &g1, &g2).unwrap();
        assert_eq!(fwd.total_mass(), rat_int(1));

        let zm = fwd.z_marginal();
        let expect = [
            ("0,0,1,1", rat(1, 3)),
            ("0,1,1,0", rat(1, 6)),
            ("1,0,0,1", rat(1, 6)),
            ("1,1,0,0", rat(1, 3)),
        ];
        let mut seen = rat_int(0);
        for (label, mass) in expect {
            let z = find_z(&s, 0, label);
            assert_eq!(zm[z], mass, "mass of {label}");
            seen += &zm[z];
        }
        assert_eq!(seen, rat_int(1));

        // increment_distribution is exactly this marginal
        assert_eq!(increment_distribution(&game, &s, &pi, &g1, &g2).unwrap(), zm);
    }

    #[test]
    fn behavioral_point_mass_reproduces_pure_forward() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        let (g1, g2) = flip_pair();
        let b1 = Prescription::Behavioral(vec![
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(1), rat_int(0)],
        ]);
        let fwd_pure = joint_forward_distribution(&game, &s, &pi, &g1, &g2).unwrap();
        let fwd_mixed = joint_forward_distribution(&game, &s, &pi, &b1, &g2).unwrap();
        let pure_entries: Vec<_> = fwd_pure.entries().map(|(k, w)| (*k, w.clone())).collect();
        let mixed_entries: Vec<_> = fwd_mixed.entries().map(|(k, w)| (*k, w.clone())).collect();
        assert_eq!(pure_entries, mixed_entries);
    }

    #[test]
    fn general_update_matches_the_worked_example() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        // z = (y1=0, y2=0, u1=1, u2=1): previous state 0, matching actions.
        let z = find_z(&s, 0, "0,0,1,1");
        let g1 = Prescription::Pure(vec![1, 0]);
        let g2 = Prescription::Pure(vec![1, 1]);
        let next = belief_update_general(&game, &s, &pi, &g1, &g2, z).unwrap();
        assert_eq!(*next.weight(0, 0, 0), rat(1, 6));
        assert_eq!(*next.weight(0, 0, 1), rat(1, 12));
        assert_eq!(*next.weight(1, 1, 0), rat(1, 4));
        assert_eq!(*next.weight(1, 1, 1), rat(1, 2));
        assert_eq!(next.state_marginal(0), rat(1, 4));
    }

    #[test]
    fn zero_probability_increment_is_an_error() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        // gamma1 sends type 0 to action 1, so z with (y1=0, u1=0) is impossible
        let z = find_z(&s, 0, "0,0,0,1");
        let g1 = Prescription::Pure(vec![1, 0]);
        let g2 = Prescription::Pure(vec![1, 1]);
        assert!(matches!(
            belief_update_general(&game, &s, &pi, &g1, &g2, z),
            Err(Error::ZeroProbabilityIncrement { .. })
        ));
    }

    #[test]
    fn strategy_free_update_matches_the_example_values() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        // matching actions from state 0: next state is 0 w.p. 1/4
        let next = belief_update_strategy_free(&game, &s, &pi, find_z(&s, 0, "0,0,1,1")).unwrap();
        assert_eq!(next.state_marginal(0), rat(1, 4));
        // differing actions: 2/5 regardless of the previous state
        let next = belief_update_strategy_free(&game, &s, &pi, find_z(&s, 0, "1,1,0,1")).unwrap();
        assert_eq!(next.state_marginal(0), rat(2, 5));
        assert_eq!(*next.weight(0, 0, 0), rat(4, 15));
        assert_eq!(*next.weight(1, 1, 1), rat(2, 5));
        // matching actions from state 1: 1/2
        let next = belief_update_strategy_free(&game, &s, &pi, find_z(&s, 0, "1,0,0,0")).unwrap();
        assert_eq!(next.state_marginal(0), rat(1, 2));
    }

    #[test]
    fn strategy_free_rejects_unreachable_increment() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        // (x=0, p1=1) has zero mass: controller 1 observes the state exactly,
        // so an increment claiming y1=0 while... every y1/u combo is reachable
        // here; instead make an unreachable one via a point-mass prior.
        let mut weights = vec![zero(); 8];
        weights[0] = one(); // (x=0, p1=0, p2=0)
        let point = Belief::new(0, (2, 2, 2), weights).unwrap();
        // y1 component = 1 is impossible from p1 = 0 at stage 0
        let z = find_z(&s, 0, "1,0,0,0");
        assert!(matches!(
            belief_update_strategy_free(&game, &s, &point, z),
            Err(Error::UnreachableIncrement { .. })
        ));
    }

    #[test]
    fn uncontrolled_update_is_prescription_independent() {
        let game = testgames::uncontrolled_game(2);
        let s = build_information_structure(&StructureKind::Uncontrolled { delay: 1 }, &game)
            .unwrap();
        let pi = initial_belief(&game, &s).unwrap();
        let sup1 = pi.type_support(0);
        let sup2 = pi.type_support(1);
        let all1 = pure_prescriptions(&sup1, s.private_count(0, 0), 2);
        let all2 = pure_prescriptions(&sup2, s.private_count(1, 0), 2);
        for z in 0..s.increment_count(0) {
            let mut seen: Option<Belief> = None;
            for a1 in &all1 {
                for a2 in &all2 {
                    let g1 = Prescription::Pure(a1.clone());
                    let g2 = Prescription::Pure(a2.clone());
                    match belief_update_general(&game, &s, &pi, &g1, &g2, z) {
                        Ok(next) => match &seen {
                            None => seen = Some(next),
                            Some(prev) => assert_eq!(prev, &next),
                        },
                        Err(Error::ZeroProbabilityIncrement { .. }) => {}
                        Err(e) => panic!("unexpected error {e:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn bayes_consistency_on_the_example() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        let (g1, g2) = flip_pair();
        let fwd = joint_forward_distribution(&game, &s, &pi, &g1, &g2).unwrap();
        let zm = fwd.z_marginal();
        let mut mixture = vec![zero(); fwd.next_marginal().len()];
        for (z, mass) in zm.iter().enumerate() {
            if *mass == zero() {
                continue;
            }
            let next = fwd.next_belief_given(z, s.increment_space(0).label(z)).unwrap();
            for (k, w) in next.weights().iter().enumerate() {
                mixture[k] += mass.clone() * w;
            }
        }
        assert_eq!(mixture, fwd.next_marginal());
    }

    #[test]
    fn global_local_successors_have_point_mass_global_component() {
        let (game, split) = testgames::global_local_game(2, false);
        let s = build_information_structure(
            &crate::info::StructureKind::GlobalLocal(split),
            &game,
        )
        .unwrap();
        let graph = enumerate_reachable_beliefs(
            &game,
            &s,
            EnumerationMode::StrategyFree,
            &EnumerationOptions::default(),
        )
        .unwrap();
        assert!(graph.is_complete());
        for edge in graph.edges(0) {
            // label is "g_1,g_2,u1,u2"; the successor must be supported on
            // states whose global component equals g_2.
            let label = s.increment_space(0).label(edge.z).to_string();
            let g_next = label.split(',').nth(1).unwrap().to_string();
            let next = graph.node(1, edge.dst);
            for (x, _, _, _) in next.support() {
                assert!(game.states().name(x).starts_with(&format!("{g_next}|")));
            }
        }
    }

    #[test]
    fn reachable_belief_counts_match_the_example() {
        for (horizon, expect) in [(2usize, vec![1usize, 3]), (4, vec![1, 3, 3, 3]), (1, vec![1])] {
            let game = testgames::bsc_delayed_sharing(horizon);
            let s = one_step(&game);
            let graph = enumerate_reachable_beliefs(
                &game,
                &s,
                EnumerationMode::StrategyFree,
                &EnumerationOptions::default(),
            )
            .unwrap();
            assert!(graph.is_complete());
            let counts: Vec<usize> = (0..graph.stage_count()).map(|t| graph.count(t)).collect();
            assert_eq!(counts, expect, "horizon {horizon}");
            if horizon == 1 {
                assert!(graph.edges.is_empty());
            }
        }
    }

    #[test]
    fn general_mode_graph_labels_edges_with_pairs() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let graph = enumerate_reachable_beliefs(
            &game,
            &s,
            EnumerationMode::General,
            &EnumerationOptions::default(),
        )
        .unwrap();
        // same deduplicated belief set as strategy-free mode
        assert_eq!(graph.count(1), 3);
        assert!(graph.edges(0).iter().all(|e| e.pair.is_some()));
        // 16 pure pairs, 4 positive-probability increments each
        assert_eq!(graph.edges(0).len(), 16 * 4);
    }

    #[test]
    fn budget_exceeded_flags_partial_graph() {
        let game = testgames::bsc_delayed_sharing(3);
        let s = one_step(&game);
        let graph = enumerate_reachable_beliefs(
            &game,
            &s,
            EnumerationMode::StrategyFree,
            &EnumerationOptions { max_beliefs_per_stage: 2 },
        )
        .unwrap();
        assert!(!graph.is_complete());
        assert_eq!(graph.budget_stage(), Some(1));
    }
}
