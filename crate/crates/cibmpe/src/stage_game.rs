//! One-stage Bayesian games and their exact equilibria.
//!
//! At each reachable belief the backward induction solves a static game
//! of incomplete information: each agent's type is its private
//! information (distributed according to the belief), and its cost is
//! the stage cost plus, before the final stage, the continuation value
//! at the strategy-free successor belief. Pure equilibria are found by
//! exhaustive enumeration, mixed ones by support enumeration with exact
//! linear algebra; both are audited type by type.

use std::collections::HashMap;

use crate::belief::{
    belief_update_strategy_free, pure_prescriptions, Belief, Prescription,
};
use crate::error::{Error, Result};
use crate::game::{Controller, ValidatedGame};
use crate::info::{apply_increment_map, InformationStructure};
use crate::rational::{one, zero, Rational};

/// Continuation values: next-stage belief -> (value for controller 1,
/// value for controller 2).
pub type ValueLookup = HashMap<Belief, (Rational, Rational)>;

/// A one-stage Bayesian game at a fixed belief, with the continuation
/// term already folded into the cost tensor.
#[derive(Debug, Clone)]
pub struct StageGame {
    stage: usize,
    belief: Belief,
    n_types: [usize; 2],
    n_actions: [usize; 2],
    type_support: [Vec<usize>; 2],
    type_marginals: [Vec<Rational>; 2],
    /// `K^i(x, p1, p2, u1, u2)`, flattened; entries at zero-mass atoms
    /// carry only the stage cost and are never read by expectations.
    cost: [Vec<Rational>; 2],
}

/// An equilibrium of a stage game: a prescription pair and the expected
/// costs under the game's belief.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageEquilibrium {
    pub prescriptions: (Prescription, Prescription),
    pub values: (Rational, Rational),
}

impl StageGame {
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn belief(&self) -> &Belief {
        &self.belief
    }

    pub fn n_actions(&self, i: Controller) -> usize {
        self.n_actions[i]
    }

    pub fn n_types(&self, i: Controller) -> usize {
        self.n_types[i]
    }

    pub fn type_support(&self, i: Controller) -> &[usize] {
        &self.type_support[i]
    }

    pub fn type_marginal(&self, i: Controller, p: usize) -> &Rational {
        &self.type_marginals[i][p]
    }

    fn k_index(&self, x: usize, p1: usize, p2: usize, u1: usize, u2: usize) -> usize {
        let (_, np1, np2) = self.belief.dims();
        (((x * np1 + p1) * np2 + p2) * self.n_actions[0] + u1) * self.n_actions[1] + u2
    }

    /// Augmented cost `K^i(x, p1, p2, u1, u2)`.
    pub fn cost_entry(
        &self,
        i: Controller,
        x: usize,
        p1: usize,
        p2: usize,
        u1: usize,
        u2: usize,
    ) -> &Rational {
        &self.cost[i][self.k_index(x, p1, p2, u1, u2)]
    }

    /// Unnormalized conditional expected cost of agent `i` of type `p`
    /// playing `u` against the opponent prescription (divide by the type
    /// marginal for the conditional expectation).
    fn raw_cost_vs(&self, i: Controller, p: usize, u: usize, opponent: &Prescription) -> Rational {
        let mut total = zero();
        for (x, p1, p2, w) in self.belief.support() {
            let own = if i == 0 { p1 } else { p2 };
            if own != p {
                continue;
            }
            let opp = if i == 0 { p2 } else { p1 };
            for (uo, wo) in opponent.support_of(opp) {
                let (u1, u2) = if i == 0 { (u, uo) } else { (uo, u) };
                total += w.clone() * wo * self.cost_entry(i, x, p1, p2, u1, u2);
            }
        }
        total
    }

    /// Conditional expected cost of `(i, p)` playing `u` against the
    /// opponent prescription. `None` for zero-mass types.
    pub fn conditional_cost(
        &self,
        i: Controller,
        p: usize,
        u: usize,
        opponent: &Prescription,
    ) -> Option<Rational> {
        let marginal = &self.type_marginals[i][p];
        if *marginal == zero() {
            return None;
        }
        Some(self.raw_cost_vs(i, p, u, opponent) / marginal.clone())
    }

    /// Expected cost pair of a full prescription pair under the belief.
    pub fn expected_values(&self, g1: &Prescription, g2: &Prescription) -> (Rational, Rational) {
        let mut v1 = zero();
        let mut v2 = zero();
        for (x, p1, p2, w) in self.belief.support() {
            for (u1, w1) in g1.support_of(p1) {
                for (u2, w2) in g2.support_of(p2) {
                    let scale = w.clone() * &w1 * &w2;
                    v1 += scale.clone() * self.cost_entry(0, x, p1, p2, u1, u2);
                    v2 += scale * self.cost_entry(1, x, p1, p2, u1, u2);
                }
            }
        }
        (v1, v2)
    }
}

/// Builds the stage game at `belief`. `continuation` must map every
/// positive-probability successor belief to its value pair; it is
/// required exactly when the belief is not at the final stage.
pub fn build_stage_game(
    game: &ValidatedGame,
    s: &InformationStructure,
    belief: &Belief,
    continuation: Option<&ValueLookup>,
) -> Result<StageGame> {
    s.check_game(game)?;
    let t = belief.stage();
    let terminal = t + 1 == game.horizon();
    if !terminal && continuation.is_none() {
        return Err(Error::MissingContinuationValue {
            stage: t + 2,
            belief: "no continuation table supplied".to_string(),
        });
    }
    let (nx, np1, np2) = (
        game.states().len(),
        s.private_count(0, t),
        s.private_count(1, t),
    );
    if belief.dims() != (nx, np1, np2) {
        return Err(Error::ShapeMismatch {
            what: "belief".to_string(),
            expected: format!("dims {:?}", (nx, np1, np2)),
            got: format!("dims {:?}", belief.dims()),
        });
    }
    let n_actions = [game.actions(0).len(), game.actions(1).len()];

    // Successor values per increment, shared across atoms.
    let mut z_values: HashMap<usize, (Rational, Rational)> = HashMap::new();

    let size = nx * np1 * np2 * n_actions[0] * n_actions[1];
    let mut cost = [vec![zero(); size], vec![zero(); size]];
    let index = |x: usize, p1: usize, p2: usize, u1: usize, u2: usize| {
        (((x * np1 + p1) * np2 + p2) * n_actions[0] + u1) * n_actions[1] + u2
    };

    for x in 0..nx {
        for p1 in 0..np1 {
            for p2 in 0..np2 {
                let mass = belief.weight(x, p1, p2);
                for u1 in 0..n_actions[0] {
                    for u2 in 0..n_actions[1] {
                        let k = index(x, p1, p2, u1, u2);
                        cost[0][k] = game.cost(0, x, u1, u2).clone();
                        cost[1][k] = game.cost(1, x, u1, u2).clone();
                        if terminal || *mass == zero() {
                            continue;
                        }
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
                                    let z =
                                        apply_increment_map(s, t, p1, p2, u1, u2, y1n, y2n)?;
                                    let (v1, v2) = match z_values.get(&z) {
                                        Some(v) => v.clone(),
                                        None => {
                                            let next =
                                                belief_update_strategy_free(game, s, belief, z)?;
                                            let v = continuation
                                                .unwrap()
                                                .get(&next)
                                                .cloned()
                                                .ok_or_else(|| {
                                                    Error::MissingContinuationValue {
                                                        stage: t + 2,
                                                        belief: next.canonical_string(),
                                                    }
                                                })?;
                                            z_values.insert(z, v.clone());
                                            v
                                        }
                                    };
                                    let weight = pt.clone() * q1 * q2;
                                    cost[0][k] += weight.clone() * v1;
                                    cost[1][k] += weight * v2;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    let type_support = [belief.type_support(0), belief.type_support(1)];
    let type_marginals = [
        (0..np1).map(|p| belief.type_marginal(0, p)).collect(),
        (0..np2).map(|p| belief.type_marginal(1, p)).collect(),
    ];

    Ok(StageGame {
        stage: t,
        belief: belief.clone(),
        n_types: [np1, np2],
        n_actions,
        type_support,
        type_marginals,
        cost,
    })
}

/// Per-type best-response data for agent `i` against a fixed opponent
/// prescription: for each positive-mass type, the exact conditional
/// expected cost of every action and the argmin set; `None` for
/// zero-mass types.
pub fn stage_best_response_values(
    sg: &StageGame,
    i: Controller,
    opponent: &Prescription,
) -> Vec<Option<(Vec<Rational>, Vec<usize>)>> {
    (0..sg.n_types[i])
        .map(|p| {
            if *sg.type_marginal(i, p) == zero() {
                return None;
            }
            let costs: Vec<Rational> = (0..sg.n_actions[i])
                .map(|u| sg.conditional_cost(i, p, u, opponent).unwrap())
                .collect();
            let best = costs.iter().min().unwrap().clone();
            let argmin = (0..sg.n_actions[i]).filter(|&u| costs[u] == best).collect();
            Some((costs, argmin))
        })
        .collect()
}

/// Checks the per-type equilibrium conditions of a prescription pair:
/// every positive-mass type puts all its weight on actions minimizing
/// its conditional expected cost against the other prescription, and the
/// reported values are the expected costs of the pair.
pub fn audit_equilibrium(sg: &StageGame, eq: &StageEquilibrium) -> Result<()> {
    let (g1, g2) = (&eq.prescriptions.0, &eq.prescriptions.1);
    g1.validate(sg.n_types[0], sg.n_actions[0])?;
    g2.validate(sg.n_types[1], sg.n_actions[1])?;
    for i in 0..2 {
        let (own, opp): (&Prescription, &Prescription) = if i == 0 { (g1, g2) } else { (g2, g1) };
        let table = stage_best_response_values(sg, i, opp);
        for &p in &sg.type_support[i] {
            let (_, argmin) = table[p].as_ref().expect("positive-mass type");
            for (u, w) in own.support_of(p) {
                if w > zero() && !argmin.contains(&u) {
                    return Err(Error::Internal(format!(
                        "equilibrium audit failed: controller {} type {} puts weight on \
                         action {} outside its best-response set {:?}",
                        i + 1,
                        p,
                        u,
                        argmin
                    )));
                }
            }
        }
    }
    if sg.expected_values(g1, g2) != eq.values {
        return Err(Error::Internal(
            "equilibrium audit failed: reported values differ from expected costs".to_string(),
        ));
    }
    Ok(())
}

/// Exhaustive enumeration of all pure Bayesian equilibria, ordered
/// lexicographically by prescription encoding. Types with zero marginal
/// mass are pinned to the first action and exempt from the
/// best-response condition. May be empty.
pub fn enumerate_pure_bne(sg: &StageGame) -> Vec<StageEquilibrium> {
    let all1 = pure_prescriptions(&sg.type_support[0], sg.n_types[0], sg.n_actions[0]);
    let all2 = pure_prescriptions(&sg.type_support[1], sg.n_types[1], sg.n_actions[1]);
    let mut out = Vec::new();
    for a1 in &all1 {
        let g1 = Prescription::Pure(a1.clone());
        for a2 in &all2 {
            let g2 = Prescription::Pure(a2.clone());
            let mut is_eq = true;
            'types: for i in 0..2 {
                let (own, opp) = if i == 0 { (a1, &g2) } else { (a2, &g1) };
                for &p in &sg.type_support[i] {
                    let chosen = sg.conditional_cost(i, p, own[p], opp).unwrap();
                    for u in 0..sg.n_actions[i] {
                        if sg.conditional_cost(i, p, u, opp).unwrap() < chosen {
                            is_eq = false;
                            break 'types;
                        }
                    }
                }
            }
            if is_eq {
                let values = sg.expected_values(&g1, &g2);
                out.push(StageEquilibrium {
                    prescriptions: (g1.clone(), g2),
                    values,
                });
            }
        }
    }
    out
}

/// Solves `a x = b` exactly; returns any solution (free variables set to
/// zero) or `None` when inconsistent.
fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut r = 0usize;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| a[i][c] != zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].clone();
        for v in a[r].iter_mut() {
            *v /= inv.clone();
        }
        b[r] /= inv;
        for i in 0..rows {
            if i != r && a[i][c] != zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let sub = f.clone() * &a[r][j];
                    a[i][j] -= sub;
                }
                let sub = f * &b[r];
                b[i] -= sub;
            }
        }
        pivot_of_col[c] = Some(r);
        r += 1;
    }
    for i in r..rows {
        if b[i] != zero() {
            return None;
        }
    }
    let mut x = vec![zero(); cols];
    for c in 0..cols {
        if let Some(pr) = pivot_of_col[c] {
            x[c] = b[pr].clone();
        }
    }
    Some(x)
}

/// Nonempty action subsets ordered by (size, lexicographic content).
fn action_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|&u| mask & (1 << u) != 0).collect())
        .collect();
    subsets.sort_by(|a: &Vec<usize>, b: &Vec<usize>| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
}

/// One player of the agent-form game: a positive-mass type of one
/// controller.
#[derive(Debug, Clone, Copy)]
struct AgentPlayer {
    controller: Controller,
    p: usize,
}

/// Finds a (possibly mixed) Bayesian equilibrium by support enumeration:
/// support profiles are scanned in ascending total size, then
/// lexicographically; for each profile the indifference-plus-normalization
/// systems are solved exactly and the candidate is audited. Existence is
/// guaranteed for finite games, so exhaustion is an internal defect.
pub fn solve_mixed_bne(sg: &StageGame) -> Result<StageEquilibrium> {
    let mut players: Vec<AgentPlayer> = Vec::new();
    for i in 0..2 {
        for &p in &sg.type_support[i] {
            players.push(AgentPlayer { controller: i, p });
        }
    }
    let subsets: Vec<Vec<Vec<usize>>> = players
        .iter()
        .map(|pl| action_subsets(sg.n_actions[pl.controller]))
        .collect();

    // All support profiles (as per-player subset ranks), ascending total
    // size first, then lexicographic: the stable sort keeps the
    // odometer's lexicographic order within equal sizes.
    let mut profiles: Vec<Vec<usize>> = Vec::new();
    let mut odo = vec![0usize; players.len()];
    loop {
        profiles.push(odo.clone());
        let mut axis = players.len();
        let mut wrapped = true;
        while axis > 0 {
            axis -= 1;
            odo[axis] += 1;
            if odo[axis] < subsets[axis].len() {
                wrapped = false;
                break;
            }
            odo[axis] = 0;
        }
        if wrapped {
            break;
        }
    }
    profiles.sort_by_key(|prof| {
        prof.iter()
            .enumerate()
            .map(|(k, &sidx)| subsets[k][sidx].len())
            .sum::<usize>()
    });

    for profile in &profiles {
        if let Some(eq) = try_support_profile(sg, &players, &subsets, profile)? {
            return Ok(eq);
        }
    }
    Err(Error::Internal(
        "support enumeration exhausted without finding an equilibrium".to_string(),
    ))
}

fn try_support_profile(
    sg: &StageGame,
    players: &[AgentPlayer],
    subsets: &[Vec<Vec<usize>>],
    profile: &[usize],
) -> Result<Option<StageEquilibrium>> {
    let support_of = |i: Controller, p: usize| -> &[usize] {
        let idx = players
            .iter()
            .position(|pl| pl.controller == i && pl.p == p)
            .expect("positive-mass type");
        &subsets[idx][profile[idx]]
    };

    // Solve for one controller's mixed weights from the *other*
    // controller's indifference conditions plus normalization.
    let solve_side = |mixing: Controller| -> Option<Vec<Vec<Rational>>> {
        let fixed = 1 - mixing;
        let mix_types: Vec<usize> = sg.type_support[mixing].to_vec();
        let fixed_types: Vec<usize> = sg.type_support[fixed].to_vec();

        // Columns: a weight per (mixing type, supported action), then a
        // value variable per fixed type.
        let mut col_of: HashMap<(usize, usize), usize> = HashMap::new();
        let mut cols = 0usize;
        for &q in &mix_types {
            for &u in support_of(mixing, q) {
                col_of.insert((q, u), cols);
                cols += 1;
            }
        }
        let value_col: HashMap<usize, usize> = fixed_types
            .iter()
            .enumerate()
            .map(|(k, &p)| (p, cols + k))
            .collect();
        cols += fixed_types.len();

        let mut a: Vec<Vec<Rational>> = Vec::new();
        let mut b: Vec<Rational> = Vec::new();

        // Indifference: each fixed type is exactly at its value on every
        // action of its declared support.
        for &p in &fixed_types {
            let marginal = sg.type_marginal(fixed, p).clone();
            for &u in support_of(fixed, p) {
                let mut row = vec![zero(); cols];
                for (x, p1, p2, w) in sg.belief.support() {
                    let own = if fixed == 0 { p1 } else { p2 };
                    if own != p {
                        continue;
                    }
                    let opp = if fixed == 0 { p2 } else { p1 };
                    for &uo in support_of(mixing, opp) {
                        let (u1, u2) = if fixed == 0 { (u, uo) } else { (uo, u) };
                        let coeff = w.clone() * sg.cost_entry(fixed, x, p1, p2, u1, u2)
                            / marginal.clone();
                        row[col_of[&(opp, uo)]] += coeff;
                    }
                }
                row[value_col[&p]] = -one();
                a.push(row);
                b.push(zero());
            }
        }
        // Normalization of each mixing type's weights.
        for &q in &mix_types {
            let mut row = vec![zero(); cols];
            for &u in support_of(mixing, q) {
                row[col_of[&(q, u)]] = one();
            }
            a.push(row);
            b.push(one());
        }

        let x = solve_linear(a, b)?;
        // Assemble full behavioral rows; every declared support weight
        // must be strictly positive (smaller supports cover the rest).
        let mut rows: Vec<Vec<Rational>> =
            vec![vec![zero(); sg.n_actions[mixing]]; sg.n_types[mixing]];
        for (r, row) in rows.iter_mut().enumerate() {
            if !mix_types.contains(&r) {
                row[0] = one();
            }
        }
        for (&(q, u), &c) in &col_of {
            if x[c] <= zero() {
                return None;
            }
            rows[q][u] = x[c].clone();
        }
        Some(rows)
    };

    let Some(rows2) = solve_side(1) else {
        return Ok(None);
    };
    let Some(rows1) = solve_side(0) else {
        return Ok(None);
    };
    let g1 = Prescription::Behavioral(rows1);
    let g2 = Prescription::Behavioral(rows2);

    // Full equilibrium conditions: support inside the best-response set
    // for every positive-mass type of both controllers.
    for i in 0..2 {
        let (own, opp): (&Prescription, &Prescription) =
            if i == 0 { (&g1, &g2) } else { (&g2, &g1) };
        let table = stage_best_response_values(sg, i, opp);
        for &p in &sg.type_support[i] {
            let (_, argmin) = table[p].as_ref().unwrap();
            for (u, _) in own.support_of(p) {
                if !argmin.contains(&u) {
                    return Ok(None);
                }
            }
        }
    }

    let values = sg.expected_values(&g1, &g2);
    Ok(Some(StageEquilibrium {
        prescriptions: (g1, g2),
        values,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::initial_belief;
    use crate::info::{build_information_structure, StructureKind};
    use crate::rational::{rat, rat_int};
    use crate::testgames;

    fn one_step(game: &ValidatedGame) -> InformationStructure {
        build_information_structure(&StructureKind::OneStepDelay, game).unwrap()
    }

    /// Reachable stage-2 belief of the worked example with P(X=0) = prob0.
    fn stage2_belief(game: &ValidatedGame, s: &InformationStructure, prob0: Rational) -> Belief {
        let pi = initial_belief(game, s).unwrap();
        for z in 0..s.increment_count(0) {
            if let Ok(next) = belief_update_strategy_free(game, s, &pi, z) {
                if next.state_marginal(0) == prob0 {
                    return next;
                }
            }
        }
        panic!("no reachable stage-2 belief with P(X=0) = {prob0:?}");
    }

    #[test]
    fn terminal_stage_game_equals_raw_costs() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi2 = stage2_belief(&game, &s, rat(1, 4));
        let sg = build_stage_game(&game, &s, &pi2, None).unwrap();
        for x in 0..2 {
            for u1 in 0..2 {
                for u2 in 0..2 {
                    assert_eq!(*sg.cost_entry(0, x, x, 0, u1, u2), *game.cost(0, x, u1, u2));
                }
            }
        }
    }

    #[test]
    fn terminal_equilibria_include_all_ones_with_example_values() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        for prob0 in [rat(1, 4), rat(2, 5), rat(1, 2)] {
            let pi2 = stage2_belief(&game, &s, prob0.clone());
            let sg = build_stage_game(&game, &s, &pi2, None).unwrap();
            let eqs = enumerate_pure_bne(&sg);
            let all_ones = eqs
                .iter()
                .find(|e| {
                    e.prescriptions
                        == (
                            Prescription::Pure(vec![1, 1]),
                            Prescription::Pure(vec![1, 1]),
                        )
                })
                .unwrap_or_else(|| panic!("all-ones missing at {prob0:?}"));
            assert_eq!(all_ones.values.0, rat_int(1) - prob0);
            assert_eq!(all_ones.values.1, rat_int(0));
            for eq in &eqs {
                audit_equilibrium(&sg, eq).unwrap();
            }
        }
    }

    #[test]
    fn terminal_equilibrium_list_at_one_quarter() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi2 = stage2_belief(&game, &s, rat(1, 4));
        let sg = build_stage_game(&game, &s, &pi2, None).unwrap();
        let eqs = enumerate_pure_bne(&sg);
        let pairs: Vec<(Vec<usize>, Vec<usize>)> = eqs
            .iter()
            .map(|e| match &e.prescriptions {
                (Prescription::Pure(a), Prescription::Pure(b)) => (a.clone(), b.clone()),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(
            pairs,
            vec![
                (vec![0, 1], vec![1, 1]),
                (vec![1, 0], vec![0, 0]),
                (vec![1, 1], vec![1, 1]),
            ]
        );
    }

    #[test]
    fn best_response_values_match_the_hand_enumeration() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi2 = stage2_belief(&game, &s, rat(1, 4));
        let sg = build_stage_game(&game, &s, &pi2, None).unwrap();
        let opp = Prescription::Pure(vec![1, 1]);
        let table = stage_best_response_values(&sg, 0, &opp);
        let (costs0, argmin0) = table[0].as_ref().unwrap();
        assert_eq!(costs0, &vec![rat_int(0), rat_int(0)]);
        assert_eq!(argmin0, &vec![0, 1]);
        let (costs1, argmin1) = table[1].as_ref().unwrap();
        assert_eq!(costs1, &vec![rat_int(1), rat_int(1)]);
        assert_eq!(argmin1, &vec![0, 1]);
    }

    fn stage1_continuation(game: &ValidatedGame, s: &InformationStructure) -> ValueLookup {
        // All-ones chosen at every stage-2 belief: V1 = P(X=1), V2 = 0.
        let pi = initial_belief(game, s).unwrap();
        let mut table = ValueLookup::new();
        for z in 0..s.increment_count(0) {
            if let Ok(next) = belief_update_strategy_free(game, s, &pi, z) {
                let v1 = rat_int(1) - next.state_marginal(0);
                table.insert(next, (v1, rat_int(0)));
            }
        }
        table
    }

    #[test]
    fn continuation_summands_match_the_example() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        let table = stage1_continuation(&game, &s);
        let sg = build_stage_game(&game, &s, &pi, Some(&table)).unwrap();
        let summand = |x: usize, u1: usize, u2: usize| {
            sg.cost_entry(0, x, x, 0, u1, u2).clone() - game.cost(0, x, u1, u2)
        };
        assert_eq!(summand(0, 0, 0), rat(3, 4));
        assert_eq!(summand(0, 1, 1), rat(3, 4));
        assert_eq!(summand(0, 0, 1), rat(3, 5));
        assert_eq!(summand(1, 1, 0), rat(3, 5));
        assert_eq!(summand(1, 0, 0), rat(1, 2));
        assert_eq!(
            sg.cost_entry(1, 0, 0, 0, 0, 1).clone() - game.cost(1, 0, 0, 1),
            rat_int(0)
        );
    }

    #[test]
    fn stage1_equilibrium_has_the_golden_values() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        let table = stage1_continuation(&game, &s);
        let sg = build_stage_game(&game, &s, &pi, Some(&table)).unwrap();
        let eqs = enumerate_pure_bne(&sg);
        let flip_flip = eqs
            .iter()
            .find(|e| {
                e.prescriptions
                    == (
                        Prescription::Pure(vec![1, 0]),
                        Prescription::Pure(vec![1, 0]),
                    )
            })
            .expect("flip/flip equilibrium");
        assert_eq!(flip_flip.values, (rat(47, 60), rat(1, 3)));
        // averaging identity: the value is the marginal-weighted sum of
        // type-conditional equilibrium costs
        let mut avg = rat_int(0);
        for p in 0..2 {
            let cond = sg
                .conditional_cost(0, p, 1 - p, &flip_flip.prescriptions.1)
                .unwrap();
            avg += sg.type_marginal(0, p).clone() * cond;
        }
        assert_eq!(avg, rat(47, 60));
    }

    #[test]
    fn missing_continuation_value_is_reported() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        let empty = ValueLookup::new();
        match build_stage_game(&game, &s, &pi, Some(&empty)) {
            Err(Error::MissingContinuationValue { stage, belief }) => {
                assert_eq!(stage, 2);
                assert!(belief.contains('/'));
            }
            other => panic!("expected MissingContinuationValue, got {other:?}"),
        }
    }

    #[test]
    fn matching_pennies_has_no_pure_but_uniform_mixed() {
        let game = testgames::matching_pennies(1);
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        let sg = build_stage_game(&game, &s, &pi, None).unwrap();
        assert!(enumerate_pure_bne(&sg).is_empty());
        let eq = solve_mixed_bne(&sg).unwrap();
        let half = rat(1, 2);
        assert_eq!(
            eq.prescriptions.0,
            Prescription::Behavioral(vec![vec![half.clone(), half.clone()]])
        );
        assert_eq!(
            eq.prescriptions.1,
            Prescription::Behavioral(vec![vec![half.clone(), half.clone()]])
        );
        assert_eq!(eq.values, (half.clone(), half));
        audit_equilibrium(&sg, &eq).unwrap();
    }

    #[test]
    fn mixed_solver_respects_argmin_when_pure_exists() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi2 = stage2_belief(&game, &s, rat(1, 4));
        let sg = build_stage_game(&game, &s, &pi2, None).unwrap();
        let eq = solve_mixed_bne(&sg).unwrap();
        audit_equilibrium(&sg, &eq).unwrap();
    }

    #[test]
    fn single_action_game_is_trivial() {
        let spec = crate::game::GameSpec::stationary(
            1,
            vec!["s".into()],
            [vec!["only".into()], vec!["only".into()]],
            [vec!["o".into()], vec!["o".into()]],
            vec![rat_int(1)],
            vec![],
            [vec![rat_int(1)], vec![rat_int(1)]],
            [vec![rat(7, 2)], vec![rat(-1, 3)]],
        );
        let game = crate::game::validate_game_spec(spec).unwrap();
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        let sg = build_stage_game(&game, &s, &pi, None).unwrap();
        let pure = enumerate_pure_bne(&sg);
        assert_eq!(pure.len(), 1);
        assert_eq!(pure[0].values, (rat(7, 2), rat(-1, 3)));
        let mixed = solve_mixed_bne(&sg).unwrap();
        assert_eq!(mixed.values, (rat(7, 2), rat(-1, 3)));
    }

    #[test]
    fn zero_mass_types_are_pinned_to_the_first_action() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        // point mass on (x=0, p1=0, p2=0): types p1=1 and p2=1 unreachable
        let mut weights = vec![zero(); 8];
        weights[0] = one();
        let point = Belief::new(0, (2, 2, 2), weights).unwrap();
        let mut table = ValueLookup::new();
        for z in 0..s.increment_count(0) {
            if let Ok(next) = belief_update_strategy_free(&game, &s, &point, z) {
                table.insert(next, (rat_int(0), rat_int(0)));
            }
        }
        let sg = build_stage_game(&game, &s, &point, Some(&table)).unwrap();
        let eqs = enumerate_pure_bne(&sg);
        assert!(!eqs.is_empty());
        for eq in &eqs {
            match &eq.prescriptions {
                (Prescription::Pure(a1), Prescription::Pure(a2)) => {
                    assert_eq!(a1[1], 0);
                    assert_eq!(a2[1], 0);
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn zero_continuation_table_reduces_to_raw_costs() {
        let game = testgames::bsc_delayed_sharing(2);
        let s = one_step(&game);
        let pi = initial_belief(&game, &s).unwrap();
        let mut table = ValueLookup::new();
        for z in 0..s.increment_count(0) {
            if let Ok(next) = belief_update_strategy_free(&game, &s, &pi, z) {
                table.insert(next, (rat_int(0), rat_int(0)));
            }
        }
        let sg = build_stage_game(&game, &s, &pi, Some(&table)).unwrap();
        for (x, p1, p2, _) in pi.support() {
            for u1 in 0..2 {
                for u2 in 0..2 {
                    assert_eq!(
                        *sg.cost_entry(0, x, p1, p2, u1, u2),
                        *game.cost(0, x, u1, u2)
                    );
                }
            }
        }
    }
}
