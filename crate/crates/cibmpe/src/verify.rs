//! Independent verification oracles.
//!
//! Nothing here consumes belief weights as probabilities: expected costs
//! come from exhaustive enumeration of the raw game tree (states,
//! observations, actions) with exact kernel probabilities, and the best
//! response is a dynamic program over one controller's information
//! realizations. The belief graph inside a [`StrategyProfile`] serves
//! only as the strategy's own bookkeeping for resolving common
//! information to a prescription.

use std::collections::HashMap;

use crate::belief::Prescription;
use crate::error::{Error, Result};
use crate::game::{Controller, ValidatedGame};
use crate::info::{apply_increment_map, apply_private_update, InformationStructure};
use crate::rational::{zero, Rational};
use crate::solve::{EquilibriumResult, SolveMode, StrategyProfile};
use crate::stage_game::{build_stage_game, stage_best_response_values, ValueLookup};

/// Exact expected total costs of a strategy profile, by forward
/// enumeration of every joint realization (no sampling, no beliefs).
pub fn evaluate_joint_cost(
    game: &ValidatedGame,
    s: &InformationStructure,
    profile: &StrategyProfile,
) -> Result<(Rational, Rational)> {
    s.check_game(game)?;
    if profile.stage_count() != game.horizon() {
        return Err(Error::ProfileMismatch(format!(
            "profile has {} stages, game has {}",
            profile.stage_count(),
            game.horizon()
        )));
    }
    let mut totals = (zero(), zero());

    // Depth-first over (stage, state, private infos, profile node).
    struct Frame<'a> {
        game: &'a ValidatedGame,
        s: &'a InformationStructure,
        profile: &'a StrategyProfile,
    }
    fn walk(
        f: &Frame<'_>,
        t: usize,
        x: usize,
        p1: usize,
        p2: usize,
        node: usize,
        prob: Rational,
        totals: &mut (Rational, Rational),
    ) -> Result<()> {
        let (g1, g2) = f.profile.prescriptions(t, node);
        for (u1, w1) in g1.support_of(p1) {
            for (u2, w2) in g2.support_of(p2) {
                let pw = prob.clone() * &w1 * &w2;
                totals.0 += pw.clone() * f.game.cost(0, x, u1, u2);
                totals.1 += pw.clone() * f.game.cost(1, x, u1, u2);
                if t + 1 >= f.game.horizon() {
                    continue;
                }
                for xn in 0..f.game.states().len() {
                    let pt = f.game.transition(t, x, u1, u2, xn);
                    if *pt == zero() {
                        continue;
                    }
                    for y1n in 0..f.game.observations(0).len() {
                        let q1 = f.game.obs_prob(0, t + 1, xn, y1n);
                        if *q1 == zero() {
                            continue;
                        }
                        for y2n in 0..f.game.observations(1).len() {
                            let q2 = f.game.obs_prob(1, t + 1, xn, y2n);
                            if *q2 == zero() {
                                continue;
                            }
                            let z = apply_increment_map(f.s, t, p1, p2, u1, u2, y1n, y2n)?;
                            let node_next = f.profile.advance(t, node, z)?;
                            let p1n = apply_private_update(f.s, t, 0, p1, u1, y1n)?;
                            let p2n = apply_private_update(f.s, t, 1, p2, u2, y2n)?;
                            walk(
                                f,
                                t + 1,
                                xn,
                                p1n,
                                p2n,
                                node_next,
                                pw.clone() * pt * q1 * q2,
                                totals,
                            )?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    let frame = Frame { game, s, profile };
    for x in 0..game.states().len() {
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
                walk(&frame, 0, x, p1, p2, 0, base.clone() * q1 * q2, &mut totals)?;
            }
        }
    }
    Ok(totals)
}

/// Options for the best-response dynamic program.
#[derive(Debug, Clone)]
pub struct BestResponseOptions {
    /// Cap on information nodes per stage.
    pub max_nodes_per_stage: usize,
}

impl Default for BestResponseOptions {
    fn default() -> Self {
        BestResponseOptions { max_nodes_per_stage: 200_000 }
    }
}

/// The best response of one controller against a fixed opponent: its
/// exact optimal expected total cost and a pure strategy attaining it,
/// keyed by the controller's information realizations (increment
/// history plus private information).
#[derive(Debug, Clone)]
pub struct BestResponse {
    pub controller: Controller,
    pub value: Rational,
    /// `(stage, increment history, private info) -> action`.
    pub actions: HashMap<(usize, Vec<usize>, usize), usize>,
}

/// Information node of the deviating controller: the common-information
/// realization (as the increment history) plus its private realization.
type NodeKey = (Vec<usize>, usize);

/// Unnormalized joint mass over (state, opponent private info) carried
/// by an information node, plus the opponent's profile node for
/// resolving its prescription.
struct NodeData {
    mass: HashMap<(usize, usize), Rational>,
    opp_node: usize,
}

/// Exact best response of controller `i` against the opponent strategy
/// fixed by `profile`, computed by backward induction over controller
/// `i`'s information realizations. The per-node conditional over (state,
/// opponent private info) is obtained by Bayes from a forward pass in
/// which controller `i` plays uniformly — legitimate exactly because the
/// strategy-independence property (checked before solving) makes that
/// conditional the same under every strategy of controller `i` that
/// reaches the node.
pub fn best_response_value(
    game: &ValidatedGame,
    s: &InformationStructure,
    i: Controller,
    profile: &StrategyProfile,
    options: &BestResponseOptions,
) -> Result<BestResponse> {
    s.check_game(game)?;
    if i > 1 {
        return Err(Error::OutOfRange {
            what: "controller".to_string(),
            detail: format!("{i}"),
        });
    }
    let j = 1 - i;
    let horizon = game.horizon();

    // Forward pass: per stage, information nodes of controller i with
    // their unnormalized (state, opponent-private) masses.
    let mut levels: Vec<Vec<(NodeKey, NodeData)>> = Vec::with_capacity(horizon);
    let mut first: HashMap<NodeKey, usize> = HashMap::new();
    let mut roots: Vec<(NodeKey, NodeData)> = Vec::new();
    for x in 0..game.states().len() {
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
                let (own, opp) = if i == 0 { (p1, p2) } else { (p2, p1) };
                let key: NodeKey = (Vec::new(), own);
                let mass = base.clone() * q1 * q2;
                match first.get(&key) {
                    Some(&idx) => {
                        *roots[idx]
                            .1
                            .mass
                            .entry((x, opp))
                            .or_insert_with(zero) += mass;
                    }
                    None => {
                        first.insert(key.clone(), roots.len());
                        let mut m = HashMap::new();
                        m.insert((x, opp), mass);
                        roots.push((key, NodeData { mass: m, opp_node: 0 }));
                    }
                }
            }
        }
    }
    levels.push(roots);

    let n_own_actions = game.actions(i).len();
    let uniform = crate::rational::rat(1, n_own_actions as i64);

    for t in 0..horizon.saturating_sub(1) {
        let mut next: Vec<(NodeKey, NodeData)> = Vec::new();
        let mut index: HashMap<NodeKey, usize> = HashMap::new();
        for (key, data) in &levels[t] {
            let (zs, own_p) = key;
            let (g1, g2) = profile.prescriptions(t, data.opp_node);
            let opp_presc = if i == 0 { g2 } else { g1 };
            for (&(x, opp_p), w) in &data.mass {
                for u_own in 0..n_own_actions {
                    let reach = w.clone() * &uniform;
                    for (u_opp, w_opp) in opp_presc.support_of(opp_p) {
                        let (u1, u2) = if i == 0 { (u_own, u_opp) } else { (u_opp, u_own) };
                        let (p1, p2) = if i == 0 { (*own_p, opp_p) } else { (opp_p, *own_p) };
                        let scale = reach.clone() * &w_opp;
                        for xn in 0..game.states().len() {
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
                                    let (own_n, opp_n) =
                                        if i == 0 { (p1n, p2n) } else { (p2n, p1n) };
                                    let mut zs_next = zs.clone();
                                    zs_next.push(z);
                                    let mass = scale.clone() * pt * q1 * q2;
                                    let key_next: NodeKey = (zs_next, own_n);
                                    match index.get(&key_next) {
                                        Some(&idx) => {
                                            *next[idx]
                                                .1
                                                .mass
                                                .entry((xn, opp_n))
                                                .or_insert_with(zero) += mass;
                                        }
                                        None => {
                                            let opp_node =
                                                profile.advance(t, data.opp_node, z)?;
                                            index.insert(key_next.clone(), next.len());
                                            let mut m = HashMap::new();
                                            m.insert((xn, opp_n), mass);
                                            next.push((
                                                key_next,
                                                NodeData { mass: m, opp_node },
                                            ));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            if next.len() > options.max_nodes_per_stage {
                return Err(Error::BudgetExceeded {
                    stage: t + 2,
                    frontier: next.len(),
                });
            }
        }
        levels.push(next);
    }

    // Backward pass over the merged information nodes.
    let mut actions: HashMap<(usize, Vec<usize>, usize), usize> = HashMap::new();
    // Conditional cost-to-go per node of the current level.
    let mut value_next: HashMap<NodeKey, Rational> = HashMap::new();
    for t in (0..horizon).rev() {
        let mut value_here: HashMap<NodeKey, Rational> = HashMap::new();
        for (key, data) in &levels[t] {
            let (zs, own_p) = key;
            let total_mass: Rational = data.mass.values().cloned().sum();
            let (g1, g2) = profile.prescriptions(t, data.opp_node);
            let opp_presc = if i == 0 { g2 } else { g1 };
            let mut best: Option<(Rational, usize)> = None;
            for u_own in 0..n_own_actions {
                let mut raw = zero();
                for (&(x, opp_p), w) in &data.mass {
                    for (u_opp, w_opp) in opp_presc.support_of(opp_p) {
                        let (u1, u2) = if i == 0 { (u_own, u_opp) } else { (u_opp, u_own) };
                        let scale = w.clone() * &w_opp;
                        raw += scale.clone() * game.cost(i, x, u1, u2);
                        if t + 1 >= horizon {
                            continue;
                        }
                        let (p1, p2) = if i == 0 { (*own_p, opp_p) } else { (opp_p, *own_p) };
                        for xn in 0..game.states().len() {
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
                                    let p1n = apply_private_update(s, t, 0, p1, u1, y1n)?;
                                    let p2n = apply_private_update(s, t, 1, p2, u2, y2n)?;
                                    let own_n = if i == 0 { p1n } else { p2n };
                                    let mut zs_next = zs.clone();
                                    zs_next.push(z);
                                    let cont = value_next
                                        .get(&(zs_next, own_n))
                                        .expect("child node visited in forward pass");
                                    rawadd(&mut raw, scale.clone() * pt * q1 * q2 * cont);
                                }
                            }
                        }
                    }
                }
                let better = match &best {
                    None => true,
                    Some((b, _)) => raw < *b,
                };
                if better {
                    best = Some((raw, u_own));
                }
            }
            let (raw_best, u_best) = best.expect("at least one action");
            actions.insert((t, zs.clone(), *own_p), u_best);
            value_here.insert(key.clone(), raw_best / total_mass);
        }
        value_next = value_here;
    }

    // Total: stage-1 nodes weighted by their absolute probability.
    let mut value = zero();
    for (key, data) in &levels[0] {
        let mass: Rational = data.mass.values().cloned().sum();
        value += mass * &value_next[key];
    }

    Ok(BestResponse {
        controller: i,
        value,
        actions,
    })
}

fn rawadd(acc: &mut Rational, v: Rational) {
    *acc += v;
}

/// Result of the unilateral-deviation test.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub equilibrium_costs: (Rational, Rational),
    pub best_response_costs: (Rational, Rational),
    /// `J^i - B^i`, exactly; nonnegative by construction.
    pub gaps: (Rational, Rational),
    pub passed: bool,
    /// The improving deviations, present for each controller whose gap
    /// is strictly positive.
    pub deviations: [Option<BestResponse>; 2],
}

/// Ground-truth equilibrium test: evaluates the profile and both best
/// responses on the raw game tree and compares exactly. Passes iff
/// neither controller can lower its cost by unilaterally deviating.
pub fn verify_nash(
    game: &ValidatedGame,
    s: &InformationStructure,
    profile: &StrategyProfile,
) -> Result<VerificationReport> {
    let costs = evaluate_joint_cost(game, s, profile)?;
    let options = BestResponseOptions::default();
    let br1 = best_response_value(game, s, 0, profile, &options)?;
    let br2 = best_response_value(game, s, 1, profile, &options)?;
    let gaps = (
        costs.0.clone() - &br1.value,
        costs.1.clone() - &br2.value,
    );
    if gaps.0 < zero() || gaps.1 < zero() {
        return Err(Error::Internal(format!(
            "best response exceeded the profile's own cost (gaps {}, {})",
            crate::rational::format_rational(&gaps.0),
            crate::rational::format_rational(&gaps.1),
        )));
    }
    let passed = gaps.0 == zero() && gaps.1 == zero();
    let best_response_costs = (br1.value.clone(), br2.value.clone());
    let deviations = [
        (gaps.0 != zero()).then_some(br1),
        (gaps.1 != zero()).then_some(br2),
    ];
    Ok(VerificationReport {
        equilibrium_costs: costs,
        best_response_costs,
        gaps,
        passed,
        deviations,
    })
}

/// Outcome of re-deriving the per-belief minimization conditions on a
/// solve result.
#[derive(Debug, Clone)]
pub struct MpeAudit {
    pub passed: bool,
    pub witnesses: Vec<String>,
}

/// Re-derives, at every stage and reachable belief, the stage
/// minimization against the stored opponent prescription and the stored
/// continuation values, and confirms the stored prescription attains the
/// minimum (team mode: the stored pair attains the joint minimum).
pub fn verify_mpe_conditions(
    game: &ValidatedGame,
    s: &InformationStructure,
    result: &EquilibriumResult,
) -> Result<MpeAudit> {
    s.check_game(game)?;
    let mut witnesses = Vec::new();
    let horizon = game.horizon();

    for t in (0..horizon).rev() {
        match result.mode {
            SolveMode::Team => {
                audit_team_stage(game, s, result, t, &mut witnesses)?;
            }
            _ => {
                let lookup = (t + 1 < horizon).then(|| result.value_lookup(t + 1));
                for (idx, belief) in result.graph.beliefs(t).iter().enumerate() {
                    let sg = build_stage_game(game, s, belief, lookup.as_ref())?;
                    let (g1, g2) = &result.policies[t][idx];
                    let stored = &result.values[t][idx];
                    if sg.expected_values(g1, g2) != *stored {
                        witnesses.push(format!(
                            "stage {}, belief {}: stored values do not recompute from the policy",
                            t + 1,
                            idx
                        ));
                        continue;
                    }
                    for i in 0..2 {
                        let (own, opp): (&Prescription, &Prescription) =
                            if i == 0 { (g1, g2) } else { (g2, g1) };
                        match own {
                            Prescription::Pure(own_actions) => {
                                // Minimization over all prescriptions: the
                                // per-type argmin audit is equivalent and
                                // exhaustive.
                                let table = stage_best_response_values(&sg, i, opp);
                                for &p in sg.type_support(i) {
                                    let (costs, argmin) = table[p].as_ref().unwrap();
                                    if !argmin.contains(&own_actions[p]) {
                                        witnesses.push(format!(
                                            "stage {}, belief {}: controller {} type {} plays \
                                             action {} but {:?} is strictly better (costs {:?})",
                                            t + 1,
                                            idx,
                                            i + 1,
                                            p,
                                            own_actions[p],
                                            argmin,
                                            costs
                                                .iter()
                                                .map(crate::rational::format_rational)
                                                .collect::<Vec<_>>(),
                                        ));
                                    }
                                }
                            }
                            Prescription::Behavioral(_) => {
                                let table = stage_best_response_values(&sg, i, opp);
                                for &p in sg.type_support(i) {
                                    let (_, argmin) = table[p].as_ref().unwrap();
                                    for (u, _) in own.support_of(p) {
                                        if !argmin.contains(&u) {
                                            witnesses.push(format!(
                                                "stage {}, belief {}: controller {} type {} mixes \
                                                 onto action {} outside the best-response set {:?}",
                                                t + 1,
                                                idx,
                                                i + 1,
                                                p,
                                                u,
                                                argmin
                                            ));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(MpeAudit {
        passed: witnesses.is_empty(),
        witnesses,
    })
}

fn audit_team_stage(
    game: &ValidatedGame,
    s: &InformationStructure,
    result: &EquilibriumResult,
    t: usize,
    witnesses: &mut Vec<String>,
) -> Result<()> {
    let horizon = game.horizon();
    for (idx, belief) in result.graph.beliefs(t).iter().enumerate() {
        let sup1 = belief.type_support(0);
        let sup2 = belief.type_support(1);
        let all1 =
            crate::belief::pure_prescriptions(&sup1, s.private_count(0, t), game.actions(0).len());
        let all2 =
            crate::belief::pure_prescriptions(&sup2, s.private_count(1, t), game.actions(1).len());
        let mut best: Option<Rational> = None;
        let mut stored_cost: Option<Rational> = None;
        let stored_pair = &result.policies[t][idx];
        for a1 in &all1 {
            for a2 in &all2 {
                let g1 = Prescription::Pure(a1.clone());
                let g2 = Prescription::Pure(a2.clone());
                let mut total = zero();
                for (x, p1, p2, w) in belief.support() {
                    total += w.clone() * game.cost(0, x, a1[p1], a2[p2]);
                }
                if t + 1 < horizon {
                    let fwd = crate::belief::joint_forward_distribution(game, s, belief, &g1, &g2)?;
                    for (z, mass) in fwd.z_marginal().into_iter().enumerate() {
                        if mass == zero() {
                            continue;
                        }
                        let next = fwd.next_belief_given(z, s.increment_space(t).label(z))?;
                        let nidx = result.graph.find(&next).ok_or_else(|| {
                            Error::Internal("successor missing from team graph".to_string())
                        })?;
                        total += mass * &result.values[t + 1][nidx].0;
                    }
                }
                if *stored_pair == (g1, g2) {
                    stored_cost = Some(total.clone());
                }
                if best.as_ref().is_none_or(|b| total < *b) {
                    best = Some(total);
                }
            }
        }
        let best = best.expect("nonempty prescription space");
        match stored_cost {
            None => witnesses.push(format!(
                "stage {}, belief {}: stored team prescription pair not found in the \
                 prescription space",
                t + 1,
                idx
            )),
            Some(cost) => {
                if cost != best {
                    witnesses.push(format!(
                        "stage {}, belief {}: stored pair costs {}, the joint minimum is {}",
                        t + 1,
                        idx,
                        crate::rational::format_rational(&cost),
                        crate::rational::format_rational(&best),
                    ));
                } else if cost != result.values[t][idx].0 {
                    witnesses.push(format!(
                        "stage {}, belief {}: stored team value differs from the recomputed cost",
                        t + 1,
                        idx
                    ));
                }
            }
        }
    }
    Ok(())
}
