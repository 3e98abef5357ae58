//! Information structures: how private information evolves and what
//! becomes common knowledge between stages.
//!
//! A structure fixes, per stage, the private-realization spaces of both
//! controllers, the increment space (what joins the common information
//! at each boundary), the increment map `zeta`, the private-update maps
//! `xi`, and the stage-1 rule `eta` that turns the first observation
//! into initial private information. All maps are materialized as total
//! lookup tables, so totality holds by construction.
//!
//! Stage-1 common information is always the single empty realization;
//! structures whose sharing pattern would make part of the very first
//! observation common (instant sharing, global-state patterns) either
//! fold that data into the first increment or drop it, as documented on
//! each builder.

use crate::error::{Error, Result};
use crate::game::{Controller, ValidatedGame};

/// Which of the two asymmetric-delay variants to build: in both, only
/// controller 1's actions drive the state; `A` shares controller 1's
/// observations instantly, `B` with one step of delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayCase {
    A,
    B,
}

/// Declared factorization of the state space into a global component and
/// one local component per controller. State labels must be exactly the
/// product `global|local1|local2` in row-major declared order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalLocalSplit {
    pub noisy: bool,
    pub global: Vec<String>,
    pub local1: Vec<String>,
    pub local2: Vec<String>,
    /// Labels of the shared noisy channel output; required iff `noisy`.
    pub common_obs: Option<Vec<String>>,
}

/// The built-in information patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructureKind {
    /// All observations and actions shared with one step of delay;
    /// private information is the latest own observation.
    OneStepDelay,
    /// Controller 1's observations shared instantly, controller 2's with
    /// one step of delay; all actions shared.
    OneDirectionalOneStep,
    /// Only controller 1 controls the state; controller 2's observations
    /// reach controller 1 with a delay of `delay >= 1` steps.
    SingleControllerDelay { case: DelayCase, delay: usize },
    /// Product state with a commonly observed global component and a
    /// privately observed local component per controller.
    GlobalLocal(GlobalLocalSplit),
    /// Action-independent state; observations shared with delay `delay`.
    Uncontrolled { delay: usize },
    /// Everything shared instantly; no private information.
    Symmetric,
    /// Observations and actions shared with a delay of two steps. This is
    /// the classic pattern for which the common-information belief is
    /// *not* strategy independent; shipped as a counterexample preset
    /// (built through the custom-structure path).
    TwoStepDelay,
}

impl StructureKind {
    pub fn name(&self) -> &'static str {
        match self {
            StructureKind::OneStepDelay => "one_step_delay",
            StructureKind::OneDirectionalOneStep => "one_directional_one_step",
            StructureKind::SingleControllerDelay { case: DelayCase::A, .. } => {
                "single_controller_delay_a"
            }
            StructureKind::SingleControllerDelay { case: DelayCase::B, .. } => {
                "single_controller_delay_b"
            }
            StructureKind::GlobalLocal(_) => "global_local",
            StructureKind::Uncontrolled { .. } => "uncontrolled",
            StructureKind::Symmetric => "symmetric",
            StructureKind::TwoStepDelay => "two_step_delay",
        }
    }
}

/// An ordered finite realization space with printable labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    labels: Vec<String>,
}

impl Space {
    fn new(labels: Vec<String>) -> Self {
        debug_assert!(!labels.is_empty());
        Space { labels }
    }

    fn singleton() -> Self {
        Space::new(vec!["-".to_string()])
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }
}

/// Flat total lookup table over a small product domain.
#[derive(Debug, Clone, PartialEq, Eq)]
struct LookupTable {
    radices: Vec<usize>,
    data: Vec<usize>,
}

impl LookupTable {
    fn build(radices: Vec<usize>, f: impl Fn(&[usize]) -> usize, codomain: usize) -> Self {
        let total: usize = radices.iter().product();
        let mut data = Vec::with_capacity(total);
        let mut idx = vec![0usize; radices.len()];
        for _ in 0..total {
            let v = f(&idx);
            debug_assert!(v < codomain, "table output {v} out of codomain {codomain}");
            data.push(v);
            for axis in (0..radices.len()).rev() {
                idx[axis] += 1;
                if idx[axis] < radices[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
        LookupTable { radices, data }
    }

    fn get(&self, idx: &[usize]) -> usize {
        let mut off = 0;
        for (i, &k) in idx.iter().enumerate() {
            debug_assert!(k < self.radices[i]);
            off = off * self.radices[i] + k;
        }
        self.data[off]
    }
}

/// Mixed-radix encoder for product spaces, used both for windowed
/// private realizations and for tuple-valued increments.
#[derive(Debug, Clone)]
struct ProductCoder {
    radices: Vec<usize>,
}

impl ProductCoder {
    fn new(radices: Vec<usize>) -> Self {
        ProductCoder { radices }
    }

    fn len(&self) -> usize {
        self.radices.iter().product()
    }

    fn encode(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.radices.len());
        let mut v = 0;
        for (i, &d) in digits.iter().enumerate() {
            debug_assert!(d < self.radices[i]);
            v = v * self.radices[i] + d;
        }
        v
    }

    fn decode(&self, mut value: usize) -> Vec<usize> {
        let mut digits = vec![0usize; self.radices.len()];
        for i in (0..self.radices.len()).rev() {
            digits[i] = value % self.radices[i];
            value /= self.radices[i];
        }
        digits
    }

    fn labels(&self, component_labels: &[Vec<String>]) -> Vec<String> {
        let mut out = Vec::with_capacity(self.len());
        for v in 0..self.len() {
            let digits = self.decode(v);
            let parts: Vec<&str> = digits
                .iter()
                .enumerate()
                .map(|(i, &d)| component_labels[i][d].as_str())
                .collect();
            out.push(parts.join(","));
        }
        out
    }
}

/// Base labels extended with a leading "absent" marker `-` (digit 0).
fn padded(labels: &[String]) -> Vec<String> {
    let mut v = Vec::with_capacity(labels.len() + 1);
    v.push("-".to_string());
    v.extend(labels.iter().cloned());
    v
}

/// A fully materialized information structure for a specific game.
#[derive(Debug, Clone)]
pub struct InformationStructure {
    name: String,
    kind_desc: String,
    horizon: usize,
    obs_counts: [usize; 2],
    action_counts: [usize; 2],
    state_count: usize,
    private: [Vec<Space>; 2],
    increments: Vec<Space>,
    eta: [Vec<usize>; 2],
    /// Per boundary `t`, per controller: table over (p, u, y') -> p'.
    xi: [Vec<LookupTable>; 2],
    /// Per boundary `t`: table over (p1, p2, u1, u2, y1', y2') -> z.
    zeta: Vec<LookupTable>,
    claims_strategy_independence: bool,
}

impl InformationStructure {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind_description(&self) -> &str {
        &self.kind_desc
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn claims_strategy_independence(&self) -> bool {
        self.claims_strategy_independence
    }

    pub fn private_space(&self, i: Controller, t: usize) -> &Space {
        &self.private[i][t]
    }

    pub fn private_count(&self, i: Controller, t: usize) -> usize {
        self.private[i][t].len()
    }

    /// Increment space for the boundary from 0-based stage `t` to `t+1`.
    pub fn increment_space(&self, t: usize) -> &Space {
        &self.increments[t]
    }

    pub fn increment_count(&self, t: usize) -> usize {
        self.increments[t].len()
    }

    /// Stage-1 private information from the first observation.
    pub fn initial_private(&self, i: Controller, y: usize) -> Result<usize> {
        if i > 1 || y >= self.obs_counts[i.min(1)] {
            return Err(Error::OutOfDomain(format!(
                "initial private info of controller {} from observation {y}",
                i + 1
            )));
        }
        Ok(self.eta[i][y])
    }

    /// Checks that this structure was built for a game of the same shape.
    pub fn check_game(&self, game: &ValidatedGame) -> Result<()> {
        let ok = self.horizon == game.horizon()
            && self.state_count == game.states().len()
            && self.obs_counts == [game.observations(0).len(), game.observations(1).len()]
            && self.action_counts == [game.actions(0).len(), game.actions(1).len()];
        if ok {
            Ok(())
        } else {
            Err(Error::ProfileMismatch(format!(
                "information structure `{}` was built for a different game shape",
                self.name
            )))
        }
    }

    fn check_boundary(&self, t: usize) -> Result<()> {
        if t + 1 >= self.horizon {
            return Err(Error::OutOfDomain(format!(
                "boundary {} of a {}-stage structure",
                t + 1,
                self.horizon
            )));
        }
        Ok(())
    }
}

/// `zeta`: the increment in common information generated at the boundary
/// from 0-based stage `t` to `t+1`.
#[allow(clippy::too_many_arguments)]
pub fn apply_increment_map(
    s: &InformationStructure,
    t: usize,
    p1: usize,
    p2: usize,
    u1: usize,
    u2: usize,
    y1_next: usize,
    y2_next: usize,
) -> Result<usize> {
    s.check_boundary(t)?;
    let dom = [
        (p1, s.private_count(0, t), "private info of controller 1"),
        (p2, s.private_count(1, t), "private info of controller 2"),
        (u1, s.action_counts[0], "action of controller 1"),
        (u2, s.action_counts[1], "action of controller 2"),
        (y1_next, s.obs_counts[0], "next observation of controller 1"),
        (y2_next, s.obs_counts[1], "next observation of controller 2"),
    ];
    for (v, n, what) in dom {
        if v >= n {
            return Err(Error::OutOfDomain(format!("{what}: index {v} of {n}")));
        }
    }
    Ok(s.zeta[t].get(&[p1, p2, u1, u2, y1_next, y2_next]))
}

/// `xi^i`: controller `i`'s private information after the boundary from
/// 0-based stage `t` to `t+1`.
pub fn apply_private_update(
    s: &InformationStructure,
    t: usize,
    i: Controller,
    p: usize,
    u: usize,
    y_next: usize,
) -> Result<usize> {
    s.check_boundary(t)?;
    if i > 1 {
        return Err(Error::OutOfDomain(format!("controller {i}")));
    }
    let dom = [
        (p, s.private_count(i, t), "private info"),
        (u, s.action_counts[i], "action"),
        (y_next, s.obs_counts[i], "next observation"),
    ];
    for (v, n, what) in dom {
        if v >= n {
            return Err(Error::OutOfDomain(format!(
                "{what} of controller {}: index {v} of {n}",
                i + 1
            )));
        }
    }
    Ok(s.xi[i][t].get(&[p, u, y_next]))
}

/// Everything a custom structure must supply. Spaces are labels; maps
/// are closures over indices, materialized into total tables (and thus
/// range-checked over the whole domain) at build time.
pub struct CustomSpec<'a> {
    pub name: String,
    pub claims_strategy_independence: bool,
    /// Per controller, per stage `t` in `0..horizon`.
    pub private_labels: [Vec<Vec<String>>; 2],
    /// Per boundary `t` in `0..horizon-1`.
    pub increment_labels: Vec<Vec<String>>,
    /// `(y) -> p` at stage 1.
    pub eta: [&'a dyn Fn(usize) -> usize; 2],
    /// `(t, p, u, y') -> p'`.
    pub xi: [&'a dyn Fn(usize, usize, usize, usize) -> usize; 2],
    /// `(t, p1, p2, u1, u2, y1', y2') -> z`.
    pub zeta: &'a dyn Fn(usize, usize, usize, usize, usize, usize, usize) -> usize,
}

impl InformationStructure {
    /// Builds a fully custom structure. The closures are swept over their
    /// whole declared domains here, so a map that ever leaves its
    /// codomain fails fast (in debug builds) instead of corrupting later
    /// arithmetic.
    pub fn from_custom(game: &ValidatedGame, spec: CustomSpec<'_>) -> Result<Self> {
        let horizon = game.horizon();
        for i in 0..2 {
            if spec.private_labels[i].len() != horizon {
                return Err(Error::ShapeMismatch {
                    what: format!("private spaces of controller {}", i + 1),
                    expected: format!("{horizon} stages"),
                    got: format!("{}", spec.private_labels[i].len()),
                });
            }
            if spec.private_labels[i].iter().any(|s| s.is_empty()) {
                return Err(Error::EmptyLabelSet(format!(
                    "private space of controller {}",
                    i + 1
                )));
            }
        }
        if spec.increment_labels.len() + 1 != horizon {
            return Err(Error::ShapeMismatch {
                what: "increment spaces".to_string(),
                expected: format!("{} boundaries", horizon - 1),
                got: format!("{}", spec.increment_labels.len()),
            });
        }
        let obs_counts = [game.observations(0).len(), game.observations(1).len()];
        let action_counts = [game.actions(0).len(), game.actions(1).len()];
        let private: [Vec<Space>; 2] = [
            spec.private_labels[0].iter().cloned().map(Space::new).collect(),
            spec.private_labels[1].iter().cloned().map(Space::new).collect(),
        ];
        let increments: Vec<Space> = spec.increment_labels.iter().cloned().map(Space::new).collect();

        let eta = [
            (0..obs_counts[0]).map(|y| (spec.eta[0])(y)).collect::<Vec<_>>(),
            (0..obs_counts[1]).map(|y| (spec.eta[1])(y)).collect::<Vec<_>>(),
        ];
        for i in 0..2 {
            if eta[i].iter().any(|&p| p >= private[i][0].len()) {
                return Err(Error::OutOfDomain(format!(
                    "eta of controller {} leaves its codomain",
                    i + 1
                )));
            }
        }

        let mut xi: [Vec<LookupTable>; 2] = [Vec::new(), Vec::new()];
        let mut zeta = Vec::new();
        for t in 0..horizon.saturating_sub(1) {
            for i in 0..2 {
                let next_len = private[i][t + 1].len();
                xi[i].push(LookupTable::build(
                    vec![private[i][t].len(), action_counts[i], obs_counts[i]],
                    |idx| (spec.xi[i])(t, idx[0], idx[1], idx[2]),
                    next_len,
                ));
            }
            zeta.push(LookupTable::build(
                vec![
                    private[0][t].len(),
                    private[1][t].len(),
                    action_counts[0],
                    action_counts[1],
                    obs_counts[0],
                    obs_counts[1],
                ],
                |idx| (spec.zeta)(t, idx[0], idx[1], idx[2], idx[3], idx[4], idx[5]),
                increments[t].len(),
            ));
        }

        Ok(InformationStructure {
            name: spec.name.clone(),
            kind_desc: format!("custom:{}", spec.name),
            horizon,
            obs_counts,
            action_counts,
            state_count: game.states().len(),
            private,
            increments,
            eta,
            xi,
            zeta,
            claims_strategy_independence: spec.claims_strategy_independence,
        })
    }
}

/// Instantiates a built-in information pattern for a validated game,
/// checking the pattern's structural preconditions exactly.
pub fn build_information_structure(
    kind: &StructureKind,
    game: &ValidatedGame,
) -> Result<InformationStructure> {
    match kind {
        StructureKind::OneStepDelay => build_one_step_delay(game),
        StructureKind::OneDirectionalOneStep => build_one_directional(game),
        StructureKind::SingleControllerDelay { case, delay } => {
            build_single_controller_delay(game, *case, *delay)
        }
        StructureKind::GlobalLocal(split) => build_global_local(game, split),
        StructureKind::Uncontrolled { delay } => build_uncontrolled(game, *delay),
        StructureKind::Symmetric => build_symmetric(game),
        StructureKind::TwoStepDelay => build_two_step_delay(game),
    }
}

fn obs_labels(game: &ValidatedGame, i: Controller) -> Vec<String> {
    game.observations(i).names().to_vec()
}

fn action_labels(game: &ValidatedGame, i: Controller) -> Vec<String> {
    game.actions(i).names().to_vec()
}

fn build_one_step_delay(game: &ValidatedGame) -> Result<InformationStructure> {
    let horizon = game.horizon();
    let (ny1, ny2) = (game.observations(0).len(), game.observations(1).len());
    let (nu1, nu2) = (game.actions(0).len(), game.actions(1).len());

    let private: [Vec<Space>; 2] = [
        vec![Space::new(obs_labels(game, 0)); horizon],
        vec![Space::new(obs_labels(game, 1)); horizon],
    ];
    let z_coder = ProductCoder::new(vec![ny1, ny2, nu1, nu2]);
    let z_labels = z_coder.labels(&[
        obs_labels(game, 0),
        obs_labels(game, 1),
        action_labels(game, 0),
        action_labels(game, 1),
    ]);

    let mut xi: [Vec<LookupTable>; 2] = [Vec::new(), Vec::new()];
    let mut zeta = Vec::new();
    for _t in 0..horizon.saturating_sub(1) {
        xi[0].push(LookupTable::build(vec![ny1, nu1, ny1], |i| i[2], ny1));
        xi[1].push(LookupTable::build(vec![ny2, nu2, ny2], |i| i[2], ny2));
        zeta.push(LookupTable::build(
            vec![ny1, ny2, nu1, nu2, ny1, ny2],
            |i| z_coder.encode(&[i[0], i[1], i[2], i[3]]),
            z_coder.len(),
        ));
    }

    Ok(InformationStructure {
        name: "one_step_delay".to_string(),
        kind_desc: "one_step_delay".to_string(),
        horizon,
        obs_counts: [ny1, ny2],
        action_counts: [nu1, nu2],
        state_count: game.states().len(),
        private,
        increments: vec![Space::new(z_labels); horizon.saturating_sub(1)],
        eta: [(0..ny1).collect(), (0..ny2).collect()],
        xi,
        zeta,
        claims_strategy_independence: true,
    })
}

fn build_one_directional(game: &ValidatedGame) -> Result<InformationStructure> {
    let horizon = game.horizon();
    let (ny1, ny2) = (game.observations(0).len(), game.observations(1).len());
    let (nu1, nu2) = (game.actions(0).len(), game.actions(1).len());

    // Controller 1 has no private information at any stage; its very
    // first observation is not retained (stage-1 common information is
    // empty by convention), every later observation becomes common
    // through the increment.
    let private: [Vec<Space>; 2] = [
        vec![Space::singleton(); horizon],
        vec![Space::new(obs_labels(game, 1)); horizon],
    ];
    let z_coder = ProductCoder::new(vec![ny1, ny2, nu1, nu2]);
    let z_labels = z_coder.labels(&[
        obs_labels(game, 0),
        obs_labels(game, 1),
        action_labels(game, 0),
        action_labels(game, 1),
    ]);

    let mut xi: [Vec<LookupTable>; 2] = [Vec::new(), Vec::new()];
    let mut zeta = Vec::new();
    for _t in 0..horizon.saturating_sub(1) {
        xi[0].push(LookupTable::build(vec![1, nu1, ny1], |_| 0, 1));
        xi[1].push(LookupTable::build(vec![ny2, nu2, ny2], |i| i[2], ny2));
        zeta.push(LookupTable::build(
            vec![1, ny2, nu1, nu2, ny1, ny2],
            |i| z_coder.encode(&[i[4], i[1], i[2], i[3]]),
            z_coder.len(),
        ));
    }

    Ok(InformationStructure {
        name: "one_directional_one_step".to_string(),
        kind_desc: "one_directional_one_step".to_string(),
        horizon,
        obs_counts: [ny1, ny2],
        action_counts: [nu1, nu2],
        state_count: game.states().len(),
        private,
        increments: vec![Space::new(z_labels); horizon.saturating_sub(1)],
        eta: [vec![0; ny1], (0..ny2).collect()],
        xi,
        zeta,
        claims_strategy_independence: true,
    })
}

/// Verifies that the transition kernel never depends on controller 2's
/// action (or on either action, when `also_u1`), reporting a witness.
fn check_action_independence(
    game: &ValidatedGame,
    structure: &str,
    also_u1: bool,
) -> Result<()> {
    let nx = game.states().len();
    let (nu1, nu2) = (game.actions(0).len(), game.actions(1).len());
    for t in 0..game.horizon().saturating_sub(1) {
        for x in 0..nx {
            for x_next in 0..nx {
                let base = game.transition(t, x, 0, 0, x_next);
                for u1 in 0..nu1 {
                    if !also_u1 && u1 > 0 {
                        break;
                    }
                    for u2 in 0..nu2 {
                        let u1_eff = if also_u1 { u1 } else { 0 };
                        let v = game.transition(t, x, u1_eff, u2, x_next);
                        let reference = if also_u1 {
                            base
                        } else {
                            game.transition(t, x, u1_eff, 0, x_next)
                        };
                        if v != reference {
                            return Err(Error::IncompatibleGame {
                                structure: structure.to_string(),
                                reason: format!(
                                    "transition depends on actions: at stage {}, \
                                     P(x'={} | x={}, u1={}, u2={}) = {} differs from \
                                     the same row at the reference action pair",
                                    t + 1,
                                    game.states().name(x_next),
                                    game.states().name(x),
                                    game.actions(0).name(u1_eff),
                                    game.actions(1).name(u2),
                                    crate::rational::format_rational(v),
                                ),
                            });
                        }
                    }
                }
            }
        }
    }
    // When only u2-independence is required, also sweep u1 values as the
    // reference row above only fixed u2=0.
    if !also_u1 {
        for t in 0..game.horizon().saturating_sub(1) {
            for x in 0..nx {
                for u1 in 0..nu1 {
                    for u2 in 1..nu2 {
                        for x_next in 0..nx {
                            let v = game.transition(t, x, u1, u2, x_next);
                            let reference = game.transition(t, x, u1, 0, x_next);
                            if v != reference {
                                return Err(Error::IncompatibleGame {
                                    structure: structure.to_string(),
                                    reason: format!(
                                        "transition depends on controller 2's action: at stage {}, \
                                         P(x'={} | x={}, u1={}, u2={}) = {} but with u2={} it is {}",
                                        t + 1,
                                        game.states().name(x_next),
                                        game.states().name(x),
                                        game.actions(0).name(u1),
                                        game.actions(1).name(u2),
                                        crate::rational::format_rational(v),
                                        game.actions(1).name(0),
                                        crate::rational::format_rational(reference),
                                    ),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn window_space(base: &[String], d: usize) -> (ProductCoder, Vec<String>) {
    let ext = padded(base);
    let coder = ProductCoder::new(vec![ext.len(); d]);
    let labels = coder.labels(&vec![ext.clone(); d]);
    (coder, labels)
}

fn build_single_controller_delay(
    game: &ValidatedGame,
    case: DelayCase,
    delay: usize,
) -> Result<InformationStructure> {
    let kind = StructureKind::SingleControllerDelay { case, delay };
    let name = kind.name();
    if delay == 0 || delay > game.horizon() {
        return Err(Error::IncompatibleGame {
            structure: name.to_string(),
            reason: format!(
                "delay {delay} outside 1..={} (the horizon)",
                game.horizon()
            ),
        });
    }
    check_action_independence(game, name, false)?;

    let horizon = game.horizon();
    let (ny1, ny2) = (game.observations(0).len(), game.observations(1).len());
    let (nu1, nu2) = (game.actions(0).len(), game.actions(1).len());

    let (w2, w2_labels) = window_space(game.observations(1).names(), delay);
    let p1_space = match case {
        DelayCase::A => Space::singleton(),
        DelayCase::B => Space::new(obs_labels(game, 0)),
    };
    let np1 = p1_space.len();
    let private: [Vec<Space>; 2] = [
        vec![p1_space; horizon],
        vec![Space::new(w2_labels); horizon],
    ];

    // z = (controller 1's newest observation — current for case A, the
    // one-step-old private one for case B — the oldest windowed
    // observation of controller 2, and controller 1's action).
    let y2_ext = padded(game.observations(1).names());
    let z_coder = ProductCoder::new(vec![ny1, y2_ext.len(), nu1]);
    let z_labels = z_coder.labels(&[obs_labels(game, 0), y2_ext, action_labels(game, 0)]);

    let shift = |p: usize, y_new: usize| -> usize {
        let mut digits = w2.decode(p);
        digits.remove(0);
        digits.push(y_new + 1);
        w2.encode(&digits)
    };
    let oldest = |p: usize| -> usize { w2.decode(p)[0] };

    let mut xi: [Vec<LookupTable>; 2] = [Vec::new(), Vec::new()];
    let mut zeta = Vec::new();
    for _t in 0..horizon.saturating_sub(1) {
        xi[0].push(match case {
            DelayCase::A => LookupTable::build(vec![1, nu1, ny1], |_| 0, 1),
            DelayCase::B => LookupTable::build(vec![ny1, nu1, ny1], |i| i[2], ny1),
        });
        xi[1].push(LookupTable::build(
            vec![w2.len(), nu2, ny2],
            |i| shift(i[0], i[2]),
            w2.len(),
        ));
        zeta.push(LookupTable::build(
            vec![np1, w2.len(), nu1, nu2, ny1, ny2],
            |i| {
                let y1_part = match case {
                    DelayCase::A => i[4],
                    DelayCase::B => i[0],
                };
                z_coder.encode(&[y1_part, oldest(i[1]), i[2]])
            },
            z_coder.len(),
        ));
    }

    let eta2: Vec<usize> = (0..ny2)
        .map(|y| {
            let mut digits = vec![0usize; delay];
            digits[delay - 1] = y + 1;
            w2.encode(&digits)
        })
        .collect();

    Ok(InformationStructure {
        name: name.to_string(),
        kind_desc: format!("{name}(delay={delay})"),
        horizon,
        obs_counts: [ny1, ny2],
        action_counts: [nu1, nu2],
        state_count: game.states().len(),
        private,
        increments: vec![Space::new(z_labels); horizon.saturating_sub(1)],
        eta: [
            match case {
                DelayCase::A => vec![0; ny1],
                DelayCase::B => (0..ny1).collect(),
            },
            eta2,
        ],
        xi,
        zeta,
        claims_strategy_independence: true,
    })
}

fn expect_product_labels(
    what: &str,
    structure: &str,
    actual: &[String],
    components: &[&[String]],
) -> Result<()> {
    let expected: usize = components.iter().map(|c| c.len()).product();
    if actual.len() != expected {
        return Err(Error::IncompatibleGame {
            structure: structure.to_string(),
            reason: format!(
                "{what} must have {expected} labels (the declared product), found {}",
                actual.len()
            ),
        });
    }
    let coder = ProductCoder::new(components.iter().map(|c| c.len()).collect());
    for v in 0..expected {
        let digits = coder.decode(v);
        let want: Vec<&str> = digits
            .iter()
            .enumerate()
            .map(|(i, &d)| components[i][d].as_str())
            .collect();
        let want = want.join("|");
        if actual[v] != want {
            return Err(Error::IncompatibleGame {
                structure: structure.to_string(),
                reason: format!(
                    "{what} label {v} is `{}`, expected `{want}` (row-major product order)",
                    actual[v]
                ),
            });
        }
    }
    Ok(())
}

fn build_global_local(
    game: &ValidatedGame,
    split: &GlobalLocalSplit,
) -> Result<InformationStructure> {
    let name = "global_local";
    let ng = split.global.len();
    let nl1 = split.local1.len();
    let nl2 = split.local2.len();
    if ng == 0 || nl1 == 0 || nl2 == 0 {
        return Err(Error::IncompatibleGame {
            structure: name.to_string(),
            reason: "declared global/local components must be nonempty".to_string(),
        });
    }
    expect_product_labels(
        "state set",
        name,
        game.states().names(),
        &[&split.global, &split.local1, &split.local2],
    )?;

    let state_coder = ProductCoder::new(vec![ng, nl1, nl2]);

    // The dynamics must depend on the current state only through its
    // global component.
    let nx = game.states().len();
    let (nu1, nu2) = (game.actions(0).len(), game.actions(1).len());
    for t in 0..game.horizon().saturating_sub(1) {
        for g in 0..ng {
            let reference_x = state_coder.encode(&[g, 0, 0]);
            for l1 in 0..nl1 {
                for l2 in 0..nl2 {
                    let x = state_coder.encode(&[g, l1, l2]);
                    for u1 in 0..nu1 {
                        for u2 in 0..nu2 {
                            for x_next in 0..nx {
                                let v = game.transition(t, x, u1, u2, x_next);
                                let r = game.transition(t, reference_x, u1, u2, x_next);
                                if v != r {
                                    return Err(Error::IncompatibleGame {
                                        structure: name.to_string(),
                                        reason: format!(
                                            "transition depends on a local component: at stage {}, \
                                             P({} | {}, u1={}, u2={}) = {} but from {} it is {}",
                                            t + 1,
                                            game.states().name(x_next),
                                            game.states().name(x),
                                            game.actions(0).name(u1),
                                            game.actions(1).name(u2),
                                            crate::rational::format_rational(v),
                                            game.states().name(reference_x),
                                            crate::rational::format_rational(r),
                                        ),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // Observation channels. The first component of controller 1's
    // observation is the commonly shared one: the global state itself
    // when noiseless, the noisy channel output otherwise.
    let common_labels: Vec<String> = if split.noisy {
        split.common_obs.clone().ok_or_else(|| Error::IncompatibleGame {
            structure: name.to_string(),
            reason: "noisy variant requires declared common observation labels".to_string(),
        })?
    } else {
        split.global.clone()
    };
    let nc = common_labels.len();

    expect_product_labels(
        "observation set of controller 1",
        name,
        game.observations(0).names(),
        &[&common_labels, &split.local1],
    )?;
    if split.noisy {
        if game.observations(1).names() != split.local2.as_slice() {
            return Err(Error::IncompatibleGame {
                structure: name.to_string(),
                reason: "observation set of controller 2 must equal the declared local2 labels"
                    .to_string(),
            });
        }
    } else {
        expect_product_labels(
            "observation set of controller 2",
            name,
            game.observations(1).names(),
            &[&common_labels, &split.local2],
        )?;
    }

    let obs1_coder = ProductCoder::new(vec![nc, nl1]);
    let obs2_coder = ProductCoder::new(vec![nc, nl2]);
    let one = crate::rational::one();
    let zero_r = crate::rational::zero();
    for t in 0..game.horizon() {
        for g in 0..ng {
            for l1 in 0..nl1 {
                for l2 in 0..nl2 {
                    let x = state_coder.encode(&[g, l1, l2]);
                    // Controller 1: the local part must pass through
                    // exactly; the common part's channel must not depend
                    // on the local parts.
                    for c in 0..nc {
                        for l1o in 0..nl1 {
                            let y = obs1_coder.encode(&[c, l1o]);
                            let v = game.obs_prob(0, t, x, y);
                            if l1o != l1 {
                                if *v != zero_r {
                                    return Err(Error::IncompatibleGame {
                                        structure: name.to_string(),
                                        reason: format!(
                                            "controller 1 must observe its local state exactly: \
                                             Q1({} | {}) = {} at stage {}",
                                            game.observations(0).name(y),
                                            game.states().name(x),
                                            crate::rational::format_rational(v),
                                            t + 1
                                        ),
                                    });
                                }
                            } else {
                                let reference_x = state_coder.encode(&[g, 0, 0]);
                                let ry = obs1_coder.encode(&[c, 0]);
                                let r = game.obs_prob(0, t, reference_x, ry);
                                if v != r {
                                    return Err(Error::IncompatibleGame {
                                        structure: name.to_string(),
                                        reason: format!(
                                            "the shared channel must depend only on the global \
                                             state: Q1({} | {}) = {} differs from the reference \
                                             {} at stage {}",
                                            game.observations(0).name(y),
                                            game.states().name(x),
                                            crate::rational::format_rational(v),
                                            crate::rational::format_rational(r),
                                            t + 1
                                        ),
                                    });
                                }
                            }
                        }
                    }
                    // Controller 2.
                    if split.noisy {
                        for l2o in 0..nl2 {
                            let v = game.obs_prob(1, t, x, l2o);
                            let want = if l2o == l2 { &one } else { &zero_r };
                            if v != want {
                                return Err(Error::IncompatibleGame {
                                    structure: name.to_string(),
                                    reason: format!(
                                        "controller 2 must observe its local state exactly: \
                                         Q2({} | {}) = {} at stage {}",
                                        game.observations(1).name(l2o),
                                        game.states().name(x),
                                        crate::rational::format_rational(v),
                                        t + 1
                                    ),
                                });
                            }
                        }
                    } else {
                        for c in 0..nc {
                            for l2o in 0..nl2 {
                                let y = obs2_coder.encode(&[c, l2o]);
                                let v = game.obs_prob(1, t, x, y);
                                let want = if c == g && l2o == l2 { &one } else { &zero_r };
                                if v != want {
                                    return Err(Error::IncompatibleGame {
                                        structure: name.to_string(),
                                        reason: format!(
                                            "noiseless variant requires Q2({} | {}) = {}, found {} \
                                             at stage {}",
                                            game.observations(1).name(y),
                                            game.states().name(x),
                                            crate::rational::format_rational(want),
                                            crate::rational::format_rational(v),
                                            t + 1
                                        ),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    let horizon = game.horizon();
    let (ny1, ny2) = (game.observations(0).len(), game.observations(1).len());

    // Private info: the full first observation at stage 1, the own local
    // state afterwards. The first increment carries both the initial and
    // the next shared-channel value, so the common global history starts
    // complete.
    let mut private: [Vec<Space>; 2] = [
        vec![Space::new(obs_labels(game, 0))],
        vec![Space::new(obs_labels(game, 1))],
    ];
    for _t in 1..horizon {
        private[0].push(Space::new(split.local1.clone()));
        private[1].push(Space::new(split.local2.clone()));
    }

    let common_of_y1 = move |y1: usize| y1 / nl1;
    let local_of_y1 = move |y1: usize| y1 % nl1;
    let local_of_y2 = {
        let noisy = split.noisy;
        move |y2: usize| if noisy { y2 } else { y2 % nl2 }
    };

    let z0_coder = ProductCoder::new(vec![nc, nc, nu1, nu2]);
    let z0_labels = z0_coder.labels(&[
        common_labels.clone(),
        common_labels.clone(),
        action_labels(game, 0),
        action_labels(game, 1),
    ]);
    let z_coder = ProductCoder::new(vec![nc, nu1, nu2]);
    let z_labels = z_coder.labels(&[
        common_labels.clone(),
        action_labels(game, 0),
        action_labels(game, 1),
    ]);

    let mut increments = Vec::new();
    let mut xi: [Vec<LookupTable>; 2] = [Vec::new(), Vec::new()];
    let mut zeta = Vec::new();
    for t in 0..horizon.saturating_sub(1) {
        let np1 = private[0][t].len();
        let np2 = private[1][t].len();
        xi[0].push(LookupTable::build(
            vec![np1, nu1, ny1],
            |i| local_of_y1(i[2]),
            nl1,
        ));
        xi[1].push(LookupTable::build(
            vec![np2, nu2, ny2],
            |i| local_of_y2(i[2]),
            nl2,
        ));
        if t == 0 {
            increments.push(Space::new(z0_labels.clone()));
            zeta.push(LookupTable::build(
                vec![np1, np2, nu1, nu2, ny1, ny2],
                |i| z0_coder.encode(&[common_of_y1(i[0]), common_of_y1(i[4]), i[2], i[3]]),
                z0_coder.len(),
            ));
        } else {
            increments.push(Space::new(z_labels.clone()));
            zeta.push(LookupTable::build(
                vec![np1, np2, nu1, nu2, ny1, ny2],
                |i| z_coder.encode(&[common_of_y1(i[4]), i[2], i[3]]),
                z_coder.len(),
            ));
        }
    }

    Ok(InformationStructure {
        name: name.to_string(),
        kind_desc: if split.noisy {
            "global_local(noisy)".to_string()
        } else {
            "global_local(noiseless)".to_string()
        },
        horizon,
        obs_counts: [ny1, ny2],
        action_counts: [nu1, nu2],
        state_count: game.states().len(),
        private,
        increments,
        eta: [(0..ny1).collect(), (0..ny2).collect()],
        xi,
        zeta,
        claims_strategy_independence: true,
    })
}

fn build_uncontrolled(game: &ValidatedGame, delay: usize) -> Result<InformationStructure> {
    let name = "uncontrolled";
    if delay == 0 || delay > game.horizon() {
        return Err(Error::IncompatibleGame {
            structure: name.to_string(),
            reason: format!("delay {delay} outside 1..={} (the horizon)", game.horizon()),
        });
    }
    check_action_independence(game, name, true)?;

    let horizon = game.horizon();
    let (ny1, ny2) = (game.observations(0).len(), game.observations(1).len());
    let (nu1, nu2) = (game.actions(0).len(), game.actions(1).len());

    let (w1, w1_labels) = window_space(game.observations(0).names(), delay);
    let (w2, w2_labels) = window_space(game.observations(1).names(), delay);
    let private: [Vec<Space>; 2] = [
        vec![Space::new(w1_labels); horizon],
        vec![Space::new(w2_labels); horizon],
    ];

    let y1_ext = padded(game.observations(0).names());
    let y2_ext = padded(game.observations(1).names());
    let z_coder = ProductCoder::new(vec![y1_ext.len(), y2_ext.len()]);
    let z_labels = z_coder.labels(&[y1_ext, y2_ext]);

    let shift = |coder: &ProductCoder, p: usize, y_new: usize| -> usize {
        let mut digits = coder.decode(p);
        digits.remove(0);
        digits.push(y_new + 1);
        coder.encode(&digits)
    };

    let mut xi: [Vec<LookupTable>; 2] = [Vec::new(), Vec::new()];
    let mut zeta = Vec::new();
    for _t in 0..horizon.saturating_sub(1) {
        xi[0].push(LookupTable::build(
            vec![w1.len(), nu1, ny1],
            |i| shift(&w1, i[0], i[2]),
            w1.len(),
        ));
        xi[1].push(LookupTable::build(
            vec![w2.len(), nu2, ny2],
            |i| shift(&w2, i[0], i[2]),
            w2.len(),
        ));
        zeta.push(LookupTable::build(
            vec![w1.len(), w2.len(), nu1, nu2, ny1, ny2],
            |i| z_coder.encode(&[w1.decode(i[0])[0], w2.decode(i[1])[0]]),
            z_coder.len(),
        ));
    }

    let eta = |coder: &ProductCoder, ny: usize| -> Vec<usize> {
        (0..ny)
            .map(|y| {
                let mut digits = vec![0usize; delay];
                digits[delay - 1] = y + 1;
                coder.encode(&digits)
            })
            .collect()
    };

    Ok(InformationStructure {
        name: name.to_string(),
        kind_desc: format!("uncontrolled(delay={delay})"),
        horizon,
        obs_counts: [ny1, ny2],
        action_counts: [nu1, nu2],
        state_count: game.states().len(),
        private,
        increments: vec![Space::new(z_labels); horizon.saturating_sub(1)],
        eta: [eta(&w1, ny1), eta(&w2, ny2)],
        xi,
        zeta,
        claims_strategy_independence: true,
    })
}

fn build_symmetric(game: &ValidatedGame) -> Result<InformationStructure> {
    let horizon = game.horizon();
    let (ny1, ny2) = (game.observations(0).len(), game.observations(1).len());
    let (nu1, nu2) = (game.actions(0).len(), game.actions(1).len());

    let private: [Vec<Space>; 2] = [
        vec![Space::singleton(); horizon],
        vec![Space::singleton(); horizon],
    ];
    let z_coder = ProductCoder::new(vec![ny1, ny2, nu1, nu2]);
    let z_labels = z_coder.labels(&[
        obs_labels(game, 0),
        obs_labels(game, 1),
        action_labels(game, 0),
        action_labels(game, 1),
    ]);

    let mut xi: [Vec<LookupTable>; 2] = [Vec::new(), Vec::new()];
    let mut zeta = Vec::new();
    for _t in 0..horizon.saturating_sub(1) {
        xi[0].push(LookupTable::build(vec![1, nu1, ny1], |_| 0, 1));
        xi[1].push(LookupTable::build(vec![1, nu2, ny2], |_| 0, 1));
        zeta.push(LookupTable::build(
            vec![1, 1, nu1, nu2, ny1, ny2],
            |i| z_coder.encode(&[i[4], i[5], i[2], i[3]]),
            z_coder.len(),
        ));
    }

    Ok(InformationStructure {
        name: "symmetric".to_string(),
        kind_desc: "symmetric".to_string(),
        horizon,
        obs_counts: [ny1, ny2],
        action_counts: [nu1, nu2],
        state_count: game.states().len(),
        private,
        increments: vec![Space::new(z_labels); horizon.saturating_sub(1)],
        eta: [vec![0; ny1], vec![0; ny2]],
        xi,
        zeta,
        claims_strategy_independence: true,
    })
}

/// Delay-2 sharing: each controller privately holds its last two
/// observations and its previous action; the items aging past the
/// two-step horizon become common. The common-information belief for
/// this pattern is strategy dependent, which is exactly what the
/// independence checker demonstrates on it.
fn build_two_step_delay(game: &ValidatedGame) -> Result<InformationStructure> {
    let horizon = game.horizon();
    let p_coders: Vec<ProductCoder> = (0..2)
        .map(|i| {
            ProductCoder::new(vec![
                game.observations(i).len() + 1,
                game.observations(i).len(),
                game.actions(i).len() + 1,
            ])
        })
        .collect();
    let p_labels: Vec<Vec<String>> = (0..2)
        .map(|i| {
            p_coders[i].labels(&[
                padded(game.observations(i).names()),
                obs_labels(game, i),
                padded(game.actions(i).names()),
            ])
        })
        .collect();
    let z_coder = ProductCoder::new(vec![
        game.observations(0).len() + 1,
        game.observations(1).len() + 1,
        game.actions(0).len() + 1,
        game.actions(1).len() + 1,
    ]);
    let z_labels = z_coder.labels(&[
        padded(game.observations(0).names()),
        padded(game.observations(1).names()),
        padded(game.actions(0).names()),
        padded(game.actions(1).names()),
    ]);

    let eta1 = |y: usize| p_coders[0].encode(&[0, y, 0]);
    let eta2 = |y: usize| p_coders[1].encode(&[0, y, 0]);
    let xi1 = |_t: usize, p: usize, u: usize, y_next: usize| {
        let d = p_coders[0].decode(p);
        p_coders[0].encode(&[d[1] + 1, y_next, u + 1])
    };
    let xi2 = |_t: usize, p: usize, u: usize, y_next: usize| {
        let d = p_coders[1].decode(p);
        p_coders[1].encode(&[d[1] + 1, y_next, u + 1])
    };
    let zeta = |_t: usize, p1: usize, p2: usize, _u1: usize, _u2: usize, _y1: usize, _y2: usize| {
        let d1 = p_coders[0].decode(p1);
        let d2 = p_coders[1].decode(p2);
        z_coder.encode(&[d1[0], d2[0], d1[2], d2[2]])
    };

    InformationStructure::from_custom(
        game,
        CustomSpec {
            name: "two_step_delay".to_string(),
            claims_strategy_independence: false,
            private_labels: [
                vec![p_labels[0].clone(); horizon],
                vec![p_labels[1].clone(); horizon],
            ],
            increment_labels: vec![z_labels; horizon.saturating_sub(1)],
            eta: [&eta1, &eta2],
            xi: [&xi1, &xi2],
            zeta: &zeta,
        },
    )
}
