//! The finite game model: label sets, exact stochastic kernels, cost
//! tensors, and validation.
//!
//! A game is described by a [`GameSpec`] (raw, as loaded from a file or
//! built in code) and only becomes usable once [`validate_game_spec`]
//! has checked every kernel row and frozen label indices into a
//! [`ValidatedGame`]. Kernels are stored per stage; the joint
//! observation distribution always factors as `Q1(y1|x) * Q2(y2|x)` by
//! construction — no code path consumes a joint observation kernel.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::rational::{format_rational, one, Rational};

/// Controller index, always 0 or 1 internally (reported as 1/2).
pub type Controller = usize;

/// An ordered, duplicate-free set of string labels with frozen indices.
/// Iteration order is the declared order everywhere, which is what makes
/// reports and enumeration deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Labels {
    pub fn new(set_name: &str, names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::EmptyLabelSet(set_name.to_string()));
        }
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::DuplicateLabel {
                    set: set_name.to_string(),
                    label: n.clone(),
                });
            }
        }
        Ok(Labels { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

/// Dense row-major tensor of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<Rational>,
}

impl Tensor {
    pub fn new(dims: Vec<usize>, data: Vec<Rational>) -> Result<Self> {
        let expected: usize = dims.iter().product();
        if data.len() != expected {
            return Err(Error::ShapeMismatch {
                what: "tensor".to_string(),
                expected: format!("{expected} entries for dims {dims:?}"),
                got: format!("{} entries", data.len()),
            });
        }
        Ok(Tensor { dims, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut off = 0;
        for (i, &k) in idx.iter().enumerate() {
            debug_assert!(k < self.dims[i]);
            off = off * self.dims[i] + k;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> &Rational {
        &self.data[self.offset(idx)]
    }
}

/// Raw, unvalidated description of a finite two-controller game.
///
/// Kernels are given per stage: `transitions[t]` is the kernel for the
/// step from stage `t+1` to `t+2` (so there are `horizon - 1` of them)
/// and `observations[i][t]` is controller `i+1`'s observation kernel at
/// stage `t+1` (there are `horizon` of them). Cost tensors are
/// time-invariant.
#[derive(Debug, Clone)]
pub struct GameSpec {
    pub horizon: usize,
    pub states: Vec<String>,
    pub actions: [Vec<String>; 2],
    pub observations: [Vec<String>; 2],
    /// Initial distribution over states, indexed in state order.
    pub initial: Vec<Rational>,
    /// Per boundary `t -> t+1`: entry `[x][u1][u2][x']`.
    pub transitions: Vec<Vec<Rational>>,
    /// Per controller, per stage: entry `[x][y]`.
    pub obs_kernels: [Vec<Vec<Rational>>; 2],
    /// Per controller: entry `[x][u1][u2]`.
    pub costs: [Vec<Rational>; 2],
}

impl GameSpec {
    /// Convenience constructor for the common stationary case: one
    /// transition kernel and one observation kernel per controller,
    /// replicated across stages.
    #[allow(clippy::too_many_arguments)]
    pub fn stationary(
        horizon: usize,
        states: Vec<String>,
        actions: [Vec<String>; 2],
        observations: [Vec<String>; 2],
        initial: Vec<Rational>,
        transition: Vec<Rational>,
        obs_kernels: [Vec<Rational>; 2],
        costs: [Vec<Rational>; 2],
    ) -> Self {
        let transitions = if horizon > 1 {
            vec![transition; horizon - 1]
        } else {
            Vec::new()
        };
        let [q1, q2] = obs_kernels;
        GameSpec {
            horizon,
            states,
            actions,
            observations,
            initial,
            transitions,
            obs_kernels: [vec![q1; horizon], vec![q2; horizon]],
            costs,
        }
    }
}

/// A validated game: labels interned, every kernel row checked to sum to
/// exactly 1 with no negative entries. Immutable after construction and
/// safe to share across threads.
#[derive(Debug, Clone)]
pub struct ValidatedGame {
    horizon: usize,
    states: Labels,
    actions: [Labels; 2],
    observations: [Labels; 2],
    initial: Vec<Rational>,
    transitions: Vec<Tensor>,
    obs_kernels: [Vec<Tensor>; 2],
    costs: [Tensor; 2],
}

fn check_rows(
    kernel_name: &str,
    stage: usize,
    tensor: &Tensor,
    row_dims: usize,
    row_label: impl Fn(&[usize]) -> String,
) -> Result<()> {
    // Rows are the leading `row_dims` axes; the trailing axes are the
    // distribution support.
    let dims = tensor.dims();
    let row_shape = &dims[..row_dims];
    let support: usize = dims[row_dims..].iter().product();
    let mut row_idx = vec![0usize; row_dims];
    loop {
        let mut total = Rational::from_integer(0.into());
        for k in 0..support {
            let mut idx = row_idx.clone();
            let mut rem = k;
            for &d in dims[row_dims..].iter().rev() {
                idx.push(rem % d);
                rem /= d;
            }
            let tail = &mut idx[row_dims..];
            tail.reverse();
            let v = tensor.get(&idx);
            if v < &Rational::from_integer(0.into()) {
                return Err(Error::NegativeEntry {
                    kernel: kernel_name.to_string(),
                    stage,
                    row: row_label(&row_idx),
                    value: format_rational(v),
                });
            }
            total += v;
        }
        if total != one() {
            return Err(Error::NonStochasticRow {
                kernel: kernel_name.to_string(),
                stage,
                row: row_label(&row_idx),
                total: format_rational(&total),
            });
        }
        // advance row multi-index
        let mut axis = row_dims;
        while axis > 0 {
            axis -= 1;
            row_idx[axis] += 1;
            if row_idx[axis] < row_shape[axis] {
                break;
            }
            row_idx[axis] = 0;
            if axis == 0 {
                return Ok(());
            }
        }
        if row_dims == 0 {
            return Ok(());
        }
    }
}

/// Checks every invariant of the spec and freezes it into a
/// [`ValidatedGame`]. Rejects non-stochastic rows (reporting the stage
/// and row), negative entries, empty label sets and a zero horizon.
pub fn validate_game_spec(spec: GameSpec) -> Result<ValidatedGame> {
    if spec.horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    let states = Labels::new("states", spec.states)?;
    let [a1, a2] = spec.actions;
    let actions = [Labels::new("actions_1", a1)?, Labels::new("actions_2", a2)?];
    let [o1, o2] = spec.observations;
    let observations = [
        Labels::new("observations_1", o1)?,
        Labels::new("observations_2", o2)?,
    ];

    let nx = states.len();
    let (nu1, nu2) = (actions[0].len(), actions[1].len());

    if spec.initial.len() != nx {
        return Err(Error::ShapeMismatch {
            what: "initial distribution".to_string(),
            expected: format!("{nx} entries"),
            got: format!("{} entries", spec.initial.len()),
        });
    }
    let initial_tensor = Tensor::new(vec![nx], spec.initial.clone())?;
    check_rows("initial distribution", 1, &initial_tensor, 0, |_| String::new())?;

    if spec.transitions.len() != spec.horizon - 1 {
        return Err(Error::ShapeMismatch {
            what: "transition kernels".to_string(),
            expected: format!("{} stage kernels", spec.horizon - 1),
            got: format!("{}", spec.transitions.len()),
        });
    }
    let mut transitions = Vec::with_capacity(spec.transitions.len());
    for (t, data) in spec.transitions.into_iter().enumerate() {
        let tensor = Tensor::new(vec![nx, nu1, nu2, nx], data).map_err(|_| Error::ShapeMismatch {
            what: "transition kernel".to_string(),
            expected: format!("{nx}*{nu1}*{nu2}*{nx} entries at stage {}", t + 1),
            got: "different size".to_string(),
        })?;
        let states_ref = &states;
        let actions_ref = &actions;
        check_rows("transition kernel", t + 1, &tensor, 3, |row| {
            format!(
                "x={}, u1={}, u2={}",
                states_ref.name(row[0]),
                actions_ref[0].name(row[1]),
                actions_ref[1].name(row[2])
            )
        })?;
        transitions.push(tensor);
    }

    let [q1_raw, q2_raw] = spec.obs_kernels;
    let mut obs_kernels: [Vec<Tensor>; 2] = [Vec::new(), Vec::new()];
    for (i, raw) in [q1_raw, q2_raw].into_iter().enumerate() {
        if raw.len() != spec.horizon {
            return Err(Error::ShapeMismatch {
                what: format!("observation kernels for controller {}", i + 1),
                expected: format!("{} stage kernels", spec.horizon),
                got: format!("{}", raw.len()),
            });
        }
        let ny = observations[i].len();
        for (t, data) in raw.into_iter().enumerate() {
            let tensor = Tensor::new(vec![nx, ny], data).map_err(|_| Error::ShapeMismatch {
                what: format!("observation kernel {}", i + 1),
                expected: format!("{nx}*{ny} entries at stage {}", t + 1),
                got: "different size".to_string(),
            })?;
            let states_ref = &states;
            check_rows(
                &format!("observation kernel {}", i + 1),
                t + 1,
                &tensor,
                1,
                |row| format!("x={}", states_ref.name(row[0])),
            )?;
            obs_kernels[i].push(tensor);
        }
    }

    let [c1_raw, c2_raw] = spec.costs;
    let mut costs_iter = [c1_raw, c2_raw].into_iter().enumerate().map(|(i, data)| {
        Tensor::new(vec![nx, nu1, nu2], data).map_err(|_| Error::ShapeMismatch {
            what: format!("cost tensor {}", i + 1),
            expected: format!("{nx}*{nu1}*{nu2} entries"),
            got: "different size".to_string(),
        })
    });
    let costs = [costs_iter.next().unwrap()?, costs_iter.next().unwrap()?];

    Ok(ValidatedGame {
        horizon: spec.horizon,
        states,
        actions,
        observations,
        initial: spec.initial,
        transitions,
        obs_kernels,
        costs,
    })
}

impl ValidatedGame {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn states(&self) -> &Labels {
        &self.states
    }

    pub fn actions(&self, i: Controller) -> &Labels {
        &self.actions[i]
    }

    pub fn observations(&self, i: Controller) -> &Labels {
        &self.observations[i]
    }

    pub fn initial_dist(&self) -> &[Rational] {
        &self.initial
    }

    /// `P_t(x' | x, u1, u2)` for the boundary from 0-based stage `t` to
    /// `t+1`; requires `t < horizon - 1`.
    pub fn transition(&self, t: usize, x: usize, u1: usize, u2: usize, x_next: usize) -> &Rational {
        self.transitions[t].get(&[x, u1, u2, x_next])
    }

    /// `Q^i_t(y | x)` at 0-based stage `t`.
    pub fn obs_prob(&self, i: Controller, t: usize, x: usize, y: usize) -> &Rational {
        self.obs_kernels[i][t].get(&[x, y])
    }

    pub fn cost(&self, i: Controller, x: usize, u1: usize, u2: usize) -> &Rational {
        self.costs[i].get(&[x, u1, u2])
    }

    /// Exact stage cost `c^i(x, u1, u2)` with label-range checking.
    pub fn stage_cost(&self, i: Controller, x: usize, u1: usize, u2: usize) -> Result<Rational> {
        if i > 1 {
            return Err(Error::OutOfRange {
                what: "controller".to_string(),
                detail: format!("{i} (expected 0 or 1)"),
            });
        }
        let bounds = [
            ("state", x, self.states.len()),
            ("action of controller 1", u1, self.actions[0].len()),
            ("action of controller 2", u2, self.actions[1].len()),
        ];
        for (what, v, n) in bounds {
            if v >= n {
                return Err(Error::OutOfRange {
                    what: what.to_string(),
                    detail: format!("index {v} with {n} labels"),
                });
            }
        }
        Ok(self.cost(i, x, u1, u2).clone())
    }
}
