//! Shared game constructors for unit tests.

use crate::game::{validate_game_spec, GameSpec, ValidatedGame};
use crate::rational::{rat, rat_int, Rational};

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn rats(values: &[(i64, i64)]) -> Vec<Rational> {
    values.iter().map(|&(n, d)| rat(n, d)).collect()
}

fn ints(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| rat_int(v)).collect()
}

/// Binary-state game: controller 1 observes the state perfectly,
/// controller 2 through a binary symmetric channel with error 1/3; the
/// state stays at 0 with probability 1/4 (from 0) or 1/2 (from 1) when
/// the actions agree and 2/5 when they differ; uniform initial state.
pub fn bsc_delayed_sharing_spec(horizon: usize) -> GameSpec {
    // transition[x][u1][u2][x']
    let same_from_0 = [(1i64, 4i64), (3, 4)];
    let same_from_1 = [(1, 2), (1, 2)];
    let diff = [(2, 5), (3, 5)];
    let mut transition = Vec::new();
    for x in 0..2 {
        for u1 in 0..2 {
            for u2 in 0..2 {
                let row = if u1 == u2 {
                    if x == 0 {
                        &same_from_0
                    } else {
                        &same_from_1
                    }
                } else {
                    &diff
                };
                transition.extend(rats(row));
            }
        }
    }

    // costs[x][u1][u2]
    let c1 = ints(&[1, 0, 0, 0, 0, 1, 0, 1]);
    let c2 = ints(&[0, 1, 1, 0, 0, 1, 1, 0]);

    GameSpec::stationary(
        horizon,
        labels(&["0", "1"]),
        [labels(&["0", "1"]), labels(&["0", "1"])],
        [labels(&["0", "1"]), labels(&["0", "1"])],
        rats(&[(1, 2), (1, 2)]),
        transition,
        [
            ints(&[1, 0, 0, 1]),
            rats(&[(2, 3), (1, 3), (1, 3), (2, 3)]),
        ],
        [c1, c2],
    )
}

pub fn bsc_delayed_sharing(horizon: usize) -> ValidatedGame {
    validate_game_spec(bsc_delayed_sharing_spec(horizon)).unwrap()
}

/// Same dynamics and channels, zero costs.
pub fn zero_cost_game(horizon: usize) -> ValidatedGame {
    let mut spec = bsc_delayed_sharing_spec(horizon);
    spec.costs = [ints(&[0; 8]), ints(&[0; 8])];
    validate_game_spec(spec).unwrap()
}

/// Team variant: controller 2 shares controller 1's cost tensor.
pub fn team_game(horizon: usize) -> ValidatedGame {
    let mut spec = bsc_delayed_sharing_spec(horizon);
    spec.costs[1] = spec.costs[0].clone();
    validate_game_spec(spec).unwrap()
}

/// Binary state whose evolution ignores both actions; both controllers
/// observe through (different) binary symmetric channels.
pub fn uncontrolled_game(horizon: usize) -> ValidatedGame {
    let rows = [rats(&[(3, 4), (1, 4)]), rats(&[(1, 3), (2, 3)])];
    let mut transition = Vec::new();
    for x in 0..2 {
        for _u in 0..4 {
            transition.extend(rows[x].clone());
        }
    }
    let spec = GameSpec::stationary(
        horizon,
        labels(&["0", "1"]),
        [labels(&["0", "1"]), labels(&["0", "1"])],
        [labels(&["0", "1"]), labels(&["0", "1"])],
        rats(&[(2, 5), (3, 5)]),
        transition,
        [
            rats(&[(3, 4), (1, 4), (1, 4), (3, 4)]),
            rats(&[(2, 3), (1, 3), (1, 3), (2, 3)]),
        ],
        [ints(&[1, 0, 0, 2, 0, 1, 1, 0]), ints(&[0, 2, 1, 0, 1, 0, 0, 1])],
    );
    validate_game_spec(spec).unwrap()
}

/// Binary state driven only by controller 1's action.
pub fn single_controller_game(horizon: usize) -> ValidatedGame {
    let row = |x: usize, u1: usize| -> Vec<Rational> {
        match (x, u1) {
            (0, 0) => rats(&[(3, 4), (1, 4)]),
            (0, 1) => rats(&[(2, 5), (3, 5)]),
            (1, 0) => rats(&[(1, 2), (1, 2)]),
            _ => rats(&[(1, 3), (2, 3)]),
        }
    };
    let mut transition = Vec::new();
    for x in 0..2 {
        for u1 in 0..2 {
            for _u2 in 0..2 {
                transition.extend(row(x, u1));
            }
        }
    }
    let spec = GameSpec::stationary(
        horizon,
        labels(&["0", "1"]),
        [labels(&["0", "1"]), labels(&["0", "1"])],
        [labels(&["0", "1"]), labels(&["0", "1"])],
        rats(&[(1, 2), (1, 2)]),
        transition,
        [
            rats(&[(4, 5), (1, 5), (1, 5), (4, 5)]),
            rats(&[(2, 3), (1, 3), (1, 3), (2, 3)]),
        ],
        [ints(&[1, 0, 0, 0, 0, 1, 0, 1]), ints(&[0, 1, 1, 0, 0, 1, 1, 0])],
    );
    validate_game_spec(spec).unwrap()
}

fn product_labels(parts: &[&[&str]]) -> Vec<String> {
    let mut out: Vec<String> = vec![String::new()];
    for comp in parts {
        let mut next = Vec::new();
        for prefix in &out {
            for p in *comp {
                if prefix.is_empty() {
                    next.push((*p).to_string());
                } else {
                    next.push(format!("{prefix}|{p}"));
                }
            }
        }
        out = next;
    }
    out
}

/// Product-state game: global component in {g0, g1}, controller 1's
/// local component in {a0, a1}, controller 2's local component trivial.
/// The kernel factors as A(g'|g,u1,u2) * B(l1'|u1,u2), so the
/// common-information belief stays a product and strategy independence
/// holds for both the noiseless and the noisy channel variant.
pub fn global_local_game(horizon: usize, noisy: bool) -> (ValidatedGame, crate::info::GlobalLocalSplit) {
    let global = labels(&["g0", "g1"]);
    let local1 = labels(&["a0", "a1"]);
    let local2 = labels(&["b0"]);
    let states = product_labels(&[&["g0", "g1"], &["a0", "a1"], &["b0"]]);

    // A(g0' | g, u1, u2)
    let a_g0 = |g: usize, u1: usize, u2: usize| -> Rational {
        if u1 == u2 {
            if g == 0 {
                rat(1, 4)
            } else {
                rat(1, 2)
            }
        } else {
            rat(2, 5)
        }
    };
    // B(a0' | u1, u2)
    let b_a0 = |u1: usize, u2: usize| -> Rational {
        if u1 == u2 {
            rat(3, 5)
        } else {
            rat(1, 3)
        }
    };
    let mut transition = Vec::new();
    for g in 0..2 {
        for _l1 in 0..2 {
            for u1 in 0..2 {
                for u2 in 0..2 {
                    let pg0 = a_g0(g, u1, u2);
                    let pa0 = b_a0(u1, u2);
                    for gn in 0..2 {
                        for l1n in 0..2 {
                            let pg = if gn == 0 { pg0.clone() } else { rat_int(1) - pg0.clone() };
                            let pl = if l1n == 0 { pa0.clone() } else { rat_int(1) - pa0.clone() };
                            transition.push(pg * pl);
                        }
                    }
                }
            }
        }
    }

    let (obs1, q1, common_obs) = if noisy {
        let obs1 = product_labels(&[&["h0", "h1"], &["a0", "a1"]]);
        // R(h0|g0) = 3/4, R(h0|g1) = 1/4
        let mut q1 = Vec::new();
        for g in 0..2 {
            for l1 in 0..2 {
                for h in 0..2 {
                    for l1o in 0..2 {
                        let r = if (g == 0) == (h == 0) { rat(3, 4) } else { rat(1, 4) };
                        q1.push(if l1o == l1 { r } else { rat_int(0) });
                    }
                }
            }
        }
        (obs1, q1, Some(labels(&["h0", "h1"])))
    } else {
        let obs1 = product_labels(&[&["g0", "g1"], &["a0", "a1"]]);
        let mut q1 = Vec::new();
        for g in 0..2 {
            for l1 in 0..2 {
                for go in 0..2 {
                    for l1o in 0..2 {
                        q1.push(if go == g && l1o == l1 { rat_int(1) } else { rat_int(0) });
                    }
                }
            }
        }
        (obs1, q1, None)
    };

    let (obs2, q2) = if noisy {
        (labels(&["b0"]), ints(&[1, 1, 1, 1]))
    } else {
        let obs2 = product_labels(&[&["g0", "g1"], &["b0"]]);
        let mut q2 = Vec::new();
        for g in 0..2 {
            for _l1 in 0..2 {
                for go in 0..2 {
                    q2.push(if go == g { rat_int(1) } else { rat_int(0) });
                }
            }
        }
        (obs2, q2)
    };

    // product initial: nu_G = (1/2, 1/2), nu_L1 = (2/3, 1/3)
    let initial = rats(&[(1, 3), (1, 6), (1, 3), (1, 6)]);
    let c1 = ints(&[1, 0, 0, 0, 0, 1, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1]);
    let c2 = ints(&[0, 1, 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 0, 0, 1, 1]);

    let spec = GameSpec::stationary(
        horizon,
        states,
        [labels(&["0", "1"]), labels(&["0", "1"])],
        [obs1, obs2],
        initial,
        transition,
        [q1, q2],
        [c1, c2],
    );
    let game = validate_game_spec(spec).unwrap();
    let split = crate::info::GlobalLocalSplit {
        noisy,
        global,
        local1,
        local2,
        common_obs,
    };
    (game, split)
}

/// Noisy shared-channel variant whose initial distribution correlates
/// the global and local components. The structure builds fine, but the
/// belief update is strategy dependent, so the independence checker
/// must reject it.
pub fn global_local_game_correlated_noisy() -> (ValidatedGame, crate::info::GlobalLocalSplit) {
    let (game, split) = global_local_game(2, true);
    let mut spec = to_spec(&game);
    spec.initial = rats(&[(1, 2), (0, 1), (0, 1), (1, 2)]);
    (validate_game_spec(spec).unwrap(), split)
}

/// Like [`global_local_game`] (noiseless) but with dynamics that depend
/// on controller 1's local component, which the builder must reject.
pub fn global_local_game_local_dynamics() -> (ValidatedGame, crate::info::GlobalLocalSplit) {
    let (game, split) = global_local_game(2, false);
    let mut spec = to_spec(&game);
    // Make the row from (g0, a1, b0) differ from (g0, a0, b0).
    // transition[x][u1][u2][x']: x = 1 is g0|a1|b0.
    let stride = 2 * 2 * 4; // u1 * u2 * x'
    let base = stride; // x = 1, u1 = 0, u2 = 0
    for (k, v) in rats(&[(1, 2), (3, 10), (1, 10), (1, 10)]).into_iter().enumerate() {
        spec.transitions[0][base + k] = v;
    }
    (validate_game_spec(spec).unwrap(), split)
}

/// Rebuilds a raw spec from a validated game (test convenience).
pub fn to_spec(game: &ValidatedGame) -> GameSpec {
    let nx = game.states().len();
    let (nu1, nu2) = (game.actions(0).len(), game.actions(1).len());
    let mut transitions = Vec::new();
    for t in 0..game.horizon() - 1 {
        let mut k = Vec::new();
        for x in 0..nx {
            for u1 in 0..nu1 {
                for u2 in 0..nu2 {
                    for xn in 0..nx {
                        k.push(game.transition(t, x, u1, u2, xn).clone());
                    }
                }
            }
        }
        transitions.push(k);
    }
    let mut obs_kernels: [Vec<Vec<Rational>>; 2] = [Vec::new(), Vec::new()];
    for i in 0..2 {
        for t in 0..game.horizon() {
            let mut k = Vec::new();
            for x in 0..nx {
                for y in 0..game.observations(i).len() {
                    k.push(game.obs_prob(i, t, x, y).clone());
                }
            }
            obs_kernels[i].push(k);
        }
    }
    let mut costs: [Vec<Rational>; 2] = [Vec::new(), Vec::new()];
    for (i, c) in costs.iter_mut().enumerate() {
        for x in 0..nx {
            for u1 in 0..nu1 {
                for u2 in 0..nu2 {
                    c.push(game.cost(i, x, u1, u2).clone());
                }
            }
        }
    }
    GameSpec {
        horizon: game.horizon(),
        states: game.states().names().to_vec(),
        actions: [game.actions(0).names().to_vec(), game.actions(1).names().to_vec()],
        observations: [
            game.observations(0).names().to_vec(),
            game.observations(1).names().to_vec(),
        ],
        initial: game.initial_dist().to_vec(),
        transitions,
        obs_kernels,
        costs,
    }
}

/// Single uninformative state, matching-pennies costs: controller 1 pays
/// on mismatch, controller 2 pays on match. No pure stage equilibrium.
pub fn matching_pennies(horizon: usize) -> ValidatedGame {
    let transition = rats(&[(1, 1); 4]); // single state
    let spec = GameSpec::stationary(
        horizon,
        labels(&["s"]),
        [labels(&["0", "1"]), labels(&["0", "1"])],
        [labels(&["o"]), labels(&["o"])],
        ints(&[1]),
        transition,
        [ints(&[1]), ints(&[1])],
        [ints(&[0, 1, 1, 0]), ints(&[1, 0, 0, 1])],
    );
    validate_game_spec(spec).unwrap()
}
