mod common;

use common::{as_nested, brute_force_equilibria, closed_form_bayesian, closed_form_payoffs, dense_game_probabilities};
use proptest::prelude::*;
use proptest::strategy::Strategy as PropStrategy;
use qgame_core::bayesian::{compose, StrategyProfile};
use qgame_core::equilibrium::{best_responses, nash_equilibria, Player};
use qgame_core::game::{payoff_tensor, GameSpec, Opponent, PayoffTable, Strategy};
use qgame_core::statevector::CHI_MAX;

fn table() -> impl PropStrategy<Value = PayoffTable> {
    proptest::array::uniform2(proptest::array::uniform2(proptest::array::uniform2(-20.0f64..20.0)))
        .prop_map(|rows| PayoffTable::new(rows).unwrap())
}

/// Small-integer tables make exact ties between profiles common.
fn tied_table() -> impl PropStrategy<Value = PayoffTable> {
    proptest::array::uniform2(proptest::array::uniform2(proptest::array::uniform2(0i32..4)))
        .prop_map(|rows| PayoffTable::new(rows.map(|r| r.map(|e| e.map(f64::from)))).unwrap())
}

fn chi_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 * std::f64::consts::PI / 40.0).collect()
}

#[test]
fn payoff_tensor_matches_dense_products_on_grid() {
    for chi in chi_grid() {
        let spec = GameSpec::standard(chi).unwrap();
        for which in [Opponent::B1, Opponent::B2] {
            let t = payoff_tensor(&spec, which);
            let rows = spec.table(which).rows();
            for a in Strategy::ALL {
                for b in Strategy::ALL {
                    let p = dense_game_probabilities(chi, a, b);
                    let mut expected = (0.0, 0.0);
                    for (o, po) in p.iter().enumerate() {
                        expected.0 += po * rows[o >> 1][o & 1][0];
                        expected.1 += po * rows[o >> 1][o & 1][1];
                    }
                    let got = t.get(a, b);
                    assert!((got.0 - expected.0).abs() < 1e-10 && (got.1 - expected.1).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn paper_entries() {
    let b1 = payoff_tensor(&GameSpec::standard(0.0).unwrap(), Opponent::B1);
    assert_eq!(b1.get(Strategy::I, Strategy::I), (11.0, 9.0));
    for a in [Strategy::I, Strategy::Z] {
        for b in [Strategy::I, Strategy::Z] {
            assert_eq!(b1.get(a, b), (11.0, 9.0));
        }
    }
    let b1 = payoff_tensor(&GameSpec::standard(CHI_MAX).unwrap(), Opponent::B1);
    let (a, b) = b1.get(Strategy::Z, Strategy::I);
    assert!((a - 6.0).abs() < 1e-12 && (b - 6.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn payoffs_within_table_bounds(chi in 0.0..=CHI_MAX, t in table()) {
        let spec = GameSpec::new(chi, t, t).unwrap();
        let tensor = payoff_tensor(&spec, Opponent::B1);
        let (lo_a, hi_a) = t.bounds(0);
        let (lo_b, hi_b) = t.bounds(1);
        for row in tensor.entries() {
            for &(a, b) in row {
                prop_assert!(a >= lo_a - 1e-12 && a <= hi_a + 1e-12);
                prop_assert!(b >= lo_b - 1e-12 && b <= hi_b + 1e-12);
            }
        }
    }

    #[test]
    fn classical_limit(t in table()) {
        let spec = GameSpec::new(0.0, t, t).unwrap();
        let tensor = payoff_tensor(&spec, Opponent::B1);
        let class = |s: Strategy| matches!(s, Strategy::X | Strategy::Y) as usize;
        for a in Strategy::ALL {
            for b in Strategy::ALL {
                let p = dense_game_probabilities(0.0, a, b);
                prop_assert!(p.iter().filter(|&&x| x == 1.0).count() == 1);
                prop_assert_eq!(tensor.get(a, b), t.entry(class(a), class(b)));
            }
        }
    }

    #[test]
    fn swapping_players_transposes(chi in 0.0..=CHI_MAX, t in table()) {
        let direct = payoff_tensor(&GameSpec::new(chi, t, t).unwrap(), Opponent::B1);
        let tt = t.transposed();
        let swapped = payoff_tensor(&GameSpec::new(chi, tt, tt).unwrap(), Opponent::B1);
        for a in Strategy::ALL {
            for b in Strategy::ALL {
                let (x, y) = direct.get(a, b);
                let (sx, sy) = swapped.get(b, a);
                prop_assert!((x - sy).abs() < 1e-12 && (y - sx).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn payoff_tensor_matches_closed_form(chi in 0.0..=CHI_MAX, t1 in table(), t2 in table()) {
        let spec = GameSpec::new(chi, t1, t2).unwrap();
        let tensor = payoff_tensor(&spec, Opponent::B1);
        for a in Strategy::ALL {
            for b in Strategy::ALL {
                let (x, y) = closed_form_payoffs(chi, &t1, a, b);
                let got = tensor.get(a, b);
                prop_assert!((got.0 - x).abs() < 1e-10 && (got.1 - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn compose_is_linear_in_p_and_b_payoffs_ignore_p(chi in 0.0..=CHI_MAX, p in 0.0f64..=1.0, t1 in table(), t2 in table()) {
        let spec = GameSpec::new(chi, t1, t2).unwrap();
        let (x, y) = (payoff_tensor(&spec, Opponent::B1), payoff_tensor(&spec, Opponent::B2));
        let (mid, one, zero) = (compose(&x, &y, p).unwrap(), compose(&x, &y, 1.0).unwrap(), compose(&x, &y, 0.0).unwrap());
        for profile in StrategyProfile::all() {
            let (m, o, z) = (mid.get(profile), one.get(profile), zero.get(profile));
            prop_assert!((m[0] - (p * o[0] + (1.0 - p) * z[0])).abs() < 1e-12);
            prop_assert_eq!(m[1], o[1]);
            prop_assert_eq!(m[2], z[2]);
        }
    }

    #[test]
    fn exact_equilibria_match_brute_force(chi in 0.0..=CHI_MAX, p in 0.0f64..=1.0, t1 in tied_table(), t2 in tied_table()) {
        let spec = GameSpec::new(chi, t1, t2).unwrap();
        let tensor = compose(&payoff_tensor(&spec, Opponent::B1), &payoff_tensor(&spec, Opponent::B2), p).unwrap();
        let got: Vec<_> = nash_equilibria(&tensor, 0.0).unwrap().profiles()
            .map(|s| (s.a.index(), s.b1.index(), s.b2.index()))
            .collect();
        prop_assert_eq!(got, brute_force_equilibria(&closed_form_bayesian(chi, p, &t1, &t2), 0.0));
    }

    #[test]
    fn equilibria_grow_with_delta(chi in 0.0..=CHI_MAX, p in 0.0f64..=1.0, d1 in 0.0f64..2.0, extra in 0.0f64..2.0) {
        let spec = GameSpec::standard(chi).unwrap();
        let tensor = compose(&payoff_tensor(&spec, Opponent::B1), &payoff_tensor(&spec, Opponent::B2), p).unwrap();
        let small = nash_equilibria(&tensor, d1).unwrap();
        let large = nash_equilibria(&tensor, d1 + extra).unwrap();
        for profile in small.profiles() {
            prop_assert!(large.contains(profile));
        }
    }

    #[test]
    fn shifting_one_player_changes_nothing(
        chi in 0.0..=CHI_MAX, p in 0.0f64..=1.0, delta in 0.0f64..1.0, player in 0usize..3, shift in -50.0f64..50.0,
    ) {
        let spec = GameSpec::standard(chi).unwrap();
        let tensor = compose(&payoff_tensor(&spec, Opponent::B1), &payoff_tensor(&spec, Opponent::B2), p).unwrap();
        let shifted = tensor.shifted(player, shift);
        for who in Player::ALL {
            let (x, y) = (best_responses(&tensor, who, delta).unwrap(), best_responses(&shifted, who, delta).unwrap());
            for profile in StrategyProfile::all() {
                prop_assert_eq!(x.contains(profile), y.contains(profile));
            }
        }
        let x: Vec<_> = nash_equilibria(&tensor, delta).unwrap().profiles().collect();
        let y: Vec<_> = nash_equilibria(&shifted, delta).unwrap().profiles().collect();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn reported_payoffs_are_tensor_entries(chi in 0.0..=CHI_MAX, p in 0.0f64..=1.0, delta in 0.0f64..1.0) {
        let spec = GameSpec::standard(chi).unwrap();
        let tensor = compose(&payoff_tensor(&spec, Opponent::B1), &payoff_tensor(&spec, Opponent::B2), p).unwrap();
        for eq in nash_equilibria(&tensor, delta).unwrap().equilibria {
            prop_assert_eq!(eq.payoffs, tensor.get(eq.profile));
        }
    }
}

#[test]
fn closed_form_bayesian_agrees_with_library() {
    let (b1, b2) = (PayoffTable::prisoners_dilemma(), PayoffTable::asymmetric_dilemma());
    for chi in chi_grid() {
        for p in [0.0, 0.16, 0.5, 1.0] {
            let spec = GameSpec::standard(chi).unwrap();
            let t = compose(&payoff_tensor(&spec, Opponent::B1), &payoff_tensor(&spec, Opponent::B2), p).unwrap();
            let (got, oracle) = (as_nested(&t), closed_form_bayesian(chi, p, &b1, &b2));
            for (g, o) in got.iter().flatten().flatten().zip(oracle.iter().flatten().flatten()) {
                for k in 0..3 {
                    assert!((g[k] - o[k]).abs() < 1e-10);
                }
            }
        }
    }
}
