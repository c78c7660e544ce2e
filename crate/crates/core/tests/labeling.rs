use std::collections::BTreeMap;

use gridiron_core::labeling::{
    boom_statistic, bust_statistic, bust_threshold, format_labels, generate_labels, label_bust, label_injury, label_meaningful,
    parse_labels, player_sigmas, BustDirection, InjuryReport, InjuryStatus, LabelConfig, Threshold, WeeklyStat,
};
use gridiron_core::roster::Position;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn stat(id: &str, week: u32, actual: f64, projected: f64, perowned: f64) -> WeeklyStat {
    WeeklyStat {
        player_id: id.into(),
        week,
        position: Position::RB,
        actual,
        projected,
        perowned,
    }
}

#[test]
fn statistics_match_hand_computed_values() {
    let b = boom_statistic(&stat("p", 1, 20.0, 10.0, 100.0)).unwrap();
    assert!((b - 10.0 / 100f64.powf(0.1)).abs() < 1e-12);
    let u = bust_statistic(&stat("p", 1, 5.0, 16.0, 50.0)).unwrap();
    assert!((u - -2.75).abs() < 1e-12);
}

#[test]
fn injury_and_meaningful_truth_table() {
    let played = stat("p", 1, 2.0, 10.0, 50.0);
    let sat = stat("p", 1, 1.5, 10.0, 50.0);
    let want = [
        (InjuryStatus::Questionable, true, false),
        (InjuryStatus::Probable, true, true),
        (InjuryStatus::NotListed, false, true),
    ];
    for (status, injury, meaningful) in want {
        assert_eq!(label_injury(&played, status), injury, "{status:?}");
        assert_eq!(label_meaningful(&played, status), meaningful, "{status:?}");
        // Exactly 15% of projection does not count as playing.
        assert!(!label_injury(&sat, status) && !label_meaningful(&sat, status));
    }
}

#[test]
fn bust_direction_picks_the_tail() {
    let t = Threshold {
        mu: 0.0,
        sigma: 1.0,
        sample_size: 10,
    };
    assert!(label_bust(1.0, &t, BustDirection::AsPrinted) && !label_bust(1.0, &t, BustDirection::Inverted));
    assert!(label_bust(-1.0, &t, BustDirection::Inverted) && !label_bust(-1.0, &t, BustDirection::AsPrinted));
}

#[test]
fn thin_history_players_stay_out_of_threshold_samples() {
    let history = vec![stat("a", 1, 10.0, 10.0, 50.0), stat("a", 2, 14.0, 10.0, 50.0), stat("b", 1, 3.0, 10.0, 50.0)];
    let sigmas = player_sigmas(&history);
    assert_eq!(sigmas["a"].sigma, 2.0);
    assert!(!sigmas["b"].is_sufficient());
    // Both underperform by far more than any sigma; only "a" qualifies.
    let stats = vec![stat("a", 3, 1.0, 10.0, 50.0), stat("b", 3, 1.0, 10.0, 50.0), stat("a", 4, 2.0, 12.0, 50.0)];
    assert_eq!(bust_threshold(&stats, &sigmas).unwrap().sample_size, 2);
}

#[test]
fn labels_round_trip_as_csv() {
    let world = gridiron_core::synth::generate_world(&gridiron_core::synth::WorldConfig {
        player_count: 12,
        team_count: 4,
        weeks: 6,
        docs_per_player_week: 1,
        ..Default::default()
    })
    .unwrap();
    let text = format_labels(&world.labeling.labels).unwrap();
    assert_eq!(parse_labels(&text).unwrap(), world.labeling.labels);
}

fn season() -> impl Strategy<Value = (Vec<WeeklyStat>, Vec<WeeklyStat>, Vec<InjuryReport>)> {
    let row = (1.0f64..25.0, 0.0f64..40.0, 0.0f64..100.0, 0usize..3);
    prop::collection::vec(row, 24).prop_map(|rows| {
        let mut stats = Vec::new();
        let mut history = Vec::new();
        let mut injuries = Vec::new();
        let statuses = [InjuryStatus::Questionable, InjuryStatus::Probable, InjuryStatus::NotListed];
        for (i, (p, a, own, st)) in rows.into_iter().enumerate() {
            let id = format!("p{}", i % 6);
            let week = (i / 6) as u32 + 1;
            stats.push(stat(&id, week, a, p, own));
            history.push(stat(&id, week, a * 0.8 + 1.0, p, own));
            injuries.push(InjuryReport {
                player_id: id,
                week,
                status: statuses[st],
            });
        }
        (stats, history, injuries)
    })
}

proptest! {
    #[test]
    fn labels_ignore_input_order((stats, history, injuries) in season(), seed in 0u64..1000) {
        let sigmas = player_sigmas(&history);
        let cfg = LabelConfig::default();
        let base = generate_labels(&stats, &sigmas, &injuries, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut s, mut r) = (stats.clone(), injuries.clone());
        s.shuffle(&mut rng);
        r.shuffle(&mut rng);
        let shuffled = generate_labels(&s, &sigmas, &r, &cfg);
        match (base, shuffled) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.labels, b.labels),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    #[test]
    fn boom_statistic_rises_with_actual(p in 1.0f64..25.0, own in 0.5f64..100.0, a in 0.0f64..40.0, d in 0.01f64..10.0) {
        let lo = boom_statistic(&stat("p", 1, a, p, own)).unwrap();
        let hi = boom_statistic(&stat("p", 1, a + d, p, own)).unwrap();
        prop_assert!(hi > lo);
        let lo = bust_statistic(&stat("p", 1, a, p, own)).unwrap();
        let hi = bust_statistic(&stat("p", 1, a + d, p, own)).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn injury_labels_need_playing_time((stats, _h, injuries) in season()) {
        let by_key: BTreeMap<(String, u32), InjuryStatus> =
            injuries.iter().map(|r| ((r.player_id.clone(), r.week), r.status)).collect();
        for s in &stats {
            let st = by_key[&(s.player_id.clone(), s.week)];
            if s.actual <= 0.15 * s.projected {
                prop_assert!(!label_injury(s, st) && !label_meaningful(s, st));
            }
        }
    }
}
