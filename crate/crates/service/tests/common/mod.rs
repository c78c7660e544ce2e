#![allow(dead_code)]

use gridiron_core::classifier::PlayerState;
use gridiron_core::corpus::SourceKind;
use gridiron_core::distribution::{FitResult, Family, ScoreSample};
use gridiron_core::insights::{EvidenceItem, InsightFlags, PlayerInsight, Stance, StateProbabilities};
use gridiron_core::roster::{PlayerBio, Position};
use gridiron_service::snapshot::Snapshot;

pub const WEEK: u32 = 5;

pub fn roster() -> Vec<PlayerBio> {
    let positions = [Position::QB, Position::RB, Position::RB, Position::WR, Position::WR, Position::WR, Position::TE, Position::K, Position::DST];
    positions
        .iter()
        .enumerate()
        .map(|(i, p)| PlayerBio {
            player_id: format!("p{}", i + 1),
            name: format!("Player {}", i + 1),
            team: if i % 2 == 0 { "Otters".into() } else { "Herons".into() },
            position: *p,
            age: 22.0 + i as f64,
            seasons_pro: 1.0 + i as f64 / 2.0,
            height_cm: 180.0 + i as f64,
            weight_kg: 90.0 + 2.0 * i as f64,
        })
        .collect()
}

/// Hand-set insight with a normal fit; `shift` varies every number.
pub fn insight(bio: &PlayerBio, week: u32, shift: f64) -> PlayerInsight {
    let mean = 10.0 + shift;
    let values: Vec<f64> = (0..8).map(|k| mean + (k as f64 - 3.5) * 0.5).collect();
    PlayerInsight {
        player_id: bio.player_id.clone(),
        week,
        name: bio.name.clone(),
        team: bio.team.clone(),
        position: bio.position,
        baseline_projection: mean - 0.25,
        probabilities: Some(StateProbabilities {
            boom: 0.125,
            bust: 0.25,
            injury: 0.0625,
            meaningful: 0.75,
        }),
        dominant_state: Some(PlayerState::Meaningful),
        combined_projection: mean + 0.125,
        sample: ScoreSample {
            player_id: bio.player_id.clone(),
            values,
            donors: vec![],
            cross_position: false,
        },
        fit: FitResult {
            family: Family::Normal,
            params: vec![mean, 1.25],
            loss: 13.5,
            converged: true,
            n: 8,
        },
        p15: mean - 1.25,
        p85: mean + 1.25,
        evidence: vec![
            EvidenceItem {
                doc_id: format!("d-{}-1", bio.player_id),
                title: format!("{} week {week} notes", bio.name),
                source_kind: SourceKind::Article,
                relevance: 0.75,
                stance: Stance::Support,
                neutral: false,
            },
            EvidenceItem {
                doc_id: format!("d-{}-2", bio.player_id),
                title: format!("{} injury report", bio.name),
                source_kind: SourceKind::PodcastTranscript,
                relevance: -0.5,
                stance: Stance::Refute,
                neutral: false,
            },
        ],
        doc_count: 6,
        flags: InsightFlags {
            query_level: 1,
            ..InsightFlags::default()
        },
    }
}

/// Nine players with insights for one week; `shift` produces a distinct
/// snapshot version.
pub fn snapshot(shift: f64) -> Snapshot {
    let roster = roster();
    let insights = roster.iter().enumerate().map(|(i, b)| insight(b, WEEK, shift + i as f64)).collect();
    Snapshot::new(roster, insights).unwrap()
}
