//! Weekly training labels: boom, bust, play-with-hidden-injury and
//! play-meaningful-touches.
//!
//! Boom and bust are population thresholds over weighted performance
//! statistics. The boom statistic discounts the actual-minus-projected gap by
//! `perowned^0.1`; the bust statistic scales the relative gap by
//! `sqrt(projected)`. Each threshold is `mean + stdev` (population variance)
//! of its statistic over the player-weeks that beat, or miss, projection by
//! more than the player's own historical standard deviation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roster::Position;
use crate::table;

/// Ownership gate (percent) for the boom threshold sample.
pub const DEFAULT_MIN_OWNED: f64 = 10.0;
/// Share of projection a player must exceed to count as having played.
pub const PLAYED_SHARE: f64 = 0.15;
/// Minimum history length for a usable player standard deviation.
pub const MIN_SIGMA_OBSERVATIONS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeeklyStat {
    pub player_id: String,
    pub week: u32,
    pub position: Position,
    pub actual: f64,
    pub projected: f64,
    /// Percent of leagues rostering the player, in [0, 100].
    pub perowned: f64,
}

impl WeeklyStat {
    pub fn validate(&self) -> Result<()> {
        if !(self.projected > 0.0 && self.projected.is_finite()) {
            return Err(Error::invalid(format!("{} week {}: projection must be positive", self.player_id, self.week)));
        }
        if !(0.0..=100.0).contains(&self.perowned) {
            return Err(Error::invalid(format!("{} week {}: perowned outside [0, 100]", self.player_id, self.week)));
        }
        if !self.actual.is_finite() {
            return Err(Error::invalid(format!("{} week {}: actual is not finite", self.player_id, self.week)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlayerSigma {
    pub sigma: f64,
    pub observations: usize,
}

impl PlayerSigma {
    pub fn is_sufficient(&self) -> bool {
        self.observations >= MIN_SIGMA_OBSERVATIONS
    }
}

/// Population standard deviation of each player's actual scores.
pub fn player_sigmas(history: &[WeeklyStat]) -> BTreeMap<String, PlayerSigma> {
    let mut scores: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for s in history {
        scores.entry(s.player_id.clone()).or_default().push(s.actual);
    }
    scores
        .into_iter()
        .map(|(id, values)| {
            let (_, sd) = population_moments(values.clone());
            (
                id,
                PlayerSigma {
                    sigma: sd,
                    observations: values.len(),
                },
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InjuryStatus {
    Questionable,
    Probable,
    Out,
    NotListed,
}

impl InjuryStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            InjuryStatus::Questionable => "questionable",
            InjuryStatus::Probable => "probable",
            InjuryStatus::Out => "out",
            InjuryStatus::NotListed => "not_listed",
        }
    }
}

impl fmt::Display for InjuryStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InjuryStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "questionable" => Ok(InjuryStatus::Questionable),
            "probable" => Ok(InjuryStatus::Probable),
            "out" => Ok(InjuryStatus::Out),
            "not_listed" => Ok(InjuryStatus::NotListed),
            other => Err(Error::invalid(format!("unknown injury status {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjuryReport {
    pub player_id: String,
    pub week: u32,
    pub status: InjuryStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet {
    pub player_id: String,
    pub week: u32,
    pub boom: bool,
    pub bust: bool,
    pub play_with_injury: bool,
    pub meaningful: bool,
}

/// Mean and population standard deviation of a weighted statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub mu: f64,
    pub sigma: f64,
    pub sample_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BustDirection {
    /// `x ≥ μ + σ`, the comparison exactly as published.
    #[default]
    AsPrinted,
    /// `x ≤ μ − σ`, the lower-tail reading.
    Inverted,
}

impl FromStr for BustDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as_printed" => Ok(BustDirection::AsPrinted),
            "inverted" => Ok(BustDirection::Inverted),
            other => Err(Error::invalid(format!("unknown bust direction {other:?}"))),
        }
    }
}

/// Mean and population standard deviation, summed in sorted order so the
/// result does not depend on input order.
fn population_moments(mut values: Vec<f64>) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    sq.sort_by(f64::total_cmp);
    (mean, (sq.iter().sum::<f64>() / n).sqrt())
}

fn threshold_of(values: Vec<f64>, what: &str) -> Result<Threshold> {
    if values.is_empty() {
        return Err(Error::EmptySample(format!("no player-week qualifies for the {what} threshold")));
    }
    let sample_size = values.len();
    let (mu, sigma) = population_moments(values);
    Ok(Threshold { mu, sigma, sample_size })
}

pub fn boom_statistic(s: &WeeklyStat) -> Result<f64> {
    if s.perowned <= 0.0 {
        return Err(Error::invalid(format!("{} week {}: perowned must be positive", s.player_id, s.week)));
    }
    Ok((s.actual - s.projected) / s.perowned.powf(0.1))
}

pub fn bust_statistic(s: &WeeklyStat) -> Result<f64> {
    if s.projected <= 0.0 {
        return Err(Error::invalid(format!("{} week {}: projection must be positive", s.player_id, s.week)));
    }
    Ok((s.actual - s.projected) / s.projected * s.projected.sqrt())
}

fn usable_sigma(sigmas: &BTreeMap<String, PlayerSigma>, player_id: &str) -> Option<f64> {
    sigmas.get(player_id).filter(|s| s.is_sufficient()).map(|s| s.sigma)
}

/// Threshold over player-weeks beating projection by more than `σ_p` among
/// players owned in at least `min_owned` percent of leagues.
pub fn boom_threshold(stats: &[WeeklyStat], sigmas: &BTreeMap<String, PlayerSigma>, min_owned: f64) -> Result<Threshold> {
    let mut values = Vec::new();
    for s in stats {
        let Some(sigma) = usable_sigma(sigmas, &s.player_id) else { continue };
        if s.actual > s.projected + sigma && s.perowned >= min_owned {
            values.push(boom_statistic(s)?);
        }
    }
    threshold_of(values, "boom")
}

/// Threshold over player-weeks missing projection by more than `σ_p`.
pub fn bust_threshold(stats: &[WeeklyStat], sigmas: &BTreeMap<String, PlayerSigma>) -> Result<Threshold> {
    let mut values = Vec::new();
    for s in stats {
        let Some(sigma) = usable_sigma(sigmas, &s.player_id) else { continue };
        if s.actual < s.projected - sigma {
            values.push(bust_statistic(s)?);
        }
    }
    threshold_of(values, "bust")
}

pub fn label_boom(x: f64, t: &Threshold) -> bool {
    x >= t.mu + t.sigma
}

pub fn label_bust(x: f64, t: &Threshold, direction: BustDirection) -> bool {
    match direction {
        BustDirection::AsPrinted => x >= t.mu + t.sigma,
        BustDirection::Inverted => x <= t.mu - t.sigma,
    }
}

fn played(s: &WeeklyStat) -> bool {
    s.actual > PLAYED_SHARE * s.projected
}

pub fn label_injury(s: &WeeklyStat, status: InjuryStatus) -> bool {
    played(s) && matches!(status, InjuryStatus::Questionable | InjuryStatus::Probable)
}

pub fn label_meaningful(s: &WeeklyStat, status: InjuryStatus) -> bool {
    played(s) && matches!(status, InjuryStatus::Probable | InjuryStatus::NotListed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelConfig {
    pub min_owned: f64,
    pub bust_direction: BustDirection,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig {
            min_owned: DEFAULT_MIN_OWNED,
            bust_direction: BustDirection::AsPrinted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Labeling {
    pub boom: Threshold,
    pub bust: Threshold,
    /// One label set per player-week, ordered by (player_id, week).
    pub labels: Vec<LabelSet>,
}

/// Computes both season thresholds once, then labels every player-week.
/// Player-weeks absent from `reports` count as not listed.
pub fn generate_labels(
    stats: &[WeeklyStat],
    sigmas: &BTreeMap<String, PlayerSigma>,
    reports: &[InjuryReport],
    config: &LabelConfig,
) -> Result<Labeling> {
    for s in stats {
        s.validate()?;
    }
    let boom = boom_threshold(stats, sigmas, config.min_owned)?;
    let bust = bust_threshold(stats, sigmas)?;
    let status: HashMap<(&str, u32), InjuryStatus> =
        reports.iter().map(|r| ((r.player_id.as_str(), r.week), r.status)).collect();

    let mut labels = Vec::with_capacity(stats.len());
    for s in stats {
        let st = status.get(&(s.player_id.as_str(), s.week)).copied().unwrap_or(InjuryStatus::NotListed);
        labels.push(LabelSet {
            player_id: s.player_id.clone(),
            week: s.week,
            boom: label_boom(boom_statistic(s)?, &boom),
            bust: label_bust(bust_statistic(s)?, &bust, config.bust_direction),
            play_with_injury: label_injury(s, st),
            meaningful: label_meaningful(s, st),
        });
    }
    labels.sort_by(|a, b| a.player_id.cmp(&b.player_id).then(a.week.cmp(&b.week)));
    Ok(Labeling { boom, bust, labels })
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

pub const STATS_HEADER: &str = "player_id,week,position,actual,projected,perowned";
pub const INJURY_HEADER: &str = "player_id,week,status";
pub const LABELS_HEADER: &str = "player_id,week,boom,bust,injury,meaningful";

pub fn parse_stats(input: &str) -> Result<Vec<WeeklyStat>> {
    table::rows(input, "player_id")
        .iter()
        .map(|r| {
            let s = WeeklyStat {
                player_id: r.str(0)?.to_string(),
                week: r.parse(1)?,
                position: r.parse(2)?,
                actual: r.parse(3)?,
                projected: r.parse(4)?,
                perowned: r.parse(5)?,
            };
            s.validate().map_err(|e| Error::parse(format!("line {}", r.line), e.to_string()))?;
            Ok(s)
        })
        .collect()
}

pub fn format_stats(stats: &[WeeklyStat]) -> Result<String> {
    let mut out = format!("{STATS_HEADER}\n");
    for s in stats {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            table::check_field(&s.player_id)?,
            s.week,
            s.position,
            s.actual,
            s.projected,
            s.perowned
        ));
    }
    Ok(out)
}

pub fn parse_injuries(input: &str) -> Result<Vec<InjuryReport>> {
    let reports: Vec<InjuryReport> = table::rows(input, "player_id")
        .iter()
        .map(|r| {
            Ok(InjuryReport {
                player_id: r.str(0)?.to_string(),
                week: r.parse(1)?,
                status: r.parse(2)?,
            })
        })
        .collect::<Result<_>>()?;
    let mut seen = std::collections::HashSet::new();
    for r in &reports {
        if !seen.insert((r.player_id.as_str(), r.week)) {
            return Err(Error::invalid(format!("two injury statuses for {} week {}", r.player_id, r.week)));
        }
    }
    Ok(reports)
}

pub fn format_injuries(reports: &[InjuryReport]) -> Result<String> {
    let mut out = format!("{INJURY_HEADER}\n");
    for r in reports {
        out.push_str(&format!("{},{},{}\n", table::check_field(&r.player_id)?, r.week, r.status));
    }
    Ok(out)
}

pub fn format_labels(labels: &[LabelSet]) -> Result<String> {
    let mut out = format!("{LABELS_HEADER}\n");
    for l in labels {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            table::check_field(&l.player_id)?,
            l.week,
            u8::from(l.boom),
            u8::from(l.bust),
            u8::from(l.play_with_injury),
            u8::from(l.meaningful)
        ));
    }
    Ok(out)
}

pub fn parse_labels(input: &str) -> Result<Vec<LabelSet>> {
    let flag = |r: &table::Row, i: usize| -> Result<bool> {
        match r.str(i)? {
            "1" => Ok(true),
            "0" => Ok(false),
            other => Err(Error::parse(format!("line {}", r.line), format!("expected 0 or 1, got {other:?}"))),
        }
    };
    table::rows(input, "player_id")
        .iter()
        .map(|r| {
            Ok(LabelSet {
                player_id: r.str(0)?.to_string(),
                week: r.parse(1)?,
                boom: flag(r, 2)?,
                bust: flag(r, 3)?,
                play_with_injury: flag(r, 4)?,
                meaningful: flag(r, 5)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn sigmas(pairs: &[(&str, f64)]) -> BTreeMap<String, PlayerSigma> {
        pairs
            .iter()
            .map(|(id, s)| (id.to_string(), PlayerSigma { sigma: *s, observations: 16 }))
            .collect()
    }

    #[test]
    fn boom_statistic_values() {
        let x = boom_statistic(&stat("p", 1, 20.0, 10.0, 50.0)).unwrap();
        let expected = 10.0 / (0.1 * 50f64.ln()).exp();
        assert!((x - expected).abs() < 1e-12);
        assert!((x - 6.762_433).abs() < 1e-6);
        assert_eq!(boom_statistic(&stat("p", 1, 10.0, 10.0, 73.0)).unwrap(), 0.0);
        assert_eq!(boom_statistic(&stat("p", 1, 17.5, 10.25, 1.0)).unwrap(), 17.5 - 10.25);
        assert!(boom_statistic(&stat("p", 1, 17.5, 10.0, 0.0)).is_err());
    }

    #[test]
    fn bust_statistic_values() {
        assert_eq!(bust_statistic(&stat("p", 1, 2.0, 16.0, 50.0)).unwrap(), -3.5);
        assert_eq!(bust_statistic(&stat("p", 1, 9.0, 9.0, 50.0)).unwrap(), 0.0);
        assert!((bust_statistic(&stat("p", 1, 7.25, 1.0, 50.0)).unwrap() - 6.25).abs() < 1e-12);
        let mut bad = stat("p", 1, 1.0, 1.0, 5.0);
        bad.projected = 0.0;
        assert!(bust_statistic(&bad).is_err());
    }

    #[test]
    fn boom_threshold_from_two_points() {
        // perowned 1 makes the statistic the raw difference.
        let stats = vec![stat("a", 1, 14.0, 10.0, 1.0), stat("b", 1, 18.0, 10.0, 1.0), stat("c", 1, 9.0, 10.0, 1.0)];
        let t = boom_threshold(&stats, &sigmas(&[("a", 1.0), ("b", 1.0), ("c", 1.0)]), 0.5).unwrap();
        assert_eq!((t.mu, t.sigma, t.sample_size), (6.0, 2.0, 2));
        assert!(label_boom(8.1, &t));
        assert!(!label_boom(7.9, &t));
        assert!(label_boom(8.0, &t));
        assert!(!label_boom(6.0, &t));
    }

    #[test]
    fn boom_threshold_single_point_and_gates() {
        let stats = vec![stat("a", 1, 20.0, 10.0, 50.0), stat("b", 1, 30.0, 10.0, 5.0)];
        let t = boom_threshold(&stats, &sigmas(&[("a", 2.0), ("b", 2.0)]), DEFAULT_MIN_OWNED).unwrap();
        assert_eq!(t.sample_size, 1);
        assert_eq!(t.sigma, 0.0);
        assert_eq!(t.mu, boom_statistic(&stats[0]).unwrap());
        let below = vec![stat("a", 1, 5.0, 10.0, 50.0)];
        assert!(matches!(boom_threshold(&below, &sigmas(&[("a", 1.0)]), 10.0), Err(Error::EmptySample(_))));
    }

    #[test]
    fn insufficient_history_excludes_from_sample() {
        let stats = vec![stat("a", 1, 20.0, 10.0, 50.0)];
        let mut s = sigmas(&[("a", 1.0)]);
        s.get_mut("a").unwrap().observations = 1;
        assert!(boom_threshold(&stats, &s, 10.0).is_err());
        assert!(boom_threshold(&stats, &BTreeMap::new(), 10.0).is_err());
    }

    #[test]
    fn bust_threshold_values() {
        let single = vec![stat("a", 1, 2.0, 16.0, 50.0)];
        let t = bust_threshold(&single, &sigmas(&[("a", 1.0)])).unwrap();
        assert_eq!((t.mu, t.sigma), (-3.5, 0.0));
        // projection 1: statistic = actual − 1
        let two = vec![stat("a", 1, -1.0, 1.0, 50.0), stat("b", 1, -5.0, 1.0, 50.0)];
        let t = bust_threshold(&two, &sigmas(&[("a", 0.5), ("b", 0.5)])).unwrap();
        assert_eq!((t.mu, t.sigma), (-4.0, 2.0));
        assert!(label_bust(-2.0, &t, BustDirection::AsPrinted));
        assert!(!label_bust(-4.0, &t, BustDirection::AsPrinted));
        assert!(label_bust(-6.5, &t, BustDirection::Inverted));
        assert!(!label_bust(-5.9, &t, BustDirection::Inverted));
        let none = vec![stat("a", 1, 9.5, 10.0, 50.0)];
        assert!(bust_threshold(&none, &sigmas(&[("a", 1.0)])).is_err());
    }

    #[test]
    fn injury_and_meaningful_rules() {
        let s = stat("p", 1, 3.0, 10.0, 50.0);
        assert!(label_injury(&s, InjuryStatus::Questionable));
        assert!(!label_injury(&stat("p", 1, 1.0, 10.0, 50.0), InjuryStatus::Questionable));
        assert!(!label_injury(&stat("p", 1, 9.0, 10.0, 50.0), InjuryStatus::NotListed));
        assert!(label_meaningful(&stat("p", 1, 9.0, 10.0, 50.0), InjuryStatus::NotListed));
        assert!(!label_meaningful(&stat("p", 1, 9.0, 10.0, 50.0), InjuryStatus::Questionable));
        assert!(!label_meaningful(&stat("p", 1, 0.0, 10.0, 50.0), InjuryStatus::Probable));
        // strict at exactly 15%
        assert!(!label_meaningful(&stat("p", 1, 1.5, 10.0, 50.0), InjuryStatus::Probable));
    }

    #[test]
    fn zero_actuals_force_negative_labels() {
        let stats: Vec<WeeklyStat> = (1..=4).map(|w| stat("a", w, 0.0, 10.0, 50.0)).collect();
        let mut more = stats.clone();
        more.push(stat("b", 1, 30.0, 10.0, 50.0));
        let out = generate_labels(&more, &sigmas(&[("a", 1.0), ("b", 1.0)]), &[], &LabelConfig::default()).unwrap();
        for l in out.labels.iter().filter(|l| l.player_id == "a") {
            assert!(!l.boom && !l.play_with_injury && !l.meaningful);
        }
        assert!(generate_labels(&stats, &sigmas(&[("a", 1.0)]), &[], &LabelConfig::default()).is_err());
    }

    #[test]
    fn sigmas_use_population_variance() {
        let h = vec![stat("a", 1, 4.0, 5.0, 10.0), stat("a", 2, 8.0, 5.0, 10.0), stat("b", 1, 3.0, 5.0, 10.0)];
        let s = player_sigmas(&h);
        assert_eq!(s["a"].sigma, 2.0);
        assert!(s["a"].is_sufficient());
        assert!(!s["b"].is_sufficient());
    }

    #[test]
    fn files_round_trip() {
        let stats = vec![stat("a", 1, 4.5, 5.0, 10.0), stat("b", 2, -1.0, 7.0, 99.5)];
        assert_eq!(parse_stats(&format_stats(&stats).unwrap()).unwrap(), stats);
        let inj = vec![InjuryReport {
            player_id: "a".into(),
            week: 1,
            status: InjuryStatus::Questionable,
        }];
        assert_eq!(parse_injuries(&format_injuries(&inj).unwrap()).unwrap(), inj);
        assert!(parse_injuries("a,1,out\na,1,probable\n").is_err());
        assert!(parse_stats("a,1,RB,3,0,10\n").is_err());
        let labels = vec![LabelSet {
            player_id: "a".into(),
            week: 3,
            boom: true,
            bust: false,
            play_with_injury: false,
            meaningful: true,
        }];
        let text = format_labels(&labels).unwrap();
        assert_eq!(text, "player_id,week,boom,bust,injury,meaningful\na,3,1,0,0,1\n");
        assert_eq!(parse_labels(&text).unwrap(), labels);
    }
}
