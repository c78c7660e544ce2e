//! Deterministic synthetic worlds: a roster, a season of weekly stats with
//! planted boom and bust weeks, injury reports, and a corpus whose documents
//! co-mention players with their teams and carry tone words that track each
//! player-week's labels. Labels always come from [`crate::labeling`].
//!
//! Planting works on the labeling statistics directly. Veterans have a prior
//! season whose scores alternate `base ± 2`, so every veteran's σ is exactly
//! 2. A boom week sits far above projection, and each one is paired with
//! "mild" weeks that clear σ but stay well under the threshold. That keeps
//! booms near 30% of the threshold sample, so they land above `μ + σ`. Busts
//! mirror this below projection. Rookies have no prior season, stay out of
//! both threshold samples, and carry the remaining boom and bust weeks.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annotation::{format_dictionaries, format_spans, Dictionary, EntitySpan, EntityType};
use crate::config::PipelineConfig;
use crate::corpus::{week_window, CorpusStore, Document, SourceKind};
use crate::error::{Error, Result};
use crate::labeling::{
    format_injuries, format_labels, format_stats, generate_labels, player_sigmas, BustDirection, InjuryReport,
    InjuryStatus, LabelConfig, Labeling, WeeklyStat,
};
use crate::roster::{format_roster, PlayerBio, Position};

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const DICTIONARY_FILE: &str = "dictionaries.tsv";
pub const GOLD_FILE: &str = "gold.tsv";
pub const ROSTER_FILE: &str = "roster.csv";
pub const HISTORY_FILE: &str = "history.csv";
pub const STATS_FILE: &str = "stats.csv";
pub const INJURY_FILE: &str = "injuries.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const ENCYCLOPEDIA_FILE: &str = "encyclopedia.txt";
pub const WORLD_FILE: &str = "world.json";
pub const PIPELINE_FILE: &str = "pipeline.conf";

/// Realized rates are only held to the ±2 point tolerance on worlds at least
/// this large; smaller worlds cannot hit the targets at one-week granularity.
pub const RATE_CHECK_MIN_WEEKS: usize = 100;
pub const RATE_TOLERANCE: f64 = 0.02;

/// Prior-season weeks per veteran and the fixed deviation they realize.
const VETERAN_SIGMA: f64 = 2.0;
/// Share of threshold-sample weeks that are true booms (or busts).
const EVENT_SHARE: f64 = 0.3;
/// Share of boom and bust weeks assigned to veterans.
const VETERAN_EVENTS: f64 = 0.35;
const MIN_PROJECTION: f64 = 8.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    pub player_count: usize,
    pub team_count: usize,
    pub weeks: u32,
    pub history_weeks: u32,
    pub docs_per_player_week: usize,
    pub boom_rate: f64,
    pub bust_rate: f64,
    /// Probability that a document's tone (and injury talk) matches the
    /// player-week's labels.
    pub tone_correlation: f64,
    /// Probability that a document names the player's team next to the player.
    pub team_mention_rate: f64,
    pub season_start: NaiveDate,
    pub seed: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            player_count: 50,
            team_count: 16,
            weeks: 17,
            history_weeks: 8,
            docs_per_player_week: 6,
            boom_rate: 0.14,
            bust_rate: 0.30,
            tone_correlation: 0.8,
            team_mention_rate: 0.9,
            season_start: NaiveDate::from_ymd_opt(2018, 9, 4).expect("valid date"),
            seed: 7,
        }
    }
}

impl WorldConfig {
    pub fn validate(&self) -> Result<()> {
        if self.player_count == 0 || self.team_count == 0 || self.weeks == 0 || self.docs_per_player_week == 0 {
            return Err(Error::invalid("player, team, week and document counts must be positive"));
        }
        if self.history_weeks < 2 {
            return Err(Error::invalid("veterans need at least two prior-season weeks"));
        }
        if self.player_count > surname_pool().len() {
            return Err(Error::invalid(format!("at most {} players supported", surname_pool().len())));
        }
        if self.team_count > TEAM_NAMES.len() {
            return Err(Error::invalid(format!("at most {} teams supported", TEAM_NAMES.len())));
        }
        for (name, r) in [
            ("boom_rate", self.boom_rate),
            ("bust_rate", self.bust_rate),
            ("tone_correlation", self.tone_correlation),
            ("team_mention_rate", self.team_mention_rate),
        ] {
            if !(r > 0.0 && r < 1.0) && !(name == "team_mention_rate" && r == 1.0) {
                return Err(Error::invalid(format!("{name} must lie in (0, 1)")));
            }
        }
        week_window(self.season_start, 1)?;
        Ok(())
    }

    pub fn label_config(&self) -> LabelConfig {
        LabelConfig {
            bust_direction: BustDirection::Inverted,
            ..LabelConfig::default()
        }
    }

    /// Pipeline parameters matching this world.
    pub fn pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            seed: self.seed,
            season_start: self.season_start,
            bust_direction: BustDirection::Inverted,
            ..PipelineConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Team {
    pub name: String,
    pub city: String,
    pub coach: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizedRates {
    pub boom: f64,
    pub bust: f64,
    pub injury: f64,
    pub meaningful: f64,
}

#[derive(Debug, Clone)]
pub struct World {
    pub config: WorldConfig,
    pub teams: Vec<Team>,
    pub roster: Vec<PlayerBio>,
    pub history: Vec<WeeklyStat>,
    pub stats: Vec<WeeklyStat>,
    pub injuries: Vec<InjuryReport>,
    pub labeling: Labeling,
    pub rates: RealizedRates,
    pub documents: Vec<Document>,
    pub gold: Vec<EntitySpan>,
    pub dictionaries: Vec<Dictionary>,
    pub encyclopedia: String,
}

#[derive(Serialize)]
struct WorldRecord<'a> {
    config: &'a WorldConfig,
    labels: LabelConfig,
    rates: RealizedRates,
    boom_threshold: crate::labeling::Threshold,
    bust_threshold: crate::labeling::Threshold,
    teams: &'a [Team],
}

impl World {
    /// Writes every artifact into `dir`, creating it if needed.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut store = CorpusStore::new();
        store.ingest(self.documents.iter().cloned());
        store.save(dir.join(CORPUS_FILE))?;
        fs::write(dir.join(DICTIONARY_FILE), format_dictionaries(&self.dictionaries))?;
        fs::write(dir.join(GOLD_FILE), format_spans(&self.gold))?;
        fs::write(dir.join(ROSTER_FILE), format_roster(&self.roster)?)?;
        fs::write(dir.join(HISTORY_FILE), format_stats(&self.history)?)?;
        fs::write(dir.join(STATS_FILE), format_stats(&self.stats)?)?;
        fs::write(dir.join(INJURY_FILE), format_injuries(&self.injuries)?)?;
        fs::write(dir.join(LABELS_FILE), format_labels(&self.labeling.labels)?)?;
        fs::write(dir.join(ENCYCLOPEDIA_FILE), &self.encyclopedia)?;
        fs::write(dir.join(PIPELINE_FILE), self.config.pipeline_config().to_text())?;
        let record = WorldRecord {
            config: &self.config,
            labels: self.config.label_config(),
            rates: self.rates,
            boom_threshold: self.labeling.boom,
            bust_threshold: self.labeling.bust,
            teams: &self.teams,
        };
        fs::write(dir.join(WORLD_FILE), serde_json::to_string_pretty(&record)? + "\n")?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

const FIRST_NAMES: &[&str] = &[
    "Aaron", "Blake", "Caleb", "Darius", "Elijah", "Felix", "Grant", "Hunter", "Isaiah", "Jalen", "Kendrick",
    "Lamar", "Marcus", "Nolan", "Owen", "Preston", "Quentin", "Reggie", "Silas", "Trent", "Ulysses", "Vernon",
    "Wesley", "Xavier", "Yusuf", "Zane", "Andre", "Brock", "Corey", "Devin",
];

const SURNAME_HEADS: &[&str] = &[
    "Ald", "Bram", "Cort", "Dray", "Eld", "Fenn", "Gorm", "Hask", "Ivor", "Jask", "Kell", "Lorn", "Mord", "Nash",
    "Orr", "Pryd", "Quill", "Rusk", "Stav", "Tarr",
];

const SURNAME_TAILS: &[&str] = &["ley", "ton", "wick", "by", "mont", "well", "son", "den", "field", "more", "ridge", "ham"];

fn surname_pool() -> Vec<String> {
    let mut out = Vec::new();
    for h in SURNAME_HEADS {
        for t in SURNAME_TAILS {
            out.push(format!("{h}{t}"));
        }
    }
    out
}

const TEAM_NAMES: &[&str] = &[
    "Marauders", "Stallions", "Comets", "Ironclads", "Wolverines", "Gators", "Thunderbirds", "Rattlers", "Sentinels",
    "Vipers", "Grizzlies", "Outlaws", "Hornets", "Barons", "Cyclones", "Pioneers", "Foxes", "Condors", "Mariners",
    "Knights", "Rangers", "Bison", "Stormers", "Lumberjacks", "Miners", "Anchors", "Flyers", "Pilots", "Generals",
    "Stingrays", "Admirals", "Wildcats",
];

const CITIES: &[&str] = &[
    "Bellport", "Cedar Bay", "Dunmore", "Eastvale", "Fairhaven", "Glenrock", "Harrow", "Ironton", "Juniper",
    "Kingsbridge", "Lakemont", "Millbrook", "Northgate", "Oakridge", "Pinecrest", "Queensport", "Riverton",
    "Stonefield", "Thornbury", "Upton", "Valewood", "Westmarch", "Yarrow", "Brookhaven", "Clearwater", "Driftwood",
    "Elmstead", "Foxborough", "Greystone", "Highcliff", "Marbleton", "Sandport",
];

const COACH_FIRST: &[&str] = &["Dale", "Rich", "Gene", "Walt", "Hank", "Lou", "Vince", "Chuck"];

const POSITIVE_TONE: &[&str] = &["explosive", "dominant", "elite", "sharp", "unstoppable", "electric", "surging", "confident"];
const NEGATIVE_TONE: &[&str] = &["sluggish", "shaky", "disappointing", "overmatched", "erratic", "listless", "struggling", "rusty"];
const INJURIES: &[&str] = &["sprain", "strain", "contusion", "tear", "bruise"];
const BODY_PARTS: &[&str] = &["ankle", "knee", "hamstring", "shoulder", "wrist", "groin"];
const TREATMENTS: &[&str] = &["ice", "rehab", "taping", "massage", "rest"];
const METRICS: &[&str] = &["yards per carry", "target share", "red zone touches", "snap count", "completion rate", "air yards"];
const FANS: &[&str] = &["fans", "home crowd", "season ticket holders", "supporters"];
const GEAR: &[&str] = &["helmet", "cleats", "gloves", "visor", "mouthguard"];
const STATUS_WORDS: [(InjuryStatus, &str); 3] = [
    (InjuryStatus::Questionable, "questionable"),
    (InjuryStatus::Probable, "probable"),
    (InjuryStatus::NotListed, "active"),
];
const SOURCES: [(SourceKind, &[&str]); 4] = [
    (SourceKind::Article, &["Gridiron Wire", "Sideline Daily"]),
    (SourceKind::Blog, &["Waiver Notes", "Depth Chart Diaries"]),
    (SourceKind::VideoTranscript, &["Film Room Live"]),
    (SourceKind::PodcastTranscript, &["Fantasy Huddle Pod", "Two Minute Drill"]),
];

fn position_word(p: Position) -> &'static str {
    match p {
        Position::QB => "quarterback",
        Position::RB => "running back",
        Position::WR => "wide receiver",
        Position::TE => "tight end",
        Position::K => "kicker",
        Position::DST => "defense",
    }
}

fn pick<'a, R: Rng>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs[rng.random_range(0..xs.len())]
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

// ---------------------------------------------------------------------------
// Planting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Planted {
    Boom,
    Bust,
    MildOver,
    MildUnder,
    Normal,
}

struct Allocation {
    rookies: usize,
    veteran: Vec<Planted>,
    rookie: Vec<Planted>,
}

fn fill(counts: &[(Planted, usize)], total: usize) -> Vec<Planted> {
    let mut v = Vec::with_capacity(total);
    for (p, n) in counts {
        v.extend(std::iter::repeat_n(*p, *n));
    }
    v.resize(total, Planted::Normal);
    v
}

fn allocate(cfg: &WorldConfig) -> Result<Allocation> {
    let (b, u) = (cfg.boom_rate, cfg.bust_rate);
    let need_rookie = (1.0 - VETERAN_EVENTS) * (b + u);
    let need_veteran = VETERAN_EVENTS * (b + u) / EVENT_SHARE;
    let free = 1.0 - need_rookie - need_veteran;
    if free < 0.0 {
        return Err(Error::invalid(format!(
            "boom rate {b} and bust rate {u} cannot be planted together (need {:.0}% of weeks)",
            100.0 * (need_rookie + need_veteran)
        )));
    }
    let players = cfg.player_count;
    let rookies = ((need_rookie + free / 2.0) * players as f64).round() as usize;
    let rookies = rookies.min(players - 1);
    let weeks = cfg.weeks as usize;
    let (total, rookie_weeks) = (players * weeks, rookies * weeks);
    let veteran_weeks = total - rookie_weeks;

    let boom_total = (b * total as f64).round() as usize;
    let bust_total = (u * total as f64).round() as usize;
    let boom_r = ((1.0 - VETERAN_EVENTS) * boom_total as f64).round() as usize;
    let boom_r = boom_r.min(rookie_weeks);
    let bust_r = (((1.0 - VETERAN_EVENTS) * bust_total as f64).round() as usize).min(rookie_weeks - boom_r);
    let mild = |events: usize| (events as f64 * (1.0 - EVENT_SHARE) / EVENT_SHARE).round() as usize;
    let mut c = [
        boom_total - boom_r,
        bust_total - bust_r,
        mild(boom_total - boom_r),
        mild(bust_total - bust_r),
    ];
    if c.iter().sum::<usize>() > veteran_weeks {
        if total >= RATE_CHECK_MIN_WEEKS {
            return Err(Error::invalid("rate targets do not fit the veteran weeks"));
        }
        // Small world: shed the largest bucket, keeping one boom and one bust
        // sample member while there is room.
        while c.iter().sum::<usize>() > veteran_weeks {
            let floor = |i: usize| if i < 2 && veteran_weeks >= 2 { 1 } else { 0 };
            let i = (0..4).filter(|&i| c[i] > floor(i)).max_by_key(|&i| (c[i], i)).expect("something to shed");
            c[i] -= 1;
        }
    }
    if veteran_weeks < 2 || c[0] + c[2] == 0 || c[1] + c[3] == 0 {
        return Err(Error::invalid("world too small to form boom and bust threshold samples"));
    }
    Ok(Allocation {
        rookies,
        veteran: fill(
            &[
                (Planted::Boom, c[0]),
                (Planted::Bust, c[1]),
                (Planted::MildOver, c[2]),
                (Planted::MildUnder, c[3]),
            ],
            veteran_weeks,
        ),
        rookie: fill(&[(Planted::Boom, boom_r), (Planted::Bust, bust_r)], rookie_weeks),
    })
}

/// Actual score for a planted week, given projection and ownership.
fn plant_actual<R: Rng>(rng: &mut R, state: Planted, projected: f64, perowned: f64) -> f64 {
    let d = match state {
        Planted::Boom => rng.random_range(8.0..10.0) * perowned.powf(0.1),
        Planted::Bust => -rng.random_range(2.4..2.8) * projected.sqrt(),
        Planted::MildOver => rng.random_range(1.1..1.3) * VETERAN_SIGMA,
        Planted::MildUnder => -rng.random_range(1.1..1.3) * VETERAN_SIGMA,
        Planted::Normal => rng.random_range(-0.5..0.5) * VETERAN_SIGMA,
    };
    round2(projected + d).max(0.0)
}

fn base_projection<R: Rng>(rng: &mut R, p: Position) -> f64 {
    match p {
        Position::QB => rng.random_range(16.0..22.0),
        Position::RB => rng.random_range(10.0..16.0),
        Position::WR => rng.random_range(9.0..15.0),
        Position::TE => rng.random_range(8.5..12.0),
        Position::K => rng.random_range(8.5..10.0),
        Position::DST => rng.random_range(8.5..11.0),
    }
}

fn body_size<R: Rng>(rng: &mut R, p: Position) -> (f64, f64) {
    let (h, w) = match p {
        Position::QB => (191.0, 102.0),
        Position::RB => (180.0, 98.0),
        Position::WR => (185.0, 91.0),
        Position::TE => (196.0, 114.0),
        Position::K => (183.0, 88.0),
        Position::DST => (188.0, 110.0),
    };
    (round2(h + rng.random_range(-5.0..5.0)), round2(w + rng.random_range(-6.0..6.0)))
}

// ---------------------------------------------------------------------------
// Documents
// ---------------------------------------------------------------------------

struct Body {
    text: String,
    spans: Vec<(usize, usize, EntityType, String)>,
}

impl Body {
    fn new() -> Self {
        Body {
            text: String::new(),
            spans: Vec::new(),
        }
    }

    fn plain(&mut self, s: &str) -> &mut Self {
        self.text.push_str(s);
        self
    }

    fn entity(&mut self, s: &str, t: EntityType) -> &mut Self {
        let start = self.text.chars().count();
        self.text.push_str(s);
        self.spans.push((start, start + s.chars().count(), t, s.to_string()));
        self
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Tone {
    Positive,
    Negative,
    Neutral,
}

struct DocContext<'a> {
    player: &'a PlayerBio,
    team: &'a Team,
    week: u32,
    tone: Tone,
    injury_talk: bool,
    status_word: Option<&'a str>,
}

fn compose<R: Rng>(rng: &mut R, ctx: &DocContext, team_mention: f64) -> Body {
    let mut b = Body::new();
    let name = ctx.player.name.as_str();
    if rng.random_bool(team_mention) {
        match rng.random_range(0..3) {
            0 => b.entity(name, EntityType::Player).plain(" of the ").entity(&ctx.team.name, EntityType::Team),
            1 => b.plain("The ").entity(&ctx.team.name, EntityType::Team).plain(" lean on ").entity(name, EntityType::Player),
            _ => b.entity(name, EntityType::Player).plain(" lines up for the ").entity(&ctx.team.name, EntityType::Team),
        };
    } else {
        b.entity(name, EntityType::Player).plain(" draws attention");
    }
    b.plain(&format!(" in the NFL week {} preview.", ctx.week));

    match ctx.tone {
        Tone::Positive | Tone::Negative => {
            let words = if ctx.tone == Tone::Positive { POSITIVE_TONE } else { NEGATIVE_TONE };
            let (w1, w2) = (pick(rng, words), pick(rng, words));
            b.plain(" Analysts call his recent form ")
                .entity(w1, tone_type(ctx.tone == Tone::Positive))
                .plain(" and ")
                .entity(w2, tone_type(ctx.tone == Tone::Positive))
                .plain(".");
        }
        Tone::Neutral => {
            b.plain(" Analysts expect a routine workload.");
        }
    }
    if ctx.injury_talk {
        b.plain(" He is nursing a ")
            .entity(pick(rng, INJURIES), EntityType::Injury)
            .plain(" in his ")
            .entity(pick(rng, BODY_PARTS), EntityType::BodyPart)
            .plain(" and is getting ")
            .entity(pick(rng, TREATMENTS), EntityType::Treatment)
            .plain(".");
    }
    if let Some(status) = ctx.status_word {
        b.plain(" The injury report lists him as ").entity(status, EntityType::PlayerStatus).plain(".");
    }
    if rng.random_bool(0.6) {
        b.plain(" His ")
            .entity(pick(rng, METRICS), EntityType::PerformanceMetric)
            .plain(" caught the eye of coach ")
            .entity(&ctx.team.coach, EntityType::Coach)
            .plain(".");
    }
    if rng.random_bool(0.4) {
        b.plain(" The ")
            .entity(pick(rng, FANS), EntityType::Fans)
            .plain(" in ")
            .entity(&ctx.team.city, EntityType::Location)
            .plain(" want a big game.");
    }
    if rng.random_bool(0.3) {
        b.plain(" He tried new ").entity(pick(rng, GEAR), EntityType::Gear).plain(" at practice.");
    }
    b
}

fn tone_type(positive: bool) -> EntityType {
    if positive {
        EntityType::PositiveTone
    } else {
        EntityType::NegativeTone
    }
}

fn dictionaries(roster: &[PlayerBio], teams: &[Team]) -> Result<Vec<Dictionary>> {
    let lists: Vec<(EntityType, Vec<String>)> = vec![
        (EntityType::BodyPart, BODY_PARTS.iter().map(|s| s.to_string()).collect()),
        (EntityType::Coach, teams.iter().map(|t| t.coach.clone()).collect()),
        (EntityType::Fans, FANS.iter().map(|s| s.to_string()).collect()),
        (EntityType::Gear, GEAR.iter().map(|s| s.to_string()).collect()),
        (EntityType::Injury, INJURIES.iter().map(|s| s.to_string()).collect()),
        (EntityType::Location, teams.iter().map(|t| t.city.clone()).collect()),
        (EntityType::Player, roster.iter().map(|p| p.name.clone()).collect()),
        (EntityType::PlayerStatus, STATUS_WORDS.iter().map(|(_, w)| w.to_string()).collect()),
        (EntityType::Treatment, TREATMENTS.iter().map(|s| s.to_string()).collect()),
        (EntityType::PositiveTone, POSITIVE_TONE.iter().map(|s| s.to_string()).collect()),
        (EntityType::NegativeTone, NEGATIVE_TONE.iter().map(|s| s.to_string()).collect()),
        (EntityType::Team, teams.iter().map(|t| t.name.clone()).collect()),
        (EntityType::PerformanceMetric, METRICS.iter().map(|s| s.to_string()).collect()),
    ];
    lists.into_iter().map(|(t, terms)| Dictionary::new(t, terms)).collect()
}

fn encyclopedia(roster: &[PlayerBio], teams: &BTreeMap<String, Team>) -> String {
    let mut out = String::new();
    for t in teams.values() {
        out.push_str(&format!(
            "The {0} are an NFL team based in {1}. The {0} are coached by {2}. {2} leads the {0}.\n",
            t.name, t.city, t.coach
        ));
    }
    for p in roster {
        let t = &teams[&p.team];
        out.push_str(&format!(
            "{0} is a {1} for the {2}. {0} plays for the {2} of {3}. {0} signed with the {2}.\n",
            p.name,
            position_word(p.position),
            t.name,
            t.city
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

/// Builds a world and checks that labeling reproduces the configured boom
/// and bust rates within two points.
pub fn generate_world(cfg: &WorldConfig) -> Result<World> {
    cfg.validate()?;
    let alloc = allocate(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut teams_by_name = BTreeMap::new();
    let mut team_list = Vec::new();
    let mut names: Vec<String> = surname_pool();
    names.shuffle(&mut rng);
    let mut cities: Vec<&str> = CITIES.to_vec();
    cities.shuffle(&mut rng);
    let mut nicknames: Vec<&str> = TEAM_NAMES.to_vec();
    nicknames.shuffle(&mut rng);
    // Coaches take surnames from the tail of the pool so they never collide
    // with player surnames.
    let coach_surnames: Vec<String> = names.split_off(names.len() - cfg.team_count);
    for i in 0..cfg.team_count {
        let team = Team {
            name: nicknames[i].to_string(),
            city: cities[i].to_string(),
            coach: format!("{} {}", pick(&mut rng, COACH_FIRST), coach_surnames[i]),
        };
        teams_by_name.insert(team.name.clone(), team.clone());
        team_list.push(team);
    }

    let positions = [
        (Position::QB, 2),
        (Position::RB, 3),
        (Position::WR, 4),
        (Position::TE, 2),
        (Position::K, 1),
        (Position::DST, 1),
    ];
    let total_weight: u32 = positions.iter().map(|(_, w)| w).sum();
    let mut roster = Vec::with_capacity(cfg.player_count);
    let mut base = Vec::with_capacity(cfg.player_count);
    let mut owned = Vec::with_capacity(cfg.player_count);
    for i in 0..cfg.player_count {
        let mut ticket = rng.random_range(0..total_weight);
        let position = positions
            .iter()
            .find(|(_, w)| {
                if ticket < *w {
                    true
                } else {
                    ticket -= w;
                    false
                }
            })
            .map(|(p, _)| *p)
            .expect("weights cover the range");
        // Rookies are the trailing players.
        let rookie = i >= cfg.player_count - alloc.rookies;
        let age: f64 = if rookie { rng.random_range(21..24) } else { rng.random_range(24..34) }.into();
        let (height_cm, weight_kg) = body_size(&mut rng, position);
        roster.push(PlayerBio {
            player_id: format!("p{:03}", i + 1),
            name: format!("{} {}", pick(&mut rng, FIRST_NAMES), names[i]),
            team: team_list[i % cfg.team_count].name.clone(),
            position,
            age,
            seasons_pro: if rookie { 1.0 } else { (age - 22.0).max(2.0) },
            height_cm,
            weight_kg,
        });
        base.push(base_projection(&mut rng, position));
        owned.push(round2(rng.random_range(20.0..95.0)));
    }

    let veterans = cfg.player_count - alloc.rookies;
    let mut history = Vec::new();
    for i in 0..veterans {
        for w in 1..=cfg.history_weeks {
            let sign = if w % 2 == 1 { 1.0 } else { -1.0 };
            let m = round2(base[i]);
            history.push(WeeklyStat {
                player_id: roster[i].player_id.clone(),
                week: w,
                position: roster[i].position,
                actual: m + sign * VETERAN_SIGMA,
                projected: m,
                perowned: owned[i],
            });
        }
    }

    let (mut vet_states, mut rookie_states) = (alloc.veteran, alloc.rookie);
    vet_states.shuffle(&mut rng);
    rookie_states.shuffle(&mut rng);
    let weeks = cfg.weeks as usize;
    let mut stats = Vec::with_capacity(cfg.player_count * weeks);
    let mut injuries = Vec::new();
    for (i, bio) in roster.iter().enumerate() {
        for w in 1..=cfg.weeks {
            let k = w as usize - 1;
            let state = if i < veterans {
                vet_states[i * weeks + k]
            } else {
                rookie_states[(i - veterans) * weeks + k]
            };
            let projected = round2((base[i] + rng.random_range(-1.0..1.0)).max(MIN_PROJECTION));
            let actual = plant_actual(&mut rng, state, projected, owned[i]);
            stats.push(WeeklyStat {
                player_id: bio.player_id.clone(),
                week: w,
                position: bio.position,
                actual,
                projected,
                perowned: owned[i],
            });
            let roll: f64 = rng.random();
            let status = if roll < 0.12 {
                InjuryStatus::Questionable
            } else if roll < 0.24 {
                InjuryStatus::Probable
            } else {
                InjuryStatus::NotListed
            };
            if status != InjuryStatus::NotListed {
                injuries.push(InjuryReport {
                    player_id: bio.player_id.clone(),
                    week: w,
                    status,
                });
            }
        }
    }

    let labeling = generate_labels(&stats, &player_sigmas(&history), &injuries, &cfg.label_config())?;
    let n = labeling.labels.len() as f64;
    let share = |f: &dyn Fn(&crate::labeling::LabelSet) -> bool| labeling.labels.iter().filter(|l| f(l)).count() as f64 / n;
    let rates = RealizedRates {
        boom: share(&|l| l.boom),
        bust: share(&|l| l.bust),
        injury: share(&|l| l.play_with_injury),
        meaningful: share(&|l| l.meaningful),
    };
    if labeling.labels.len() >= RATE_CHECK_MIN_WEEKS
        && ((rates.boom - cfg.boom_rate).abs() > RATE_TOLERANCE || (rates.bust - cfg.bust_rate).abs() > RATE_TOLERANCE)
    {
        return Err(Error::invalid(format!(
            "realized boom {:.3} / bust {:.3} miss targets {:.3} / {:.3}",
            rates.boom, rates.bust, cfg.boom_rate, cfg.bust_rate
        )));
    }

    let status_of: BTreeMap<(&str, u32), InjuryStatus> =
        injuries.iter().map(|r| ((r.player_id.as_str(), r.week), r.status)).collect();
    let label_of: BTreeMap<(&str, u32), &crate::labeling::LabelSet> =
        labeling.labels.iter().map(|l| ((l.player_id.as_str(), l.week), l)).collect();

    let c = cfg.tone_correlation;
    let mut documents = Vec::new();
    let mut gold = Vec::new();
    for bio in &roster {
        let team = &teams_by_name[&bio.team];
        for w in 1..=cfg.weeks {
            let window = week_window(cfg.season_start, w)?;
            let label = label_of[&(bio.player_id.as_str(), w)];
            let status = status_of
                .get(&(bio.player_id.as_str(), w))
                .copied()
                .unwrap_or(InjuryStatus::NotListed);
            let expected = if label.boom {
                Tone::Positive
            } else if label.bust {
                Tone::Negative
            } else {
                Tone::Neutral
            };
            let hurt = status != InjuryStatus::NotListed;
            for _ in 0..cfg.docs_per_player_week {
                let tone = if rng.random_bool(c) {
                    expected
                } else {
                    let others: Vec<Tone> =
                        [Tone::Positive, Tone::Negative, Tone::Neutral].into_iter().filter(|t| *t != expected).collect();
                    others[rng.random_range(0..others.len())]
                };
                let injury_talk = if rng.random_bool(c) { hurt } else { !hurt };
                let status_word = if rng.random_bool(0.5) {
                    let true_word = STATUS_WORDS.iter().find(|(s, _)| *s == status).map(|(_, w)| *w).expect("listed");
                    Some(if rng.random_bool(c) {
                        true_word
                    } else {
                        STATUS_WORDS[rng.random_range(0..STATUS_WORDS.len())].1
                    })
                } else {
                    None
                };
                let ctx = DocContext {
                    player: bio,
                    team,
                    week: w,
                    tone,
                    injury_talk,
                    status_word,
                };
                let body = compose(&mut rng, &ctx, cfg.team_mention_rate);
                let id = format!("d{:06}", documents.len() + 1);
                let (kind, outlets) = SOURCES[rng.random_range(0..SOURCES.len())];
                let offset = rng.random_range(0..(7 * 24 * 3600 - 1));
                for (start, end, entity_type, surface) in body.spans {
                    gold.push(EntitySpan {
                        doc_id: id.clone(),
                        start,
                        end,
                        entity_type,
                        surface,
                    });
                }
                documents.push(Document {
                    id,
                    source_kind: kind,
                    source_name: pick(&mut rng, outlets).to_string(),
                    published_at: window.start + Duration::seconds(offset),
                    title: format!("{} week {} notes", bio.name, w),
                    body: body.text,
                });
            }
        }
    }

    Ok(World {
        dictionaries: dictionaries(&roster, &team_list)?,
        encyclopedia: encyclopedia(&roster, &teams_by_name),
        config: cfg.clone(),
        teams: team_list,
        roster,
        history,
        stats,
        injuries,
        labeling,
        rates,
        documents,
        gold,
    })
}
