use std::collections::{BTreeMap, BTreeSet};

use chrono::{TimeZone, Utc};
use gridiron_core::annotation::{EntitySpan, EntityType};
use gridiron_core::corpus::{Document, SourceKind};
use gridiron_core::embedding::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TEAMS: [(&str, &str); 20] = [
    ("chiefs", "kansas"),
    ("rams", "angeles"),
    ("patriots", "foxborough"),
    ("saints", "orleans"),
    ("bears", "chicago"),
    ("packers", "green"),
    ("eagles", "philadelphia"),
    ("cowboys", "dallas"),
    ("steelers", "pittsburgh"),
    ("ravens", "baltimore"),
    ("broncos", "denver"),
    ("seahawks", "seattle"),
    ("vikings", "minnesota"),
    ("falcons", "atlanta"),
    ("texans", "houston"),
    ("colts", "indianapolis"),
    ("titans", "nashville"),
    ("jaguars", "jacksonville"),
    ("dolphins", "miami"),
    ("bengals", "cincinnati"),
];

const PLAYERS: [&str; 20] = [
    "kelce", "gurley", "brady", "kamara", "mack", "rodgers", "ertz", "elliott", "bell", "flacco", "sutton", "lockett",
    "thielen", "jones", "watson", "hilton", "henry", "fournette", "drake", "mixon",
];

const FILLER: [&str; 16] = [
    "touchdown", "yards", "week", "coach", "practice", "snaps", "target", "carries", "game", "quarter", "drive",
    "catch", "field", "season", "report", "fantasy",
];

/// Player sentences mention the player's team with probability 0.9.
fn planted_corpus(seed: u64, sentences: usize) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..sentences {
        let i = rng.random_range(0..PLAYERS.len());
        let mut s = vec![PLAYERS[i].to_string()];
        if rng.random_bool(0.9) {
            s.push(TEAMS[i].0.to_string());
            if rng.random_bool(0.5) {
                s.push(TEAMS[i].1.to_string());
            }
        }
        for _ in 0..4 {
            s.push(FILLER[rng.random_range(0..FILLER.len())].to_string());
        }
        s.shuffle(&mut rng);
        out.push(s);
    }
    out
}

fn trained() -> EmbeddingTable {
    let cfg = SkipGramConfig {
        dimension: 32,
        window: 5,
        epochs: 5,
        seed: 11,
        ..SkipGramConfig::default()
    };
    train_skipgram(&planted_corpus(3, 8000), &cfg, TableRole::Broad).unwrap()
}

#[test]
fn planted_pairs_are_recovered() {
    let table = trained();
    let n = PLAYERS.len();
    let mut analogy_hits = 0;
    let mut neighbor_hits = 0;
    for i in 0..n {
        let r = (i + 1) % n;
        let ranked = analogy(PLAYERS[r], TEAMS[r].0, PLAYERS[i], &table, 5).unwrap();
        if ranked.iter().any(|(t, _)| t == TEAMS[i].0) {
            analogy_hits += 1;
        }
        let near = keyword_neighbors(PLAYERS[i], &table, 5).unwrap();
        if near.iter().any(|(t, _)| t == TEAMS[i].0) {
            neighbor_hits += 1;
        }
    }
    assert!(analogy_hits as f64 / n as f64 >= 0.9, "analogy hits {analogy_hits}/{n}");
    assert!(neighbor_hits as f64 / n as f64 >= 0.8, "neighbor hits {neighbor_hits}/{n}");

    let kelce = table.get("kelce").unwrap();
    let chiefs = table.get("chiefs").unwrap();
    let rams = table.get("rams").unwrap();
    assert!(cosine(kelce, chiefs) > cosine(kelce, rams));
}

#[test]
fn training_is_deterministic() {
    let corpus = planted_corpus(5, 500);
    let cfg = SkipGramConfig {
        dimension: 8,
        epochs: 2,
        seed: 9,
        ..SkipGramConfig::default()
    };
    let a = train_skipgram(&corpus, &cfg, TableRole::Broad).unwrap();
    let b = train_skipgram(&corpus, &cfg, TableRole::Broad).unwrap();
    assert_eq!(a.to_text(), b.to_text());
    assert!(a.terms().all(|(_, v)| v.iter().all(|x| x.is_finite())));
    assert!(!a.contains("zebra"));
}

#[test]
fn neighbors_match_exhaustive_scan() {
    let table = trained();
    for term in ["kelce", "chiefs", "touchdown"] {
        let q = table.get(term).unwrap().to_vec();
        let mut all: Vec<(String, f64)> = table
            .terms()
            .filter(|(t, _)| *t != term)
            .map(|(t, v)| {
                let d: f64 = q.iter().zip(v).map(|(a, b)| a * b).sum();
                let na: f64 = q.iter().map(|a| a * a).sum::<f64>().sqrt();
                let nb: f64 = v.iter().map(|b| b * b).sum::<f64>().sqrt();
                (t.to_string(), d / (na * nb))
            })
            .collect();
        all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let got = keyword_neighbors(term, &table, 10).unwrap();
        let expected: Vec<&str> = all.iter().take(10).map(|(t, _)| t.as_str()).collect();
        let got_terms: Vec<&str> = got.iter().map(|(t, _)| t.as_str()).collect();
        assert_eq!(got_terms, expected);
        for ((_, g), (_, e)) in got.iter().zip(&all) {
            assert!((g - e).abs() < 1e-12);
        }
    }
}

#[test]
fn zero_offset_analogy_ranks_c_first_before_exclusion() {
    let table = trained();
    let q = analogy_query("kelce", "kelce", "gurley", &table).unwrap();
    let ranked = nearest_to_vector(&table, &q, &BTreeSet::new(), 3);
    assert_eq!(ranked[0].0, "gurley");
    assert!((ranked[0].1 - 1.0).abs() < 1e-12);
    // with the inputs excluded, gurley's own nearest neighbor comes first
    let excluded = analogy("kelce", "kelce", "gurley", &table, 1).unwrap();
    let near = keyword_neighbors("gurley", &table, 2).unwrap();
    let first_non_input = near.iter().find(|(t, _)| t != "kelce").unwrap();
    assert_eq!(excluded[0].0, first_non_input.0);
}

#[test]
fn analogy_is_scale_invariant() {
    let table = trained();
    let scaled = table.scaled(7.5);
    for i in 0..5 {
        let a = analogy(PLAYERS[0], TEAMS[0].0, PLAYERS[i + 1], &table, 10).unwrap();
        let b = analogy(PLAYERS[0], TEAMS[0].0, PLAYERS[i + 1], &scaled, 10).unwrap();
        let ta: Vec<_> = a.iter().map(|(t, _)| t).collect();
        let tb: Vec<_> = b.iter().map(|(t, _)| t).collect();
        assert_eq!(ta, tb);
    }
}

fn doc(id: &str, body: &str) -> Document {
    Document {
        id: id.into(),
        source_kind: SourceKind::Blog,
        source_name: "feed".into(),
        published_at: Utc.with_ymd_and_hms(2018, 9, 6, 0, 0, 0).unwrap(),
        title: "note".into(),
        body: body.into(),
    }
}

#[test]
fn keywords_match_brute_force_tfidf() {
    let docs = vec![
        doc("a", "Kelce caught three passes. Kelce scored twice for the Chiefs."),
        doc("b", "The Chiefs offense stalled; Mahomes threw two interceptions."),
        doc("c", "Gurley ran for 120 yards and the Rams won easily."),
        doc("d", "Chiefs coach praised Kelce and Mahomes after practice."),
    ];
    let stats = TermStatistics::from_documents(&docs);
    for target in &docs {
        // oracle: recount everything from scratch
        let toks = |body: &str| -> Vec<String> {
            body.split(|c: char| !c.is_alphanumeric())
                .filter(|w| !w.is_empty())
                .map(|w| w.to_lowercase())
                .filter(|w| !gridiron_core::text::is_stopword(w) && w.chars().any(|c| c.is_alphabetic()))
                .collect()
        };
        let mut tf: BTreeMap<String, f64> = BTreeMap::new();
        for w in toks(&target.body) {
            *tf.entry(w).or_default() += 1.0;
        }
        let mut scored: Vec<(String, f64)> = tf
            .into_iter()
            .map(|(w, n)| {
                let df = docs.iter().filter(|d| toks(&d.body).contains(&w)).count() as f64;
                let s = n * (docs.len() as f64 / df).ln();
                (w, s)
            })
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        for k in [0, 1, 3, 20] {
            let expected: BTreeSet<String> = scored.iter().take(k).map(|(w, _)| w.clone()).collect();
            let s = summarize_document(target, &[], &stats, k).unwrap();
            assert_eq!(s.keywords, expected, "doc {} k {k}", target.id);
        }
    }
}

#[test]
fn minimal_document_summary() {
    let d = doc("m", "Tom Brady");
    let spans = vec![EntitySpan {
        doc_id: "m".into(),
        start: 0,
        end: 9,
        entity_type: EntityType::Player,
        surface: "Tom Brady".into(),
    }];
    let stats = TermStatistics::from_documents([&d]);
    let s = summarize_document(&d, &spans, &stats, DEFAULT_KEYWORDS).unwrap();
    assert_eq!(s.entities, BTreeSet::from(["tom brady".to_string()]));
    assert!(s.concepts.is_empty());
    assert!(s.keywords.iter().all(|k| k == "tom" || k == "brady"));
}

fn random_table(rng: &mut ChaCha8Rng, role: TableRole, vocab: &[String], dim: usize) -> EmbeddingTable {
    let mut t = EmbeddingTable::new(role, dim).unwrap();
    for w in vocab {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        t.insert(w, &v).unwrap();
    }
    t
}

#[test]
fn player_vector_matches_accumulation_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let vocab: Vec<String> = (0..60).map(|i| format!("w{i}")).collect();
    let e = random_table(&mut rng, TableRole::Encyclopedia, &vocab[..40], 6);
    let b = random_table(&mut rng, TableRole::Broad, &vocab[20..], 6);
    let summaries: Vec<FeatureSummary> = (0..50)
        .map(|d| {
            let pick = |rng: &mut ChaCha8Rng| -> BTreeSet<String> {
                (0..rng.random_range(0..4)).map(|_| format!("w{}", rng.random_range(0..70))).collect()
            };
            FeatureSummary {
                doc_id: format!("doc{d:02}"),
                keywords: pick(&mut rng),
                concepts: pick(&mut rng),
                entities: pick(&mut rng),
            }
        })
        .collect();

    // oracle: reverse summation order, per-table term means computed directly
    let mut acc = vec![0.0; 12];
    let mut n = 0;
    for s in summaries.iter().rev() {
        let terms: BTreeSet<String> = s.keywords.iter().chain(&s.concepts).chain(&s.entities).cloned().collect();
        let half = |t: &EmbeddingTable| -> Option<Vec<f64>> {
            let vs: Vec<&[f64]> = terms.iter().rev().filter_map(|w| t.get(w)).collect();
            if vs.is_empty() {
                return None;
            }
            Some((0..6).map(|j| vs.iter().map(|v| v[j]).sum::<f64>() / vs.len() as f64).collect())
        };
        let (he, hb) = (half(&e), half(&b));
        if he.is_none() && hb.is_none() {
            continue;
        }
        let mut full = he.unwrap_or(vec![0.0; 6]);
        full.extend(hb.unwrap_or(vec![0.0; 6]));
        for j in 0..12 {
            acc[j] += full[j];
        }
        n += 1;
    }
    let pv = player_vector("p", &summaries, &e, &b).unwrap();
    assert_eq!(pv.doc_count, n);
    for j in 0..12 {
        assert!((pv.vector[j] - acc[j] / n as f64).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn player_vector_is_permutation_invariant(seed in 0u64..1000, shuffle_seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vocab: Vec<String> = (0..20).map(|i| format!("t{i}")).collect();
        let e = random_table(&mut rng, TableRole::Encyclopedia, &vocab, 4);
        let b = random_table(&mut rng, TableRole::Broad, &vocab, 4);
        let mut summaries: Vec<FeatureSummary> = (0..8)
            .map(|d| FeatureSummary {
                doc_id: format!("d{d}"),
                keywords: (0..3).map(|_| format!("t{}", rng.random_range(0..20))).collect(),
                concepts: BTreeSet::new(),
                entities: BTreeSet::new(),
            })
            .collect();
        let before = player_vector("p", &summaries, &e, &b).unwrap();
        summaries.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
        let after = player_vector("p", &summaries, &e, &b).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn cosine_is_symmetric_and_bounded(a in prop::collection::vec(-10.0f64..10.0, 5), b in prop::collection::vec(-10.0f64..10.0, 5)) {
        let ab = cosine(&a, &b);
        prop_assert_eq!(ab, cosine(&b, &a));
        prop_assert!((-1.0..=1.0).contains(&ab));
        if a.iter().any(|x| *x != 0.0) {
            prop_assert!((cosine(&a, &a) - 1.0).abs() < 1e-12);
        }
    }
}
