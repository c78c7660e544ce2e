use chrono::{TimeZone, Utc};
use gridiron_core::annotation::{
    annotate, cohen_kappa, evaluate, format_dictionaries, parse_dictionaries, Contingency, Dictionary, EntitySpan, EntityType,
    MatchMode,
};
use gridiron_core::corpus::{Document, SourceKind};
use proptest::prelude::*;

fn doc(id: &str, body: &str) -> Document {
    Document {
        id: id.into(),
        source_kind: SourceKind::Article,
        source_name: "wire".into(),
        published_at: Utc.with_ymd_and_hms(2018, 9, 5, 12, 0, 0).unwrap(),
        title: "notes".into(),
        body: body.into(),
    }
}

fn span(doc_id: &str, start: usize, end: usize, t: EntityType) -> EntitySpan {
    EntitySpan {
        doc_id: doc_id.into(),
        start,
        end,
        entity_type: t,
        surface: String::new(),
    }
}

#[test]
fn longest_phrase_wins_and_offsets_are_character_based() {
    let dicts = vec![
        Dictionary::new(EntityType::Player, ["Travis Kelce", "Travis"]).unwrap(),
        Dictionary::new(EntityType::Injury, ["ankle sprain"]).unwrap(),
    ];
    let d = doc("d1", "Travis Kelce nursed an ankle sprain.");
    let spans = annotate(&d, &dicts);
    let got: Vec<(usize, usize, EntityType, &str)> =
        spans.iter().map(|s| (s.start, s.end, s.entity_type, s.surface.as_str())).collect();
    assert_eq!(
        got,
        vec![(0, 12, EntityType::Player, "Travis Kelce"), (23, 35, EntityType::Injury, "ankle sprain")]
    );

    let accented = doc("d2", "Né Travis practiced");
    let s = annotate(&accented, &dicts);
    assert_eq!((s[0].start, s[0].end), (3, 9));
}

#[test]
fn dictionary_text_round_trips() {
    let text = "player\tTravis Kelce\ninjury\tankle sprain\n# comment\n\ninjury\thamstring\n";
    let dicts = parse_dictionaries(text).unwrap();
    assert_eq!(dicts.len(), 2);
    assert_eq!(parse_dictionaries(&format_dictionaries(&dicts)).unwrap(), dicts);
    assert!(parse_dictionaries("player Travis").is_err());
    assert!(parse_dictionaries("wizard\tmerlin").is_err());
}

#[test]
fn binary_kappa_worked_example() {
    // po = 0.7, pe = 0.5
    let k = Contingency::from_rows(vec![vec![20, 5], vec![10, 15]]).unwrap().kappa().unwrap();
    assert_eq!(k, 0.4);
    assert!(Contingency::from_rows(vec![vec![1, 2]]).is_err());
    assert!(Contingency::new(3).kappa().is_err());
}

#[test]
fn kappa_over_tokens_counts_unannotated_tokens() {
    let d = doc("d", "aa bb cc dd");
    let a = vec![span("d", 0, 2, EntityType::Player)];
    let b = vec![span("d", 3, 5, EntityType::Player)];
    let r = cohen_kappa(&a, &b, [&d]).unwrap();
    assert_eq!(r.tokens, 4);
    // cc and dd agree on no entity, aa and bb disagree: po = 0.5, pe = 0.625.
    assert!((r.overall - (0.5 - 0.625) / (1.0 - 0.625)).abs() < 1e-12);
}

#[test]
fn exact_and_overlap_scoring() {
    let gold = vec![span("d", 0, 12, EntityType::Player), span("d", 23, 35, EntityType::Injury)];
    let pred = vec![span("d", 0, 6, EntityType::Player), span("d", 23, 35, EntityType::Injury), span("d", 40, 44, EntityType::Coach)];
    let exact = evaluate(&pred, &gold, MatchMode::Exact);
    assert_eq!(exact.overall.true_positives, 1);
    assert!((exact.overall.precision - 1.0 / 3.0).abs() < 1e-12);
    assert!((exact.overall.recall - 0.5).abs() < 1e-12);
    let overlap = evaluate(&pred, &gold, MatchMode::Overlap);
    assert_eq!(overlap.overall.true_positives, 2);
    assert!((overlap.overall.f1 - 0.8).abs() < 1e-12);
    assert_eq!(overlap.per_type[&EntityType::Coach].precision, 0.0);
}

fn arb_spans() -> impl Strategy<Value = Vec<EntitySpan>> {
    prop::collection::btree_set(0usize..40, 0..20).prop_flat_map(|starts| {
        let n = starts.len();
        (Just(starts), prop::collection::vec(0usize..EntityType::ALL.len(), n)).prop_map(|(starts, kinds)| {
            starts
                .into_iter()
                .zip(kinds)
                .map(|(s, k)| span("d", s * 3, s * 3 + 2, EntityType::ALL[k]))
                .collect()
        })
    })
}

proptest! {
    #[test]
    fn kappa_is_symmetric_and_bounded(a in arb_spans(), b in arb_spans()) {
        let body = (0..40).map(|_| "xx").collect::<Vec<_>>().join(" ");
        let d = doc("d", &body);
        if let (Ok(ab), Ok(ba)) = (cohen_kappa(&a, &b, [&d]), cohen_kappa(&b, &a, [&d])) {
            prop_assert!((ab.overall - ba.overall).abs() < 1e-12);
            prop_assert!(ab.overall <= 1.0 + 1e-12 && ab.overall >= -1.0 - 1e-12);
        }
        let same = cohen_kappa(&a, &a, [&d]).unwrap();
        prop_assert_eq!(same.overall, 1.0);
    }

    #[test]
    fn self_evaluation_is_perfect(a in arb_spans(), mode in prop_oneof![Just(MatchMode::Exact), Just(MatchMode::Overlap)]) {
        let e = evaluate(&a, &a, mode);
        prop_assert_eq!(e.overall.true_positives, a.len());
        if !a.is_empty() {
            prop_assert_eq!(e.overall.f1, 1.0);
        }
    }
}
