//! Phrases from the contract-language survey, each with its expected
//! sort or rejection diagnostic.

use cte_core::dsl::parse;

struct Entry {
    section: String,
    phrase: String,
    expected: String,
}

fn corpus() -> Vec<Entry> {
    include_str!("corpus/phrases.tsv")
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            assert_eq!(cols.len(), 3, "bad corpus line {l:?}");
            Entry {
                section: cols[0].into(),
                phrase: cols[1].into(),
                expected: cols[2].into(),
            }
        })
        .collect()
}

fn outcome(phrase: &str) -> String {
    match parse(phrase) {
        Ok(n) => format!("ok:{}", format!("{:?}", n.sort()).to_lowercase()),
        Err(e) => format!("reject:{}", e.kind),
    }
}

#[test]
fn every_entry_has_its_expected_outcome() {
    let bad: Vec<String> = corpus()
        .iter()
        .filter_map(|e| {
            let got = outcome(&e.phrase);
            (got != e.expected).then(|| format!("[{}] {:?}: expected {}, got {got}", e.section, e.phrase, e.expected))
        })
        .collect();
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}

#[test]
fn coverage() {
    let c = corpus();
    assert!(c.iter().filter(|e| e.expected.starts_with("ok:")).count() >= 25);
    for kind in ["nested_alternative", "human_input_required"] {
        assert!(c.iter().any(|e| e.expected == format!("reject:{kind}")), "{kind}");
    }
    for section in ["continuous", "discrete", "events", "obligations"] {
        assert!(c.iter().any(|e| e.section == section), "{section}");
    }
}

#[test]
fn accepted_phrases_reparse_from_their_normal_form() {
    for e in corpus().iter().filter(|e| e.expected.starts_with("ok:")) {
        let n = parse(&e.phrase).unwrap();
        assert_eq!(parse(&n.print()).as_ref(), Ok(&n), "{}", e.phrase);
    }
}

#[test]
fn rejections_point_into_the_phrase() {
    for e in corpus().iter().filter(|e| e.expected.starts_with("reject:")) {
        let err = parse(&e.phrase).unwrap_err();
        assert!(err.offset <= e.phrase.len(), "{}", e.phrase);
        assert!(!err.message.is_empty());
    }
}
