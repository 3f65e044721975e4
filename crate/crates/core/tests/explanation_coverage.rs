mod common;

use cadenza_core::corpus::CorpusDb;
use cadenza_core::explainer::facts::check_facts;
use cadenza_core::explainer::{explain, Glossary, Level, Scope};

#[test]
fn fifty_pieces_explain_everywhere_without_contradiction() {
    let db = CorpusDb::builtin();
    let glossary = Glossary::builtin();
    let mut docs = 0;
    for seed in 0..50u64 {
        let p = common::generated(seed + 5000, 1 + (seed % 3) as usize, seed % 2 == 1, &db);
        let mut scopes: Vec<Scope> = (0..p.measure_count()).map(Scope::Measure).collect();
        scopes.extend((0..p.phrases().len()).map(Scope::Phrase));
        scopes.push(Scope::Piece);
        for scope in scopes {
            for level in Level::ALL {
                let doc = explain(&p, &db, scope, level).unwrap();
                assert_eq!(doc.sections.len(), 3);
                assert!(doc.sections.iter().all(|s| !s.text.trim().is_empty()));
                assert!(doc.terms.iter().all(|t| glossary.get(t).is_some()));
                let bad = check_facts(&doc, &p, &db);
                assert!(bad.is_empty(), "seed {seed} {scope} {level}: {bad:?}\n{}", doc.plain_text(glossary));
                docs += 1;
            }
        }
    }
    assert!(docs > 50 * 3 * 4);
}
