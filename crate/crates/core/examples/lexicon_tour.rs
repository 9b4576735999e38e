//! Loads the bundled lexicon, prints the size of each verb class, and maps a
//! few past-tense forms back to their lemmas.
//!
//! ```bash
//! cargo run --example lexicon_tour
//! ```

use gelp::lexicon::{validate_lexicon, Animacy, Lexicon, LoadMode, VerbClass};

fn main() {
    let lex = Lexicon::bundled_sample();

    for class in VerbClass::TARGETS {
        let sample: Vec<&str> = lex
            .verbs_in(class)
            .take(4)
            .map(|v| v.lemma.as_str())
            .collect();
        println!(
            "{:<20} {:>3}  {}, ...",
            class.as_str(),
            lex.class_len(class),
            sample.join(", ")
        );
    }
    println!("{:<20} {:>3}", "filler verbs", lex.filler_verbs().count());

    let animate = lex
        .nouns()
        .iter()
        .filter(|n| n.animacy == Animacy::Animate)
        .count();
    println!(
        "target nouns: {animate} animate, {} inanimate; filler nouns: {}",
        lex.nouns().len() - animate,
        lex.filler_nouns().len()
    );

    for past in ["gave", "taught", "frightened", "bit"] {
        match lex.base_form(past) {
            Ok(lemma) => println!("{past} -> {lemma}"),
            Err(e) => println!("{past}: {e}"),
        }
    }

    let report = validate_lexicon(&lex, LoadMode::Sample);
    println!(
        "sample-mode validation: {} violation(s)",
        report.violations.len()
    );
}
