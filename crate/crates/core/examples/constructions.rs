//! Realizes one plausible frame per construction, swaps its arguments, and
//! prints the labelled hypothesis pairs and polar questions.
//!
//! ```bash
//! cargo run --example constructions
//! cargo run --example constructions -- table_faithful
//! ```

use gelp::constructions::{
    make_hypotheses, realize_premise, swap_arguments, Construction, HypothesisMode, Plausibility,
    PremiseFrame,
};
use gelp::lexicon::{Lexicon, NounEntry};

fn frame(lex: &Lexicon, c: Construction) -> PremiseFrame {
    let (verb, animate, inanimate, extra) = match c {
        Construction::Transitive | Construction::Passive => ("kick", "boy", "ball", None),
        Construction::Doc | Construction::Dative => ("give", "girl", "apple", Some("boy")),
        Construction::BenefactiveDoc | Construction::BenefactiveFor => {
            ("make", "man", "bread", Some("cook"))
        }
        Construction::ExperiencerSubject => ("like", "girl", "book", None),
        Construction::ExperiencerObject => ("please", "girl", "book", None),
    };
    PremiseFrame {
        construction: c,
        verb: lex
            .verbs_in(c.verb_class())
            .find(|v| v.lemma == verb)
            .expect("verb in bundled lexicon")
            .clone(),
        animate_np: NounEntry::animate(animate),
        inanimate_np: NounEntry::inanimate(inanimate),
        extra_np: extra.map(NounEntry::animate),
        plausibility: Plausibility::Plausible,
    }
}

fn main() {
    let mode: HypothesisMode = std::env::args()
        .nth(1)
        .map(|m| m.parse().expect("logical or table_faithful"))
        .unwrap_or_default();
    let lex = Lexicon::bundled_sample();

    for c in Construction::ALL {
        let plausible = frame(&lex, c);
        let implausible = swap_arguments(&plausible);
        println!("== {c}");
        println!("   plausible:   {}", realize_premise(&plausible).unwrap());
        for pair in make_hypotheses(&implausible, mode, &lex).unwrap() {
            println!(
                "   {:<5} {:<45} {:<15} {}",
                pair.kind.as_str(),
                pair.hypothesis,
                pair.label,
                pair.question
            );
        }
    }
}
