//! Embeds one target proposition at each memory load, then builds a yes and
//! a no distractor around it.
//!
//! ```bash
//! cargo run --example compose_memory_load
//! ```

use gelp::composer::{
    compose_high, compose_low, compose_medium, enumerate_templates, generate_distractor,
    generate_filler, Connective, MemoryLoad, Order,
};
use gelp::constructions::{
    make_hypotheses, Construction, HypothesisMode, Plausibility, PremiseFrame,
};
use gelp::labels::Answer;
use gelp::lexicon::{Lexicon, NounEntry};
use gelp::seeding::rng_for;

fn main() {
    let lex = Lexicon::bundled_sample();
    let frame = PremiseFrame {
        construction: Construction::Transitive,
        verb: lex
            .verbs_in(Construction::Transitive.verb_class())
            .find(|v| v.lemma == "kick")
            .unwrap()
            .clone(),
        animate_np: NounEntry::animate("boy"),
        inanimate_np: NounEntry::inanimate("ball"),
        extra_np: None,
        plausibility: Plausibility::Implausible,
    };
    let [target, _] = make_hypotheses(&frame, HypothesisMode::Logical, &lex).unwrap();

    for load in MemoryLoad::ALL {
        println!(
            "{:<6} {} templates",
            load.as_str(),
            enumerate_templates(load).len()
        );
    }

    let mut rng = rng_for(42, "example/compose");
    let f1 = generate_filler(&lex, &mut rng).unwrap();
    let f2 = generate_filler(&lex, &mut rng).unwrap();

    let low = compose_low(&target);
    let medium = compose_medium(&target, Connective::And, Order::FillerFirst, &f1);
    let high = compose_high(&target, Connective::After, Connective::But, &f1, &f2, 3).unwrap();
    for item in [&low, &medium, &high] {
        println!("{:<6} {}", item.load.as_str(), item.premise_text);
    }
    println!("question: {} ({})", target.question, target.correct_answer);

    if let Err(e) = compose_high(&target, Connective::When, Connective::When, &f1, &f2, 1) {
        println!("when/when: {e}");
    }

    for want in [Answer::Yes, Answer::No] {
        let d = generate_distractor(&lex, &mut rng, 3, want, &target).unwrap();
        println!("distractor [{}] {}", d.template, d.premise);
        println!(
            "  probe {}: {} ({})",
            d.probed_position, d.question, d.correct_answer
        );
    }
}
