use serde::{Deserialize, Serialize};

use crate::constructions::Construction;
use crate::lexicon::Lexicon;

use super::SeederError;

/// The three slots of the generation prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub construction_name: String,
    /// Where the inanimate and the animate entity go, in that order.
    pub positions: [String; 2],
    pub verbs: Vec<String>,
}

impl PromptSpec {
    /// Spec for `construction` using its full verb class from `lex`.
    pub fn for_construction(construction: Construction, lex: &Lexicon) -> PromptSpec {
        let (inanimate, animate) = positions(construction);
        PromptSpec {
            construction_name: construction_name(construction).to_owned(),
            positions: [inanimate.to_owned(), animate.to_owned()],
            verbs: lex
                .verbs_in(construction.verb_class())
                .map(|v| v.lemma.clone())
                .collect(),
        }
    }
}

pub fn construction_name(c: Construction) -> &'static str {
    match c {
        Construction::Transitive => "transitive constructions",
        Construction::Passive => "passive constructions",
        Construction::Doc => "double object constructions",
        Construction::Dative => "dative constructions",
        Construction::BenefactiveDoc => "benefactive double object constructions",
        Construction::BenefactiveFor => "benefactive for constructions",
        Construction::ExperiencerSubject => "experiencer subject constructions",
        Construction::ExperiencerObject => "experiencer object constructions",
    }
}

/// Positions of the inanimate and animate entities in a plausible premise.
pub fn positions(c: Construction) -> (&'static str, &'static str) {
    match c {
        Construction::Transitive | Construction::ExperiencerSubject => {
            ("the object", "the subject")
        }
        Construction::Passive => ("the subject", "the by-phrase"),
        Construction::Doc | Construction::BenefactiveDoc => {
            ("the direct object", "the indirect object")
        }
        Construction::Dative => ("the direct object", "the to-phrase"),
        Construction::BenefactiveFor => ("the direct object", "the for-phrase"),
        Construction::ExperiencerObject => ("the subject", "the object"),
    }
}

pub fn build_prompt(spec: &PromptSpec) -> Result<String, SeederError> {
    if spec.verbs.is_empty() {
        return Err(SeederError::EmptyVerbList);
    }
    Ok(format!(
        "Can you make {} with the following verbs?\n\
         \n\
         Please...\n\
         1. Use an inanimate entity in {}.\n\
         2. Use an animate entity in {}.\n\
         3. Use past tense for the verb.\n\
         4. Use no pronouns.\n\
         5. Use no adjectives.\n\
         \n\
         {}\n",
        spec.construction_name,
        spec.positions[0],
        spec.positions[1],
        spec.verbs.join(", ")
    ))
}
