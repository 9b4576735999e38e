pub mod bundled;
pub mod cli;
pub mod composer;
pub mod constructions;
pub mod expserver;
pub mod labels;
pub mod lexicon;
pub mod listing;
pub mod scoring;
pub mod seeder;
pub mod seeding;
