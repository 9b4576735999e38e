//! Prints the generation prompt for a construction and validates a pasted
//! model reply offline. With GELP_API_KEY and GELP_ENDPOINT set, it sends
//! the prompt instead.
//!
//! ```bash
//! cargo run --example seed_prompts -- dative
//! GELP_API_KEY=... GELP_ENDPOINT=https://api.example.com/v1/chat/completions \
//!     cargo run --example seed_prompts -- transitive
//! ```

use gelp::constructions::Construction;
use gelp::lexicon::Lexicon;
use gelp::seeder::{
    build_prompt, fetch_candidates, parse_candidates, validate_premise, EndpointConfig, PromptSpec,
};

const CANNED_REPLY: &str = "\
Here are some sentences:
1. The boy gave the apple to the girl.
2. The teacher handed the book to him.
3. The girl sent the red letter to the boy.
4. The apple gave the girl to the boy.
5. The woman passed the salt to the man.";

fn main() -> anyhow::Result<()> {
    env_logger::init();
    let construction: Construction = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "dative".into())
        .parse()
        .map_err(anyhow::Error::msg)?;
    let lex = Lexicon::bundled_sample();
    let prompt = build_prompt(&PromptSpec::for_construction(construction, &lex))?;
    println!("{prompt}");

    let reply = match std::env::var("GELP_ENDPOINT") {
        Ok(url) => {
            let cfg = EndpointConfig {
                endpoint_url: url,
                ..EndpointConfig::default()
            }
            .with_env_key();
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(fetch_candidates(&cfg, &prompt))?.text
        }
        Err(_) => CANNED_REPLY.to_owned(),
    };

    for line in parse_candidates(&reply)? {
        let c = validate_premise(&line, construction, &lex);
        println!(
            "{:<14} {:<42} {}",
            c.review_status.as_str(),
            c.text,
            c.reasons.join("; ")
        );
    }
    Ok(())
}
