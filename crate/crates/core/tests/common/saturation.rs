//! The saturation properties, each run on one seeded random fact set.

use prepdiag_core::kb::KnowledgeBase;
use prepdiag_core::model::{embed, isomorphism, resaturate, saturate, Model, ModelError, SaturationOptions};
use prepdiag_core::term::{EntitySource, Literal};
use prepdiag_core::Language;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{random_facts, Naive, DEPTH_CAP};

pub const MAX_FACTS: usize = 12;

fn facts_of(m: &Model) -> Vec<Literal> {
    m.facts().cloned().collect()
}

pub fn fixpoint_matches_naive(kb: &KnowledgeBase, seed: u64, lang: Language) -> Result<(), String> {
    let facts = random_facts(&mut ChaCha8Rng::seed_from_u64(seed), kb, lang, MAX_FACTS);
    let mut naive = Naive::new(kb, lang, &facts, DEPTH_CAP);
    naive.saturate();
    match saturate(&facts, kb, lang) {
        Ok(m) if naive.inconsistent() => Err(format!("seed {seed}: naive is inconsistent, engine gave {} facts", m.len())),
        Ok(m) if m.len() != naive.facts.len() => Err(format!("seed {seed}: {} facts against naive {}", m.len(), naive.facts.len())),
        Ok(m) if isomorphism(&facts_of(&m), &naive.facts).is_none() => Err(format!("seed {seed}: models differ")),
        Ok(_) => Ok(()),
        Err(ModelError::Inconsistent { .. }) if naive.inconsistent() => Ok(()),
        Err(e) => Err(format!("seed {seed}: {e}")),
    }
}

pub fn resaturation_is_idempotent(kb: &KnowledgeBase, seed: u64, lang: Language) -> Result<(), String> {
    let facts = random_facts(&mut ChaCha8Rng::seed_from_u64(seed), kb, lang, MAX_FACTS);
    let Ok(m) = saturate(&facts, kb, lang) else { return Ok(()) };
    let source = EntitySource::starting_at(m.max_entity() + 1);
    let again = resaturate(m.clone(), kb, lang, &SaturationOptions::default(), &source).map_err(|e| format!("seed {seed}: {e}"))?;
    if again == m {
        Ok(())
    } else {
        Err(format!("seed {seed}: resaturation changed the model"))
    }
}

/// Conclusions about the entities of a fact set survive adding facts, and
/// the smaller model embeds into the larger one.
pub fn more_facts_never_lose_conclusions(kb: &KnowledgeBase, seed: u64, lang: Language) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let small = random_facts(&mut rng, kb, lang, MAX_FACTS / 2);
    let mut big = small.clone();
    big.extend(random_facts(&mut rng, kb, lang, MAX_FACTS / 2));
    let (Ok(a), Ok(b)) = (saturate(&small, kb, lang), saturate(&big, kb, lang)) else { return Ok(()) };
    let input: Vec<_> = small.iter().flat_map(|f| f.entities()).collect();
    if let Some(f) = a.facts().filter(|f| f.entities().iter().all(|e| input.contains(e))).find(|f| !b.contains(f)) {
        return Err(format!("seed {seed}: {f} lost"));
    }
    if embed(&facts_of(&a), &facts_of(&b)).is_none() {
        return Err(format!("seed {seed}: smaller model does not embed"));
    }
    Ok(())
}
