//! Target enumeration: one descriptor per applicable element instance.
//!
//! Enumeration is deterministic (file order, then in-document order) and
//! driven by the source documents: an operator that replaces or removes a
//! property only applies where that property is actually present, so agents
//! missing a feature simply yield fewer mutants.

use super::rng::RandomPolicy;
use super::{MutationDescriptor, OperatorId};
use crate::model::{ChatbotModel, EntityKind, Intent, Locator};
use serde_json::Value;

/// Enumerates every applicable target of `op` over `model`, drawing
/// replacement values from subseeds derived from `campaign_seed`.
pub fn enumerate_targets(
    model: &ChatbotModel,
    op: OperatorId,
    campaign_seed: u64,
) -> Vec<MutationDescriptor> {
    let mut builder = Builder {
        model,
        op,
        campaign_seed,
        out: Vec::new(),
    };
    builder.run();
    builder.out
}

struct Builder<'a> {
    model: &'a ChatbotModel,
    op: OperatorId,
    campaign_seed: u64,
    out: Vec<MutationDescriptor>,
}

impl<'a> Builder<'a> {
    fn probe(&self, locator: &Locator) -> Option<&'a Value> {
        let doc = self.model.source_map.document(&locator.file)?;
        locator.path.resolve(doc)
    }

    /// Subseed for the descriptor about to be pushed.
    fn next_seed(&self) -> u64 {
        RandomPolicy::subseed(self.campaign_seed, self.op.as_str(), self.out.len() as u64)
    }

    fn push(&mut self, target: Locator, original: Value, mutated: Option<Value>, seed: u64) {
        let stem = file_stem(&target.file);
        let ordinal = self.out.len();
        self.out.push(MutationDescriptor {
            mutant_id: format!("{}__{}__{}", self.op.as_str(), stem, ordinal),
            operator: self.op,
            target,
            original_value: original,
            mutated_value: mutated,
            seed,
        });
    }

    /// Replacement drawn from a pool of existing sibling values; skipped when
    /// no distinct value exists.
    fn push_existing(&mut self, target: Locator, original: &str, pool: Vec<String>) {
        if pool.is_empty() {
            return;
        }
        let seed = self.next_seed();
        let mut rng = RandomPolicy::new(seed);
        let drawn = rng.pick(&pool).clone();
        self.push(
            target,
            Value::String(original.to_string()),
            Some(Value::String(drawn)),
            seed,
        );
    }

    fn push_random_int(&mut self, target: Locator, original: i64, lo: i64, hi: i64) {
        let seed = self.next_seed();
        let mut rng = RandomPolicy::new(seed);
        let drawn = rng.int_in_range_excluding(lo, hi, original);
        self.push(
            target,
            Value::Number(original.into()),
            Some(Value::Number(drawn.into())),
            seed,
        );
    }

    fn push_random_string(&mut self, target: Locator, original: &str) {
        let seed = self.next_seed();
        let mut rng = RandomPolicy::new(seed);
        let drawn = rng.string_excluding(original);
        self.push(
            target,
            Value::String(original.to_string()),
            Some(Value::String(drawn)),
            seed,
        );
    }

    fn push_remove(&mut self, target: Locator) {
        if let Some(original) = self.probe(&target).cloned() {
            self.push(target, original, None, 0);
        }
    }

    fn push_toggle(&mut self, target: Locator) {
        if let Some(Value::Bool(current)) = self.probe(&target) {
            let current = *current;
            self.push(target, Value::Bool(current), Some(Value::Bool(!current)), 0);
        }
    }

    /// Every distinct context name in the agent, sorted; comparisons are
    /// case-insensitive, first spelling wins.
    fn context_name_pool(&self) -> Vec<String> {
        let mut pool: Vec<String> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for intent in &self.model.intents {
            let names = intent
                .input_contexts
                .iter()
                .map(|c| c.name.as_str())
                .chain(intent.output_contexts.iter().map(|c| c.name.as_str()));
            for name in names.filter(|n| !n.is_empty()) {
                if seen.insert(name.to_ascii_lowercase()) {
                    pool.push(name.to_string());
                }
            }
        }
        pool.sort();
        pool
    }

    fn run(&mut self) {
        match self.op {
            OperatorId::ChangeChatbotLanguage => self.change_chatbot_language(),
            OperatorId::RemoveChatbotIntent => {
                for intent in &self.model.intents {
                    self.push_remove(intent.locator.clone());
                }
            }
            OperatorId::RemoveChatbotEntity => {
                for entity in &self.model.entities {
                    self.push_remove(entity.locator.clone());
                }
            }
            OperatorId::RemoveChatbotFlow => self.remove_chatbot_flow(),
            OperatorId::ChangeFlowInContextName => {
                let pool = self.context_name_pool();
                for intent in &self.model.intents {
                    for ctx in &intent.input_contexts {
                        let candidates = exclude_case_insensitive(&pool, &ctx.name);
                        self.push_existing(ctx.locator.clone(), &ctx.name, candidates);
                    }
                }
            }
            OperatorId::RemoveFlowInContextName => {
                for intent in &self.model.intents {
                    for ctx in &intent.input_contexts {
                        self.push_remove(ctx.locator.clone());
                    }
                }
            }
            OperatorId::ChangeFlowOutContextName => {
                let pool = self.context_name_pool();
                for intent in &self.model.intents {
                    for ctx in &intent.output_contexts {
                        let target = ctx.locator.child("name");
                        if let Some(Value::String(current)) = self.probe(&target) {
                            let current = current.clone();
                            let candidates = exclude_case_insensitive(&pool, &current);
                            self.push_existing(target, &current, candidates);
                        }
                    }
                }
            }
            OperatorId::RemoveFlowOutContextName => {
                for intent in &self.model.intents {
                    for ctx in &intent.output_contexts {
                        self.push_remove(ctx.locator.child("name"));
                    }
                }
            }
            OperatorId::ChangeFlowOutContextLifespan => {
                for intent in &self.model.intents {
                    for ctx in &intent.output_contexts {
                        let target = ctx.locator.child("lifespan");
                        if let Some(original) = self.probe(&target).and_then(Value::as_i64) {
                            self.push_random_int(target, original, 1, 3);
                        }
                    }
                }
            }
            OperatorId::RemoveFlowOutContextParameter => {
                for intent in &self.model.intents {
                    for ctx in &intent.output_contexts {
                        for (key, _) in &ctx.parameters {
                            self.push_remove(ctx.locator.child("parameters").child(key.clone()));
                        }
                    }
                }
            }
            OperatorId::ChangeIntentName => {
                let names: Vec<String> = self
                    .model
                    .intents
                    .iter()
                    .map(|i| i.name.clone())
                    .filter(|n| !n.is_empty())
                    .collect();
                for intent in &self.model.intents {
                    let target = intent.locator.child("name");
                    if self.probe(&target).is_none() {
                        continue;
                    }
                    let pool = exclude_exact(&names, &intent.name);
                    self.push_existing(target, &intent.name, pool);
                }
            }
            OperatorId::ToggleIntentFallback => {
                for intent in &self.model.intents {
                    self.push_toggle(intent.locator.child("fallbackIntent"));
                }
            }
            OperatorId::RemoveIntentFallback => {
                for intent in &self.model.intents {
                    self.push_remove(intent.locator.child("fallbackIntent"));
                }
            }
            OperatorId::ChangeIntentPriority => {
                for intent in &self.model.intents {
                    let target = intent.locator.child("priority");
                    if let Some(original) = self.probe(&target).and_then(Value::as_i64) {
                        self.push_random_int(target, original, 0, 1_000_000);
                    }
                }
            }
            OperatorId::RemoveIntentParameter => {
                for intent in &self.model.intents {
                    for param in &intent.parameters {
                        self.push_remove(param.locator.clone());
                    }
                }
            }
            OperatorId::ChangeParameterName => {
                for intent in &self.model.intents {
                    let names: Vec<String> = intent
                        .parameters
                        .iter()
                        .map(|p| p.name.clone())
                        .filter(|n| !n.is_empty())
                        .collect();
                    for param in &intent.parameters {
                        let target = param.locator.child("name");
                        if self.probe(&target).is_none() {
                            continue;
                        }
                        let pool = exclude_exact(&names, &param.name);
                        self.push_existing(target, &param.name, pool);
                    }
                }
            }
            OperatorId::RemoveParameterName => {
                for intent in &self.model.intents {
                    for param in &intent.parameters {
                        self.push_remove(param.locator.child("name"));
                    }
                }
            }
            OperatorId::ToggleParameterIsRequired => {
                for intent in &self.model.intents {
                    for param in &intent.parameters {
                        self.push_toggle(param.locator.child("required"));
                    }
                }
            }
            OperatorId::RemoveParameterPrompt => {
                for intent in &self.model.intents {
                    for param in &intent.parameters {
                        for j in 0..param.prompts.len() {
                            self.push_remove(param.locator.child("prompts").index(j));
                        }
                    }
                }
            }
            OperatorId::ChangeSEntityName => {
                let names: Vec<String> = self
                    .model
                    .entities
                    .iter()
                    .map(|e| e.name.clone())
                    .filter(|n| !n.is_empty())
                    .collect();
                for entity in &self.model.entities {
                    if entity.kind != EntityKind::Simple {
                        continue;
                    }
                    let target = entity.locator.child("name");
                    if self.probe(&target).is_none() {
                        continue;
                    }
                    let pool = exclude_exact(&names, &entity.name);
                    self.push_existing(target, &entity.name, pool);
                }
            }
            OperatorId::RemoveSEntityName => {
                for entity in &self.model.entities {
                    if entity.kind == EntityKind::Simple {
                        self.push_remove(entity.locator.child("name"));
                    }
                }
            }
            OperatorId::ChangeSInputValue => {
                for entity in &self.model.entities {
                    if entity.kind != EntityKind::Simple {
                        continue;
                    }
                    for entry in &entity.entries {
                        let target = entry.locator.child("value");
                        if let Some(Value::String(original)) = self.probe(&target) {
                            let original = original.clone();
                            self.push_random_string(target, &original);
                        }
                    }
                }
            }
            OperatorId::ChangeSInputSynonym => {
                for entity in &self.model.entities {
                    if entity.kind != EntityKind::Simple {
                        continue;
                    }
                    for entry in &entity.entries {
                        for (j, synonym) in entry.synonyms.iter().enumerate() {
                            let target = entry.locator.child("synonyms").index(j);
                            self.push_random_string(target, synonym);
                        }
                    }
                }
            }
            OperatorId::ChangeTActionValue => {
                for intent in &self.model.intents {
                    for action in &intent.responses {
                        for (j, locator) in action.variant_locators.iter().enumerate() {
                            self.push_random_string(locator.clone(), &action.text_variants[j]);
                        }
                    }
                }
            }
        }
    }

    fn change_chatbot_language(&mut self) {
        let default = &self.model.default_language;
        let pool: Vec<String> = self
            .model
            .supported_languages
            .iter()
            .filter(|l| !l.eq_ignore_ascii_case(default))
            .cloned()
            .collect();
        let target = Locator::new("agent.json", crate::model::DocumentPath::parse("/language"));
        if self.probe(&target).is_some() {
            self.push_existing(target, &default.clone(), pool);
        }
    }

    /// One descriptor per output context that at least one intent consumes:
    /// removing the context reference severs the flow edge.
    fn remove_chatbot_flow(&mut self) {
        let has_consumer = |name: &str, intents: &[Intent]| {
            intents.iter().any(|i| {
                i.input_contexts
                    .iter()
                    .any(|c| c.name.eq_ignore_ascii_case(name))
            })
        };
        for intent in &self.model.intents {
            for ctx in &intent.output_contexts {
                if !ctx.name.is_empty() && has_consumer(&ctx.name, &self.model.intents) {
                    self.push_remove(ctx.locator.clone());
                }
            }
        }
    }
}

fn exclude_exact(pool: &[String], original: &str) -> Vec<String> {
    let mut out: Vec<String> = pool
        .iter()
        .filter(|v| v.as_str() != original)
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    out
}

fn exclude_case_insensitive(pool: &[String], original: &str) -> Vec<String> {
    pool.iter()
        .filter(|v| !v.eq_ignore_ascii_case(original))
        .cloned()
        .collect()
}

fn file_stem(path: &str) -> String {
    let name = path.rsplit('/').next().unwrap_or(path);
    let stem = name.strip_suffix(".json").unwrap_or(name);
    stem.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '-'
            }
        })
        .collect()
}
