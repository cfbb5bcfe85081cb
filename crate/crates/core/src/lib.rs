//! Encode investigator red flags as quantified features for a risk model.
//!
//! The crate follows one pipeline: transactions are sliced into per-account
//! windows ([`txmodel`]), optionally synthesized with planted fan-out bursts
//! ([`synthgen`]), described to an extractor through a versioned prompt
//! ([`promptkit`]), turned into a six-field [`extract::FeatureVector`] by a
//! rules oracle or an LLM backend ([`extract`]), scaled into `[0, 1]`
//! ([`quantify`]) and finally scored by a logistic-regression baseline whose
//! lift is measured against a legacy feature subset ([`model`]).
//! [`pipeline`] wires the stages together behind the `redflag` binary.

pub mod digest;
pub mod extract;
pub mod model;
pub mod pipeline;
pub mod promptkit;
pub mod quantify;
pub mod synthgen;
pub mod txmodel;
