//! Mutation testing toolkit for conversational chatbot agents.

pub mod dialogflow;
pub mod diff;
pub mod engine;
pub mod model;
pub mod operators;
pub mod simulator;
