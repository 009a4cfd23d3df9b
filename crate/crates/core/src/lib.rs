pub mod corpus;
pub mod evaluator;
pub mod explainer;
pub mod html;
pub mod jsonl;
pub mod label;
pub mod metrics;
pub mod model;
pub mod olbi;
pub mod registry;
pub mod seed;
pub mod survey;
pub mod text;
pub mod trainer;

pub use label::Label;
