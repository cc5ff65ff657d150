//! Soccer event analytics: ingestion, feature extraction, role assignment,
//! weighted performance scoring, trends, similarity and the scouting query
//! engine.

pub mod analytics;
pub mod engine;
pub mod error;
pub mod features;
pub mod ingest;
pub mod model;
pub mod roles;
pub mod scoring;

pub use engine::Engine;
pub use error::{
    AnalyticsError, FeatureError, IngestError, LoadError, ModelError, RoleError, ScoringError,
};
