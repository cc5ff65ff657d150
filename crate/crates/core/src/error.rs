use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

use crate::model::{EventId, MatchId, PlayerId};
use crate::roles::Role;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("position ({x}, {y}) out of range")]
    PositionOutOfRange { x: f64, y: f64 },
    #[error("event {event_id} in match {match_id}: {reason}")]
    InvalidEvent {
        match_id: MatchId,
        event_id: EventId,
        reason: String,
    },
    #[error("player {player_id}: {reason}")]
    InvalidPlayer { player_id: PlayerId, reason: String },
    #[error("match {match_id}: {reason}")]
    InvalidMatch { match_id: MatchId, reason: String },
    #[error("duplicate player id {0}")]
    DuplicatePlayer(PlayerId),
    #[error("duplicate match id {0}")]
    DuplicateMatch(MatchId),
    #[error("duplicate event id {event_id} in match {match_id}")]
    DuplicateEvent { match_id: MatchId, event_id: EventId },
    #[error("event {event_id} in match {match_id} references unknown player {player_id}")]
    UnknownPlayer {
        match_id: MatchId,
        event_id: EventId,
        player_id: PlayerId,
    },
    #[error("event {event_id} references unknown match {match_id}")]
    UnknownMatch { event_id: EventId, match_id: MatchId },
    #[error("reference date {reference_date} precedes latest match on {latest_match}")]
    ReferenceDateTooEarly {
        reference_date: NaiveDate,
        latest_match: NaiveDate,
    },
    #[error("dataset contains no matches")]
    NoMatches,
    #[error("player {0} not found")]
    PlayerNotFound(PlayerId),
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no events were accepted")]
    EmptyDataset,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("player {player_id} has no events in match {match_id}")]
    NotFound { player_id: PlayerId, match_id: MatchId },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoleError {
    #[error("player {player_id} has no events in match {match_id}")]
    NoEvents { player_id: PlayerId, match_id: MatchId },
    #[error("player {0} not found")]
    PlayerNotFound(PlayerId),
    #[error("invalid zone map: {0}")]
    InvalidZoneMap(String),
    #[error("unknown role '{0}'")]
    UnknownRole(String),
}

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("feature vector has {actual} values but the catalogue has {expected}")]
    Misaligned { expected: usize, actual: usize },
    #[error("unknown feature '{0}'")]
    UnknownFeature(String),
    #[error("weight for '{feature}' is not finite")]
    NonFiniteWeight { feature: String },
    #[error("profile name must not be empty")]
    EmptyName,
    #[error("a profile named '{0}' already exists")]
    DuplicateName(String),
    #[error("profile '{0}' not found")]
    ProfileNotFound(String),
    #[error("no performance records for {0}")]
    NoRecords(String),
    #[error("no performance records for role {0}")]
    EmptyRole(Role),
    #[error("profile store {path}: {message}")]
    Store { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("trend undefined: {0}")]
    UndefinedTrend(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("player {0} not found")]
    PlayerNotFound(PlayerId),
    #[error("player {0} has no events")]
    NoEvents(PlayerId),
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Roles(#[from] RoleError),
    #[error(transparent)]
    Profiles(#[from] ScoringError),
}
