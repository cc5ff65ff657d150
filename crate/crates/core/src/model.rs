//! Domain types shared by every stage of the pipeline.
//!
//! A [`Dataset`] is built once, validated as a whole, and never mutated
//! afterwards. Every other module borrows it.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Upper bound for `clock_s` within a single period.
pub const MAX_PERIOD_CLOCK_S: f64 = 3600.0;

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident, $inner:ty) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub $inner);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }
    };
}

id_newtype!(PlayerId, u32);
id_newtype!(MatchId, u32);
id_newtype!(TeamId, u32);
id_newtype!(
    /// Unique within a match, not across the dataset.
    EventId,
    u64
);

/// Location on a normalized pitch. `x` runs toward the opponent goal, `y = 0`
/// is the left touchline seen from the attacking side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchPosition {
    pub x: f64,
    pub y: f64,
}

impl PitchPosition {
    pub fn new(x: f64, y: f64) -> Result<Self, ModelError> {
        let pos = Self { x, y };
        pos.validate()?;
        Ok(pos)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let in_range = |v: f64| (0.0..=100.0).contains(&v);
        if in_range(self.x) && in_range(self.y) {
            Ok(())
        } else {
            Err(ModelError::PositionOutOfRange {
                x: self.x,
                y: self.y,
            })
        }
    }

    /// Mirror through the pitch centre; used when a source records absolute
    /// pitch sides and the team switches ends.
    pub fn flipped(self) -> Self {
        Self {
            x: 100.0 - self.x,
            y: 100.0 - self.y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventType {
    Pass,
    Shot,
    Goal,
    Duel,
    Foul,
    Card,
    Interception,
    Clearance,
    Cross,
    Dribble,
    Save,
    Other,
}

impl EventType {
    pub const ALL: [EventType; 12] = [
        EventType::Pass,
        EventType::Shot,
        EventType::Goal,
        EventType::Duel,
        EventType::Foul,
        EventType::Card,
        EventType::Interception,
        EventType::Clearance,
        EventType::Cross,
        EventType::Dribble,
        EventType::Save,
        EventType::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventType::Pass => "pass",
            EventType::Shot => "shot",
            EventType::Goal => "goal",
            EventType::Duel => "duel",
            EventType::Foul => "foul",
            EventType::Card => "card",
            EventType::Interception => "interception",
            EventType::Clearance => "clearance",
            EventType::Cross => "cross",
            EventType::Dribble => "dribble",
            EventType::Save => "save",
            EventType::Other => "other",
        }
    }
}

impl fmt::Display for EventType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Accurate,
    Inaccurate,
    Neutral,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::Accurate, Outcome::Inaccurate, Outcome::Neutral];

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Accurate => "accurate",
            Outcome::Inaccurate => "inaccurate",
            Outcome::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Period {
    H1,
    H2,
    E1,
    E2,
    P,
}

impl Period {
    /// Periods in which teams play toward the opposite end from kick-off.
    pub fn is_switched_end(self) -> bool {
        matches!(self, Period::H2 | Period::E2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchEvent {
    pub event_id: EventId,
    pub match_id: MatchId,
    pub player_id: PlayerId,
    pub team_id: TeamId,
    pub event_type: EventType,
    pub outcome: Outcome,
    #[serde(default)]
    pub tags: BTreeSet<String>,
    pub period: Period,
    pub clock_s: f64,
    pub position: PitchPosition,
    /// Expected-goals value, only when the source provides one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xg: Option<f64>,
}

impl MatchEvent {
    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.contains(tag)
    }

    /// Checks the invariants that can be decided from the record alone.
    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |reason: String| ModelError::InvalidEvent {
            match_id: self.match_id,
            event_id: self.event_id,
            reason,
        };
        self.position.validate().map_err(|e| fail(e.to_string()))?;
        if self.event_type == EventType::Goal && self.outcome != Outcome::Accurate {
            return Err(fail("goal event must have outcome accurate".into()));
        }
        if !(0.0..=MAX_PERIOD_CLOCK_S).contains(&self.clock_s) {
            return Err(fail(format!("clock_s {} outside [0, 3600]", self.clock_s)));
        }
        if let Some(xg) = self.xg {
            if !xg.is_finite() || xg < 0.0 {
                return Err(fail(format!("xg {xg} must be finite and non-negative")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Foot {
    Left,
    Right,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Player {
    pub player_id: PlayerId,
    pub name: String,
    pub birth_date: NaiveDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preferred_foot: Option<Foot>,
}

impl Player {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.name.trim().is_empty() {
            return Err(ModelError::InvalidPlayer {
                player_id: self.player_id,
                reason: "name must not be empty".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Match {
    pub match_id: MatchId,
    pub date: NaiveDate,
    pub home_team: TeamId,
    pub away_team: TeamId,
    pub competition: String,
    pub season: String,
}

impl Match {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.home_team == self.away_team {
            return Err(ModelError::InvalidMatch {
                match_id: self.match_id,
                reason: format!("home_team and away_team are both {}", self.home_team),
            });
        }
        Ok(())
    }

    /// Total order over matches: date, then id.
    pub fn order_key(&self) -> (NaiveDate, MatchId) {
        (self.date, self.match_id)
    }
}

/// Completed years between `birth_date` and `reference_date`.
pub fn age_of(player: &Player, reference_date: NaiveDate) -> Result<u32, ModelError> {
    if player.birth_date >= reference_date {
        return Err(ModelError::InvalidPlayer {
            player_id: player.player_id,
            reason: format!(
                "birth_date {} is not before reference date {}",
                player.birth_date, reference_date
            ),
        });
    }
    let birth = player.birth_date;
    let mut years = reference_date.year() - birth.year();
    if (reference_date.month(), reference_date.day()) < (birth.month(), birth.day()) {
        years -= 1;
    }
    Ok(years as u32)
}

/// Validated, immutable collection of players, matches and events.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    players: BTreeMap<PlayerId, Player>,
    matches: BTreeMap<MatchId, Match>,
    events: Vec<MatchEvent>,
    reference_date: NaiveDate,
    /// Event indices per (player, match), in input order.
    appearances: BTreeMap<(PlayerId, MatchId), Vec<usize>>,
}

impl Dataset {
    /// Validates everything and fails on the first offending record.
    ///
    /// `reference_date` defaults to the latest match date.
    pub fn new(
        players: Vec<Player>,
        matches: Vec<Match>,
        events: Vec<MatchEvent>,
        reference_date: Option<NaiveDate>,
    ) -> Result<Self, ModelError> {
        let mut player_map = BTreeMap::new();
        for player in players {
            player.validate()?;
            let id = player.player_id;
            if player_map.insert(id, player).is_some() {
                return Err(ModelError::DuplicatePlayer(id));
            }
        }
        let mut match_map = BTreeMap::new();
        for m in matches {
            m.validate()?;
            let id = m.match_id;
            if match_map.insert(id, m).is_some() {
                return Err(ModelError::DuplicateMatch(id));
            }
        }

        let mut seen = HashSet::with_capacity(events.len());
        let mut appearances: BTreeMap<(PlayerId, MatchId), Vec<usize>> = BTreeMap::new();
        for (idx, event) in events.iter().enumerate() {
            event.validate()?;
            if !seen.insert((event.match_id, event.event_id)) {
                return Err(ModelError::DuplicateEvent {
                    match_id: event.match_id,
                    event_id: event.event_id,
                });
            }
            let player = player_map
                .get(&event.player_id)
                .ok_or(ModelError::UnknownPlayer {
                    match_id: event.match_id,
                    event_id: event.event_id,
                    player_id: event.player_id,
                })?;
            let m = match_map
                .get(&event.match_id)
                .ok_or(ModelError::UnknownMatch {
                    event_id: event.event_id,
                    match_id: event.match_id,
                })?;
            if player.birth_date >= m.date {
                return Err(ModelError::InvalidPlayer {
                    player_id: player.player_id,
                    reason: format!(
                        "birth_date {} is not before match {} on {}",
                        player.birth_date, m.match_id, m.date
                    ),
                });
            }
            appearances
                .entry((event.player_id, event.match_id))
                .or_default()
                .push(idx);
        }

        let latest = match_map.values().map(|m| m.date).max();
        let reference_date = match (reference_date, latest) {
            (Some(r), Some(latest)) if r < latest => {
                return Err(ModelError::ReferenceDateTooEarly {
                    reference_date: r,
                    latest_match: latest,
                })
            }
            (Some(r), _) => r,
            (None, Some(latest)) => latest,
            (None, None) => return Err(ModelError::NoMatches),
        };

        Ok(Self {
            players: player_map,
            matches: match_map,
            events,
            reference_date,
            appearances,
        })
    }

    pub fn players(&self) -> impl Iterator<Item = &Player> {
        self.players.values()
    }

    pub fn matches(&self) -> impl Iterator<Item = &Match> {
        self.matches.values()
    }

    pub fn events(&self) -> &[MatchEvent] {
        &self.events
    }

    pub fn reference_date(&self) -> NaiveDate {
        self.reference_date
    }

    pub fn player(&self, id: PlayerId) -> Option<&Player> {
        self.players.get(&id)
    }

    pub fn match_by_id(&self, id: MatchId) -> Option<&Match> {
        self.matches.get(&id)
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn match_count(&self) -> usize {
        self.matches.len()
    }

    pub fn age(&self, id: PlayerId) -> Result<u32, ModelError> {
        let player = self.player(id).ok_or(ModelError::PlayerNotFound(id))?;
        age_of(player, self.reference_date)
    }

    /// Events of one player in one match. Empty when the pair never occurred.
    pub fn events_of(&self, player: PlayerId, m: MatchId) -> impl Iterator<Item = &MatchEvent> {
        self.appearances
            .get(&(player, m))
            .into_iter()
            .flatten()
            .map(|&i| &self.events[i])
    }

    /// All events of a player across every match.
    pub fn player_events(&self, player: PlayerId) -> impl Iterator<Item = &MatchEvent> {
        self.appearances
            .range((player, MatchId(u32::MIN))..=(player, MatchId(u32::MAX)))
            .flat_map(|(_, idx)| idx.iter().map(|&i| &self.events[i]))
    }

    /// Every (player, match) pair with at least one event, sorted by player
    /// id then match id.
    pub fn appearances(&self) -> impl Iterator<Item = (PlayerId, MatchId)> + '_ {
        self.appearances.keys().copied()
    }

    pub fn has_appearance(&self, player: PlayerId, m: MatchId) -> bool {
        self.appearances.contains_key(&(player, m))
    }

    /// Matches a player appeared in, chronologically.
    pub fn matches_of(&self, player: PlayerId) -> Vec<&Match> {
        let mut out: Vec<&Match> = self
            .appearances
            .range((player, MatchId(u32::MIN))..=(player, MatchId(u32::MAX)))
            .map(|((_, m), _)| &self.matches[m])
            .collect();
        out.sort_by_key(|m| m.order_key());
        out
    }
}
