//! Pitch roles and the rectangular zone map that assigns them.
//!
//! A role is decided per (player, match) from the player's mean event
//! position, so one player can hold different roles in different matches.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::RoleError;
use crate::model::{Dataset, MatchId, PitchPosition, PlayerId};

const AREA_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "GK")]
    Gk,
    #[serde(rename = "left_CB")]
    LeftCb,
    #[serde(rename = "central_CB")]
    CentralCb,
    #[serde(rename = "right_CB")]
    RightCb,
    #[serde(rename = "left_MF")]
    LeftMf,
    #[serde(rename = "central_MF")]
    CentralMf,
    #[serde(rename = "right_MF")]
    RightMf,
    #[serde(rename = "left_FW")]
    LeftFw,
    #[serde(rename = "central_FW")]
    CentralFw,
    #[serde(rename = "right_FW")]
    RightFw,
}

impl Role {
    pub const ALL: [Role; 10] = [
        Role::Gk,
        Role::LeftCb,
        Role::CentralCb,
        Role::RightCb,
        Role::LeftMf,
        Role::CentralMf,
        Role::RightMf,
        Role::LeftFw,
        Role::CentralFw,
        Role::RightFw,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Role::Gk => "GK",
            Role::LeftCb => "left_CB",
            Role::CentralCb => "central_CB",
            Role::RightCb => "right_CB",
            Role::LeftMf => "left_MF",
            Role::CentralMf => "central_MF",
            Role::RightMf => "right_MF",
            Role::LeftFw => "left_FW",
            Role::CentralFw => "central_FW",
            Role::RightFw => "right_FW",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Role::Gk => "GK",
            Role::LeftCb => "left CB",
            Role::CentralCb => "central CB",
            Role::RightCb => "right CB",
            Role::LeftMf => "left MF",
            Role::CentralMf => "central MF",
            Role::RightMf => "right MF",
            Role::LeftFw => "left FW",
            Role::CentralFw => "central FW",
            Role::RightFw => "right FW",
        }
    }

    /// Resolves free search text: role ids, display names, and spelled-out
    /// aliases such as "central forward" or "left centre back".
    pub fn from_alias(text: &str) -> Option<Role> {
        let norm: String = text
            .trim()
            .to_ascii_lowercase()
            .chars()
            .map(|c| if c == '_' || c == '-' { ' ' } else { c })
            .collect();
        let norm = norm.split_whitespace().collect::<Vec<_>>().join(" ");
        if matches!(norm.as_str(), "gk" | "goalkeeper" | "keeper" | "goalie") {
            return Some(Role::Gk);
        }
        let (side, rest) = norm.split_once(' ')?;
        let band = match rest {
            "cb" | "central back" | "centre back" | "center back" | "back" | "defender"
            | "df" => 0,
            "mf" | "midfielder" | "midfield" | "cm" => 1,
            "fw" | "forward" | "striker" | "st" => 2,
            _ => return None,
        };
        let side = match side {
            "left" | "l" => 0,
            "central" | "centre" | "center" | "c" => 1,
            "right" | "r" => 2,
            _ => return None,
        };
        Some(Role::ALL[1 + band * 3 + side])
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Role {
    type Err = RoleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.id() == s)
            .or_else(|| Role::from_alias(s))
            .ok_or_else(|| RoleError::UnknownRole(s.to_string()))
    }
}

/// Half-open rectangle `[x_lo, x_hi) × [y_lo, y_hi)`; an upper edge at 100
/// is closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub role: Role,
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Zone {
    pub fn contains(&self, pos: PitchPosition) -> bool {
        let within = |v: f64, lo: f64, hi: f64| v >= lo && (v < hi || (hi == 100.0 && v == 100.0));
        within(pos.x, self.x_lo, self.x_hi) && within(pos.y, self.y_lo, self.y_hi)
    }

    fn area(&self) -> f64 {
        (self.x_hi - self.x_lo) * (self.y_hi - self.y_lo)
    }

    fn overlaps(&self, other: &Zone) -> bool {
        self.x_lo < other.x_hi
            && other.x_lo < self.x_hi
            && self.y_lo < other.y_hi
            && other.y_lo < self.y_hi
    }
}

/// A set of zones partitioning the pitch `[0,100]²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ZoneMap {
    zones: Vec<Zone>,
}

impl ZoneMap {
    pub fn new(zones: Vec<Zone>) -> Result<Self, RoleError> {
        let bad = |msg: String| Err(RoleError::InvalidZoneMap(msg));
        if zones.is_empty() {
            return bad("no zones".into());
        }
        for z in &zones {
            let coords = [z.x_lo, z.x_hi, z.y_lo, z.y_hi];
            if coords.iter().any(|c| !c.is_finite() || !(0.0..=100.0).contains(c)) {
                return bad(format!("zone for {} leaves the pitch", z.role));
            }
            if z.x_lo >= z.x_hi || z.y_lo >= z.y_hi {
                return bad(format!("zone for {} is empty", z.role));
            }
        }
        for (i, a) in zones.iter().enumerate() {
            for b in &zones[i + 1..] {
                if a.overlaps(b) {
                    return bad(format!("zones for {} and {} overlap", a.role, b.role));
                }
            }
        }
        let area: f64 = zones.iter().map(Zone::area).sum();
        if (area - 10_000.0).abs() > AREA_TOLERANCE {
            return bad(format!("zones cover area {area}, expected 10000 (gap)"));
        }
        Ok(Self { zones })
    }

    /// GK `x < 16`; defenders `16 ≤ x < 40`; midfielders `40 ≤ x < 70`;
    /// forwards `x ≥ 70`. Outfield bands split at `y = 33` and `y = 67`.
    pub fn default_map() -> Self {
        let bands = [(16.0, 40.0), (40.0, 70.0), (70.0, 100.0)];
        let lanes = [(0.0, 33.0), (33.0, 67.0), (67.0, 100.0)];
        let mut zones = vec![Zone {
            role: Role::Gk,
            x_lo: 0.0,
            x_hi: 16.0,
            y_lo: 0.0,
            y_hi: 100.0,
        }];
        for (b, &(x_lo, x_hi)) in bands.iter().enumerate() {
            for (l, &(y_lo, y_hi)) in lanes.iter().enumerate() {
                zones.push(Zone {
                    role: Role::ALL[1 + b * 3 + l],
                    x_lo,
                    x_hi,
                    y_lo,
                    y_hi,
                });
            }
        }
        Self::new(zones).expect("default zone map is a partition")
    }

    /// Loads a `zones.json` override: a list of `{role, x_lo, x_hi, y_lo, y_hi}`.
    pub fn from_json(text: &str) -> Result<Self, RoleError> {
        let zones: Vec<Zone> = serde_json::from_str(text)
            .map_err(|e| RoleError::InvalidZoneMap(format!("malformed zones file: {e}")))?;
        Self::new(zones)
    }

    pub fn load(path: &Path) -> Result<Self, RoleError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            RoleError::InvalidZoneMap(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn zones(&self) -> &[Zone] {
        &self.zones
    }

    pub fn zones_for(&self, role: Role) -> impl Iterator<Item = &Zone> {
        self.zones.iter().filter(move |z| z.role == role)
    }

    /// The role whose zone contains `position`.
    pub fn assign_role(&self, position: PitchPosition) -> Role {
        self.zones
            .iter()
            .find(|z| z.contains(position))
            .map(|z| z.role)
            .expect("zone map is a partition of the pitch")
    }
}

impl Default for ZoneMap {
    fn default() -> Self {
        Self::default_map()
    }
}

impl<'de> Deserialize<'de> for ZoneMap {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let zones = Vec::<Zone>::deserialize(de)?;
        ZoneMap::new(zones).map_err(serde::de::Error::custom)
    }
}

/// Mean position of a player's events in a match.
pub fn average_position(
    dataset: &Dataset,
    player_id: PlayerId,
    match_id: MatchId,
) -> Result<PitchPosition, RoleError> {
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    for e in dataset.events_of(player_id, match_id) {
        sx += e.position.x;
        sy += e.position.y;
        n += 1;
    }
    if n == 0 {
        return Err(RoleError::NoEvents {
            player_id,
            match_id,
        });
    }
    // Clamp guards against the mean drifting a rounding step past 100.
    Ok(PitchPosition {
        x: (sx / n as f64).clamp(0.0, 100.0),
        y: (sy / n as f64).clamp(0.0, 100.0),
    })
}

/// Role held by each (player, match) appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct RoleAssignments {
    by_pair: BTreeMap<(PlayerId, MatchId), Role>,
}

impl RoleAssignments {
    pub fn compute(dataset: &Dataset, zone_map: &ZoneMap) -> Self {
        let by_pair = dataset
            .appearances()
            .map(|(p, m)| {
                let pos = average_position(dataset, p, m).expect("appearance has events");
                ((p, m), zone_map.assign_role(pos))
            })
            .collect();
        Self { by_pair }
    }

    pub fn role(&self, player: PlayerId, m: MatchId) -> Option<Role> {
        self.by_pair.get(&(player, m)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((PlayerId, MatchId), Role)> + '_ {
        self.by_pair.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.by_pair.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_pair.is_empty()
    }

    /// Distinct roles of a player with match counts, in role order.
    pub fn roles_of(&self, player: PlayerId) -> Vec<(Role, usize)> {
        let mut counts: BTreeMap<Role, usize> = BTreeMap::new();
        for (_, role) in self
            .by_pair
            .range((player, MatchId(u32::MIN))..=(player, MatchId(u32::MAX)))
        {
            *counts.entry(*role).or_default() += 1;
        }
        counts.into_iter().collect()
    }
}

/// Distinct roles a player held across matches, with the number of matches
/// in each. Counts sum to the matches played.
pub fn roles_of_player(
    dataset: &Dataset,
    zone_map: &ZoneMap,
    player_id: PlayerId,
) -> Result<Vec<(Role, usize)>, RoleError> {
    if dataset.player(player_id).is_none() {
        return Err(RoleError::PlayerNotFound(player_id));
    }
    let mut counts: BTreeMap<Role, usize> = BTreeMap::new();
    for m in dataset.matches_of(player_id) {
        let pos = average_position(dataset, player_id, m.match_id)?;
        *counts.entry(zone_map.assign_role(pos)).or_default() += 1;
    }
    Ok(counts.into_iter().collect())
}
