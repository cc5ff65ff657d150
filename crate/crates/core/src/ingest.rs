//! Newline-delimited JSON ingestion and the seeded fixture generator.
//!
//! Each source file holds one record per line. Bad records are rejected one
//! at a time with a reason; only I/O failures and an empty result abort.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::IngestError;
use crate::model::{
    Dataset, EventId, EventType, Foot, Match, MatchEvent, MatchId, Outcome, PitchPosition,
    Period, Player, PlayerId, TeamId,
};
use crate::roles::{Role, ZoneMap};

pub const EVENTS_FILE: &str = "events.jsonl";
pub const PLAYERS_FILE: &str = "players.jsonl";
pub const MATCHES_FILE: &str = "matches.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Events,
    Players,
    Matches,
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            SourceKind::Events => "events",
            SourceKind::Players => "players",
            SourceKind::Matches => "matches",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reject {
    /// 1-based line number in the source.
    pub line: usize,
    pub reason: String,
}

/// Per-source accounting: `records_accepted + rejects.len() == records_read`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub source: SourceKind,
    pub records_read: usize,
    pub records_accepted: usize,
    pub rejects: Vec<Reject>,
}

impl IngestReport {
    fn new(source: SourceKind) -> Self {
        Self {
            source,
            records_read: 0,
            records_accepted: 0,
            rejects: Vec::new(),
        }
    }

    fn reject(&mut self, line: usize, reason: impl Into<String>) {
        self.rejects.push(Reject {
            line,
            reason: reason.into(),
        });
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatasetReport {
    pub events: IngestReport,
    pub players: IngestReport,
    pub matches: IngestReport,
}

impl DatasetReport {
    pub fn total_rejects(&self) -> usize {
        self.events.rejects.len() + self.players.rejects.len() + self.matches.rejects.len()
    }
}

impl fmt::Display for DatasetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in [&self.events, &self.players, &self.matches] {
            writeln!(
                f,
                "{:<8} read={} accepted={} rejected={}",
                r.source,
                r.records_read,
                r.records_accepted,
                r.rejects.len()
            )?;
            for rej in &r.rejects {
                writeln!(f, "  {}:{}: {}", r.source, rej.line, rej.reason)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestOptions {
    /// Mirror H2/E2 coordinates when the source records absolute pitch
    /// sides instead of the attacking direction.
    pub flip_second_half: bool,
    pub reference_date: Option<NaiveDate>,
}

struct Parsed<T> {
    records: Vec<(usize, T)>,
    report: IngestReport,
}

fn parse_lines<T, R, F>(source: SourceKind, input: R, check: F) -> std::io::Result<Parsed<T>>
where
    T: DeserializeOwned,
    R: BufRead,
    F: Fn(&T) -> Result<(), String>,
{
    let mut report = IngestReport::new(source);
    let mut records = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        report.records_read += 1;
        match serde_json::from_str::<T>(&line) {
            Ok(rec) => match check(&rec) {
                Ok(()) => records.push((line_no, rec)),
                Err(reason) => report.reject(line_no, reason),
            },
            Err(e) => report.reject(line_no, e.to_string()),
        }
    }
    Ok(Parsed { records, report })
}

fn io_err(path: &str) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: PathBuf::from(path),
        source,
    }
}

/// Parses the three sources into a validated [`Dataset`].
///
/// The sources are read concurrently; cross-reference checks then run in a
/// single join pass and reject individual records rather than aborting.
pub fn parse_dataset<E, P, M>(
    events: E,
    players: P,
    matches: M,
    options: IngestOptions,
) -> Result<(Dataset, DatasetReport), IngestError>
where
    E: BufRead + Send,
    P: BufRead + Send,
    M: BufRead + Send,
{
    let (events, players, matches) = std::thread::scope(|s| {
        let ev = s.spawn(move || {
            parse_lines::<MatchEvent, _, _>(SourceKind::Events, events, |e| {
                e.validate().map_err(|err| match err {
                    crate::error::ModelError::InvalidEvent { reason, .. } => reason,
                    other => other.to_string(),
                })
            })
        });
        let pl = s.spawn(move || {
            parse_lines::<Player, _, _>(SourceKind::Players, players, |p| {
                p.validate().map_err(|e| e.to_string())
            })
        });
        let ma = s.spawn(move || {
            parse_lines::<Match, _, _>(SourceKind::Matches, matches, |m| {
                m.validate().map_err(|e| e.to_string())
            })
        });
        (
            ev.join().expect("events parser panicked"),
            pl.join().expect("players parser panicked"),
            ma.join().expect("matches parser panicked"),
        )
    });
    let events = events.map_err(io_err(EVENTS_FILE))?;
    let players = players.map_err(io_err(PLAYERS_FILE))?;
    let matches = matches.map_err(io_err(MATCHES_FILE))?;
    join(events, players, matches, options)
}

fn join(
    events: Parsed<MatchEvent>,
    players: Parsed<Player>,
    matches: Parsed<Match>,
    options: IngestOptions,
) -> Result<(Dataset, DatasetReport), IngestError> {
    let mut players_report = players.report;
    let mut player_map: BTreeMap<PlayerId, Player> = BTreeMap::new();
    for (line, p) in players.records {
        match player_map.entry(p.player_id) {
            Entry::Occupied(_) => players_report.reject(line, format!("duplicate player_id {}", p.player_id)),
            Entry::Vacant(slot) => {
                slot.insert(p);
            }
        }
    }
    players_report.records_accepted = player_map.len();

    let mut matches_report = matches.report;
    let mut match_map: BTreeMap<MatchId, Match> = BTreeMap::new();
    for (line, m) in matches.records {
        match match_map.entry(m.match_id) {
            Entry::Occupied(_) => matches_report.reject(line, format!("duplicate match_id {}", m.match_id)),
            Entry::Vacant(slot) => {
                slot.insert(m);
            }
        }
    }
    matches_report.records_accepted = match_map.len();

    let mut events_report = events.report;
    let mut seen = HashSet::new();
    let mut accepted = Vec::with_capacity(events.records.len());
    for (line, mut e) in events.records {
        let Some(m) = match_map.get(&e.match_id) else {
            events_report.reject(line, format!("unknown match_id {}", e.match_id));
            continue;
        };
        let Some(p) = player_map.get(&e.player_id) else {
            events_report.reject(line, format!("unknown player_id {}", e.player_id));
            continue;
        };
        if p.birth_date >= m.date {
            events_report.reject(
                line,
                format!("player {} born on or after match date {}", p.player_id, m.date),
            );
            continue;
        }
        if !seen.insert((e.match_id, e.event_id)) {
            events_report.reject(
                line,
                format!("duplicate event_id {} in match {}", e.event_id, e.match_id),
            );
            continue;
        }
        if options.flip_second_half && e.period.is_switched_end() {
            e.position = e.position.flipped();
        }
        accepted.push(e);
    }
    events_report.records_accepted = accepted.len();
    if accepted.is_empty() {
        return Err(IngestError::EmptyDataset);
    }

    let dataset = Dataset::new(
        player_map.into_values().collect(),
        match_map.into_values().collect(),
        accepted,
        options.reference_date,
    )?;
    Ok((
        dataset,
        DatasetReport {
            events: events_report,
            players: players_report,
            matches: matches_report,
        },
    ))
}

fn open(path: &Path) -> Result<BufReader<File>, IngestError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Reads the three sources from explicit paths.
pub fn parse_files(
    events: &Path,
    players: &Path,
    matches: &Path,
    options: IngestOptions,
) -> Result<(Dataset, DatasetReport), IngestError> {
    parse_dataset(open(events)?, open(players)?, open(matches)?, options)
}

/// Reads `events.jsonl`, `players.jsonl` and `matches.jsonl` from `dir`.
pub fn load_dir(dir: &Path, options: IngestOptions) -> Result<(Dataset, DatasetReport), IngestError> {
    parse_files(
        &dir.join(EVENTS_FILE),
        &dir.join(PLAYERS_FILE),
        &dir.join(MATCHES_FILE),
        options,
    )
}

fn write_jsonl<T: Serialize, W: Write>(out: W, records: impl Iterator<Item = T>) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    for rec in records {
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Serializes a dataset into the three source formats.
pub fn write_dataset<E: Write, P: Write, M: Write>(
    dataset: &Dataset,
    events: E,
    players: P,
    matches: M,
) -> std::io::Result<()> {
    write_jsonl(events, dataset.events().iter())?;
    write_jsonl(players, dataset.players())?;
    write_jsonl(matches, dataset.matches())
}

pub fn write_dir(dataset: &Dataset, dir: &Path) -> Result<(), IngestError> {
    let create = |name: &str| {
        let path = dir.join(name);
        File::create(&path).map_err(|source| IngestError::Io { path, source })
    };
    std::fs::create_dir_all(dir).map_err(|source| IngestError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write_dataset(
        dataset,
        create(EVENTS_FILE)?,
        create(PLAYERS_FILE)?,
        create(MATCHES_FILE)?,
    )
    .map_err(|source| IngestError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

// ---------------------------------------------------------------------------
// Synthetic fixtures
// ---------------------------------------------------------------------------

const FIRST_NAMES: &[&str] = &[
    "Moise", "Gianluca", "Nicolo", "Lorenzo", "Federico", "Sandro", "Davide", "Matteo",
    "Andrea", "Riccardo", "Luca", "Marco", "Stefano", "Alessio", "Simone", "Filippo",
    "Tommaso", "Giacomo", "Emanuele", "Daniele",
];
const LAST_NAMES: &[&str] = &[
    "Kean", "Mancini", "Cassata", "Barella", "Chiesa", "Tonali", "Zaniolo", "Bastoni",
    "Pellegrini", "Orsolini", "Locatelli", "Kulusevski", "Frattesi", "Scamacca", "Calabria",
    "Pobega", "Raspadori", "Udogie", "Scalvini", "Gnonto", "Miretti", "Fagioli", "Colombo",
    "Ricci",
];

const SEASON_START: (i32, u32, u32) = (2018, 8, 19);

/// Per-match improvement (positive) or decline (negative) of the accuracy
/// probability.
#[derive(Debug, Clone, Copy)]
enum Archetype {
    Improving,
    Declining,
    Steady,
}

impl Archetype {
    fn drift(self) -> f64 {
        match self {
            Archetype::Improving => 0.30,
            Archetype::Declining => -0.25,
            Archetype::Steady => 0.0,
        }
    }
}

struct Profile {
    team: usize,
    home: Role,
    /// Second role played in alternating matches, if any.
    alternate: Option<Role>,
    archetype: Archetype,
    attendance: f64,
}

fn outfield_roles() -> [Role; 9] {
    [
        Role::LeftCb,
        Role::CentralCb,
        Role::RightCb,
        Role::LeftMf,
        Role::CentralMf,
        Role::RightMf,
        Role::LeftFw,
        Role::CentralFw,
        Role::RightFw,
    ]
}

fn event_mix(role: Role) -> &'static [(EventType, u32)] {
    use EventType::*;
    match role {
        Role::Gk => &[(Pass, 10), (Save, 5), (Clearance, 3), (Other, 1)],
        Role::LeftCb | Role::CentralCb | Role::RightCb => &[
            (Pass, 12),
            (Duel, 6),
            (Interception, 4),
            (Clearance, 4),
            (Foul, 2),
            (Cross, 1),
            (Other, 1),
        ],
        Role::LeftMf | Role::CentralMf | Role::RightMf => &[
            (Pass, 14),
            (Duel, 5),
            (Dribble, 3),
            (Interception, 2),
            (Cross, 2),
            (Shot, 2),
            (Foul, 2),
            (Other, 1),
        ],
        Role::LeftFw | Role::CentralFw | Role::RightFw => &[
            (Pass, 9),
            (Shot, 5),
            (Dribble, 4),
            (Duel, 4),
            (Cross, 2),
            (Foul, 1),
            (Other, 1),
        ],
    }
}

fn pick_weighted<R: Rng>(rng: &mut R, table: &[(EventType, u32)]) -> EventType {
    let total: u32 = table.iter().map(|(_, w)| w).sum();
    let mut roll = rng.random_range(0..total);
    for &(ty, w) in table {
        if roll < w {
            return ty;
        }
        roll -= w;
    }
    unreachable!("roll below total weight")
}

fn round1(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

/// Samples a point inside the zone, inset by half a unit so that rounding to
/// one decimal keeps it there.
fn sample_in_zone<R: Rng>(rng: &mut R, zone_map: &ZoneMap, role: Role) -> PitchPosition {
    let z = zone_map.zones_for(role).next().expect("role has a zone");
    PitchPosition {
        x: round1(rng.random_range(z.x_lo + 0.5..=z.x_hi - 0.5)),
        y: round1(rng.random_range(z.y_lo + 0.5..=z.y_hi - 0.5)),
    }
}

/// Deterministic synthetic dataset.
///
/// Every player has a home zone on the default zone map, and all of a
/// player's events in a match fall inside the zone played that match, so
/// role assignment reproduces the planted roles. A few young players switch
/// between two zones on alternating matches. Players carry an improving,
/// declining or steady accuracy drift so trends carry signal.
pub fn generate_synthetic(seed: u64, n_players: usize, n_matches: usize) -> Result<Dataset, IngestError> {
    if n_players < 2 {
        return Err(IngestError::InvalidArgument(format!(
            "n_players must be at least 2, got {n_players}"
        )));
    }
    if n_matches < 1 {
        return Err(IngestError::InvalidArgument(format!(
            "n_matches must be at least 1, got {n_matches}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zone_map = ZoneMap::default_map();
    let n_teams = n_players.div_ceil(11).max(2);

    let start = NaiveDate::from_ymd_opt(SEASON_START.0, SEASON_START.1, SEASON_START.2)
        .expect("valid season start");
    let last_match_date = start + Duration::days(7 * (n_matches as i64 - 1));

    let mut players = Vec::with_capacity(n_players);
    let mut profiles = Vec::with_capacity(n_players);
    let mut used_names = BTreeSet::new();
    let outfield = outfield_roles();
    for i in 0..n_players {
        let team = i % n_teams;
        let slot = i / n_teams;
        let home = if slot == 0 {
            Role::Gk
        } else {
            outfield[(slot - 1 + team * 4 + rng.random_range(0..2)) % outfield.len()]
        };
        // Every fifth player (starting with the second) alternates between
        // midfield and attack in the same lane.
        let versatile = i % 5 == 1;
        let (home, alternate) = if versatile {
            let lane = rng.random_range(0..3);
            (Role::ALL[4 + lane], Some(Role::ALL[7 + lane]))
        } else {
            (home, None)
        };
        let archetype = if versatile {
            Archetype::Improving
        } else {
            match rng.random_range(0..3) {
                0 => Archetype::Improving,
                1 => Archetype::Declining,
                _ => Archetype::Steady,
            }
        };
        let age_years: i64 = if versatile || i % 4 == 0 {
            rng.random_range(18..22)
        } else {
            rng.random_range(22..35)
        };
        let birth_date = last_match_date
            - Duration::days(age_years * 365 + age_years / 4 + rng.random_range(1..360));

        let name = loop {
            let first = FIRST_NAMES[rng.random_range(0..FIRST_NAMES.len())];
            let last = LAST_NAMES[rng.random_range(0..LAST_NAMES.len())];
            let candidate = format!("{first} {last}");
            if used_names.insert(candidate.clone()) {
                break candidate;
            }
            if used_names.len() >= FIRST_NAMES.len() * LAST_NAMES.len() {
                break format!("{first} {last} {i}");
            }
        };
        let preferred_foot = match rng.random_range(0..10) {
            0..=5 => Some(Foot::Right),
            6..=8 => Some(Foot::Left),
            _ => None,
        };
        players.push(Player {
            player_id: PlayerId(i as u32 + 1),
            name,
            birth_date,
            preferred_foot,
        });
        profiles.push(Profile {
            team,
            home,
            alternate,
            archetype,
            attendance: if versatile { 1.0 } else { rng.random_range(0.75..0.98) },
        });
    }

    // Round-robin style schedule: each match pairs two distinct teams.
    let mut matches = Vec::with_capacity(n_matches);
    for k in 0..n_matches {
        let home = k % n_teams;
        let offset = 1 + (k / n_teams) % (n_teams - 1);
        let away = (home + offset) % n_teams;
        let (home, away) = if k % 2 == 0 { (home, away) } else { (away, home) };
        matches.push(Match {
            match_id: MatchId(1000 + k as u32),
            date: start + Duration::days(7 * k as i64),
            home_team: TeamId(home as u32 + 1),
            away_team: TeamId(away as u32 + 1),
            competition: "Synthetic League".into(),
            season: "2018/2019".into(),
        });
    }

    let mut events = Vec::new();
    let mut appearances_per_player = vec![0usize; n_players];
    for (k, m) in matches.iter().enumerate() {
        let mut match_events = Vec::new();
        for (i, (player, prof)) in players.iter().zip(&profiles).enumerate() {
            let team = TeamId(prof.team as u32 + 1);
            if team != m.home_team && team != m.away_team {
                continue;
            }
            if !rng.random_bool(prof.attendance) {
                continue;
            }
            let nth = appearances_per_player[i];
            appearances_per_player[i] += 1;
            let role = match prof.alternate {
                Some(alt) if nth % 2 == 1 => alt,
                _ => prof.home,
            };
            let progress = if n_matches > 1 {
                k as f64 / (n_matches - 1) as f64
            } else {
                0.0
            };
            let p_accurate = (0.62 + prof.archetype.drift() * progress).clamp(0.05, 0.95);
            let p_goal = (0.18 + prof.archetype.drift() * 0.5 * progress).clamp(0.02, 0.6);
            let n_events = rng.random_range(22..=33);
            for _ in 0..n_events {
                let ty = pick_weighted(&mut rng, event_mix(role));
                let mut tags = BTreeSet::new();
                let mut xg = None;
                let mut card_tag = None;
                let (ty, outcome) = match ty {
                    EventType::Shot => {
                        let chance: f64 = rng.random_range(0.02..0.6);
                        xg = Some((chance * 100.0).round() / 100.0);
                        if rng.random_bool(p_goal) {
                            (EventType::Goal, Outcome::Accurate)
                        } else if rng.random_bool(p_accurate) {
                            (EventType::Shot, Outcome::Accurate)
                        } else {
                            (EventType::Shot, Outcome::Inaccurate)
                        }
                    }
                    EventType::Foul => {
                        if rng.random_bool(0.02) {
                            card_tag = Some("red_card");
                        } else if rng.random_bool(0.15) {
                            card_tag = Some("yellow_card");
                        }
                        (EventType::Foul, Outcome::Neutral)
                    }
                    EventType::Other => (EventType::Other, Outcome::Neutral),
                    EventType::Pass => {
                        let accurate = rng.random_bool(p_accurate);
                        if accurate && rng.random_bool(0.03) {
                            tags.insert("assist".to_string());
                        }
                        let outcome = if accurate { Outcome::Accurate } else { Outcome::Inaccurate };
                        (EventType::Pass, outcome)
                    }
                    other => {
                        let outcome = if rng.random_bool(p_accurate) {
                            Outcome::Accurate
                        } else {
                            Outcome::Inaccurate
                        };
                        (other, outcome)
                    }
                };
                let period = if rng.random_bool(0.5) { Period::H1 } else { Period::H2 };
                let clock_s = rng.random_range(0..2820) as f64;
                match_events.push(MatchEvent {
                    event_id: EventId(0),
                    match_id: m.match_id,
                    player_id: player.player_id,
                    team_id: team,
                    event_type: ty,
                    outcome,
                    tags,
                    period,
                    clock_s,
                    position: sample_in_zone(&mut rng, &zone_map, role),
                    xg,
                });
                if let Some(tag) = card_tag {
                    let mut card = match_events.last().expect("foul just pushed").clone();
                    card.event_type = EventType::Card;
                    card.tags.insert(tag.to_string());
                    card.clock_s = (card.clock_s + 5.0).min(2820.0);
                    match_events.push(card);
                }
            }
        }
        match_events.shuffle(&mut rng);
        match_events.sort_by(|a, b| {
            (a.period, a.clock_s)
                .partial_cmp(&(b.period, b.clock_s))
                .expect("finite clock")
        });
        for (n, e) in match_events.iter_mut().enumerate() {
            e.event_id = EventId(n as u64 + 1);
        }
        events.extend(match_events);
    }

    Ok(Dataset::new(players, matches, events, None)?)
}
