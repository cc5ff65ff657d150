//! Trends over time, spatial similarity between players, and the filter and
//! sort engine behind the scouting table.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::AnalyticsError;
use crate::model::{Dataset, MatchId, PlayerId};
use crate::roles::Role;
use crate::scoring::ScoreTable;

pub const DEFAULT_DECAY: f64 = 0.8;
pub const GRID_X: usize = 12;
pub const GRID_Y: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub date: NaiveDate,
    pub match_id: MatchId,
    pub score: f64,
}

/// A player's scores in chronological order, optionally within one role.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreSeries {
    pub player_id: PlayerId,
    pub role: Option<Role>,
    pub points: Vec<SeriesPoint>,
}

impl ScoreSeries {
    pub fn build(
        dataset: &Dataset,
        scores: &ScoreTable,
        player_id: PlayerId,
        role: Option<Role>,
    ) -> Result<Self, AnalyticsError> {
        if dataset.player(player_id).is_none() {
            return Err(AnalyticsError::PlayerNotFound(player_id));
        }
        // Score tables are already in (date, match id) order per player.
        let points: Vec<SeriesPoint> = scores
            .for_player(player_id)
            .iter()
            .filter(|r| role.is_none_or(|role| r.role == role))
            .map(|r| SeriesPoint {
                date: dataset.match_by_id(r.match_id).expect("resolved match").date,
                match_id: r.match_id,
                score: r.score,
            })
            .collect();
        if points.is_empty() {
            return Err(AnalyticsError::NoEvents(player_id));
        }
        Ok(Self {
            player_id,
            role,
            points,
        })
    }

    pub fn scores(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.score).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

impl LineFit {
    pub fn at(&self, index: usize) -> f64 {
        self.intercept + self.slope * index as f64
    }
}

/// Weighted least-squares line of `ys` against indices `0..n`.
fn weighted_fit(ys: &[f64], weights: &[f64]) -> Result<LineFit, AnalyticsError> {
    if ys.len() < 2 {
        return Err(AnalyticsError::UndefinedTrend("fewer than two matches"));
    }
    if ys.iter().all(|&y| y == ys[0]) {
        return Ok(LineFit {
            slope: 0.0,
            intercept: ys[0],
        });
    }
    let w_sum: f64 = weights.iter().sum();
    let x_mean = weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * i as f64)
        .sum::<f64>()
        / w_sum;
    let y_mean = weights.iter().zip(ys).map(|(w, y)| w * y).sum::<f64>() / w_sum;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, (w, y)) in weights.iter().zip(ys).enumerate() {
        let dx = i as f64 - x_mean;
        sxy += w * dx * (y - y_mean);
        sxx += w * dx * dx;
    }
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: y_mean - slope * x_mean,
    })
}

fn recency_weights(n: usize, decay: f64) -> Result<Vec<f64>, AnalyticsError> {
    if !(decay > 0.0 && decay <= 1.0) {
        return Err(AnalyticsError::InvalidArgument(format!(
            "decay {decay} outside (0, 1]"
        )));
    }
    Ok((0..n).map(|i| decay.powi((n - 1 - i) as i32)).collect())
}

/// Equal-weight least-squares fit over match index.
pub fn fit_long(scores: &[f64]) -> Result<LineFit, AnalyticsError> {
    weighted_fit(scores, &vec![1.0; scores.len()])
}

/// Least-squares fit with weight `decay^(n−1−i)` on match `i`; the most
/// recent match weighs 1.
pub fn fit_short(scores: &[f64], decay: f64) -> Result<LineFit, AnalyticsError> {
    let weights = recency_weights(scores.len(), decay)?;
    weighted_fit(scores, &weights)
}

/// Slope in score units per match, every match weighted equally.
pub fn trend_long(scores: &[f64]) -> Result<f64, AnalyticsError> {
    fit_long(scores).map(|f| f.slope)
}

/// Slope with exponentially decaying weights toward older matches.
pub fn trend_short(scores: &[f64], decay: f64) -> Result<f64, AnalyticsError> {
    fit_short(scores, decay).map(|f| f.slope)
}

/// `100 · trend_long · (n−1) / mean`: growth over the observed span as a
/// percentage of the mean score. Undefined for a non-positive mean.
pub fn trend_percentage(scores: &[f64]) -> Result<f64, AnalyticsError> {
    let slope = trend_long(scores)?;
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    if mean <= 0.0 {
        return Err(AnalyticsError::UndefinedTrend("mean score is not positive"));
    }
    Ok(100.0 * slope * (scores.len() - 1) as f64 / mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendSummary {
    pub trend_long: Option<f64>,
    pub trend_short: Option<f64>,
    pub trend_percentage: Option<f64>,
    pub n_matches: usize,
}

impl TrendSummary {
    pub fn of(scores: &[f64], decay: f64) -> Result<Self, AnalyticsError> {
        // Validate decay even when the series is too short to use it.
        recency_weights(0, decay)?;
        Ok(Self {
            trend_long: trend_long(scores).ok(),
            trend_short: trend_short(scores, decay).ok(),
            trend_percentage: trend_percentage(scores).ok(),
            n_matches: scores.len(),
        })
    }
}

// ---------------------------------------------------------------------------
// Similarity
// ---------------------------------------------------------------------------

/// L1-normalized histogram of a player's event positions over a 12×8 grid,
/// indexed `ix * 8 + iy`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupancyVector {
    pub player_id: PlayerId,
    pub values: Vec<f64>,
}

pub fn grid_cell(x: f64, y: f64) -> (usize, usize) {
    let ix = ((x / 100.0 * GRID_X as f64).floor() as usize).min(GRID_X - 1);
    let iy = ((y / 100.0 * GRID_Y as f64).floor() as usize).min(GRID_Y - 1);
    (ix, iy)
}

pub fn occupancy_vector(dataset: &Dataset, player_id: PlayerId) -> Result<OccupancyVector, AnalyticsError> {
    if dataset.player(player_id).is_none() {
        return Err(AnalyticsError::PlayerNotFound(player_id));
    }
    let mut counts = vec![0u32; GRID_X * GRID_Y];
    let mut total = 0u32;
    for e in dataset.player_events(player_id) {
        let (ix, iy) = grid_cell(e.position.x, e.position.y);
        counts[ix * GRID_Y + iy] += 1;
        total += 1;
    }
    if total == 0 {
        return Err(AnalyticsError::NoEvents(player_id));
    }
    Ok(OccupancyVector {
        player_id,
        values: counts.iter().map(|&c| c as f64 / total as f64).collect(),
    })
}

/// Cosine similarity; symmetric in its arguments.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum();
    let nb: f64 = b.iter().map(|x| x * x).sum();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na * nb).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Similar {
    pub player_id: PlayerId,
    pub similarity: f64,
}

/// Occupancy vectors of every player with events.
#[derive(Debug, Clone)]
pub struct SimilarityIndex {
    vectors: BTreeMap<PlayerId, OccupancyVector>,
}

impl SimilarityIndex {
    pub fn build(dataset: &Dataset) -> Self {
        let vectors = dataset
            .players()
            .filter_map(|p| {
                occupancy_vector(dataset, p.player_id)
                    .ok()
                    .map(|v| (p.player_id, v))
            })
            .collect();
        Self { vectors }
    }

    pub fn vector(&self, player: PlayerId) -> Option<&OccupancyVector> {
        self.vectors.get(&player)
    }

    /// Top `k` other players by cosine similarity, descending, ties by
    /// ascending player id.
    pub fn similar(&self, player: PlayerId, k: usize) -> Result<Vec<Similar>, AnalyticsError> {
        if k == 0 {
            return Err(AnalyticsError::InvalidArgument("k must be at least 1".into()));
        }
        let query = self
            .vectors
            .get(&player)
            .ok_or(AnalyticsError::PlayerNotFound(player))?;
        let mut scored: Vec<Similar> = self
            .vectors
            .iter()
            .filter(|(id, _)| **id != player)
            .map(|(id, v)| Similar {
                player_id: *id,
                similarity: cosine_similarity(&query.values, &v.values),
            })
            .collect();
        scored.sort_by(|a, b| {
            b.similarity
                .total_cmp(&a.similarity)
                .then(a.player_id.cmp(&b.player_id))
        });
        scored.truncate(k);
        Ok(scored)
    }
}

/// Convenience over [`SimilarityIndex`] for a one-off query.
pub fn similar_players(dataset: &Dataset, player_id: PlayerId, k: usize) -> Result<Vec<Similar>, AnalyticsError> {
    if dataset.player(player_id).is_none() {
        return Err(AnalyticsError::PlayerNotFound(player_id));
    }
    SimilarityIndex::build(dataset).similar(player_id, k)
}

// ---------------------------------------------------------------------------
// Scouting table
// ---------------------------------------------------------------------------

/// One scouting-table row: a player in one role, with trends computed over
/// the matches played in that role only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlayerRoleRow {
    pub player_id: PlayerId,
    pub name: String,
    pub age: u32,
    pub role: Role,
    pub n_matches: usize,
    pub playerank_mean: f64,
    pub trend_percentage: Option<f64>,
    pub trend_long: Option<f64>,
    pub trend_short: Option<f64>,
}

/// Inclusive numeric range; either bound may be open.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Range {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Range {
    pub fn new(lo: Option<f64>, hi: Option<f64>) -> Self {
        Self { lo, hi }
    }

    pub fn is_active(&self) -> bool {
        self.lo.is_some() || self.hi.is_some()
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo.is_none_or(|lo| v >= lo) && self.hi.is_none_or(|hi| v <= hi)
    }

    fn validate(&self, what: &str) -> Result<(), AnalyticsError> {
        for b in [self.lo, self.hi].into_iter().flatten() {
            if b.is_nan() {
                return Err(AnalyticsError::InvalidArgument(format!("{what} bound is NaN")));
            }
        }
        if let (Some(lo), Some(hi)) = (self.lo, self.hi) {
            if lo > hi {
                return Err(AnalyticsError::InvalidArgument(format!(
                    "{what} range is empty: {lo} > {hi}"
                )));
            }
        }
        Ok(())
    }
}

/// Conjunctive row filter.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlayerFilter {
    pub name_substring: Option<String>,
    pub roles: Vec<Role>,
    pub age: Range,
    pub trend_percentage: Range,
    pub min_matches: Option<usize>,
}

impl PlayerFilter {
    pub fn validate(&self) -> Result<(), AnalyticsError> {
        self.age.validate("age")?;
        self.trend_percentage.validate("trend")
    }

    pub fn matches(&self, row: &PlayerRoleRow) -> bool {
        if let Some(needle) = &self.name_substring {
            if !row.name.to_lowercase().contains(&needle.to_lowercase()) {
                return false;
            }
        }
        if !self.roles.is_empty() && !self.roles.contains(&row.role) {
            return false;
        }
        if !self.age.contains(row.age as f64) {
            return false;
        }
        if self.trend_percentage.is_active() {
            match row.trend_percentage {
                Some(t) if self.trend_percentage.contains(t) => {}
                _ => return false,
            }
        }
        self.min_matches.is_none_or(|m| row.n_matches >= m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SortField {
    TrendPercentage,
    Age,
    Mean,
    Matches,
    Name,
    TrendLong,
    TrendShort,
    Role,
    PlayerId,
}

impl SortField {
    pub fn as_str(self) -> &'static str {
        match self {
            SortField::TrendPercentage => "trend_pct",
            SortField::Age => "age",
            SortField::Mean => "mean",
            SortField::Matches => "matches",
            SortField::Name => "name",
            SortField::TrendLong => "trend_long",
            SortField::TrendShort => "trend_short",
            SortField::Role => "role",
            SortField::PlayerId => "player_id",
        }
    }
}

impl FromStr for SortField {
    type Err = AnalyticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "trend_pct" | "trend_percentage" | "TrendPercentage" => SortField::TrendPercentage,
            "age" => SortField::Age,
            "mean" | "playerank_mean" | "PlayeRankMean" => SortField::Mean,
            "matches" | "n_matches" => SortField::Matches,
            "name" => SortField::Name,
            "trend_long" => SortField::TrendLong,
            "trend_short" => SortField::TrendShort,
            "role" => SortField::Role,
            "player_id" => SortField::PlayerId,
            other => {
                return Err(AnalyticsError::InvalidArgument(format!(
                    "unknown sort key '{other}'"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SortKey {
    pub field: SortField,
    pub descending: bool,
}

impl SortKey {
    pub const fn asc(field: SortField) -> Self {
        Self {
            field,
            descending: false,
        }
    }

    pub const fn desc(field: SortField) -> Self {
        Self {
            field,
            descending: true,
        }
    }

    /// Trend percentage descending, age ascending, mean descending.
    pub const DEFAULT: [SortKey; 3] = [
        SortKey::desc(SortField::TrendPercentage),
        SortKey::asc(SortField::Age),
        SortKey::desc(SortField::Mean),
    ];

    /// Parses `field[:asc|:desc],...`; a missing direction means ascending.
    pub fn parse_list(spec: &str) -> Result<Vec<SortKey>, AnalyticsError> {
        let mut keys = Vec::new();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (field, dir) = part.split_once(':').unwrap_or((part, "asc"));
            let descending = match dir {
                "asc" => false,
                "desc" => true,
                other => {
                    return Err(AnalyticsError::InvalidArgument(format!(
                        "unknown sort direction '{other}'"
                    )))
                }
            };
            keys.push(SortKey {
                field: field.parse()?,
                descending,
            });
        }
        if keys.is_empty() {
            return Err(AnalyticsError::InvalidArgument("empty sort specification".into()));
        }
        Ok(keys)
    }
}

impl fmt::Display for SortKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = if self.descending { "desc" } else { "asc" };
        write!(f, "{}:{dir}", self.field.as_str())
    }
}

/// Compares optional values; `None` sorts last in either direction.
fn cmp_optional(a: Option<f64>, b: Option<f64>, descending: bool) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => {
            let o = x.total_cmp(&y);
            if descending {
                o.reverse()
            } else {
                o
            }
        }
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

fn cmp_rows(a: &PlayerRoleRow, b: &PlayerRoleRow, keys: &[SortKey]) -> Ordering {
    for key in keys {
        let directed = |o: Ordering| if key.descending { o.reverse() } else { o };
        let o = match key.field {
            SortField::TrendPercentage => {
                cmp_optional(a.trend_percentage, b.trend_percentage, key.descending)
            }
            SortField::TrendLong => cmp_optional(a.trend_long, b.trend_long, key.descending),
            SortField::TrendShort => cmp_optional(a.trend_short, b.trend_short, key.descending),
            SortField::Age => directed(a.age.cmp(&b.age)),
            SortField::Mean => directed(a.playerank_mean.total_cmp(&b.playerank_mean)),
            SortField::Matches => directed(a.n_matches.cmp(&b.n_matches)),
            SortField::Name => directed(a.name.cmp(&b.name)),
            SortField::Role => directed(a.role.cmp(&b.role)),
            SortField::PlayerId => directed(a.player_id.cmp(&b.player_id)),
        };
        if o != Ordering::Equal {
            return o;
        }
    }
    a.player_id.cmp(&b.player_id).then(a.role.cmp(&b.role))
}

/// Every (player, role) row, in player id then role order.
pub fn player_role_rows(
    dataset: &Dataset,
    scores: &ScoreTable,
    decay: f64,
) -> Result<Vec<PlayerRoleRow>, AnalyticsError> {
    recency_weights(0, decay)?;
    let mut rows = Vec::new();
    for player_id in scores.players() {
        let player = dataset
            .player(player_id)
            .ok_or(AnalyticsError::PlayerNotFound(player_id))?;
        let age = dataset
            .age(player_id)
            .map_err(|e| AnalyticsError::InvalidArgument(e.to_string()))?;
        let mut by_role: BTreeMap<Role, Vec<f64>> = BTreeMap::new();
        for r in scores.for_player(player_id) {
            by_role.entry(r.role).or_default().push(r.score);
        }
        for (role, series) in by_role {
            let summary = TrendSummary::of(&series, decay)?;
            rows.push(PlayerRoleRow {
                player_id,
                name: player.name.clone(),
                age,
                role,
                n_matches: series.len(),
                playerank_mean: series.iter().sum::<f64>() / series.len() as f64,
                trend_percentage: summary.trend_percentage,
                trend_long: summary.trend_long,
                trend_short: summary.trend_short,
            });
        }
    }
    Ok(rows)
}

/// Filters and sorts the scouting table. An empty `sort` means
/// [`SortKey::DEFAULT`].
pub fn query_players(
    dataset: &Dataset,
    scores: &ScoreTable,
    filter: &PlayerFilter,
    sort: &[SortKey],
    decay: f64,
) -> Result<Vec<PlayerRoleRow>, AnalyticsError> {
    filter.validate()?;
    let keys = if sort.is_empty() { &SortKey::DEFAULT[..] } else { sort };
    let mut rows: Vec<PlayerRoleRow> = player_role_rows(dataset, scores, decay)?
        .into_iter()
        .filter(|r| filter.matches(r))
        .collect();
    rows.sort_by(|a, b| cmp_rows(a, b, keys));
    Ok(rows)
}
