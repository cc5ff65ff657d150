use std::sync::Arc;

use axum::extract::{Path, RawQuery, State};
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::Json;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use scoutbench_core::analytics::{
    fit_long, fit_short, trend_percentage, PlayerRoleRow, ScoreSeries, SeriesPoint,
};
use scoutbench_core::model::{Foot, MatchId, PlayerId};
use scoutbench_core::roles::Role;
use scoutbench_core::scoring::{score_distribution, BoxplotStats, ProfileDraft, WeightProfile};
use scoutbench_core::{AnalyticsError, Engine};

use crate::error::ApiError;
use crate::params::{PlayersQuery, QueryParams};

pub type AppState = Arc<Engine>;

#[derive(Debug, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub players: usize,
    pub matches: usize,
}

pub async fn health(State(engine): State<AppState>, RawQuery(q): RawQuery) -> Result<Json<HealthResponse>, ApiError> {
    QueryParams::parse(q.as_deref()).finish()?;
    Ok(Json(HealthResponse {
        status: "ok".into(),
        players: engine.dataset().player_count(),
        matches: engine.dataset().match_count(),
    }))
}

#[derive(Debug, Serialize)]
pub struct PlayersResponse {
    pub rows: Vec<PlayerRoleRow>,
    pub total: usize,
    pub limit: usize,
    pub offset: usize,
}

pub async fn players(State(engine): State<AppState>, RawQuery(q): RawQuery) -> Result<Json<PlayersResponse>, ApiError> {
    let query = PlayersQuery::from_params(QueryParams::parse(q.as_deref()))?;
    let profile = engine.profile(query.profile.as_deref())?;
    let rows = engine.query_players(&profile, &query.filter, &query.sort, query.decay)?;
    let total = rows.len();
    let rows = rows
        .into_iter()
        .skip(query.offset)
        .take(query.limit)
        .collect();
    Ok(Json(PlayersResponse {
        rows,
        total,
        limit: query.limit,
        offset: query.offset,
    }))
}

fn parse_player_id(raw: &str) -> Result<PlayerId, ApiError> {
    raw.parse::<u32>()
        .map(PlayerId)
        .map_err(|_| ApiError::bad_param("id", format!("invalid player id '{raw}'")))
}

fn known_player(engine: &Engine, raw: &str) -> Result<PlayerId, ApiError> {
    let id = parse_player_id(raw)?;
    if engine.dataset().player(id).is_none() {
        return Err(AnalyticsError::PlayerNotFound(id).into());
    }
    Ok(id)
}

#[derive(Debug, Serialize)]
pub struct RoleCount {
    pub role: Role,
    pub matches: usize,
}

#[derive(Debug, Serialize)]
pub struct PlayerDetail {
    pub player_id: PlayerId,
    pub name: String,
    pub birth_date: NaiveDate,
    pub age: u32,
    pub preferred_foot: Option<Foot>,
    pub n_matches: usize,
    pub roles: Vec<RoleCount>,
}

pub async fn player(
    State(engine): State<AppState>,
    Path(id): Path<String>,
    RawQuery(q): RawQuery,
) -> Result<Json<PlayerDetail>, ApiError> {
    QueryParams::parse(q.as_deref()).finish()?;
    let id = known_player(&engine, &id)?;
    let p = engine.dataset().player(id).expect("checked above");
    let age = engine
        .dataset()
        .age(id)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
    let roles: Vec<RoleCount> = engine
        .roles()
        .roles_of(id)
        .into_iter()
        .map(|(role, matches)| RoleCount { role, matches })
        .collect();
    Ok(Json(PlayerDetail {
        player_id: id,
        name: p.name.clone(),
        birth_date: p.birth_date,
        age,
        preferred_foot: p.preferred_foot,
        n_matches: roles.iter().map(|r| r.matches).sum(),
        roles,
    }))
}

#[derive(Debug, Serialize)]
pub struct ScorePoint {
    pub date: NaiveDate,
    pub match_id: MatchId,
    pub role: Role,
    pub score: f64,
}

#[derive(Debug, Serialize)]
pub struct ScoresResponse {
    pub player_id: PlayerId,
    pub profile: String,
    pub role: Option<Role>,
    pub points: Vec<ScorePoint>,
}

pub async fn player_scores(
    State(engine): State<AppState>,
    Path(id): Path<String>,
    RawQuery(q): RawQuery,
) -> Result<Json<ScoresResponse>, ApiError> {
    let mut params = QueryParams::parse(q.as_deref());
    let profile_id = params.take("profile")?;
    let role = params.take_role("role")?;
    params.finish()?;
    let id = known_player(&engine, &id)?;
    let profile = engine.profile(profile_id.as_deref())?;
    let scores = engine.scores(&profile);
    let points = scores
        .for_player(id)
        .iter()
        .filter(|r| role.is_none_or(|role| r.role == role))
        .map(|r| ScorePoint {
            date: engine.dataset().match_by_id(r.match_id).expect("resolved").date,
            match_id: r.match_id,
            role: r.role,
            score: r.score,
        })
        .collect();
    Ok(Json(ScoresResponse {
        player_id: id,
        profile: profile.profile_id.clone(),
        role,
        points,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendKind {
    Long,
    Short,
}

#[derive(Debug, Serialize)]
pub struct TrendResponse {
    pub player_id: PlayerId,
    pub profile: String,
    pub kind: TrendKind,
    pub lambda: Option<f64>,
    pub role: Option<Role>,
    pub n_matches: usize,
    pub series: Vec<SeriesPoint>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Fitted line evaluated at every series point.
    pub fitted: Option<Vec<f64>>,
    pub trend_percentage: Option<f64>,
}

pub async fn player_trend(
    State(engine): State<AppState>,
    Path(id): Path<String>,
    RawQuery(q): RawQuery,
) -> Result<Json<TrendResponse>, ApiError> {
    let mut params = QueryParams::parse(q.as_deref());
    let kind = match params.take("kind")?.as_deref() {
        None | Some("long") => TrendKind::Long,
        Some("short") => TrendKind::Short,
        Some(other) => {
            return Err(ApiError::bad_param("kind", format!("kind must be long or short, got '{other}'")))
        }
    };
    let decay = params.take_decay()?;
    let profile_id = params.take("profile")?;
    let role = params.take_role("role")?;
    params.finish()?;
    let id = known_player(&engine, &id)?;
    let profile = engine.profile(profile_id.as_deref())?;
    let scores = engine.scores(&profile);

    let series = match ScoreSeries::build(engine.dataset(), &scores, id, role) {
        Ok(s) => s.points,
        Err(AnalyticsError::NoEvents(_)) => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    let ys: Vec<f64> = series.iter().map(|p| p.score).collect();
    let fit = match kind {
        TrendKind::Long => fit_long(&ys),
        TrendKind::Short => fit_short(&ys, decay),
    }
    .ok();
    Ok(Json(TrendResponse {
        player_id: id,
        profile: profile.profile_id.clone(),
        kind,
        lambda: (kind == TrendKind::Short).then_some(decay),
        role,
        n_matches: series.len(),
        slope: fit.map(|f| f.slope),
        intercept: fit.map(|f| f.intercept),
        fitted: fit.map(|f| (0..ys.len()).map(|i| f.at(i)).collect()),
        trend_percentage: trend_percentage(&ys).ok(),
        series,
    }))
}

#[derive(Debug, Serialize)]
pub struct SimilarEntry {
    pub player_id: PlayerId,
    pub name: String,
    pub similarity: f64,
}

#[derive(Debug, Serialize)]
pub struct SimilarResponse {
    pub player_id: PlayerId,
    pub k: usize,
    pub similar: Vec<SimilarEntry>,
}

pub async fn player_similar(
    State(engine): State<AppState>,
    Path(id): Path<String>,
    RawQuery(q): RawQuery,
) -> Result<Json<SimilarResponse>, ApiError> {
    let mut params = QueryParams::parse(q.as_deref());
    let k: usize = params.take_parsed("k")?.unwrap_or(5);
    params.finish()?;
    if k == 0 {
        return Err(ApiError::bad_param("k", "k must be at least 1"));
    }
    let id = known_player(&engine, &id)?;
    if engine.similarity().vector(id).is_none() {
        return Err(AnalyticsError::NoEvents(id).into());
    }
    let similar = engine
        .similarity()
        .similar(id, k)?
        .into_iter()
        .map(|s| SimilarEntry {
            player_id: s.player_id,
            name: engine
                .dataset()
                .player(s.player_id)
                .map(|p| p.name.clone())
                .unwrap_or_default(),
            similarity: s.similarity,
        })
        .collect();
    Ok(Json(SimilarResponse {
        player_id: id,
        k,
        similar,
    }))
}

#[derive(Debug, Serialize)]
pub struct ZoneRect {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

#[derive(Debug, Serialize)]
pub struct RoleInfo {
    pub role: Role,
    pub name: &'static str,
    pub zones: Vec<ZoneRect>,
}

#[derive(Debug, Serialize)]
pub struct RolesResponse {
    pub roles: Vec<RoleInfo>,
}

pub async fn roles(State(engine): State<AppState>, RawQuery(q): RawQuery) -> Result<Json<RolesResponse>, ApiError> {
    QueryParams::parse(q.as_deref()).finish()?;
    let roles = Role::ALL
        .into_iter()
        .map(|role| RoleInfo {
            role,
            name: role.display_name(),
            zones: engine
                .zone_map()
                .zones_for(role)
                .map(|z| ZoneRect {
                    x_lo: z.x_lo,
                    x_hi: z.x_hi,
                    y_lo: z.y_lo,
                    y_hi: z.y_hi,
                })
                .collect(),
        })
        .collect();
    Ok(Json(RolesResponse { roles }))
}

#[derive(Debug, Serialize)]
pub struct DistributionResponse {
    pub profile: String,
    pub distributions: Vec<BoxplotStats>,
}

pub async fn score_distribution_stats(
    State(engine): State<AppState>,
    RawQuery(q): RawQuery,
) -> Result<Json<DistributionResponse>, ApiError> {
    let mut params = QueryParams::parse(q.as_deref());
    let profile_id = params.take("profile")?;
    let role = params.take_role("role")?;
    params.finish()?;
    let profile = engine.profile(profile_id.as_deref())?;
    let scores = engine.scores(&profile);
    let distributions = match role {
        Some(role) => vec![score_distribution(scores.records(), role)?],
        None => Role::ALL
            .into_iter()
            .filter_map(|role| score_distribution(scores.records(), role).ok())
            .collect(),
    };
    Ok(Json(DistributionResponse {
        profile: profile.profile_id.clone(),
        distributions,
    }))
}

#[derive(Debug, Serialize)]
pub struct ProfilesResponse {
    pub profiles: Vec<WeightProfile>,
    /// Feature names that weights may reference, in catalogue order.
    pub features: Vec<String>,
}

pub async fn list_profiles(State(engine): State<AppState>, RawQuery(q): RawQuery) -> Result<Json<ProfilesResponse>, ApiError> {
    QueryParams::parse(q.as_deref()).finish()?;
    Ok(Json(ProfilesResponse {
        profiles: engine
            .profiles()
            .list()
            .iter()
            .map(|p| p.as_ref().clone())
            .collect(),
        features: engine.catalogue().names().to_vec(),
    }))
}

pub async fn create_profile(
    State(engine): State<AppState>,
    body: axum::body::Bytes,
) -> Result<impl IntoResponse, ApiError> {
    let draft: ProfileDraft = serde_json::from_slice(&body).map_err(|e| {
        ApiError::new(StatusCode::BAD_REQUEST, "invalid_body", format!("malformed profile: {e}"))
    })?;
    // Registry writes touch the filesystem; keep them off the async workers.
    let created = tokio::task::spawn_blocking(move || engine.profiles().create(draft))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok((StatusCode::CREATED, Json(created.as_ref().clone())))
}

pub async fn not_found(uri: axum::http::Uri) -> ApiError {
    ApiError::not_found("not_found", format!("no route for {}", uri.path()))
}
