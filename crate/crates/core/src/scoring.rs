//! Performance scores as weighted sums of feature vectors, weight profiles,
//! and per-role score distributions.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::ScoringError;
use crate::features::{extract_features, Feature, FeatureCatalogue, FeatureVector, GOALS};
use crate::model::{Dataset, MatchId, Outcome, PlayerId};
use crate::roles::{Role, RoleAssignments};

pub const DEFAULT_PROFILE_ID: &str = "default";

/// Request body for a new profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDraft {
    pub name: String,
    #[serde(default)]
    pub weights: BTreeMap<String, f64>,
}

/// Immutable named weight assignment. Features without an entry weigh 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightProfile {
    pub profile_id: String,
    pub name: String,
    pub weights: BTreeMap<String, f64>,
    pub created_at: DateTime<Utc>,
}

impl WeightProfile {
    /// Checks weights against the catalogue and fills in a zero goal weight
    /// when none is given.
    pub fn validated_weights(
        weights: BTreeMap<String, f64>,
        catalogue: &FeatureCatalogue,
    ) -> Result<BTreeMap<String, f64>, ScoringError> {
        let mut weights = weights;
        for (name, w) in &weights {
            if !catalogue.contains(name) {
                return Err(ScoringError::UnknownFeature(name.clone()));
            }
            if !w.is_finite() {
                return Err(ScoringError::NonFiniteWeight {
                    feature: name.clone(),
                });
            }
        }
        weights.entry(GOALS.to_string()).or_insert(0.0);
        Ok(weights)
    }

    pub fn new(
        profile_id: impl Into<String>,
        draft: ProfileDraft,
        catalogue: &FeatureCatalogue,
        created_at: DateTime<Utc>,
    ) -> Result<Self, ScoringError> {
        if draft.name.trim().is_empty() {
            return Err(ScoringError::EmptyName);
        }
        Ok(Self {
            profile_id: profile_id.into(),
            name: draft.name,
            weights: Self::validated_weights(draft.weights, catalogue)?,
            created_at,
        })
    }

    /// Shipped starting point: +1 per accurate action, −1 per inaccurate
    /// one, goals +5, yellow cards −2, red cards −5, xg +3.
    pub fn default_profile(catalogue: &FeatureCatalogue) -> Self {
        let weights = catalogue
            .features()
            .iter()
            .map(|f| {
                let w = match f {
                    Feature::Pair(_, Outcome::Accurate) => 1.0,
                    Feature::Pair(_, Outcome::Inaccurate) => -1.0,
                    Feature::Pair(_, Outcome::Neutral) => 0.0,
                    Feature::Goals => 5.0,
                    Feature::YellowCards => -2.0,
                    Feature::RedCards => -5.0,
                    Feature::Xg => 3.0,
                };
                (f.name(), w)
            })
            .collect();
        Self {
            profile_id: DEFAULT_PROFILE_ID.into(),
            name: "Default".into(),
            weights,
            created_at: DateTime::<Utc>::UNIX_EPOCH,
        }
    }

    pub fn weight(&self, feature: &str) -> f64 {
        self.weights.get(feature).copied().unwrap_or(0.0)
    }

    /// Weights aligned with the catalogue order.
    pub fn weight_vector(&self, catalogue: &FeatureCatalogue) -> Vec<f64> {
        catalogue.names().iter().map(|n| self.weight(n)).collect()
    }

    /// Hash of the non-zero weights; profiles differing only by explicit
    /// zeros, name or id hash the same.
    pub fn weights_hash(&self) -> String {
        let mut h = Sha256::new();
        for (name, w) in &self.weights {
            if *w != 0.0 {
                h.update(name.as_bytes());
                h.update([0]);
                h.update(w.to_bits().to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}

/// `Σ values[i] · weight(feature_i)`.
pub fn compute_score(
    fv: &FeatureVector,
    profile: &WeightProfile,
    catalogue: &FeatureCatalogue,
) -> Result<f64, ScoringError> {
    if fv.values.len() != catalogue.len() {
        return Err(ScoringError::Misaligned {
            expected: catalogue.len(),
            actual: fv.values.len(),
        });
    }
    Ok(dot(&fv.values, &profile.weight_vector(catalogue)))
}

fn dot(values: &[f64], weights: &[f64]) -> f64 {
    values.iter().zip(weights).map(|(v, w)| v * w).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerformanceRecord {
    pub player_id: PlayerId,
    pub match_id: MatchId,
    pub role: Role,
    pub score: f64,
}

/// Scores of every appearance under one profile, ordered by player id then
/// match date (ties by match id).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    records: Vec<PerformanceRecord>,
    by_player: BTreeMap<PlayerId, (usize, usize)>,
}

impl ScoreTable {
    pub fn records(&self) -> &[PerformanceRecord] {
        &self.records
    }

    pub fn for_player(&self, player: PlayerId) -> &[PerformanceRecord] {
        match self.by_player.get(&player) {
            Some(&(lo, hi)) => &self.records[lo..hi],
            None => &[],
        }
    }

    pub fn get(&self, player: PlayerId, m: MatchId) -> Option<&PerformanceRecord> {
        self.for_player(player).iter().find(|r| r.match_id == m)
    }

    pub fn players(&self) -> impl Iterator<Item = PlayerId> + '_ {
        self.by_player.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// One record per (player, match) appearance.
pub fn score_all(
    dataset: &Dataset,
    catalogue: &FeatureCatalogue,
    roles: &RoleAssignments,
    profile: &WeightProfile,
) -> ScoreTable {
    let weights = profile.weight_vector(catalogue);
    let mut records: Vec<PerformanceRecord> = dataset
        .appearances()
        .map(|(p, m)| {
            let fv = extract_features(dataset, catalogue, p, m).expect("appearance has events");
            PerformanceRecord {
                player_id: p,
                match_id: m,
                role: roles.role(p, m).expect("every appearance has a role"),
                score: dot(&fv.values, &weights),
            }
        })
        .collect();
    records.sort_by_key(|r| {
        let m = dataset.match_by_id(r.match_id).expect("resolved match");
        (r.player_id, m.date, r.match_id)
    });

    let mut by_player = BTreeMap::new();
    let mut start = 0;
    for i in 1..=records.len() {
        if i == records.len() || records[i].player_id != records[start].player_id {
            by_player.insert(records[start].player_id, (start, i));
            start = i;
        }
    }
    ScoreTable { records, by_player }
}

/// Records sorted by score descending; ties by player id then match id.
pub fn rank_records(records: &[PerformanceRecord]) -> Vec<PerformanceRecord> {
    let mut out = records.to_vec();
    out.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.player_id.cmp(&b.player_id))
            .then(a.match_id.cmp(&b.match_id))
    });
    out
}

/// Mean score, optionally restricted to one role.
pub fn playerank_mean(records: &[PerformanceRecord], role: Option<Role>) -> Result<f64, ScoringError> {
    let (sum, n) = records
        .iter()
        .filter(|r| role.is_none_or(|role| r.role == role))
        .fold((0.0, 0usize), |(s, n), r| (s + r.score, n + 1));
    if n == 0 {
        let what = match role {
            Some(role) => format!("role {role}"),
            None => "player".to_string(),
        };
        return Err(ScoringError::NoRecords(what));
    }
    Ok(sum / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxplotStats {
    pub role: Role,
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub outliers: Vec<f64>,
}

/// Quantile of a sorted sample by linear interpolation at `p·(n−1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Five-number summary with Tukey fences at 1.5·IQR.
///
/// Whiskers sit on the most extreme observations inside the fences, but
/// never inside the box: when no observation lies between a fence and its
/// quartile the whisker collapses onto the quartile.
pub fn boxplot(role: Role, values: &[f64]) -> Option<BoxplotStats> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let fence_lo = q1 - 1.5 * iqr;
    let fence_hi = q3 + 1.5 * iqr;

    let whisker_lo = sorted
        .iter()
        .copied()
        .find(|&v| v >= fence_lo)
        .map_or(q1, |v| v.min(q1));
    let whisker_hi = sorted
        .iter()
        .rev()
        .copied()
        .find(|&v| v <= fence_hi)
        .map_or(q3, |v| v.max(q3));
    let outliers = sorted
        .iter()
        .copied()
        .filter(|&v| v < fence_lo || v > fence_hi)
        .collect();

    Some(BoxplotStats {
        role,
        n: sorted.len(),
        min: sorted[0],
        q1,
        median,
        q3,
        max: sorted[sorted.len() - 1],
        whisker_lo,
        whisker_hi,
        outliers,
    })
}

/// Score distribution of all records with the given role.
pub fn score_distribution(records: &[PerformanceRecord], role: Role) -> Result<BoxplotStats, ScoringError> {
    let values: Vec<f64> = records
        .iter()
        .filter(|r| r.role == role)
        .map(|r| r.score)
        .collect();
    boxplot(role, &values).ok_or(ScoringError::EmptyRole(role))
}

/// Stable fingerprint of a dataset's content.
pub fn dataset_hash(dataset: &Dataset) -> String {
    let mut h = Sha256::new();
    let mut feed = |v: &dyn erased::Ser| {
        h.update(v.json());
        h.update(b"\n");
    };
    for p in dataset.players() {
        feed(p);
    }
    for m in dataset.matches() {
        feed(m);
    }
    for e in dataset.events() {
        feed(e);
    }
    h.update(dataset.reference_date().to_string());
    hex::encode(h.finalize())
}

mod erased {
    pub trait Ser {
        fn json(&self) -> Vec<u8>;
    }

    impl<T: serde::Serialize> Ser for T {
        fn json(&self) -> Vec<u8> {
            serde_json::to_vec(self).expect("domain types serialize")
        }
    }
}

/// Weight profiles: the shipped default plus user-created ones, persisted
/// to a `profiles.json` list. Reads run concurrently, creations serialize.
#[derive(Debug)]
pub struct ProfileRegistry {
    catalogue: FeatureCatalogue,
    profiles: RwLock<Vec<Arc<WeightProfile>>>,
    store: Option<PathBuf>,
}

impl ProfileRegistry {
    pub fn in_memory(catalogue: FeatureCatalogue) -> Self {
        let default = Arc::new(WeightProfile::default_profile(&catalogue));
        Self {
            catalogue,
            profiles: RwLock::new(vec![default]),
            store: None,
        }
    }

    /// Opens a registry backed by `path`, loading it if it exists.
    pub fn open(catalogue: FeatureCatalogue, path: &Path) -> Result<Self, ScoringError> {
        let store_err = |message: String| ScoringError::Store {
            path: path.to_path_buf(),
            message,
        };
        let mut registry = Self::in_memory(catalogue);
        registry.store = Some(path.to_path_buf());
        if path.exists() {
            let text = fs::read_to_string(path).map_err(|e| store_err(e.to_string()))?;
            let stored: Vec<WeightProfile> =
                serde_json::from_str(&text).map_err(|e| store_err(e.to_string()))?;
            let profiles = registry.profiles.get_mut().expect("fresh lock");
            for mut p in stored {
                if profiles.iter().any(|q| q.name == p.name || q.profile_id == p.profile_id) {
                    return Err(store_err(format!("duplicate profile '{}'", p.name)));
                }
                p.weights = WeightProfile::validated_weights(p.weights, &registry.catalogue)
                    .map_err(|e| store_err(format!("profile '{}': {e}", p.name)))?;
                profiles.push(Arc::new(p));
            }
        }
        Ok(registry)
    }

    pub fn catalogue(&self) -> &FeatureCatalogue {
        &self.catalogue
    }

    pub fn get(&self, id: &str) -> Option<Arc<WeightProfile>> {
        self.read().iter().find(|p| p.profile_id == id).cloned()
    }

    pub fn default_profile(&self) -> Arc<WeightProfile> {
        self.read()[0].clone()
    }

    pub fn list(&self) -> Vec<Arc<WeightProfile>> {
        self.read().clone()
    }

    /// Validates, persists and registers a new profile. Names are unique.
    pub fn create(&self, draft: ProfileDraft) -> Result<Arc<WeightProfile>, ScoringError> {
        let mut profiles = self.profiles.write().unwrap_or_else(|e| e.into_inner());
        if profiles.iter().any(|p| p.name == draft.name) {
            return Err(ScoringError::DuplicateName(draft.name));
        }
        let id = format!("p{}", profiles.len());
        let profile = Arc::new(WeightProfile::new(id, draft, &self.catalogue, Utc::now())?);
        if let Some(path) = &self.store {
            let user: Vec<&WeightProfile> = profiles[1..]
                .iter()
                .map(|p| p.as_ref())
                .chain(std::iter::once(profile.as_ref()))
                .collect();
            persist(path, &user)?;
        }
        profiles.push(profile.clone());
        Ok(profile)
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, Vec<Arc<WeightProfile>>> {
        self.profiles.read().unwrap_or_else(|e| e.into_inner())
    }
}

fn persist(path: &Path, profiles: &[&WeightProfile]) -> Result<(), ScoringError> {
    let err = |e: std::io::Error| ScoringError::Store {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let body = serde_json::to_vec_pretty(profiles).expect("profiles serialize");
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, body).map_err(err)?;
    fs::rename(&tmp, path).map_err(err)
}

type CacheKey = (String, String);

/// Score tables keyed by (weights hash, dataset hash). Each entry is
/// computed at most once; racing callers wait for and share the first.
#[derive(Debug, Default)]
pub struct ScoreCache {
    entries: Mutex<HashMap<CacheKey, Arc<OnceLock<Arc<ScoreTable>>>>>,
}

impl ScoreCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(
        &self,
        profile: &WeightProfile,
        dataset_hash: &str,
        compute: impl FnOnce() -> ScoreTable,
    ) -> Arc<ScoreTable> {
        let key = (profile.weights_hash(), dataset_hash.to_string());
        let cell = {
            let mut entries = self.entries.lock().unwrap_or_else(|e| e.into_inner());
            entries.entry(key).or_default().clone()
        };
        cell.get_or_init(|| Arc::new(compute())).clone()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
