//! Everything derived once from a loaded dataset, shared by the server and
//! the command line.

use std::path::Path;
use std::sync::Arc;

use crate::analytics::{self, PlayerFilter, PlayerRoleRow, SimilarityIndex, SortKey};
use crate::error::{AnalyticsError, LoadError, ScoringError};
use crate::features::FeatureCatalogue;
use crate::ingest::{self, DatasetReport, IngestOptions};
use crate::model::Dataset;
use crate::roles::{RoleAssignments, ZoneMap};
use crate::scoring::{self, ProfileRegistry, ScoreCache, ScoreTable, WeightProfile};

pub const ZONES_FILE: &str = "zones.json";
pub const PROFILES_FILE: &str = "profiles.json";

#[derive(Debug)]
pub struct Engine {
    dataset: Dataset,
    zone_map: ZoneMap,
    catalogue: FeatureCatalogue,
    roles: RoleAssignments,
    similarity: SimilarityIndex,
    dataset_hash: String,
    profiles: ProfileRegistry,
    cache: ScoreCache,
}

impl Engine {
    /// Builds an engine with an in-memory profile registry.
    pub fn new(dataset: Dataset, zone_map: ZoneMap) -> Self {
        let catalogue = FeatureCatalogue::build(&dataset);
        let profiles = ProfileRegistry::in_memory(catalogue.clone());
        Self::assemble(dataset, zone_map, catalogue, profiles)
    }

    pub fn with_profile_store(
        dataset: Dataset,
        zone_map: ZoneMap,
        store: &Path,
    ) -> Result<Self, ScoringError> {
        let catalogue = FeatureCatalogue::build(&dataset);
        let profiles = ProfileRegistry::open(catalogue.clone(), store)?;
        Ok(Self::assemble(dataset, zone_map, catalogue, profiles))
    }

    fn assemble(
        dataset: Dataset,
        zone_map: ZoneMap,
        catalogue: FeatureCatalogue,
        profiles: ProfileRegistry,
    ) -> Self {
        let roles = RoleAssignments::compute(&dataset, &zone_map);
        let similarity = SimilarityIndex::build(&dataset);
        let dataset_hash = scoring::dataset_hash(&dataset);
        Self {
            dataset,
            zone_map,
            catalogue,
            roles,
            similarity,
            dataset_hash,
            profiles,
            cache: ScoreCache::new(),
        }
    }

    /// Loads a data directory: the three JSONL sources, an optional
    /// `zones.json`, and `profiles.json` (created on first profile).
    pub fn load_dir(dir: &Path) -> Result<(Self, DatasetReport), LoadError> {
        let (dataset, report) = ingest::load_dir(dir, IngestOptions::default())?;
        let zones = dir.join(ZONES_FILE);
        let zone_map = if zones.exists() {
            ZoneMap::load(&zones)?
        } else {
            ZoneMap::default_map()
        };
        let engine = Self::with_profile_store(dataset, zone_map, &dir.join(PROFILES_FILE))?;
        Ok((engine, report))
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn zone_map(&self) -> &ZoneMap {
        &self.zone_map
    }

    pub fn catalogue(&self) -> &FeatureCatalogue {
        &self.catalogue
    }

    pub fn roles(&self) -> &RoleAssignments {
        &self.roles
    }

    pub fn similarity(&self) -> &SimilarityIndex {
        &self.similarity
    }

    pub fn profiles(&self) -> &ProfileRegistry {
        &self.profiles
    }

    pub fn dataset_hash(&self) -> &str {
        &self.dataset_hash
    }

    /// Looks up a profile; `None` selects the shipped default.
    pub fn profile(&self, id: Option<&str>) -> Result<Arc<WeightProfile>, ScoringError> {
        match id {
            None => Ok(self.profiles.default_profile()),
            Some(id) => self
                .profiles
                .get(id)
                .ok_or_else(|| ScoringError::ProfileNotFound(id.to_string())),
        }
    }

    /// Score table for a profile, computed once per distinct weight set.
    pub fn scores(&self, profile: &WeightProfile) -> Arc<ScoreTable> {
        self.cache.get_or_compute(profile, &self.dataset_hash, || {
            scoring::score_all(&self.dataset, &self.catalogue, &self.roles, profile)
        })
    }

    pub fn query_players(
        &self,
        profile: &WeightProfile,
        filter: &PlayerFilter,
        sort: &[SortKey],
        decay: f64,
    ) -> Result<Vec<PlayerRoleRow>, AnalyticsError> {
        let scores = self.scores(profile);
        analytics::query_players(&self.dataset, &scores, filter, sort, decay)
    }
}
