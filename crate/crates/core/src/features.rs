//! Per-(player, match) feature vectors over a fixed, ordered catalogue.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::FeatureError;
use crate::model::{Dataset, EventType, MatchEvent, MatchId, Outcome, PlayerId};

pub const GOALS: &str = "goals";
pub const YELLOW_CARDS: &str = "yellow_cards";
pub const RED_CARDS: &str = "red_cards";
pub const XG: &str = "xg";

const YELLOW_TAG: &str = "yellow_card";
const RED_TAG: &str = "red_card";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feature {
    /// Count of events with this type and outcome.
    Pair(EventType, Outcome),
    /// Count of goal events.
    Goals,
    /// Count of events tagged `yellow_card`.
    YellowCards,
    /// Count of events tagged `red_card`.
    RedCards,
    /// Sum of the source-provided expected-goals values.
    Xg,
}

impl Feature {
    pub fn name(&self) -> String {
        match self {
            Feature::Pair(t, o) => format!("{t}:{o}"),
            Feature::Goals => GOALS.into(),
            Feature::YellowCards => YELLOW_CARDS.into(),
            Feature::RedCards => RED_CARDS.into(),
            Feature::Xg => XG.into(),
        }
    }

    fn value(&self, e: &MatchEvent) -> f64 {
        let hit = |b: bool| if b { 1.0 } else { 0.0 };
        match *self {
            Feature::Pair(t, o) => hit(e.event_type == t && e.outcome == o),
            Feature::Goals => hit(e.event_type == EventType::Goal),
            Feature::YellowCards => hit(e.has_tag(YELLOW_TAG)),
            Feature::RedCards => hit(e.has_tag(RED_TAG)),
            Feature::Xg => e.xg.unwrap_or(0.0),
        }
    }

    /// Whether values are integer counts, as opposed to summed reals.
    pub fn is_count(&self) -> bool {
        !matches!(self, Feature::Xg)
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Ordered feature list: `type:outcome` pairs present in the dataset sorted
/// by name, then `goals`, `yellow_cards`, `red_cards`, then `xg` when any
/// event carries an xg value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureCatalogue {
    features: Vec<Feature>,
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl FeatureCatalogue {
    pub fn build(dataset: &Dataset) -> Self {
        Self::from_events(dataset.events())
    }

    pub fn from_events(events: &[MatchEvent]) -> Self {
        let mut pairs: BTreeSet<String> = BTreeSet::new();
        let mut pair_of: BTreeMap<String, Feature> = BTreeMap::new();
        let mut has_xg = false;
        for e in events {
            let f = Feature::Pair(e.event_type, e.outcome);
            let name = f.name();
            if pairs.insert(name.clone()) {
                pair_of.insert(name, f);
            }
            has_xg |= e.xg.is_some();
        }
        let mut features: Vec<Feature> = pairs.iter().map(|n| pair_of[n]).collect();
        features.extend([Feature::Goals, Feature::YellowCards, Feature::RedCards]);
        if has_xg {
            features.push(Feature::Xg);
        }
        let names: Vec<String> = features.iter().map(Feature::name).collect();
        let index = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        Self {
            features,
            names,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }
}

impl Serialize for FeatureCatalogue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.names.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureVector {
    pub player_id: PlayerId,
    pub match_id: MatchId,
    pub values: Vec<f64>,
}

fn accumulate<'a>(catalogue: &FeatureCatalogue, events: impl Iterator<Item = &'a MatchEvent>) -> (Vec<f64>, usize) {
    let mut values = vec![0.0; catalogue.len()];
    let mut n = 0;
    for e in events {
        n += 1;
        for (slot, f) in values.iter_mut().zip(catalogue.features()) {
            *slot += f.value(e);
        }
    }
    (values, n)
}

/// Feature vector of one player in one match.
pub fn extract_features(
    dataset: &Dataset,
    catalogue: &FeatureCatalogue,
    player_id: PlayerId,
    match_id: MatchId,
) -> Result<FeatureVector, FeatureError> {
    let (values, n) = accumulate(catalogue, dataset.events_of(player_id, match_id));
    if n == 0 {
        return Err(FeatureError::NotFound {
            player_id,
            match_id,
        });
    }
    Ok(FeatureVector {
        player_id,
        match_id,
        values,
    })
}

/// Feature vectors for every appearance, in (player, match id) order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    vectors: BTreeMap<(PlayerId, MatchId), FeatureVector>,
}

impl FeatureTable {
    pub fn build(dataset: &Dataset, catalogue: &FeatureCatalogue) -> Self {
        let vectors = dataset
            .appearances()
            .map(|(p, m)| {
                let fv = extract_features(dataset, catalogue, p, m).expect("appearance has events");
                ((p, m), fv)
            })
            .collect();
        Self { vectors }
    }

    pub fn get(&self, player: PlayerId, m: MatchId) -> Option<&FeatureVector> {
        self.vectors.get(&(player, m))
    }

    pub fn iter(&self) -> impl Iterator<Item = &FeatureVector> {
        self.vectors.values()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}
