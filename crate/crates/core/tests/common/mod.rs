//! Brute-force reference implementations. They work from the raw event list
//! and never call the library routine they check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use scoutbench_core::model::{Dataset, EventType, MatchEvent, MatchId, PlayerId};
use scoutbench_core::roles::Role;

pub fn pair_name(e: &MatchEvent) -> String {
    format!("{}:{}", e.event_type.as_str(), e.outcome.as_str())
}

/// Catalogue names: distinct pairs sorted, then the fixed tail.
pub fn catalogue_names(events: &[MatchEvent]) -> Vec<String> {
    let pairs: BTreeSet<String> = events.iter().map(pair_name).collect();
    let mut names: Vec<String> = pairs.into_iter().collect();
    names.extend(["goals", "yellow_cards", "red_cards"].map(String::from));
    if events.iter().any(|e| e.xg.is_some()) {
        names.push("xg".into());
    }
    names
}

/// Feature counts keyed by name for one appearance, scanning every event.
pub fn feature_counts(events: &[MatchEvent], p: PlayerId, m: MatchId) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for e in events.iter().filter(|e| e.player_id == p && e.match_id == m) {
        *out.entry(pair_name(e)).or_insert(0.0) += 1.0;
        if e.event_type == EventType::Goal {
            *out.entry("goals".into()).or_insert(0.0) += 1.0;
        }
        if e.tags.contains("yellow_card") {
            *out.entry("yellow_cards".into()).or_insert(0.0) += 1.0;
        }
        if e.tags.contains("red_card") {
            *out.entry("red_cards".into()).or_insert(0.0) += 1.0;
        }
        if let Some(xg) = e.xg {
            *out.entry("xg".into()).or_insert(0.0) += xg;
        }
    }
    out
}

pub fn appearances(events: &[MatchEvent]) -> BTreeSet<(PlayerId, MatchId)> {
    events.iter().map(|e| (e.player_id, e.match_id)).collect()
}

/// Default weights written from the published rule, by name.
pub fn default_weight(name: &str) -> f64 {
    match name {
        "goals" => 5.0,
        "yellow_cards" => -2.0,
        "red_cards" => -5.0,
        "xg" => 3.0,
        n if n.ends_with(":accurate") => 1.0,
        n if n.ends_with(":inaccurate") => -1.0,
        _ => 0.0,
    }
}

pub fn score(counts: &BTreeMap<String, f64>, weight: impl Fn(&str) -> f64) -> f64 {
    counts.iter().map(|(k, v)| v * weight(k)).sum()
}

pub fn average_position(events: &[MatchEvent], p: PlayerId, m: MatchId) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = events
        .iter()
        .filter(|e| e.player_id == p && e.match_id == m)
        .map(|e| (e.position.x, e.position.y))
        .collect();
    let n = pts.len() as f64;
    (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    )
}

/// Default zone lookup by explicit comparisons.
pub fn default_role(x: f64, y: f64) -> Role {
    if x < 16.0 {
        return Role::Gk;
    }
    let lane = if y < 33.0 { 0 } else if y < 67.0 { 1 } else { 2 };
    let band = if x < 40.0 { 0 } else if x < 70.0 { 1 } else { 2 };
    let table = [
        [Role::LeftCb, Role::CentralCb, Role::RightCb],
        [Role::LeftMf, Role::CentralMf, Role::RightMf],
        [Role::LeftFw, Role::CentralFw, Role::RightFw],
    ];
    table[band][lane]
}

/// OLS slope of `ys` against 0..n via the textbook normal equations.
pub fn ols_slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let xbar = (n - 1.0) / 2.0;
    let ybar = ys.iter().sum::<f64>() / n;
    let num: f64 = ys.iter().enumerate().map(|(i, y)| (i as f64 - xbar) * (y - ybar)).sum();
    let den: f64 = (0..ys.len()).map(|i| (i as f64 - xbar).powi(2)).sum();
    num / den
}

/// 12×8 histogram by counting events cell by cell.
pub fn occupancy(events: &[MatchEvent], p: PlayerId) -> Vec<f64> {
    let mine: Vec<&MatchEvent> = events.iter().filter(|e| e.player_id == p).collect();
    let mut out = Vec::with_capacity(96);
    for ix in 0..12 {
        for iy in 0..8 {
            let in_cell = |v: f64, i: usize, n: usize| {
                let lo = 100.0 * i as f64 / n as f64;
                let hi = 100.0 * (i + 1) as f64 / n as f64;
                (v >= lo && v < hi) || (i == n - 1 && v == 100.0)
            };
            let c = mine
                .iter()
                .filter(|e| in_cell(e.position.x, ix, 12) && in_cell(e.position.y, iy, 8))
                .count();
            out.push(c as f64 / mine.len() as f64);
        }
    }
    out
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for i in 0..a.len() {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    dot / (na.sqrt() * nb.sqrt())
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn player_ids(d: &Dataset) -> Vec<PlayerId> {
    d.players().map(|p| p.player_id).collect()
}
