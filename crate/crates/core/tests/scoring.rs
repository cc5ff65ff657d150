mod common;

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scoutbench_core::features::{extract_features, FeatureCatalogue, FeatureTable};
use scoutbench_core::ingest::generate_synthetic;
use scoutbench_core::model::Dataset;
use scoutbench_core::roles::{average_position, RoleAssignments, ZoneMap};
use scoutbench_core::scoring::{rank_records, score_all, ProfileDraft, WeightProfile};

fn profile(catalogue: &FeatureCatalogue, weights: BTreeMap<String, f64>) -> WeightProfile {
    let draft = ProfileDraft { name: "t".into(), weights };
    WeightProfile::new("t", draft, catalogue, DateTime::<Utc>::UNIX_EPOCH).unwrap()
}

fn random_weights(rng: &mut ChaCha8Rng, catalogue: &FeatureCatalogue) -> BTreeMap<String, f64> {
    catalogue
        .names()
        .iter()
        .map(|n| (n.clone(), rng.random_range(-3.0..3.0)))
        .collect()
}

#[test]
fn catalogue_matches_distinct_pair_scan() {
    for seed in 0..10 {
        let d = generate_synthetic(seed, 12 + seed as usize, 3 + seed as usize % 4).unwrap();
        let cat = FeatureCatalogue::build(&d);
        assert_eq!(cat.names(), common::catalogue_names(d.events()).as_slice());
    }
}

#[test]
fn feature_vectors_match_brute_force_counts() {
    let d = generate_synthetic(4, 20, 5).unwrap();
    let cat = FeatureCatalogue::build(&d);
    let table = FeatureTable::build(&d, &cat);
    let pairs = common::appearances(d.events());
    assert_eq!(table.len(), pairs.len());
    for &(p, m) in &pairs {
        let fv = table.get(p, m).unwrap();
        let counts = common::feature_counts(d.events(), p, m);
        for (i, name) in cat.names().iter().enumerate() {
            let expected = counts.get(name).copied().unwrap_or(0.0);
            if name == "xg" {
                assert!(common::rel_close(fv.values[i], expected, 1e-12));
            } else {
                assert_eq!(fv.values[i], expected, "{name} for {p}/{m}");
            }
        }
    }
}

#[test]
fn pair_features_sum_to_event_counts() {
    let d = generate_synthetic(9, 16, 4).unwrap();
    let cat = FeatureCatalogue::build(&d);
    let table = FeatureTable::build(&d, &cat);
    let n_pairs = cat.names().iter().filter(|n| n.contains(':')).count();
    let mut total = 0.0;
    for fv in table.iter() {
        let in_match = d.events().iter().filter(|e| e.player_id == fv.player_id && e.match_id == fv.match_id).count();
        let per_appearance: f64 = fv.values[..n_pairs].iter().sum();
        assert_eq!(per_appearance, in_match as f64);
        total += per_appearance;
    }
    assert_eq!(total, d.events().len() as f64);
}

fn shuffled(d: &Dataset, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = d.events().to_vec();
    events.shuffle(&mut rng);
    let mut players: Vec<_> = d.players().cloned().collect();
    players.shuffle(&mut rng);
    let mut matches: Vec<_> = d.matches().cloned().collect();
    matches.shuffle(&mut rng);
    Dataset::new(players, matches, events, Some(d.reference_date())).unwrap()
}

#[test]
fn features_and_scores_ignore_input_order() {
    let d = generate_synthetic(12, 18, 5).unwrap();
    let zm = ZoneMap::default_map();
    let cat = FeatureCatalogue::build(&d);
    let prof = WeightProfile::default_profile(&cat);
    let base = score_all(&d, &cat, &RoleAssignments::compute(&d, &zm), &prof);
    for seed in 0..5 {
        let s = shuffled(&d, seed);
        let cat_s = FeatureCatalogue::build(&s);
        assert_eq!(cat_s, cat);
        let other = score_all(&s, &cat_s, &RoleAssignments::compute(&s, &zm), &prof);
        assert_eq!(other.len(), base.len());
        for (a, b) in base.records().iter().zip(other.records()) {
            assert_eq!((a.player_id, a.match_id, a.role), (b.player_id, b.match_id, b.role));
            assert!(common::rel_close(a.score, b.score, 1e-12));
        }
    }
}

#[test]
fn default_scores_match_hand_weighted_counts() {
    let d = generate_synthetic(2, 20, 6).unwrap();
    let cat = FeatureCatalogue::build(&d);
    let roles = RoleAssignments::compute(&d, &ZoneMap::default_map());
    let table = score_all(&d, &cat, &roles, &WeightProfile::default_profile(&cat));
    assert_eq!(table.len(), common::appearances(d.events()).len());
    for r in table.records() {
        let counts = common::feature_counts(d.events(), r.player_id, r.match_id);
        let expected = common::score(&counts, common::default_weight);
        assert!(common::rel_close(r.score, expected, 1e-12), "{r:?} vs {expected}");
    }
}

#[test]
fn scaling_and_adding_profiles_is_linear() {
    let d = generate_synthetic(6, 20, 6).unwrap();
    let cat = FeatureCatalogue::build(&d);
    let roles = RoleAssignments::compute(&d, &ZoneMap::default_map());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let wa = random_weights(&mut rng, &cat);
        let wb = random_weights(&mut rng, &cat);
        let alpha = rng.random_range(0.1..10.0);
        let sum: BTreeMap<String, f64> = wa.iter().map(|(k, v)| (k.clone(), v + wb[k])).collect();
        let scaled: BTreeMap<String, f64> = wa.iter().map(|(k, v)| (k.clone(), alpha * v)).collect();
        let a = score_all(&d, &cat, &roles, &profile(&cat, wa));
        let b = score_all(&d, &cat, &roles, &profile(&cat, wb));
        let ab = score_all(&d, &cat, &roles, &profile(&cat, sum));
        let sa = score_all(&d, &cat, &roles, &profile(&cat, scaled));
        for i in 0..a.len() {
            let (ra, rb) = (&a.records()[i], &b.records()[i]);
            let mag = ra.score.abs() + rb.score.abs();
            assert!((ab.records()[i].score - (ra.score + rb.score)).abs() <= 1e-9 * mag.max(1.0));
            assert!(common::rel_close(sa.records()[i].score, alpha * ra.score, 1e-9));
        }
    }
}

#[test]
fn explicit_zero_weights_change_nothing() {
    let d = generate_synthetic(3, 14, 4).unwrap();
    let cat = FeatureCatalogue::build(&d);
    let roles = RoleAssignments::compute(&d, &ZoneMap::default_map());
    let sparse: BTreeMap<String, f64> = [("goals".to_string(), 4.0), ("pass:accurate".to_string(), 1.0)].into();
    let mut dense: BTreeMap<String, f64> = cat.names().iter().map(|n| (n.clone(), 0.0)).collect();
    dense.extend(sparse.clone());
    let ps = profile(&cat, sparse);
    let pd = profile(&cat, dense);
    assert_eq!(ps.weights_hash(), pd.weights_hash());
    assert_eq!(score_all(&d, &cat, &roles, &ps), score_all(&d, &cat, &roles, &pd));
}

#[test]
fn ranking_order_is_scale_invariant() {
    let d = generate_synthetic(10, 20, 5).unwrap();
    let cat = FeatureCatalogue::build(&d);
    let roles = RoleAssignments::compute(&d, &ZoneMap::default_map());
    let base = WeightProfile::default_profile(&cat);
    let key = |t: &scoutbench_core::scoring::ScoreTable| {
        rank_records(t.records()).iter().map(|r| (r.player_id, r.match_id)).collect::<Vec<_>>()
    };
    let reference = key(&score_all(&d, &cat, &roles, &base));
    for alpha in [0.5, 2.0, 10.0] {
        let w = base.weights.iter().map(|(k, v)| (k.clone(), alpha * v)).collect();
        assert_eq!(key(&score_all(&d, &cat, &roles, &profile(&cat, w))), reference);
    }
}

#[test]
fn average_positions_and_roles_match_brute_force() {
    let d = generate_synthetic(13, 22, 6).unwrap();
    let roles = RoleAssignments::compute(&d, &ZoneMap::default_map());
    let pairs = common::appearances(d.events());
    assert_eq!(roles.len(), pairs.len());
    for &(p, m) in &pairs {
        let (x, y) = common::average_position(d.events(), p, m);
        let pos = average_position(&d, p, m).unwrap();
        assert!((pos.x - x).abs() < 1e-9 && (pos.y - y).abs() < 1e-9);
        assert_eq!(roles.role(p, m), Some(common::default_role(pos.x, pos.y)));
    }
    for p in common::player_ids(&d) {
        let n: usize = roles.roles_of(p).iter().map(|(_, c)| c).sum();
        assert_eq!(n, pairs.iter().filter(|(q, _)| *q == p).count());
    }
}

#[test]
fn missing_appearance_is_not_found() {
    let d = generate_synthetic(1, 12, 3).unwrap();
    let cat = FeatureCatalogue::build(&d);
    let p = d.players().next().unwrap().player_id;
    assert!(extract_features(&d, &cat, p, scoutbench_core::model::MatchId(1)).is_err());
}
