use std::sync::{Arc, OnceLock};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use scoutbench_api::{router, RESPONSE_SCHEMA};
use scoutbench_core::ingest::generate_synthetic;
use scoutbench_core::roles::ZoneMap;
use scoutbench_core::Engine;

fn engine() -> Arc<Engine> {
    let dataset = generate_synthetic(7, 20, 10).unwrap();
    Arc::new(Engine::new(dataset, ZoneMap::default_map()))
}

fn shared() -> Arc<Engine> {
    static ENGINE: OnceLock<Arc<Engine>> = OnceLock::new();
    ENGINE.get_or_init(engine).clone()
}

async fn send(engine: &Arc<Engine>, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = router(engine.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, bytes.to_vec())
}

async fn get(engine: &Arc<Engine>, uri: &str) -> (StatusCode, Value) {
    let (status, body) = send(engine, Request::get(uri).body(Body::empty()).unwrap()).await;
    (status, serde_json::from_slice(&body).expect("json body"))
}

async fn post_profile(engine: &Arc<Engine>, body: Value) -> (StatusCode, Value) {
    let req = Request::post("/api/profiles")
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let (status, body) = send(engine, req).await;
    (status, serde_json::from_slice(&body).unwrap())
}

fn assert_schema(def: &str, value: &Value) {
    let mut root: Value = serde_json::from_str(RESPONSE_SCHEMA).unwrap();
    root["$ref"] = json!(format!("#/$defs/{def}"));
    let validator = jsonschema::validator_for(&root).unwrap();
    let errors: Vec<String> = validator.iter_errors(value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{def}: {errors:?}\n{value}");
}

#[tokio::test]
async fn health_reports_counts() {
    let (status, body) = get(&shared(), "/api/health").await;
    assert_eq!(status, StatusCode::OK);
    assert_schema("health", &body);
    assert_eq!(body, json!({"status": "ok", "players": 20, "matches": 10}));
}

#[tokio::test]
async fn every_get_endpoint_matches_schema() {
    let e = shared();
    let cases = [
        ("/api/players", "players"),
        ("/api/players?age_max=21&trend_min=0&min_matches=3", "players"),
        ("/api/players/2", "playerDetail"),
        ("/api/players/2/scores", "scores"),
        ("/api/players/2/scores?role=central_FW", "scores"),
        ("/api/players/2/trend", "trend"),
        ("/api/players/2/trend?kind=short&lambda=0.5", "trend"),
        ("/api/players/2/similar?k=3", "similar"),
        ("/api/roles", "roles"),
        ("/api/stats/score-distribution", "scoreDistribution"),
        ("/api/stats/score-distribution?role=GK", "scoreDistribution"),
        ("/api/profiles", "profiles"),
    ];
    for (uri, def) in cases {
        let (status, body) = get(&e, uri).await;
        assert_eq!(status, StatusCode::OK, "{uri}: {body}");
        assert_schema(def, &body);
    }
}

#[tokio::test]
async fn errors_use_the_error_envelope() {
    let e = shared();
    let cases = [
        ("/api/players?colour=red", StatusCode::BAD_REQUEST, "unknown_parameter"),
        ("/api/players?age_min=30&age_max=20", StatusCode::BAD_REQUEST, "invalid_parameter"),
        ("/api/players?sort=height", StatusCode::BAD_REQUEST, "invalid_parameter"),
        ("/api/players/abc", StatusCode::BAD_REQUEST, "invalid_parameter"),
        ("/api/players/99999", StatusCode::NOT_FOUND, "player_not_found"),
        ("/api/players/99999/trend", StatusCode::NOT_FOUND, "player_not_found"),
        ("/api/players/2/trend?kind=medium", StatusCode::BAD_REQUEST, "invalid_parameter"),
        ("/api/players/2/similar?k=0", StatusCode::BAD_REQUEST, "invalid_parameter"),
        ("/api/players/2/scores?profile=nope", StatusCode::NOT_FOUND, "profile_not_found"),
        ("/api/stats/score-distribution?role=striker", StatusCode::BAD_REQUEST, "invalid_parameter"),
        ("/api/nowhere", StatusCode::NOT_FOUND, "not_found"),
    ];
    for (uri, status, code) in cases {
        let (got, body) = get(&e, uri).await;
        assert_eq!(got, status, "{uri}: {body}");
        assert_eq!(body["code"], code, "{uri}");
        assert_eq!(body["status"], status.as_u16());
        assert_schema("error", &body);
    }
}

#[tokio::test]
async fn pagination_partitions_the_result() {
    let e = shared();
    let (_, all) = get(&e, "/api/players?limit=10000").await;
    let total = all["total"].as_u64().unwrap() as usize;
    assert_eq!(all["rows"].as_array().unwrap().len(), total);

    let mut stitched = Vec::new();
    let mut offset = 0;
    while offset < total {
        let (status, page) = get(&e, &format!("/api/players?limit=7&offset={offset}")).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(page["total"], total);
        stitched.extend(page["rows"].as_array().unwrap().iter().cloned());
        offset += 7;
    }
    assert_eq!(&stitched, all["rows"].as_array().unwrap());

    let (_, past) = get(&e, &format!("/api/players?offset={}", total + 5)).await;
    assert!(past["rows"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn filters_apply() {
    let e = shared();
    let (_, named) = get(&e, "/api/players?name_like=a&limit=10000").await;
    for row in named["rows"].as_array().unwrap() {
        assert!(row["name"].as_str().unwrap().to_lowercase().contains('a'));
    }
    let (_, gk) = get(&e, "/api/players?role=GK&limit=10000").await;
    let rows = gk["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["role"] == "GK"));

    let (_, young) = get(&e, "/api/players?age_max=21&trend_min=0&min_matches=3").await;
    for row in young["rows"].as_array().unwrap() {
        assert!(row["age"].as_u64().unwrap() <= 21);
        assert!(row["trend_percentage"].as_f64().unwrap() >= 0.0);
        assert!(row["n_matches"].as_u64().unwrap() >= 3);
    }
}

#[tokio::test]
async fn trend_exposes_series_and_fit() {
    let e = shared();
    let (_, t) = get(&e, "/api/players/2/trend?kind=long").await;
    let series = t["series"].as_array().unwrap();
    let fitted = t["fitted"].as_array().unwrap();
    assert_eq!(series.len(), fitted.len());
    assert_eq!(t["n_matches"], series.len());
    assert!(t["lambda"].is_null());
    let slope = t["slope"].as_f64().unwrap();
    let intercept = t["intercept"].as_f64().unwrap();
    for (i, f) in fitted.iter().enumerate() {
        assert_eq!(f.as_f64().unwrap(), intercept + slope * i as f64);
    }
    let (_, s) = get(&e, "/api/players/2/trend?kind=short").await;
    assert_eq!(s["lambda"], 0.8);
}

#[tokio::test]
async fn repeated_requests_are_byte_identical() {
    let e = shared();
    for uri in ["/api/players", "/api/players/3/similar", "/api/stats/score-distribution"] {
        let a = send(&e, Request::get(uri).body(Body::empty()).unwrap()).await;
        let b = send(&e, Request::get(uri).body(Body::empty()).unwrap()).await;
        assert_eq!(a, b, "{uri}");
    }
}

#[tokio::test]
async fn create_profile_then_use_it() {
    let e = engine();
    let (status, created) = post_profile(&e, json!({"name": "finisher", "weights": {"goals": 10.0}})).await;
    assert_eq!(status, StatusCode::CREATED, "{created}");
    assert_schema("profile", &created);
    let id = created["profile_id"].as_str().unwrap().to_string();

    let (_, listed) = get(&e, "/api/profiles").await;
    let ids: Vec<&str> = listed["profiles"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["profile_id"].as_str().unwrap())
        .collect();
    assert!(ids.contains(&"default") && ids.contains(&id.as_str()));

    let (status, scores) = get(&e, &format!("/api/players/2/scores?profile={id}")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(scores["profile"], id);

    let (status, dup) = post_profile(&e, json!({"name": "finisher", "weights": {}})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(dup["code"], "duplicate_name");

    let (status, bad) = post_profile(&e, json!({"name": "x", "weights": {"dribble:magic": 1.0}})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(bad["code"], "unknown_feature");

    let (status, bad) = post_profile(&e, json!({"name": "x", "colour": "red"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(bad["code"], "invalid_body");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_same_name_creates_once() {
    let e = engine();
    let body = json!({"name": "twin", "weights": {"goals": 2.0}});
    let (a, b) = tokio::join!(post_profile(&e, body.clone()), post_profile(&e, body.clone()));
    let mut statuses = [a.0, b.0];
    statuses.sort();
    assert_eq!(statuses, [StatusCode::CREATED, StatusCode::CONFLICT]);
}
