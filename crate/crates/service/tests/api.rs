use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use provrisk_core::Direction;
use provrisk_store::fixtures::{write_reference, REFERENCE_PROVIDER};
use provrisk_store::{ops, Workspace};
use serde_json::{json, Value};
use tower::ServiceExt;

struct Harness {
    _dir: tempfile::TempDir,
    root: std::path::PathBuf,
    app: Router,
}

fn harness() -> Harness {
    let dir = tempfile::tempdir().unwrap();
    let ws = write_reference(dir.path()).unwrap();
    Harness {
        root: dir.path().to_owned(),
        _dir: dir,
        app: provrisk_service::router(ws),
    }
}

async fn call(
    app: &Router,
    method: Method,
    uri: &str,
    body: Option<Value>,
) -> (StatusCode, Vec<u8>) {
    let builder = Request::builder().method(method).uri(uri);
    let request = match body {
        Some(b) => builder
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => builder.body(Body::empty()).unwrap(),
    };
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    (status, bytes)
}

async fn json_call(
    app: &Router,
    method: Method,
    uri: &str,
    body: Option<Value>,
) -> (StatusCode, Value) {
    let (status, bytes) = call(app, method, uri, body).await;
    (
        status,
        serde_json::from_slice(&bytes).unwrap_or(Value::Null),
    )
}

#[tokio::test]
async fn catalog_and_scale() {
    let h = harness();
    let (status, body) = json_call(&h.app, Method::GET, "/api/factors", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["factors"].as_array().unwrap().len(), 9);
    assert_eq!(body["factors"][0]["name"], "Experience");
    let (_, body) = json_call(&h.app, Method::GET, "/api/scale", None).await;
    assert_eq!(body, json!({"borders": [1.0, 3.0, 5.0, 7.5, 10.0]}));
}

#[tokio::test]
async fn what_if_with_all_lowest_scores() {
    let h = harness();
    let overrides: serde_json::Map<String, Value> = Workspace::load(&h.root)
        .unwrap()
        .load_catalog()
        .unwrap()
        .ids()
        .map(|id| (id.to_string(), json!(1)))
        .collect();
    let (status, body) = json_call(
        &h.app,
        Method::POST,
        "/api/whatif",
        Some(json!({"provider_id": REFERENCE_PROVIDER, "overrides": overrides})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert!((body["risk"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[tokio::test]
async fn empty_what_if_equals_ranked_entry() {
    let h = harness();
    let (_, rank) = json_call(&h.app, Method::GET, "/api/rank", None).await;
    let (status, report) = json_call(
        &h.app,
        Method::POST,
        "/api/whatif",
        Some(json!({"provider_id": REFERENCE_PROVIDER, "overrides": {}})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let mut entry = rank[0].clone();
    entry.as_object_mut().unwrap().remove("rank");
    assert_eq!(report, entry);
    assert!((report["risk"].as_f64().unwrap() - 89.98 / 52.28).abs() < 1e-12);
}

#[tokio::test]
async fn what_if_never_persists() {
    let h = harness();
    let (_, before) = call(&h.app, Method::GET, "/api/rank", None).await;
    let (status, report) = json_call(
        &h.app,
        Method::POST,
        "/api/whatif",
        Some(
            json!({"provider_id": REFERENCE_PROVIDER, "overrides": {"experience": 5, "image": 4}}),
        ),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert!(report["risk"].as_f64().unwrap() > 1.8);
    let (_, after) = call(&h.app, Method::GET, "/api/rank", None).await;
    assert_eq!(before, after);
    let (_, providers) = json_call(&h.app, Method::GET, "/api/providers", None).await;
    assert_eq!(providers["providers"][0]["scores"]["experience"], 1);
}

#[tokio::test]
async fn score_outside_scale_is_400() {
    let h = harness();
    let (status, body) = json_call(
        &h.app,
        Method::PUT,
        "/api/providers/provider-2/assessment",
        Some(json!({"scores": {"experience": 7}})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(
        body["invariant"].as_str().unwrap().contains("1-5"),
        "{body}"
    );

    let (status, body) = json_call(
        &h.app,
        Method::POST,
        "/api/whatif",
        Some(json!({"provider_id": REFERENCE_PROVIDER, "overrides": {"experience": 0}})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].as_str().unwrap().contains("1-5"));
}

#[tokio::test]
async fn bad_requests() {
    let h = harness();
    let (status, body) = json_call(
        &h.app,
        Method::PUT,
        "/api/providers/p2/assessment",
        Some(json!({"scores": {"experience": 2}})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
    assert!(body["error"].as_str().unwrap().contains("missing"));

    let (status, _) = json_call(&h.app, Method::GET, "/api/rank?direction=sideways", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, _) = json_call(
        &h.app,
        Method::POST,
        "/api/whatif",
        Some(json!({"provider_id": "ghost"})),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, _) = json_call(
        &h.app,
        Method::POST,
        "/api/whatif",
        Some(json!({"provider_id": REFERENCE_PROVIDER, "overrides": {"ghost": 2}})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, _) = json_call(
        &h.app,
        Method::PUT,
        "/api/surveys/everyone",
        Some(json!({"rows": []})),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let request = Request::builder()
        .method(Method::POST)
        .uri("/api/whatif")
        .header("content-type", "application/json")
        .body(Body::from("{not json"))
        .unwrap();
    let response = h.app.clone().oneshot(request).await.unwrap();
    assert_eq!(response.status(), StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn stale_write_is_409() {
    let h = harness();
    let scores = json!({"experience": 2, "image": 2, "production_scale": 2, "execution_term": 2,
        "financial_condition": 2, "service_price": 2, "financing_source": 2,
        "national_identity": 2, "advertising_activity": 2});
    let (status, body) = json_call(
        &h.app,
        Method::PUT,
        "/api/providers/p2/assessment",
        Some(json!({"scores": scores, "expected_version": 1})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["version"], 2);
    assert!((body["report"]["risk"].as_f64().unwrap() - 2.0).abs() < 1e-12);

    let (status, _) = json_call(
        &h.app,
        Method::PUT,
        "/api/providers/p2/assessment",
        Some(json!({"scores": scores, "expected_version": 1})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);

    let (_, list) = json_call(&h.app, Method::GET, "/api/providers", None).await;
    assert_eq!(list["version"], 2);
    assert_eq!(list["providers"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn strict_weights_on_fixture_is_422_with_diagnostics() {
    let h = harness();
    let (status, body) = json_call(&h.app, Method::POST, "/api/weights", Some(json!({}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["diagnostics"].as_array().unwrap().len(), 7);
    let (_, weights) = json_call(&h.app, Method::GET, "/api/weights", None).await;
    assert_eq!(weights["version"], 1);
}

#[tokio::test]
async fn panels_upload_then_weights() {
    let h = harness();
    let ws = Workspace::load(&h.root).unwrap();
    let rows: Vec<Value> = ws
        .load_survey(provrisk_store::SurveySource::Pooled)
        .unwrap()
        .iter()
        .map(|d| json!({"factor_id": d.factor_id, "fractions": d.fractions}))
        .collect();

    let (status, body) = json_call(
        &h.app,
        Method::PUT,
        "/api/surveys/customer",
        Some(json!({"rows": rows, "expected_version": 1})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["version"], 2);
    let failed = body["validation"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["passed"] == false)
        .count();
    assert_eq!(failed, 7);

    let (status, _) = json_call(
        &h.app,
        Method::PUT,
        "/api/surveys/provider",
        Some(json!({"rows": rows})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);

    let (status, body) = json_call(
        &h.app,
        Method::POST,
        "/api/weights",
        Some(json!({"policy": "renormalize", "threshold": 0.95, "expected_version": 1})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["version"], 2);
    assert_eq!(body["sources"], json!(["customer", "provider"]));
    assert_eq!(body["consistency"]["consistent"], true);
    assert_eq!(body["consistency"]["threshold"], 0.95);
    assert_eq!(body["diagnostics"].as_array().unwrap().len(), 7);

    let (status, _) = json_call(
        &h.app,
        Method::POST,
        "/api/weights",
        Some(json!({"policy": "renormalize", "expected_version": 1})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn survey_row_of_wrong_length_is_400() {
    let h = harness();
    let rows: Vec<Value> = (0..9)
        .map(|i| json!({"factor_id": format!("f{i}"), "fractions": [0.5, 0.5]}))
        .collect();
    let (status, _) = json_call(
        &h.app,
        Method::PUT,
        "/api/surveys/customer",
        Some(json!({"rows": rows})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn mutations_leave_workspace_loadable_with_equal_scores() {
    let h = harness();
    for (id, b) in [("alpha", 3), ("beta", 1), ("gamma", 5)] {
        let scores: serde_json::Map<String, Value> = Workspace::load(&h.root)
            .unwrap()
            .load_catalog()
            .unwrap()
            .ids()
            .map(|f| (f.to_string(), json!(b)))
            .collect();
        let (status, _) = json_call(
            &h.app,
            Method::PUT,
            &format!("/api/providers/{id}/assessment"),
            Some(json!({"scores": scores})),
        )
        .await;
        assert_eq!(status, StatusCode::OK);
    }
    for direction in [Direction::MinRisk, Direction::MaxScore] {
        let (_, served) = call(
            &h.app,
            Method::GET,
            &format!("/api/rank?direction={direction}"),
            None,
        )
        .await;
        let loaded = Workspace::load(&h.root).unwrap();
        let library = ops::rank(&loaded, direction).unwrap();
        assert_eq!(served, serde_json::to_vec(&library).unwrap());
        assert_eq!(library.len(), 4);
    }
}
