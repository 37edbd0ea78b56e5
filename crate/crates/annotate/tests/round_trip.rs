use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use groundfact_annotate::{router, AnnotateConfig, Store, TaskSpec};
use groundfact_core::metrics::fleiss_kappa;
use groundfact_core::SupportLabel;
use serde_json::{json, Value};
use tower::ServiceExt;

const ANNOTATORS: [(&str, &str); 3] = [("tok-a", "ann-a"), ("tok-b", "ann-b"), ("tok-c", "ann-c")];
const LEAD: &str = "tok-lead";

fn config(dir: &std::path::Path) -> AnnotateConfig {
    let text = format!(
        r#"
        tasks = "{}"
        log = "{}"
        static_dir = "{}"
        [tokens]
        tok-a = {{ name = "ann-a", role = "annotator" }}
        tok-b = {{ name = "ann-b", role = "annotator" }}
        tok-c = {{ name = "ann-c", role = "annotator" }}
        tok-lead = {{ name = "lead", role = "adjudicator" }}
        "#,
        dir.join("tasks.jsonl").display(),
        dir.join("events.jsonl").display(),
        dir.join("ui").display(),
    );
    AnnotateConfig::from_toml(&text).unwrap()
}

fn specs() -> Vec<TaskSpec> {
    (0..10)
        .map(|i| TaskSpec {
            id: format!("task-{i:02}"),
            pipeline: if i < 5 { "c2d" } else { "d2c" }.into(),
            document: format!("Document number {i} describes a river crossing."),
            claim: format!("Claim number {i} about the crossing."),
            label: SupportLabel::from_bool(i % 3 != 0),
        })
        .collect()
}

fn app(dir: &std::path::Path) -> Router {
    let cfg = config(dir);
    std::fs::create_dir_all(dir.join("ui")).unwrap();
    std::fs::write(dir.join("ui/index.html"), "<html>ui</html>").unwrap();
    let tasks: String = specs().iter().map(|s| serde_json::to_string(s).unwrap() + "\n").collect();
    std::fs::write(&cfg.tasks, tasks).unwrap();
    let store = Store::open(&cfg.tasks, &cfg.log, cfg.annotators_per_task).unwrap();
    router(Arc::new(store), &cfg)
}

async fn call(app: &Router, method: &str, uri: &str, token: Option<&str>, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header("authorization", format!("Bearer {t}"));
    }
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    let value = serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()));
    (status, value)
}

/// Every annotator-facing task object has exactly these keys.
fn assert_blind(v: &Value) {
    let objects: Vec<&Value> = match v {
        Value::Array(items) => items.iter().collect(),
        other => vec![other],
    };
    for o in objects {
        let mut keys: Vec<&str> = o.as_object().expect("task object").keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(keys, ["claim", "document", "id", "my_verdict"], "{o}");
    }
}

fn assert_close(a: &Value, b: &Value) {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            assert_eq!(x.keys().collect::<Vec<_>>(), y.keys().collect::<Vec<_>>());
            for (k, v) in x {
                assert_close(v, &y[k]);
            }
        }
        (Value::Number(x), Value::Number(y)) => {
            assert!((x.as_f64().unwrap() - y.as_f64().unwrap()).abs() < 1e-12, "{x} vs {y}")
        }
        _ => assert_eq!(a, b),
    }
}

#[tokio::test]
async fn three_sessions_ten_tasks_one_disagreement() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());

    let (status, _) = call(&app, "GET", "/tasks", None, None).await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    let (status, _) = call(&app, "GET", "/tasks?annotator=ann-b", Some("tok-a"), None).await;
    assert_eq!(status, StatusCode::FORBIDDEN);

    let mut matrix: Vec<Vec<u8>> = vec![Vec::new(); 10];
    for (token, name) in ANNOTATORS {
        let (status, listing) = call(&app, "GET", &format!("/tasks?annotator={name}"), Some(token), None).await;
        assert_eq!(status, StatusCode::OK);
        assert_blind(&listing);
        let ids: Vec<String> = listing
            .as_array()
            .unwrap()
            .iter()
            .map(|t| t["id"].as_str().unwrap().to_string())
            .collect();
        assert_eq!(ids.len(), 10);
        for (i, id) in ids.iter().enumerate() {
            let supported = !(i == 4 && name == "ann-c") && i % 2 == 0;
            let verdict = if supported { "supported" } else { "unsupported" };
            matrix[i].push(u8::from(supported));
            let (status, view) = call(
                &app,
                "POST",
                &format!("/tasks/{id}/verdict"),
                Some(token),
                Some(json!({"verdict": verdict, "elapsed_ms": 100_000})),
            )
            .await;
            assert_eq!(status, StatusCode::OK, "{view}");
            assert_blind(&view);
            assert_eq!(view["my_verdict"], verdict);
        }
        let (status, err) = call(
            &app,
            "POST",
            "/tasks/task-00/verdict",
            Some(token),
            Some(json!({"verdict": "unsupported"})),
        )
        .await;
        assert_eq!(status, StatusCode::CONFLICT, "{err}");
        let (_, listing) = call(&app, "GET", "/tasks", Some(token), None).await;
        assert_blind(&listing);
    }

    let (status, err) = call(&app, "GET", "/report", Some(LEAD), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["unresolved"], json!(["task-04"]));
    let (status, _) = call(&app, "GET", "/report", Some("tok-a"), None).await;
    assert_eq!(status, StatusCode::FORBIDDEN);

    let (status, pending) = call(&app, "GET", "/tasks?status=adjudicating", Some(LEAD), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(pending.as_array().unwrap().len(), 1);
    assert_eq!(pending[0]["verdicts"], json!({"ann-a": "supported", "ann-b": "supported", "ann-c": "unsupported"}));
    assert!(pending[0].get("label").is_none());

    let (status, _) = call(
        &app,
        "POST",
        "/tasks/task-00/adjudication",
        Some(LEAD),
        Some(json!({"verdict": "supported"})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = call(
        &app,
        "POST",
        "/tasks/task-04/adjudication",
        Some("tok-a"),
        Some(json!({"verdict": "supported"})),
    )
    .await;
    assert_eq!(status, StatusCode::FORBIDDEN);
    let (status, resolved) = call(
        &app,
        "POST",
        "/tasks/task-04/adjudication",
        Some(LEAD),
        Some(json!({"verdict": "supported"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(resolved["status"], "resolved");

    let (status, report) = call(&app, "GET", "/report", Some(LEAD), None).await;
    assert_eq!(status, StatusCode::OK, "{report}");
    let expected = fleiss_kappa(&matrix).unwrap();
    assert!((report["overall"]["kappa"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert!(report["overall"]["kappa"].as_f64().unwrap() < 1.0);
    assert_eq!(report["overall"]["adjudicated"], 1);
    assert_eq!(report["pipelines"]["d2c"]["kappa"], 1.0);
    let c2d_rows = &matrix[..5];
    let c2d_expected = fleiss_kappa(c2d_rows).unwrap();
    assert!((report["pipelines"]["c2d"]["kappa"].as_f64().unwrap() - c2d_expected).abs() < 1e-12);
    // resolved verdicts are supported exactly on even tasks; stored labels are
    // supported unless the index is a multiple of 3
    let hits = (0..10).filter(|i| (i % 2 == 0) == (i % 3 != 0)).count();
    assert_eq!(report["overall"]["label_accuracy"].as_f64().unwrap(), hits as f64 / 10.0);

    let (status, _) = call(
        &app,
        "POST",
        "/tasks/task-04/verdict",
        Some("tok-a"),
        Some(json!({"verdict": "unsupported"})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = call(&app, "POST", "/tasks/nope/verdict", Some("tok-a"), Some(json!({"verdict": "supported"}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, page) = call(&app, "GET", "/index.html", None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(page, Value::String("<html>ui</html>".into()));

    let cfg = config(dir.path());
    let replayed = Store::open(&cfg.tasks, &cfg.log, 3).unwrap();
    assert_close(&serde_json::to_value(replayed.report().unwrap()).unwrap(), &report);
}

#[tokio::test]
async fn annotator_sees_own_verdict_only() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    call(&app, "POST", "/tasks/task-01/verdict", Some("tok-a"), Some(json!({"verdict": "supported"}))).await;
    let (_, listing) = call(&app, "GET", "/tasks", Some("tok-b"), None).await;
    assert_blind(&listing);
    assert!(listing.as_array().unwrap().iter().all(|t| t["my_verdict"].is_null()));
    let (status, _) = call(
        &app,
        "POST",
        "/tasks/task-01/verdict",
        Some("tok-b"),
        Some(json!({"verdict": "supported", "label": 1})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}
