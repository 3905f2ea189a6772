use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use pecr::kernel::{Justification, ProofScript};
use pecr::theory::BUNDLED_THEORIES;
use pecr::Theory;
use pecr_cli::service::{router, AppState, OptionsView, RuleView, SessionView};
use pecr_cli::verify::verify;
use serde_json::{json, Value};
use tower::ServiceExt;

fn state(dir: Option<&Path>) -> Arc<AppState> {
    let theories = BUNDLED_THEORIES.iter().map(|n| Theory::bundled(n).unwrap()).collect();
    AppState::new(theories, dir.map(Path::to_path_buf)).unwrap()
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or_else(Body::empty, |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, v)
}

async fn create(app: &Router, theory: &str, premises: &[&str]) -> SessionView {
    let (s, v) = call(app, "POST", "/sessions", Some(json!({ "theory": theory, "premises": premises }))).await;
    assert_eq!(s, StatusCode::CREATED, "{v}");
    serde_json::from_value(v).unwrap()
}

async fn options(app: &Router, id: &str) -> OptionsView {
    let (s, v) = call(app, "GET", &format!("/sessions/{id}/options"), None).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    serde_json::from_value(v).unwrap()
}

fn corpus(th: &Theory, name: &str) -> Vec<ProofScript> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name);
    let mut files: Vec<_> = std::fs::read_dir(root).unwrap().map(|e| e.unwrap().path()).collect();
    files.retain(|p| p.extension().is_some_and(|e| e == "prf"));
    files.sort();
    files.iter().flat_map(|f| ProofScript::parse_all(&std::fs::read_to_string(f).unwrap(), th).unwrap()).collect()
}

#[tokio::test]
async fn thm17_replays_through_split_and_contract() {
    let app = router(state(None));
    let s = create(&app, "int", &["neq [a 0] [ ]", "mult [a a] [b]"]).await;
    let base = format!("/sessions/{}", s.id);
    let (st, v) = call(&app, "POST", &format!("{base}/split"), Some(json!({ "line": 1, "version": 0 }))).await;
    assert_eq!(st, StatusCode::OK, "{v}");
    let after: SessionView = serde_json::from_value(v).unwrap();
    assert_eq!(after.branches.len(), 1);
    assert_eq!(after.branches[0].operands.len(), 2);
    let (st, v) = call(&app, "POST", &format!("{base}/contract"), Some(json!({ "line": 1, "lemmaA": "lem2", "lemmaB": "lem1" }))).await;
    assert_eq!(st, StatusCode::OK, "{v}");
    let done: SessionView = serde_json::from_value(v).unwrap();
    assert_eq!(done.lines.last().unwrap().stmt, "lt [0 b] [ ]");
    assert_eq!(done.lines.last().unwrap().justification.as_deref(), Some("disj [lem2 lem1]"));
    let (st, v) = call(&app, "POST", &format!("{base}/extract"), Some(json!({ "label": "thm17" }))).await;
    assert_eq!(st, StatusCode::OK, "{v}");
    let got: RuleView = serde_json::from_value(v).unwrap();
    let (st, v) = call(&app, "GET", "/theories/int/rules/thm17", None).await;
    assert_eq!(st, StatusCode::OK);
    let stored: RuleView = serde_json::from_value(v).unwrap();
    assert_eq!(got, stored);
}

#[tokio::test]
async fn options_after_add_include_commutativity() {
    let app = router(state(None));
    let s = create(&app, "int", &["add [a b] [c]"]).await;
    let opts = options(&app, &s.id).await;
    let comm = opts.options.iter().find(|o| o.label == "axi2a").expect("axi2a option");
    assert_eq!(comm.refs, vec![1]);
    assert!(comm.stmt.starts_with("add [b a] ["));
    assert!(opts.options.iter().any(|o| o.justification == "aio [1]"));
}

#[tokio::test]
async fn applying_an_absent_statement_is_unprocessable() {
    let app = router(state(None));
    let s = create(&app, "int", &["add [a b] [c]"]).await;
    let uri = format!("/sessions/{}/apply", s.id);
    let (st, v) = call(&app, "POST", &uri, Some(json!({ "literal": "add [a a] [d]  axi2a [1]" }))).await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["kind"], "NotAnOption");
    let (st, v) = call(&app, "POST", &uri, Some(json!({ "literal": "add [b a] [d]  axi2a [1]" }))).await;
    assert_eq!(st, StatusCode::OK, "{v}");
    assert_eq!(v["version"], 1);
}

#[tokio::test]
async fn stale_options_and_versions_conflict() {
    let app = router(state(None));
    let s = create(&app, "int", &["add [a b] [c]"]).await;
    let uri = format!("/sessions/{}/apply", s.id);
    let before = options(&app, &s.id).await;
    let first = &before.options[0];
    let (st, _) = call(&app, "POST", &uri, Some(json!({ "option": first.id, "index": first.index, "version": 0 }))).await;
    assert_eq!(st, StatusCode::OK);
    let (st, v) = call(&app, "POST", &uri, Some(json!({ "option": before.options[1].id }))).await;
    assert_eq!(st, StatusCode::CONFLICT, "{v}");
    let (st, v) = call(&app, "POST", &uri, Some(json!({ "index": 0, "version": 0 }))).await;
    assert_eq!(st, StatusCode::CONFLICT);
    assert_eq!(v["error"]["kind"], "VersionConflict");
    let (st, _) = call(&app, "POST", &uri, Some(json!({ "index": 0, "option": before.options[0].id }))).await;
    assert_eq!(st, StatusCode::CONFLICT);
}

#[tokio::test]
async fn unknown_ids_and_labels_are_not_found() {
    let app = router(state(None));
    assert_eq!(call(&app, "GET", "/sessions/nope", None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "GET", "/sessions/nope/options", None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "GET", "/theories/int/rules/thm999", None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "GET", "/theories/reals/rules/axi1", None).await.0, StatusCode::NOT_FOUND);
    let (st, _) = call(&app, "POST", "/sessions", Some(json!({ "theory": "reals", "premises": ["add [a b] [c]"] }))).await;
    assert_eq!(st, StatusCode::NOT_FOUND);
    let (st, v) = call(&app, "POST", "/sessions", Some(json!({ "theory": "int", "premises": ["add [a b] [a]"] }))).await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
}

#[tokio::test]
async fn theories_are_listed_with_their_rules() {
    let app = router(state(None));
    let (st, v) = call(&app, "GET", "/theories", None).await;
    assert_eq!(st, StatusCode::OK);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|t| t["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["int", "meta", "rat", "sets", "vec"]);
    let (_, rule) = call(&app, "GET", "/theories/int/rules/axi2a", None).await;
    assert_eq!(rule["premise"], json!(["add [a b] [c]"]));
    assert_eq!(rule["conclusion"], json!(["add [b a] [d]"]));
    assert_eq!(rule["kind"], "axiom");
}

#[tokio::test]
async fn eval_reports_outputs_and_errors() {
    let app = router(state(None));
    let body = json!({ "theory": "int", "program": "add [a b] [c]", "env": { "a": 70, "b": 50 } });
    let (st, v) = call(&app, "POST", "/eval", Some(body.clone())).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(v["outputs"], json!({ "c": "120" }));
    let mut capped = body;
    capped["nint"] = json!(100);
    let (st, v) = call(&app, "POST", "/eval", Some(capped)).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(v["error"]["kind"], "Overflow");
    let (st, _) = call(&app, "POST", "/eval", Some(json!({ "theory": "int", "program": "add [a b", "env": "" }))).await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY);
}

/// Replays a script line by line: literals for rule lines, split for stars,
/// contract for disjunction lines.
async fn replay(app: &Router, theory: &str, s: &ProofScript) -> Value {
    let premises: Vec<String> = s.premise.stmts.iter().map(|p| p.to_string()).collect();
    let premises: Vec<&str> = premises.iter().map(String::as_str).collect();
    let view = create(app, theory, &premises).await;
    let base = format!("/sessions/{}", view.id);
    let mut starred = Vec::new();
    for (k, l) in s.lines.iter().enumerate() {
        match &l.just {
            None => {}
            Some(Justification::Disj { left, right }) => {
                let mut done = false;
                for &line in &starred {
                    let body = json!({ "line": line, "lemmaA": left, "lemmaB": right, "stmt": l.text() });
                    if call(app, "POST", &format!("{base}/contract"), Some(body)).await.0 == StatusCode::OK {
                        done = true;
                        break;
                    }
                }
                assert!(done, "{} line {}", s.label, l.number);
            }
            Some(j) => {
                let body = json!({ "literal": format!("{}  {j}", l.text()) });
                let (st, v) = call(app, "POST", &format!("{base}/apply"), Some(body)).await;
                assert_eq!(st, StatusCode::OK, "{} line {}: {v}", s.label, l.number);
            }
        }
        if l.star {
            let (st, v) = call(app, "POST", &format!("{base}/split"), Some(json!({ "line": k + 1 }))).await;
            assert_eq!(st, StatusCode::OK, "{v}");
            starred.push(k + 1);
        }
    }
    let kind = serde_json::to_value(s.kind).unwrap();
    let (st, v) = call(app, "POST", &format!("{base}/extract"), Some(json!({ "label": s.label, "kind": kind }))).await;
    assert_eq!(st, StatusCode::OK, "{}: {v}", s.label);
    v
}

#[tokio::test]
async fn api_replay_matches_batch_extraction() {
    let app = router(state(None));
    for name in ["int", "vec", "meta", "sets"] {
        let th = Theory::bundled(name).unwrap();
        let scripts = corpus(&th, name);
        let batch = verify(&th, &scripts).unwrap();
        for (s, v) in scripts.iter().zip(&batch) {
            let expected = RuleView::from(v.theorem.as_ref().unwrap());
            let got: RuleView = serde_json::from_value(replay(&app, name, s).await).unwrap();
            assert_eq!(got, expected, "{name} {}", s.label);
        }
    }
}

#[tokio::test]
async fn sessions_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(state(Some(dir.path())));
    let s = create(&app, "int", &["neq [a 0] [ ]", "mult [a a] [b]"]).await;
    let uri = format!("/sessions/{}", s.id);
    call(&app, "POST", &format!("{uri}/split"), Some(json!({ "line": 1 }))).await;
    let (st, _) = call(&app, "POST", &format!("{uri}/apply"), Some(json!({ "literal": "typei [a] [ ]  aio [1]" }))).await;
    assert_eq!(st, StatusCode::OK);
    let before = options(&app, &s.id).await;
    let (_, view_before) = call(&app, "GET", &uri, None).await;
    drop(app);

    let restarted = state(Some(dir.path()));
    assert_eq!(restarted.session_ids(), vec![s.id.clone()]);
    let app = router(restarted);
    assert_eq!(options(&app, &s.id).await, before);
    assert_eq!(call(&app, "GET", &uri, None).await.1, view_before);
    let (st, _) = call(&app, "POST", &format!("{uri}/apply"), Some(json!({ "option": before.options[0].id }))).await;
    assert_eq!(st, StatusCode::OK);
}

#[tokio::test]
async fn extract_can_store_the_theorem() {
    let app = router(state(None));
    let s = create(&app, "int", &["add [a b] [c]"]).await;
    let base = format!("/sessions/{}", s.id);
    call(&app, "POST", &format!("{base}/apply"), Some(json!({ "literal": "add [b a] [d]  axi2a [1]" }))).await;
    let body = json!({ "label": "comm", "store": true });
    let (st, v) = call(&app, "POST", &format!("{base}/extract"), Some(body.clone())).await;
    assert_eq!(st, StatusCode::OK, "{v}");
    assert_eq!(v["tcl"], json!(["axi2a"]));
    assert_eq!(call(&app, "GET", "/theories/int/rules/comm", None).await.0, StatusCode::OK);
    assert_eq!(call(&app, "POST", &format!("{base}/extract"), Some(body)).await.0, StatusCode::CONFLICT);
}

#[tokio::test]
async fn service_and_cli_verdicts_agree() {
    let app = router(state(None));
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus/int");
    let good = std::fs::read_to_string(root.join("thm1.prf")).unwrap();
    let bad = std::fs::read_to_string(root.join("thm2.prf")).unwrap().replace(" 16 add [d c] [l]", " 16 add [c d] [l]");
    let dir = tempfile::tempdir().unwrap();
    let int = dir.path().join("int");
    std::fs::create_dir(&int).unwrap();
    std::fs::write(int.join("thm1.prf"), &good).unwrap();
    std::fs::write(int.join("thm2.prf"), &bad).unwrap();

    let (st, v) = call(&app, "POST", "/check", Some(json!({ "theory": "int", "proofs": format!("{good}\n{bad}") }))).await;
    assert_eq!(st, StatusCode::OK, "{v}");
    let service: Vec<(String, bool)> =
        v.as_array().unwrap().iter().map(|p| (p["label"].as_str().unwrap().to_string(), p["error"].is_null())).collect();

    let (mut out, mut err) = (Vec::new(), Vec::new());
    let files = [int.join("thm1.prf"), int.join("thm2.prf")];
    let code = pecr_cli::run(
        ["pecr", "--format", "lines", "check", files[0].to_str().unwrap(), files[1].to_str().unwrap()],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 3);
    let cli: Vec<(String, bool)> = String::from_utf8(out)
        .unwrap()
        .lines()
        .filter_map(|l| l.strip_prefix("proof "))
        .map(|l| {
            let mut w = l.split_whitespace();
            (w.next().unwrap().to_string(), w.next() == Some("ok"))
        })
        .collect();
    assert_eq!(service, cli);
    assert_eq!(cli, vec![("thm1".to_string(), true), ("thm2".to_string(), false)]);
}
