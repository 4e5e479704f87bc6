mod common;

use std::sync::Arc;

use common::{agent, fixture_config, json_of, spawn};
use rulebridge::pipeline::Translator;
use rulebridge::records::render_canonical;
use rulebridge::rulestore::TranslatedRuleDoc;
use rulebridge::Method;
use rulebridge_service::api::{router, ApiError};
use rulebridge_service::engine::Engine;
use serde_json::{json, Value};

const TOKEN: &str = "test-token";

fn server(configure: impl FnOnce(&mut rulebridge::config::Config)) -> (String, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let mut config = fixture_config(Some(&dir.path().join("store.jsonl")));
    config.server.token = Some(TOKEN.into());
    configure(&mut config);
    let engine = Engine::load(config).unwrap();
    (spawn(router(Arc::new(engine))), dir)
}

fn post(base: &str, path: &str, body: Value, token: Option<&str>) -> (u16, Value) {
    let mut req = agent().post(format!("{base}{path}")).header("content-type", "application/json");
    if let Some(t) = token {
        req = req.header("authorization", format!("Bearer {t}"));
    }
    json_of(req.send(body.to_string().as_bytes()))
}

fn get(base: &str, path: &str) -> (u16, Value) {
    json_of(agent().get(format!("{base}{path}")).call())
}

fn assert_error(resp: (u16, Value), status: u16, code: &str) {
    assert_eq!(resp.0, status, "{}", resp.1);
    assert_eq!(resp.1["code"], code);
    assert!(ApiError::CODES.contains(&code));
    assert!(resp.1["message"].as_str().is_some_and(|m| !m.is_empty()));
}

fn names(result: &Value) -> Vec<String> {
    result["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["candidate_name"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn health_reports_corpus_sizes() {
    let (base, _dir) = server(|_| {});
    let (status, body) = get(&base, "/api/health");
    assert_eq!(status, 200);
    assert_eq!(body["status"], "ok");
    assert_eq!((body["triggers"].as_u64(), body["actions"].as_u64()), (Some(24), Some(20)));
    assert_eq!(body["ontology"]["triggers"], 29);
}

#[test]
fn translate_and_errors() {
    let (base, _dir) = server(|_| {});
    let (status, body) = post(
        &base,
        "/api/translate",
        json!({"name": "A C turned off", "kind": "trigger", "method": "combined"}),
        None,
    );
    assert_eq!(status, 200, "{body}");
    assert_eq!(names(&body)[0], "Device Turned Off");
    assert_eq!(body["candidates"][0]["rank"], 1);

    let (_, limited) = post(&base, "/api/translate", json!({"name": "Any event starts", "kind": "trigger", "top_n": 2}), None);
    assert_eq!(names(&limited).len(), 2);

    assert_error(post(&base, "/api/translate", json!({"name": "x", "kind": "widget"}), None), 400, "invalid-kind");
    assert_error(
        post(&base, "/api/translate", json!({"name": "x", "kind": "trigger", "method": "magic"}), None),
        400,
        "invalid-method",
    );
    assert_error(post(&base, "/api/translate", json!({"kind": "trigger"}), None), 400, "invalid-request");
    assert_error(get(&base, "/api/catalog/widget"), 400, "invalid-kind");
    assert_error(get(&base, "/api/nowhere"), 404, "not-found");
}

#[test]
fn catalog_lists_terms() {
    let (base, _dir) = server(|_| {});
    let (status, body) = get(&base, "/api/catalog/actions");
    assert_eq!(status, 200);
    assert_eq!(body["kind"], "action");
    assert_eq!(body["terms"].as_array().unwrap().len(), 20);
    assert!(body["ontology"].as_array().unwrap().contains(&json!("Send Notification")));
}

#[test]
fn reviews_pin_and_suppress() {
    let (base, _dir) = server(|_| {});
    let chosen = json!({
        "source_name": "A C turned off",
        "kind": "trigger",
        "verdict": "chosen",
        "candidate": "Air Purifier Enabled",
        "accuracy": "accurate",
        "method": "combined",
        "reviewer": "r1"
    });
    assert_error(post(&base, "/api/reviews", chosen.clone(), None), 401, "unauthorized");
    assert_error(post(&base, "/api/reviews", chosen.clone(), Some("wrong")), 401, "unauthorized");
    let (status, stored) = post(&base, "/api/reviews", chosen, Some(TOKEN));
    assert_eq!(status, 201, "{stored}");

    let (_, list) = get(&base, "/api/reviews");
    assert_eq!(list.as_array().unwrap().len(), 1);
    assert_eq!(list[0]["candidate"], "Air Purifier Enabled");

    let (_, body) = post(&base, "/api/translate", json!({"name": "A C turned off", "kind": "trigger"}), None);
    assert_eq!(names(&body)[0], "Air Purifier Enabled");
    assert_eq!(body["candidates"][0]["pinned_by_review"], true);

    let none = json!({"source_name": "Send a notification", "kind": "action", "verdict": "none_suitable"});
    assert_eq!(post(&base, "/api/reviews", none, Some(TOKEN)).0, 201);
    let (_, body) = post(&base, "/api/translate", json!({"name": "Send a notification", "kind": "action"}), None);
    assert_eq!(body["no_result"], true);
    assert!(names(&body).is_empty());

    let bad = json!({"source_name": "x", "kind": "trigger", "verdict": "chosen", "candidate": "Not A Term"});
    assert_error(post(&base, "/api/reviews", bad, Some(TOKEN)), 400, "invalid-request");
}

#[test]
fn rules_round_trip_with_revisions() {
    let (base, _dir) = server(|_| {});
    let doc = TranslatedRuleDoc::new("ifttt", "A C turned off", "Send a notification", Method::Combined);
    let put = |body: &TranslatedRuleDoc, token| {
        let mut req = agent()
            .put(format!("{base}/api/rules/{}", body.id))
            .header("content-type", "application/json");
        if let Some(t) = token {
            req = req.header("authorization", format!("Bearer {t}"));
        }
        json_of(req.send(serde_json::to_vec(body).unwrap().as_slice()))
    };
    assert_error(put(&doc, None), 401, "unauthorized");
    let (status, stored) = put(&doc, Some(TOKEN));
    assert_eq!(status, 200, "{stored}");
    assert_eq!(stored["revision"], 1);

    let (status, fetched) = get(&base, &format!("/api/rules/{}", doc.id));
    assert_eq!(status, 200);
    assert_eq!(fetched, stored);

    let resp = put(&doc, Some(TOKEN));
    assert_error(resp.clone(), 409, "revision-conflict");
    assert_eq!(resp.1["detail"]["stored_revision"], 1);

    assert_error(get(&base, "/api/rules/missing"), 404, "not-found");
}

#[test]
fn stored_results_and_ui() {
    let dir = tempfile::tempdir().unwrap();
    let ui = dir.path().join("ui");
    std::fs::create_dir(&ui).unwrap();
    std::fs::write(ui.join("index.html"), "<html>review</html>").unwrap();
    let results = dir.path().join("results.jsonl");
    {
        let config = fixture_config(None);
        let engine = Engine::load(config).unwrap();
        let catalog = engine.catalog.as_ref().unwrap();
        let t: Translator<'_, _, _> = engine.translator();
        std::fs::write(&results, render_canonical(&t.translate_batch(catalog, Method::Combined).results)).unwrap();
    }
    let (base, _store) = server(|c| {
        c.corpus.results = Some(results.clone());
        c.server.ui_dir = Some(ui.clone());
    });
    let (status, body) = get(&base, "/api/results?kind=trigger&name=A%20C%20turned%20off");
    assert_eq!(status, 200, "{body}");
    assert_eq!(body.as_array().unwrap().len(), 1);
    assert_eq!(names(&body[0])[0], "Device Turned Off");
    let (_, all) = get(&base, "/api/results?kind=action");
    assert_eq!(all.as_array().unwrap().len(), 20);
    assert_error(get(&base, "/api/results?name=Unknown"), 404, "not-found");
    assert_error(get(&base, "/api/results?kind=nope"), 400, "invalid-kind");

    let (status, page) = json_of(agent().get(format!("{base}/ui/index.html")).call());
    assert_eq!(status, 200);
    assert_eq!(page, Value::String("<html>review</html>".into()));
}
