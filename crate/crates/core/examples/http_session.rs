//! Drive the session API in-process: create a torus session, run a search
//! to completion, then replay the event log.
//!
//! cargo run --release --example http_session

use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request};
use axum::Router;
use http_body_util::BodyExt;
use peaceable::board::Board;
use peaceable::interface::http::{replay_log, router, SessionEvent};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> Value {
    let line = format!("{method} {uri}");
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or(Body::empty(), |v| Body::from(v.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    println!("{line:<32} {status}");
    value
}

#[tokio::main]
async fn main() {
    let app = router();
    let created = call(&app, Method::POST, "/session", Some(json!({"topology": "torus", "n": 13}))).await;
    let id = created["id"].as_str().unwrap().to_string();

    let run = json!({"target": 16, "seed": 0, "budget": 60});
    call(&app, Method::POST, &format!("/session/{id}/run"), Some(run)).await;
    let state = loop {
        let s = call(&app, Method::GET, &format!("/session/{id}/state"), None).await;
        if s["search_status"]["state"] != "running" {
            break s;
        }
        std::thread::sleep(Duration::from_millis(200));
    };
    println!("status {}", state["search_status"]);
    println!("counts {}", state["counts"]);

    let log = call(&app, Method::GET, &format!("/session/{id}/events"), None).await;
    let events: Vec<SessionEvent> = log["events"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| serde_json::from_value(e.clone()).unwrap())
        .collect();
    let replayed = replay_log(Board::torus(13).unwrap(), &events).unwrap();
    println!("replayed {} events, min={}", events.len(), replayed.min_count());
}
