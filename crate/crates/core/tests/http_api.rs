use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use peaceable::battle::{hat, is_peaceful, Battle};
use peaceable::board::{Board, Cell};
use peaceable::interface::http::{replay_log, router, SessionEvent};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn create(app: &Router, topology: &str, n: usize) -> String {
    let (status, v) = call(app, Method::POST, "/session", Some(json!({"topology": topology, "n": n}))).await;
    assert_eq!(status, StatusCode::CREATED);
    v["id"].as_str().unwrap().to_string()
}

fn cells(v: &Value) -> Vec<Cell> {
    serde_json::from_value(v.clone()).unwrap()
}

fn battle_of(state: &Value) -> Battle {
    let n = state["n"].as_u64().unwrap() as usize;
    let board = match state["topology"].as_str().unwrap() {
        "grid" => Board::grid(n),
        _ => Board::torus(n),
    }
    .unwrap();
    Battle::new(board, cells(&state["black"]), cells(&state["white"])).unwrap()
}

async fn event_log(app: &Router, id: &str) -> Vec<SessionEvent> {
    let (status, v) = call(app, Method::GET, &format!("/session/{id}/events?since=0"), None).await;
    assert_eq!(status, StatusCode::OK);
    v["events"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            let mut e = e.clone();
            e.as_object_mut().unwrap().remove("seq");
            serde_json::from_value(e).unwrap()
        })
        .collect()
}

async fn wait_idle(app: &Router, id: &str, limit: Duration) -> Value {
    let start = Instant::now();
    loop {
        let (_, v) = call(app, Method::GET, &format!("/session/{id}/state"), None).await;
        if v["search_status"]["state"] != "running" {
            return v;
        }
        assert!(start.elapsed() < limit, "search still running");
        tokio::time::sleep(Duration::from_millis(20)).await;
    }
}

#[tokio::test]
async fn create_starts_empty() {
    let app = router();
    let (status, v) = call(&app, Method::POST, "/session", Some(json!({"topology": "torus", "n": 13}))).await;
    assert_eq!(status, StatusCode::CREATED);
    let state = &v["state"];
    assert_eq!(state["n"], 13);
    assert_eq!(state["topology"], "torus");
    assert_eq!(state["counts"], json!({"black": 0, "white": 0, "min": 0}));
    assert_eq!(state["search_status"]["state"], "idle");
    assert_eq!(state["peaceful"], true);
}

#[tokio::test]
async fn unknown_sessions_and_bad_input() {
    let app = router();
    for (m, uri) in [
        (Method::GET, "/session/nope/state"),
        (Method::POST, "/session/nope/step"),
        (Method::POST, "/session/nope/stop"),
        (Method::DELETE, "/session/nope"),
        (Method::GET, "/session/nope/events"),
    ] {
        assert_eq!(call(&app, m, uri, None).await.0, StatusCode::NOT_FOUND, "{uri}");
    }
    let (status, _) = call(&app, Method::POST, "/session", Some(json!({"topology": "grid", "n": 0}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let id = create(&app, "grid", 4).await;
    let uri = format!("/session/{id}/toggle");
    let (status, v) = call(&app, Method::POST, &uri, Some(json!({"cell": {"row": 5, "col": 1}, "color": "black"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["code"], "invalid");
    let uri = format!("/session/{id}/swap");
    for bad in [json!({"line": "row 9"}), json!({"line": "diag 4"}), json!({"line": "hex 1"})] {
        assert_eq!(call(&app, Method::POST, &uri, Some(bad.clone())).await.0, StatusCode::UNPROCESSABLE_ENTITY, "{bad}");
    }
}

#[tokio::test]
async fn toggle_rejects_attacks_unless_forced() {
    let app = router();
    let id = create(&app, "grid", 5).await;
    let uri = format!("/session/{id}/toggle");
    let (status, v) = call(&app, Method::POST, &uri, Some(json!({"cell": {"row": 1, "col": 1}, "color": "black"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["counts"]["black"], 1);

    // Same diagonal as (1,1).
    let attack = json!({"cell": {"row": 3, "col": 3}, "color": "white"});
    let (status, v) = call(&app, Method::POST, &uri, Some(attack.clone())).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["code"], "not_peaceful");
    assert_eq!(v["witness"]["line"], json!({"kind": "diag", "index": 0}));
    assert_eq!(v["witness"]["black"], json!({"row": 1, "col": 1}));
    assert_eq!(v["witness"]["white"], json!({"row": 3, "col": 3}));

    let mut forced = attack;
    forced["force"] = json!(true);
    let (status, v) = call(&app, Method::POST, &uri, Some(forced)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["peaceful"], false);
    assert_eq!(v["counts"]["min"], 1);

    // Clearing back to a peaceful state.
    let (status, v) = call(&app, Method::POST, &uri, Some(json!({"cell": {"row": 3, "col": 3}, "color": null}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["peaceful"], true);
    assert_eq!(v["counts"]["white"], 0);
}

#[tokio::test]
async fn swap_on_disjoint_line_sets_white_to_hat() {
    let app = router();
    let id = create(&app, "torus", 7).await;
    let toggle = format!("/session/{id}/toggle");
    call(&app, Method::POST, &toggle, Some(json!({"cell": {"row": 2, "col": 3}, "color": "black"}))).await;
    let (_, before) = call(&app, Method::GET, &format!("/session/{id}/state"), None).await;
    let (status, after) = call(&app, Method::POST, &format!("/session/{id}/swap"), Some(json!({"line": "row 5"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(after["black"], before["black"]);
    let b = battle_of(&after);
    assert_eq!(b.white(), &hat(b.board(), b.black()));
    assert_eq!(after["peaceful"], true);

    // The object form of a line is accepted too.
    let (status, v) = call(
        &app,
        Method::POST,
        &format!("/session/{id}/swap"),
        Some(json!({"line": {"kind": "row", "index": 2}})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["counts"]["black"], 0);
    assert_eq!(v["counts"]["white"], 49);
}

#[tokio::test]
async fn step_and_replay() {
    let app = router();
    let id = create(&app, "grid", 6).await;
    let toggle = format!("/session/{id}/toggle");
    for (r, c) in [(1, 1), (1, 2)] {
        call(&app, Method::POST, &toggle, Some(json!({"cell": {"row": r, "col": c}, "color": "black"}))).await;
    }
    call(&app, Method::POST, &format!("/session/{id}/swap"), Some(json!({"line": "skew 9"}))).await;
    let mut last = Value::Null;
    for _ in 0..4 {
        let (status, v) = call(&app, Method::POST, &format!("/session/{id}/step"), None).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(v["peaceful"], true);
        last = v;
    }
    let log = event_log(&app, &id).await;
    let board = Board::grid(6).unwrap();
    assert_eq!(replay_log(board, &log).unwrap(), battle_of(&last));

    let (_, tail) = call(&app, Method::GET, &format!("/session/{id}/events?since=2"), None).await;
    assert_eq!(tail["events"][0]["seq"], 2);
    assert_eq!(tail["next"], log.len());
    let (_, none) = call(&app, Method::GET, &format!("/session/{id}/events?since=999"), None).await;
    assert_eq!(none["events"], json!([]));
}

#[tokio::test]
async fn run_reaches_sixteen_on_torus_thirteen() {
    let app = router();
    let id = create(&app, "torus", 13).await;
    let (status, v) = call(
        &app,
        Method::POST,
        &format!("/session/{id}/run"),
        Some(json!({"target": 16, "seed": 0, "budget": 60})),
    )
    .await;
    assert_eq!(status, StatusCode::ACCEPTED);
    assert_eq!(v["search_status"]["state"], "running");

    let done = wait_idle(&app, &id, Duration::from_secs(90)).await;
    assert_eq!(done["search_status"]["state"], "finished");
    assert_eq!(done["search_status"]["reached_target"], true);
    assert_eq!(done["counts"]["min"], 16);
    assert!(is_peaceful(&battle_of(&done)).peaceful);

    let log = event_log(&app, &id).await;
    assert!(matches!(log.last(), Some(SessionEvent::Search { .. })));
    assert_eq!(replay_log(Board::torus(13).unwrap(), &log).unwrap(), battle_of(&done));
}

#[tokio::test]
async fn running_search_locks_the_session() {
    let app = router();
    let id = create(&app, "torus", 12).await;
    // Unreachable target, so the search runs until stopped.
    let (status, _) = call(
        &app,
        Method::POST,
        &format!("/session/{id}/run"),
        Some(json!({"target": 1000, "seed": 3, "budget": 30})),
    )
    .await;
    assert_eq!(status, StatusCode::ACCEPTED);

    let busy = [
        (format!("/session/{id}/toggle"), Some(json!({"cell": {"row": 1, "col": 1}, "color": "black"}))),
        (format!("/session/{id}/swap"), Some(json!({"line": "row 1"}))),
        (format!("/session/{id}/step"), None),
        (format!("/session/{id}/run"), Some(json!({"target": 5, "seed": 1}))),
    ];
    for (uri, body) in busy {
        let (status, v) = call(&app, Method::POST, &uri, body).await;
        assert_eq!(status, StatusCode::CONFLICT, "{uri}");
        assert_eq!(v["code"], "search_running");
    }
    let (status, _) = call(&app, Method::GET, &format!("/session/{id}/state"), None).await;
    assert_eq!(status, StatusCode::OK);

    let (status, v) = call(&app, Method::POST, &format!("/session/{id}/stop"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["search_status"]["state"], "stopped");
    let stopped = battle_of(&v);
    assert!(is_peaceful(&stopped).peaceful);
    let log = event_log(&app, &id).await;
    assert_eq!(replay_log(Board::torus(12).unwrap(), &log).unwrap(), stopped);

    // Editable again.
    let (status, _) = call(&app, Method::POST, &format!("/session/{id}/step"), None).await;
    assert_eq!(status, StatusCode::OK);

    let (status, _) = call(&app, Method::DELETE, &format!("/session/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    assert_eq!(call(&app, Method::GET, &format!("/session/{id}/state"), None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn delete_stops_a_running_search() {
    let app = router();
    let id = create(&app, "grid", 10).await;
    call(
        &app,
        Method::POST,
        &format!("/session/{id}/run"),
        Some(json!({"target": 1000, "seed": 1, "budget": 30})),
    )
    .await;
    let start = Instant::now();
    let (status, _) = call(&app, Method::DELETE, &format!("/session/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    assert!(start.elapsed() < Duration::from_secs(5));
}
