use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use futures_util::{SinkExt, StreamExt};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tokio_tungstenite::tungstenite::Message;
use tower::ServiceExt;
use tw_core::fixtures::mini_world_game;
use tw_service::{router, AppState, ServiceConfig};

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(match body {
            Some(v) => Body::from(v.to_string()),
            None => Body::empty(),
        })
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

fn app() -> Router {
    router(AppState::new(ServiceConfig::default()))
}

fn kitchen() -> Value {
    serde_json::from_str(&mini_world_game().to_json()).unwrap()
}

async fn create(app: &Router, body: Value) -> (String, Value) {
    let (status, v) = call(app, Method::POST, "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    (v["session_id"].as_str().unwrap().to_string(), v)
}

async fn step(app: &Router, id: &str, input: Value) -> (StatusCode, Value) {
    call(
        app,
        Method::POST,
        &format!("/sessions/{id}/step"),
        Some(json!({ "input": input })),
    )
    .await
}

#[tokio::test]
async fn create_from_level_and_seed() {
    let app = app();
    let (a, first) = create(&app, json!({"level": 5, "seed": 7})).await;
    let (b, second) = create(&app, json!({"level": 5, "seed": 7})).await;
    assert_ne!(a, b);
    assert_eq!(first["observation"], second["observation"]);
    assert_eq!(first["protocol_version"], 1);
    let obs = &first["observation"];
    assert!(obs["objective"].is_string());
    assert!(obs["feedback"].as_str().unwrap().len() > 20);
    assert!(obs.get("admissible_commands").is_none());
    assert!(obs.get("winning_policy").is_none());

    let (status, list) = call(&app, Method::GET, "/sessions", None).await;
    assert_eq!(status, StatusCode::OK);
    let sessions = list["sessions"].as_array().unwrap();
    assert_eq!(sessions.len(), 2);
    assert_eq!(sessions[0]["level"], 5);
    assert_eq!(sessions[0]["seed"], 7);
    assert_eq!(sessions[0]["outcome"], "running");
}

#[tokio::test]
async fn bad_creates_are_structured_errors() {
    let app = app();
    let (status, v) = call(
        &app,
        Method::POST,
        "/sessions",
        Some(json!({"game": "{\"format\": "})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["code"], "invalid_game");
    assert!(!v["error"]["diagnostics"].as_array().unwrap().is_empty());

    let mut broken = kitchen();
    broken["atoms"] = json!(["at(P,kitchen)"]);
    let (status, v) = call(
        &app,
        Method::POST,
        "/sessions",
        Some(json!({ "game": broken })),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
    assert_eq!(v["error"]["code"], "invalid_game");
    let diagnostics = v["error"]["diagnostics"].as_array().unwrap();
    assert!(!diagnostics.is_empty());
    assert!(!diagnostics[0].as_str().unwrap().contains("corrupt"), "{v}");

    for body in [
        json!({}),
        json!({"level": 3, "game": kitchen()}),
        json!({"level": 31}),
        json!({"level": 3, "colour": "red"}),
    ] {
        let (status, v) = call(&app, Method::POST, "/sessions", Some(body.clone())).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert_eq!(v["error"]["code"], "invalid_request");
    }
    let (status, v) = call(
        &app,
        Method::POST,
        "/sessions",
        Some(json!({"protocol_version": 2, "level": 1})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "unsupported_version");
}

#[tokio::test]
async fn unknown_sessions() {
    let app = app();
    let (status, v) = step(&app, "nope", json!("look")).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["code"], "unknown_session");
    for (method, uri) in [
        (Method::GET, "/sessions/nope/map"),
        (Method::GET, "/sessions/nope"),
        (Method::DELETE, "/sessions/nope"),
    ] {
        let (status, v) = call(&app, method, uri, None).await;
        assert_eq!(status, StatusCode::NOT_FOUND);
        assert_eq!(v["error"]["code"], "unknown_session");
    }
}

#[tokio::test]
async fn play_to_the_end_over_http() {
    let app = app();
    let (id, _) = create(&app, json!({"game": kitchen()})).await;
    let (_, v) = step(&app, &id, json!("open fridge")).await;
    assert_eq!(
        (
            v["kind"].as_str(),
            v["reward"].as_i64(),
            v["done"].as_bool()
        ),
        (Some("result"), Some(0), Some(false))
    );
    let (_, v) = step(&app, &id, json!("eat the banana")).await;
    assert_eq!(v["observation"]["error"]["code"], "unknown_noun");
    step(&app, &id, json!("take apple from fridge")).await;
    let (_, v) = step(&app, &id, json!("eat apple")).await;
    assert_eq!(
        (v["reward"].as_i64(), v["done"].as_bool()),
        (Some(1), Some(true))
    );
    assert_eq!(v["observation"]["outcome"], "won");
    let (status, v) = step(&app, &id, json!("look")).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["error"]["code"], "session_finished");

    let (status, _) = call(&app, Method::DELETE, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, _) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn choice_mode() {
    let app = app();
    let (id, v) = create(
        &app,
        json!({"game": kitchen(), "config": {"mode": "choice"}}),
    )
    .await;
    assert_eq!(v["choices"], json!(["open fridge"]));
    let (status, v) = step(&app, &id, json!(1)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "index_out_of_range");
    let (status, v) = step(&app, &id, json!("open fridge")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "wrong_mode");
    let (status, v) = step(&app, &id, json!(0)).await;
    assert_eq!(status, StatusCode::OK);
    assert!(v["choices"]
        .as_array()
        .unwrap()
        .contains(&json!("take apple from fridge")));
}

#[tokio::test]
async fn map_needs_full_state() {
    let app = app();
    let (id, _) = create(&app, json!({"level": 20, "seed": 1})).await;
    let (status, v) = call(&app, Method::GET, &format!("/sessions/{id}/map"), None).await;
    assert_eq!(status, StatusCode::FORBIDDEN);
    assert_eq!(v["error"]["code"], "observability_denied");

    let cfg = json!({"observability": {"full_state": true, "winning_policy": true}});
    let (id, created) = create(&app, json!({"level": 20, "seed": 1, "config": cfg})).await;
    let (status, v) = call(&app, Method::GET, &format!("/sessions/{id}/map"), None).await;
    assert_eq!(status, StatusCode::OK);
    let map = &v["map"];
    let rooms = map["rooms"].as_array().unwrap();
    assert_eq!(rooms.len(), 10);
    assert_eq!(rooms.iter().filter(|r| r["player"] == true).count(), 1);
    assert_eq!(rooms.iter().filter(|r| r["target"] == true).count(), 1);
    assert_eq!(map["quest_targets"].as_array().unwrap().len(), 1);

    let policy = created["observation"]["winning_policy"].as_array().unwrap();
    let go = policy
        .iter()
        .position(|c| c.as_str().unwrap().starts_with("go "))
        .unwrap();
    let mut before = map["player_room"].clone();
    for cmd in &policy[..=go] {
        let (_, v) = call(&app, Method::GET, &format!("/sessions/{id}/map"), None).await;
        before = v["map"]["player_room"].clone();
        step(&app, &id, cmd.clone()).await;
    }
    let (_, v) = call(&app, Method::GET, &format!("/sessions/{id}/map"), None).await;
    assert_ne!(v["map"]["player_room"], before);
}

#[tokio::test]
async fn sessions_are_isolated_and_replayable() {
    let app = app();
    let spec = json!({"level": 12, "seed": 4, "config": {"seed": 9}});
    let (a, _) = create(&app, spec.clone()).await;
    let (b, _) = create(&app, spec).await;
    let inputs = [
        "look",
        "inventory",
        "go north",
        "go east",
        "open chest",
        "take all",
    ];
    let mut ta = Vec::new();
    for i in inputs {
        ta.push(step(&app, &a, json!(i)).await.1);
    }
    let (_, untouched) = call(&app, Method::GET, &format!("/sessions/{b}"), None).await;
    assert_eq!(untouched["observation"]["moves"], 0);
    for (i, expected) in inputs.iter().zip(&ta) {
        assert_eq!(&step(&app, &b, json!(i)).await.1, expected);
    }
}

#[tokio::test]
async fn quota_and_expiry() {
    let app = router(AppState::new(ServiceConfig {
        max_sessions: 1,
        idle_ttl: Duration::from_millis(200),
    }));
    let (id, _) = create(&app, json!({"game": kitchen()})).await;
    let (status, v) = call(
        &app,
        Method::POST,
        "/sessions",
        Some(json!({"game": kitchen()})),
    )
    .await;
    assert_eq!(status, StatusCode::TOO_MANY_REQUESTS);
    assert_eq!(v["error"]["code"], "quota_exceeded");
    tokio::time::sleep(Duration::from_millis(400)).await;
    let (status, _) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    create(&app, json!({"game": kitchen()})).await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_steps_are_serialized() {
    let app = app();
    let (id, _) = create(&app, json!({"level": 1, "seed": 0})).await;
    let tasks: Vec<_> = (0..32)
        .map(|_| {
            let (app, id) = (app.clone(), id.clone());
            tokio::spawn(async move { step(&app, &id, json!("look")).await.1 })
        })
        .collect();
    let mut moves = Vec::new();
    for t in tasks {
        moves.push(t.await.unwrap()["observation"]["moves"].as_u64().unwrap());
    }
    moves.sort();
    assert_eq!(moves, (1..=32).collect::<Vec<u64>>());
}

async fn serve(state: AppState) -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router(state)).await.unwrap() });
    format!("ws://{addr}")
}

type Socket =
    tokio_tungstenite::WebSocketStream<tokio_tungstenite::MaybeTlsStream<tokio::net::TcpStream>>;

async fn recv(ws: &mut Socket) -> Value {
    loop {
        match ws.next().await.unwrap().unwrap() {
            Message::Text(t) => return serde_json::from_str(&t).unwrap(),
            _ => continue,
        }
    }
}

async fn send(ws: &mut Socket, v: Value) {
    ws.send(Message::Text(v.to_string().into())).await.unwrap();
}

#[tokio::test]
async fn play_channel() {
    let state = AppState::new(ServiceConfig::default());
    let app = router(state.clone());
    let base = serve(state).await;
    let (id, _) = create(&app, json!({"game": kitchen()})).await;

    let missing = tokio_tungstenite::connect_async(format!("{base}/sessions/nope/play")).await;
    assert!(missing.is_err());

    let (mut ws, _) = tokio_tungstenite::connect_async(format!("{base}/sessions/{id}/play"))
        .await
        .unwrap();
    send(&mut ws, json!({"kind": "state", "id": "s0"})).await;
    let v = recv(&mut ws).await;
    assert_eq!(
        (v["kind"].as_str(), v["id"].as_str()),
        (Some("state"), Some("s0"))
    );
    assert_eq!(v["observation"]["moves"], 0);

    send(&mut ws, json!({"kind": "teleport", "id": 7})).await;
    let v = recv(&mut ws).await;
    assert_eq!(v["kind"], "error");
    assert_eq!(v["id"], 7);
    assert_eq!(v["error"]["code"], "unknown_kind");

    send(
        &mut ws,
        json!({"kind": "step", "id": 8, "protocol_version": 3, "input": "look"}),
    )
    .await;
    assert_eq!(recv(&mut ws).await["error"]["code"], "unsupported_version");
    send(&mut ws, json!({"kind": "step", "id": 9})).await;
    assert_eq!(recv(&mut ws).await["error"]["code"], "invalid_request");
    ws.send(Message::Text("not json".into())).await.unwrap();
    assert_eq!(recv(&mut ws).await["error"]["code"], "invalid_request");
    send(&mut ws, json!({"kind": "map", "id": 10})).await;
    assert_eq!(recv(&mut ws).await["error"]["code"], "observability_denied");

    let winning = ["open fridge", "take apple from fridge", "eat apple"];
    for (i, cmd) in winning.iter().enumerate() {
        send(&mut ws, json!({"kind": "step", "id": i, "input": cmd})).await;
    }
    for i in 0..3 {
        let v = recv(&mut ws).await;
        assert_eq!(v["kind"], "result");
        assert_eq!(v["id"], i);
        assert_eq!(v["done"], i == 2);
        assert_eq!(v["reward"], if i == 2 { 1 } else { 0 });
    }
    let ev = recv(&mut ws).await;
    assert_eq!(ev["kind"], "event");
    assert_eq!(ev["event"], "game_over");
    assert_eq!(ev["session_id"], id.as_str());
    assert_eq!(ev["outcome"], "won");

    send(
        &mut ws,
        json!({"kind": "step", "id": "late", "input": "look"}),
    )
    .await;
    let v = recv(&mut ws).await;
    assert_eq!(
        (v["id"].as_str(), v["error"]["code"].as_str()),
        (Some("late"), Some("session_finished"))
    );
}

#[tokio::test]
async fn play_channel_keeps_arrival_order() {
    let state = AppState::new(ServiceConfig::default());
    let app = router(state.clone());
    let base = serve(state).await;
    let (id, _) = create(
        &app,
        json!({"level": 3, "seed": 2, "config": {"max_steps": 5000}}),
    )
    .await;
    let (mut ws, _) = tokio_tungstenite::connect_async(format!("{base}/sessions/{id}/play"))
        .await
        .unwrap();
    for i in 0..100 {
        send(
            &mut ws,
            json!({"kind": "step", "id": i, "input": "inventory"}),
        )
        .await;
    }
    for i in 0..100u64 {
        let v = recv(&mut ws).await;
        assert_eq!(v["id"], i);
        assert_eq!(v["observation"]["moves"], i + 1);
    }
}

#[tokio::test]
async fn game_over_reaches_other_channels() {
    let state = AppState::new(ServiceConfig::default());
    let app = router(state.clone());
    let base = serve(state).await;
    let (id, _) = create(&app, json!({"game": kitchen(), "config": {"max_steps": 2}})).await;
    let (mut watcher, _) = tokio_tungstenite::connect_async(format!("{base}/sessions/{id}/play"))
        .await
        .unwrap();
    send(&mut watcher, json!({"kind": "state"})).await;
    recv(&mut watcher).await;
    step(&app, &id, json!("look")).await;
    let (_, v) = step(&app, &id, json!("look")).await;
    assert_eq!(v["observation"]["outcome"], "expired");
    let ev = recv(&mut watcher).await;
    assert_eq!(
        (ev["kind"].as_str(), ev["outcome"].as_str()),
        (Some("event"), Some("expired"))
    );
    assert_eq!(ev["session_id"], id.as_str());
}
