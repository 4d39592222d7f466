//! Session service: HTTP for creating, listing and dropping sessions, and a
//! WebSocket per session for play. The wire format is described in
//! `protocol.md` at the repository root.

mod error;
pub mod map;
pub mod protocol;
mod registry;

use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::Response;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde_json::Value;
use tokio::net::TcpListener;
use tokio::sync::broadcast;
use tw_core::bench::{make_treasure_hunter_with, BenchError};
use tw_core::env::{Env, Mode};
use tw_core::game::GameDefinition;
use tw_core::text::Theme;

pub use error::ServiceError;
pub use map::{snapshot, MapSnapshot};
use protocol::{
    ClientMessage, CreateRequest, CreateResponse, EventKind, Input, ServerMessage, SessionList,
    StepRequest, PROTOCOL_VERSION,
};
pub use registry::{Registry, ServiceConfig, SessionHandle};

#[derive(Clone)]
pub struct AppState {
    registry: Arc<Registry>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState {
            registry: Arc::new(Registry::new(config)),
        }
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create).get(list))
        .route("/sessions/{id}", get(state_of).delete(destroy))
        .route("/sessions/{id}/step", post(step))
        .route("/sessions/{id}/map", get(map))
        .route("/sessions/{id}/play", get(play))
        .with_state(state)
}

/// Serves until the listener fails, sweeping idle sessions in the
/// background.
pub async fn serve(listener: TcpListener, config: ServiceConfig) -> std::io::Result<()> {
    let state = AppState::new(config);
    let registry = state.registry.clone();
    let every = (config.idle_ttl / 2).clamp(Duration::from_millis(10), Duration::from_secs(30));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(every);
        loop {
            tick.tick().await;
            registry.expire();
        }
    });
    axum::serve(listener, router(state)).await
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> Result<T, ServiceError> {
    serde_json::from_slice(body).map_err(|e| ServiceError::InvalidRequest(e.to_string()))
}

fn check_version(v: Option<u32>) -> Result<(), ServiceError> {
    match v {
        Some(v) if v != PROTOCOL_VERSION => Err(ServiceError::UnsupportedVersion(v)),
        _ => Ok(()),
    }
}

fn choices_of(env: &Env) -> Option<Vec<String>> {
    (env.config().mode == Mode::Choice).then(|| env.choices())
}

async fn create(
    State(app): State<AppState>,
    body: Bytes,
) -> Result<(StatusCode, Json<CreateResponse>), ServiceError> {
    let req: CreateRequest = parse_body(&body)?;
    check_version(req.protocol_version)?;
    let game = match (req.level, req.game) {
        (Some(level), None) => {
            let seed = req.seed.unwrap_or(0);
            let theme = req.theme.unwrap_or(Theme::House);
            tokio::task::spawn_blocking(move || make_treasure_hunter_with(level, seed, theme))
                .await
                .map_err(|e| ServiceError::Internal(e.to_string()))?
                .map_err(|e| match e {
                    BenchError::InvalidLevel(_) => ServiceError::InvalidRequest(e.to_string()),
                    other => ServiceError::Internal(other.to_string()),
                })?
        }
        (None, Some(upload)) => {
            let text = match upload {
                Value::String(s) => s,
                other => other.to_string(),
            };
            GameDefinition::from_json(&text)
                .map_err(|e| ServiceError::InvalidGame(vec![e.to_string()]))?
        }
        _ => {
            return Err(ServiceError::InvalidRequest(
                "set exactly one of `level` or `game`".into(),
            ))
        }
    };
    let env = Env::start(game, req.config)?;
    let observation = env.observation().clone();
    let choices = choices_of(&env);
    let config = *env.config();
    let handle = app
        .registry
        .insert(env, req.level, req.level.map(|_| req.seed.unwrap_or(0)))?;
    Ok((
        StatusCode::CREATED,
        Json(CreateResponse {
            protocol_version: PROTOCOL_VERSION,
            session_id: handle.id.clone(),
            observation,
            choices,
            config,
        }),
    ))
}

async fn list(State(app): State<AppState>) -> Json<SessionList> {
    let mut sessions = Vec::new();
    for h in app.registry.handles() {
        sessions.push(h.summary().await);
    }
    Json(SessionList {
        protocol_version: PROTOCOL_VERSION,
        sessions,
    })
}

async fn destroy(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> Result<StatusCode, ServiceError> {
    app.registry.remove(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn state_of(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<ServerMessage>, ServiceError> {
    let handle = app.registry.get(&id)?;
    Ok(Json(current_state(&handle, None).await))
}

async fn step(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<ServerMessage>, ServiceError> {
    let handle = app.registry.get(&id)?;
    let req: StepRequest = parse_body(&body)?;
    check_version(req.protocol_version)?;
    Ok(Json(run_step(&handle, req.input, None).await?))
}

async fn map(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<ServerMessage>, ServiceError> {
    let handle = app.registry.get(&id)?;
    Ok(Json(map_of(&handle, None).await?))
}

async fn current_state(handle: &SessionHandle, id: Option<Value>) -> ServerMessage {
    let env = handle.env.lock().await;
    ServerMessage::State {
        protocol_version: PROTOCOL_VERSION,
        id,
        observation: env.observation().clone(),
        choices: choices_of(&env),
    }
}

async fn map_of(handle: &SessionHandle, id: Option<Value>) -> Result<ServerMessage, ServiceError> {
    let env = handle.env.lock().await;
    if !env.config().observability.full_state {
        return Err(ServiceError::ObservabilityDenied);
    }
    Ok(ServerMessage::Map {
        protocol_version: PROTOCOL_VERSION,
        id,
        map: snapshot(env.game(), env.session().state()),
    })
}

/// Steps under the session lock and announces the end of the game to every
/// play channel of the session.
async fn run_step(
    handle: &SessionHandle,
    input: Input,
    id: Option<Value>,
) -> Result<ServerMessage, ServiceError> {
    let mut env = handle.env.lock().await;
    let r = match input {
        Input::Command(c) => env.step(&c)?,
        Input::Choice(i) => env.step_choice(i)?,
    };
    handle.touch();
    if r.done {
        let s = env.session();
        let _ = handle.events.send(ServerMessage::Event {
            protocol_version: PROTOCOL_VERSION,
            session_id: handle.id.clone(),
            event: EventKind::GameOver,
            outcome: s.outcome(),
            score: s.score(),
            moves: s.moves(),
        });
    }
    Ok(ServerMessage::Result {
        protocol_version: PROTOCOL_VERSION,
        id,
        choices: choices_of(&env),
        observation: r.observation,
        reward: r.reward,
        done: r.done,
    })
}

async fn play(
    State(app): State<AppState>,
    Path(id): Path<String>,
    ws: WebSocketUpgrade,
) -> Result<Response, ServiceError> {
    let handle = app.registry.get(&id)?;
    Ok(ws.on_upgrade(move |socket| play_loop(app, handle, socket)))
}

async fn play_loop(app: AppState, handle: Arc<SessionHandle>, mut socket: WebSocket) {
    let mut events = handle.events.subscribe();
    loop {
        let reply = tokio::select! {
            msg = socket.recv() => match msg {
                Some(Ok(Message::Text(text))) => handle_message(&app, &handle.id, &text).await,
                Some(Ok(Message::Binary(_))) => error_message(
                    None,
                    ServiceError::InvalidRequest("binary frames are not part of the protocol".into()),
                ),
                Some(Ok(Message::Close(_))) | Some(Err(_)) | None => return,
                Some(Ok(_)) => continue,
            },
            ev = events.recv() => match ev {
                Ok(ev) => ev,
                Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => return,
            },
        };
        let text = serde_json::to_string(&reply).expect("messages serialize");
        if socket.send(Message::Text(text.into())).await.is_err() {
            return;
        }
    }
}

fn error_message(id: Option<Value>, e: ServiceError) -> ServerMessage {
    ServerMessage::Error {
        protocol_version: PROTOCOL_VERSION,
        id,
        error: e.body(),
    }
}

/// One reply per request, matched by `id`.
pub async fn handle_message(app: &AppState, session_id: &str, text: &str) -> ServerMessage {
    let raw: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => return error_message(None, ServiceError::InvalidRequest(e.to_string())),
    };
    let id = raw.get("id").cloned();
    match dispatch(app, session_id, raw, id.clone()).await {
        Ok(reply) => reply,
        Err(e) => error_message(id, e),
    }
}

async fn dispatch(
    app: &AppState,
    session_id: &str,
    raw: Value,
    id: Option<Value>,
) -> Result<ServerMessage, ServiceError> {
    check_version(
        raw.get("protocol_version")
            .map(|v| v.as_u64().map_or(0, |v| v as u32)),
    )?;
    let kind = raw
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| ServiceError::InvalidRequest("missing `kind`".into()))?
        .to_string();
    match kind.as_str() {
        "step" | "state" | "map" => {}
        "create" | "list" | "destroy" => {
            return Err(ServiceError::InvalidRequest(format!(
                "`{kind}` is an HTTP request, not a play message"
            )))
        }
        _ => return Err(ServiceError::UnknownKind(kind)),
    }
    let msg: ClientMessage =
        serde_json::from_value(raw).map_err(|e| ServiceError::InvalidRequest(e.to_string()))?;
    let handle = app.registry.get(session_id)?;
    match msg {
        ClientMessage::Step { input, .. } => run_step(&handle, input, id).await,
        ClientMessage::State { .. } => Ok(current_state(&handle, id).await),
        ClientMessage::Map { .. } => map_of(&handle, id).await,
    }
}
