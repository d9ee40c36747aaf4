//! Websocket host for live sessions.
//!
//! Each participant connects to `/session/<participant_id>`. The connection
//! owns one [`LiveSession`] ticking on a 20 ms timer; closing the socket
//! mid-round archives the round as unfinished, and reconnecting resumes at
//! the next round.

use std::collections::HashSet;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use anyhow::Result;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use futures_util::StreamExt;

use intercept_core::experiment::protocol::ServerMessage;
use intercept_core::experiment::{LiveSession, Phase, SessionPlan};

pub struct ServeConfig {
    pub port: u16,
    pub plans: Vec<SessionPlan>,
    pub archive: PathBuf,
    pub seed: u64,
    pub round_length_s: f64,
}

struct Shared {
    config: ServeConfig,
    active: Mutex<HashSet<String>>,
}

pub fn run(config: ServeConfig) -> Result<()> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?
        .block_on(serve(config))
}

async fn serve(config: ServeConfig) -> Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], config.port));
    let shared = Arc::new(Shared {
        config,
        active: Mutex::new(HashSet::new()),
    });
    let app = Router::new()
        .route("/", get(|| async { "intercept session server\n" }))
        .route("/session/{participant}", get(upgrade))
        .with_state(shared);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    println!("listening on {}", listener.local_addr()?);
    std::io::stdout().flush()?;
    axum::serve(listener, app).await?;
    Ok(())
}

async fn upgrade(
    ws: WebSocketUpgrade,
    Path(participant): Path<String>,
    State(shared): State<Arc<Shared>>,
) -> Response {
    let Some(index) = shared
        .config
        .plans
        .iter()
        .position(|p| p.participant_id == participant)
    else {
        return (StatusCode::NOT_FOUND, "unknown participant").into_response();
    };
    if !shared.active.lock().expect("lock").insert(participant.clone()) {
        return (StatusCode::CONFLICT, "session already connected").into_response();
    }
    ws.on_upgrade(move |socket| async move {
        if let Err(e) = drive(socket, &shared, index).await {
            log::warn!("session {participant}: {e}");
        }
        shared.active.lock().expect("lock").remove(&participant);
    })
}

fn open_session(shared: &Shared, index: usize) -> Result<LiveSession> {
    let cfg = &shared.config;
    let plan = cfg.plans[index].clone();
    let dir = cfg.archive.join(&plan.participant_id);
    let id = format!("{}-{}", plan.participant_id, cfg.seed);
    let seed = cfg.seed + index as u64;
    let session = if dir.join("round_1.jsonl").exists() {
        LiveSession::resume(plan, id, seed, dir)?
    } else {
        LiveSession::new(plan, id, seed, Some(dir))?
    };
    Ok(session.with_round_length(cfg.round_length_s))
}

async fn send_all(socket: &mut WebSocket, frames: Vec<ServerMessage>) -> Result<()> {
    for f in frames {
        socket.send(Message::Text(f.to_text().into())).await?;
    }
    Ok(())
}

async fn drive(mut socket: WebSocket, shared: &Shared, index: usize) -> Result<()> {
    let mut live = match open_session(shared, index) {
        Ok(s) => s,
        Err(e) => {
            let frame = ServerMessage::Error {
                message: e.to_string(),
            };
            send_all(&mut socket, vec![frame]).await?;
            return Ok(());
        }
    };
    let start = live.start()?;
    send_all(&mut socket, start).await?;
    let mut timer = tokio::time::interval(Duration::from_millis(20));
    loop {
        tokio::select! {
            _ = timer.tick() => {
                let frames = live.tick()?;
                send_all(&mut socket, frames).await?;
            }
            incoming = socket.next() => match incoming {
                Some(Ok(Message::Text(text))) => {
                    let frames = live.handle_text(text.as_str());
                    send_all(&mut socket, frames).await?;
                }
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => {
                    live.disconnect()?;
                    return Ok(());
                }
                Some(Ok(_)) => {}
            }
        }
        if live.phase() == Phase::Done {
            socket.send(Message::Close(None)).await.ok();
            return Ok(());
        }
    }
}
