//! HTTP/JSON session service.
//!
//! Sessions are independent; each sits behind its own mutex so mutations
//! on one session are serialized while reads work on cloned snapshots.
//! Options are recomputed on every request.

mod api;
mod store;

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::routing::{get, post};
use axum::Router;
use pecr::Theory;

pub use api::{
    ApplyRequest, CheckRequest, ContractRequest, CreateSession, EvalRequest, ExtractRequest, LineView, OptionView, OptionsView,
    RuleView, SessionView, SplitRequest, TheoryView,
};
pub use store::{SessionDir, SessionRecord};

use crate::config::Global;
use crate::error::CliError;

pub struct AppState {
    theories: RwLock<BTreeMap<String, Arc<Theory>>>,
    sessions: RwLock<HashMap<String, Arc<Mutex<SessionRecord>>>>,
    dir: Option<SessionDir>,
}

impl AppState {
    /// Every theory reachable through `g`, with sessions restored from `sessions_dir`.
    pub fn load(g: &Global, sessions_dir: Option<PathBuf>) -> Result<Arc<AppState>, CliError> {
        let theories = g.theory_names().iter().map(|n| g.load(n)).collect::<Result<Vec<_>, _>>()?;
        AppState::new(theories, sessions_dir)
    }

    pub fn new(theories: Vec<Theory>, sessions_dir: Option<PathBuf>) -> Result<Arc<AppState>, CliError> {
        let dir = sessions_dir.map(|d| SessionDir::open(&d)).transpose()?;
        let mut sessions = HashMap::new();
        if let Some(d) = &dir {
            for rec in d.load_all()? {
                sessions.insert(rec.id.clone(), Arc::new(Mutex::new(rec)));
            }
        }
        Ok(Arc::new(AppState {
            theories: RwLock::new(theories.into_iter().map(|t| (t.name.clone(), Arc::new(t))).collect()),
            sessions: RwLock::new(sessions),
            dir,
        }))
    }

    pub fn theory(&self, name: &str) -> Option<Arc<Theory>> {
        self.theories.read().expect("theory lock poisoned").get(name).cloned()
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().expect("session lock poisoned").keys().cloned().collect();
        ids.sort();
        ids
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(api::create_session))
        .route("/sessions/{id}", get(api::get_session))
        .route("/sessions/{id}/options", get(api::get_options))
        .route("/sessions/{id}/apply", post(api::apply))
        .route("/sessions/{id}/split", post(api::split))
        .route("/sessions/{id}/contract", post(api::contract))
        .route("/sessions/{id}/extract", post(api::extract))
        .route("/theories", get(api::list_theories))
        .route("/theories/{name}/rules/{label}", get(api::get_rule))
        .route("/eval", post(api::eval))
        .route("/check", post(api::check))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> Result<(), CliError> {
    let _ = tracing_subscriber::fmt().with_writer(std::io::stderr).try_init();
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
