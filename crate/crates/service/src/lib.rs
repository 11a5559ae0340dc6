//! HTTP JSON API for hosting championships.
//!
//! Each championship has one steward token, minted on creation, and one token
//! per registered team. Tokens travel in `Authorization: Bearer <token>`.
//! Every accepted mutation is written to the championship's event log and
//! synced before the response is sent, so a restart rebuilds the exact state
//! by replaying the log.

mod api;
pub mod auth;
pub mod error;
pub mod store;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

pub use api::{
    router, ChampionshipCreated, CreateChampionship, RegisterTeam, SubmissionBody, SubmissionReceipt, TeamRegistered,
    TeamView, VenueInfo, WhatIfRequest, WhatIfResult,
};
pub use auth::Role;
pub use error::ApiError;
use store::Hosted;

/// All championships hosted from one data directory.
pub struct Service {
    data_dir: PathBuf,
    championships: RwLock<HashMap<String, Arc<Mutex<Hosted>>>>,
}

pub type AppState = Arc<Service>;

impl Service {
    /// Open `data_dir`, replaying every championship found in it.
    pub fn open(data_dir: impl AsRef<Path>) -> Result<AppState, ApiError> {
        let data_dir = data_dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&data_dir)?;
        let mut championships = HashMap::new();
        for (id, dir) in store::championship_dirs(&data_dir)? {
            championships.insert(id, Arc::new(Mutex::new(Hosted::load(&dir)?)));
        }
        tracing::info!(
            "loaded {} championships from {}",
            championships.len(),
            data_dir.display()
        );
        Ok(Arc::new(Service {
            data_dir,
            championships: RwLock::new(championships),
        }))
    }

    pub fn data_dir(&self) -> &Path {
        &self.data_dir
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Hosted>>, ApiError> {
        self.championships
            .read()
            .map_err(|_| ApiError::Internal("registry lock poisoned".into()))?
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("championship {id}")))
    }

    fn insert(&self, id: String, hosted: Hosted) -> Result<(), ApiError> {
        self.championships
            .write()
            .map_err(|_| ApiError::Internal("registry lock poisoned".into()))?
            .insert(id, Arc::new(Mutex::new(hosted)));
        Ok(())
    }
}

/// Serve the API on `addr` until the process is stopped.
pub async fn serve(addr: SocketAddr, data_dir: impl AsRef<Path>) -> std::io::Result<()> {
    let state = Service::open(data_dir).map_err(std::io::Error::other)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
