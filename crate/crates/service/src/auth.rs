//! Session tokens. Only SHA-256 digests of tokens are kept, in memory and on
//! disk.

use axum::http::HeaderMap;
use f1champ_core::championship::TeamId;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Role {
    Steward,
    Team { team: TeamId },
}

/// One line of a championship's session file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub token_sha256: String,
    pub role: Role,
}

/// A fresh 128-bit token, hex encoded.
pub fn new_token() -> String {
    hex::encode(rand::random::<[u8; 16]>())
}

pub fn digest(token: &str) -> String {
    hex::encode(Sha256::digest(token.as_bytes()))
}

/// Token from `Authorization: Bearer <token>`.
pub fn bearer(headers: &HeaderMap) -> Option<&str> {
    let value = headers.get(axum::http::header::AUTHORIZATION)?.to_str().ok()?;
    let token = value.strip_prefix("Bearer ")?.trim();
    (!token.is_empty()).then_some(token)
}
