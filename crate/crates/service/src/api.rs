use axum::extract::{Path, State};
use axum::http::{HeaderMap, StatusCode};
use axum::routing::{get, post};
use axum::{Json, Router};
use f1champ_core::championship::{validate_submission, Classification, Rules, Standing, Submission, TeamId, TeamState};
use f1champ_core::geometry::Circuit;
use f1champ_core::sim::{run_race, CarState, RacePlan, RaceResult};
use f1champ_core::strategy::{apply_expenditure, Expenditure};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::auth::{bearer, digest, new_token, Role};
use crate::error::ApiError;
use crate::store::Hosted;
use crate::AppState;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/championships", post(create_championship))
        .route("/championships/{c}/teams", post(register_team))
        .route("/championships/{c}/circuits", get(circuits))
        .route("/championships/{c}/rules", get(rules))
        .route("/championships/{c}/me", get(me))
        .route("/championships/{c}/races/{i}/submission", post(submit))
        .route("/championships/{c}/whatif", post(whatif))
        .route("/championships/{c}/races/{i}/run", post(run))
        .route("/championships/{c}/races/{i}/results", get(results))
        .route("/championships/{c}/standings", get(standings))
        .with_state(state)
}

#[derive(Debug, Default, Deserialize)]
pub struct CreateChampionship {
    /// Rules with circuits inline; the shipped season when absent.
    #[serde(default)]
    pub rules: Option<Rules>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ChampionshipCreated {
    pub championship_id: String,
    pub steward_token: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RegisterTeam {
    pub name: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TeamRegistered {
    pub team_id: TeamId,
    pub name: String,
    pub token: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VenueInfo {
    pub race: usize,
    pub circuit: Circuit,
    pub reference_time_s: f64,
    pub reference_stops: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SubmissionBody {
    pub expenditure: Expenditure,
    pub race_plan: RacePlan,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SubmissionReceipt {
    pub team_id: TeamId,
    pub race: usize,
    pub seq: u64,
    pub submission_sha256: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WhatIfRequest {
    pub race: usize,
    /// Spend on top of the team's current car, at this race's prices.
    #[serde(default)]
    pub expenditure: Expenditure,
    pub race_plan: RacePlan,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WhatIfResult {
    pub race: usize,
    pub car: CarState,
    pub result: RaceResult,
}

/// The requesting team's own view: car, spend, history and pending entry.
#[derive(Debug, Serialize, Deserialize)]
pub struct TeamView {
    pub team: TeamState,
    pub pending: Option<Submission>,
    pub next_race: Option<usize>,
}

fn role(h: &Hosted, headers: &HeaderMap) -> Result<Role, ApiError> {
    let token = bearer(headers).ok_or(ApiError::Unauthorized)?;
    h.role_of(&digest(token)).ok_or(ApiError::Unauthorized)
}

fn steward(h: &Hosted, headers: &HeaderMap) -> Result<(), ApiError> {
    match role(h, headers)? {
        Role::Steward => Ok(()),
        Role::Team { .. } => Err(ApiError::Forbidden("steward")),
    }
}

fn team(h: &Hosted, headers: &HeaderMap) -> Result<TeamId, ApiError> {
    match role(h, headers)? {
        Role::Team { team } => Ok(team),
        Role::Steward => Err(ApiError::Forbidden("team")),
    }
}

/// Run `f` on one championship under its lock, off the async workers.
async fn with_championship<T: Send + 'static>(
    state: &AppState,
    id: &str,
    f: impl FnOnce(&mut Hosted) -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    let hosted = state.get(id)?;
    tokio::task::spawn_blocking(move || {
        let mut guard = hosted
            .lock()
            .map_err(|_| ApiError::Internal("championship lock poisoned".into()))?;
        f(&mut guard)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))?
}

async fn create_championship(
    State(state): State<AppState>,
    body: Option<Json<CreateChampionship>>,
) -> Result<(StatusCode, Json<ChampionshipCreated>), ApiError> {
    let rules = match body.and_then(|Json(b)| b.rules) {
        Some(r) => r.validate().map_err(|e| ApiError::Invalid(e.to_string()))?,
        None => Rules::shipped(),
    };
    let id = hex::encode(rand::random::<[u8; 16]>());
    let token = new_token();
    let token_sha256 = digest(&token);
    let dir = state.data_dir().join(&id);
    let hosted = tokio::task::spawn_blocking(move || -> Result<Hosted, ApiError> {
        let mut hosted = Hosted::create(&dir, rules)?;
        hosted.add_session(token_sha256, Role::Steward)?;
        Ok(hosted)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))??;
    state.insert(id.clone(), hosted)?;
    tracing::info!("created championship {id}");
    Ok((
        StatusCode::CREATED,
        Json(ChampionshipCreated {
            championship_id: id,
            steward_token: token,
        }),
    ))
}

async fn register_team(
    State(state): State<AppState>,
    Path(c): Path<String>,
    headers: HeaderMap,
    Json(body): Json<RegisterTeam>,
) -> Result<(StatusCode, Json<TeamRegistered>), ApiError> {
    let out = with_championship(&state, &c, move |h| {
        steward(h, &headers)?;
        let (team_id, event) = h.championship.register_team(&body.name)?;
        h.append(event)?;
        let token = new_token();
        h.add_session(digest(&token), Role::Team { team: team_id })?;
        let name = h.championship.team(team_id).map(|t| t.name.clone()).unwrap_or_default();
        Ok(TeamRegistered { team_id, name, token })
    })
    .await?;
    Ok((StatusCode::CREATED, Json(out)))
}

async fn circuits(
    State(state): State<AppState>,
    Path(c): Path<String>,
    headers: HeaderMap,
) -> Result<Json<Vec<VenueInfo>>, ApiError> {
    let out = with_championship(&state, &c, move |h| {
        role(h, &headers)?;
        Ok(h.championship
            .rules()
            .races
            .iter()
            .enumerate()
            .map(|(i, v)| VenueInfo {
                race: i + 1,
                circuit: v.circuit.clone(),
                reference_time_s: v.reference_time_s,
                reference_stops: v.reference_stops,
            })
            .collect())
    })
    .await?;
    Ok(Json(out))
}

async fn rules(
    State(state): State<AppState>,
    Path(c): Path<String>,
    headers: HeaderMap,
) -> Result<Json<Rules>, ApiError> {
    let out = with_championship(&state, &c, move |h| {
        role(h, &headers)?;
        Ok(h.championship.rules().clone())
    })
    .await?;
    Ok(Json(out))
}

async fn me(
    State(state): State<AppState>,
    Path(c): Path<String>,
    headers: HeaderMap,
) -> Result<Json<TeamView>, ApiError> {
    let out = with_championship(&state, &c, move |h| {
        let id = team(h, &headers)?;
        let state = h
            .championship
            .team(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("team {id}")))?;
        Ok(TeamView {
            team: state,
            pending: h.championship.pending_submission(id).cloned(),
            next_race: h.championship.next_race(),
        })
    })
    .await?;
    Ok(Json(out))
}

async fn submit(
    State(state): State<AppState>,
    Path((c, race)): Path<(String, usize)>,
    headers: HeaderMap,
    Json(body): Json<SubmissionBody>,
) -> Result<Json<SubmissionReceipt>, ApiError> {
    let out = with_championship(&state, &c, move |h| {
        let team_id = team(h, &headers)?;
        let sub = Submission {
            race,
            expenditure: body.expenditure,
            race_plan: body.race_plan,
        };
        let bytes = serde_json::to_vec(&sub).map_err(|e| ApiError::Internal(e.to_string()))?;
        let event = h.championship.submit(team_id, sub)?;
        let seq = h.append(event)?;
        Ok(SubmissionReceipt {
            team_id,
            race,
            seq,
            submission_sha256: hex::encode(Sha256::digest(&bytes)),
        })
    })
    .await?;
    Ok(Json(out))
}

/// A private test run: the team's own car plus an optional spend, on any
/// circuit of the calendar. Nothing is recorded.
async fn whatif(
    State(state): State<AppState>,
    Path(c): Path<String>,
    headers: HeaderMap,
    Json(req): Json<WhatIfRequest>,
) -> Result<Json<WhatIfResult>, ApiError> {
    let (own, rules) = with_championship(&state, &c, move |h| {
        let id = team(h, &headers)?;
        let own = h
            .championship
            .team(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("team {id}")))?;
        Ok((own, h.championship.rules().clone()))
    })
    .await?;
    let out = tokio::task::spawn_blocking(move || -> Result<WhatIfResult, ApiError> {
        let sub = Submission {
            race: req.race,
            expenditure: req.expenditure,
            race_plan: req.race_plan,
        };
        validate_submission(&own, &sub, &rules, req.race).map_err(ApiError::Rejected)?;
        let car = apply_expenditure(&own.car, &sub.expenditure, sub.race, &rules.schedule, &rules.base_car);
        let venue = rules
            .venue(sub.race)
            .ok_or_else(|| ApiError::NotFound(format!("race {}", sub.race)))?;
        let result = run_race(&venue.circuit, &car, &sub.race_plan, &rules.sim_config())
            .map_err(|e| ApiError::Invalid(e.to_string()))?;
        Ok(WhatIfResult {
            race: sub.race,
            car,
            result,
        })
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(out))
}

async fn run(
    State(state): State<AppState>,
    Path((c, race)): Path<(String, usize)>,
    headers: HeaderMap,
) -> Result<Json<Classification>, ApiError> {
    let out = with_championship(&state, &c, move |h| {
        steward(h, &headers)?;
        let (cls, event) = h.championship.run_race(race)?;
        if let Some(e) = event {
            h.append(e)?;
            tracing::info!("race {race} run with {} finishers", cls.finishers.len());
        }
        Ok(cls)
    })
    .await?;
    Ok(Json(out))
}

async fn results(
    State(state): State<AppState>,
    Path((c, race)): Path<(String, usize)>,
    headers: HeaderMap,
) -> Result<Json<Classification>, ApiError> {
    let out = with_championship(&state, &c, move |h| {
        role(h, &headers)?;
        h.championship
            .classification(race)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("results for race {race}")))
    })
    .await?;
    Ok(Json(out))
}

async fn standings(
    State(state): State<AppState>,
    Path(c): Path<String>,
    headers: HeaderMap,
) -> Result<Json<Vec<Standing>>, ApiError> {
    let out = with_championship(&state, &c, move |h| {
        role(h, &headers)?;
        Ok(h.championship.standings())
    })
    .await?;
    Ok(Json(out))
}
