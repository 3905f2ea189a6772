use std::sync::{Arc, Mutex};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use pecr::engine::{ApplyError, Line, Session, Step};
use pecr::eval::{Env, Evaluator};
use pecr::kernel::{parse_line, ProofScript};
use pecr::theory::TheoryError;
use pecr::{Program, RuleKind, RuleRecord, Theory};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::store::SessionRecord;
use super::AppState;
use crate::commands::rat_scale;
use crate::verify::{verify, ProofVerdict};

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: String,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, message: impl Into<String>) -> Self {
        ApiError { status, kind: kind.to_string(), message: message.into() }
    }

    fn not_found(what: &str, name: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "NotFound", format!("unknown {what} `{name}`"))
    }

    fn unprocessable(kind: &str, message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, kind, message)
    }

    fn conflict(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::CONFLICT, "VersionConflict", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": { "kind": self.kind, "message": self.message } }))).into_response()
    }
}

impl From<ApplyError> for ApiError {
    fn from(e: ApplyError) -> Self {
        let kind = match &e {
            ApplyError::StaleOption(_) => return ApiError::conflict(e.to_string()),
            ApplyError::NotAnOption => "NotAnOption",
            ApplyError::NoSuchLine(_) => "NoSuchLine",
            ApplyError::NotADisjunction(_) => "NotADisjunction",
            ApplyError::Closed => "Closed",
            ApplyError::InvalidPremise(_) => "InvalidPremise",
            ApplyError::Extract(_) => "ExtractError",
        };
        ApiError::unprocessable(kind, e.to_string())
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineView {
    pub number: usize,
    pub stmt: String,
    pub star: bool,
    pub justification: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchView {
    /// The split line (1-based).
    pub line: usize,
    /// The two operand derivations, the split line replaced by the operand statements.
    pub operands: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub theory: String,
    pub created: u64,
    pub modified: u64,
    pub version: u64,
    pub premise: Vec<String>,
    pub lines: Vec<LineView>,
    pub branches: Vec<BranchView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionView {
    pub index: usize,
    /// Content hash of the option at this version.
    pub id: String,
    pub stmt: String,
    pub justification: String,
    pub label: String,
    pub refs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionsView {
    pub version: u64,
    pub options: Vec<OptionView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleView {
    pub label: String,
    pub kind: RuleKind,
    pub premise: Vec<String>,
    pub conclusion: Vec<String>,
    pub tcl: Vec<String>,
    pub block: String,
}

impl From<&RuleRecord> for RuleView {
    fn from(r: &RuleRecord) -> Self {
        RuleView {
            label: r.label.clone(),
            kind: r.kind,
            premise: stmts(&r.premise),
            conclusion: r.conclusion.program().map_or_else(|| vec![":false".to_string()], stmts),
            tcl: r.tcl.clone(),
            block: r.block(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoryView {
    pub name: String,
    pub parents: Vec<String>,
    pub atoms: Vec<String>,
    pub disjunctions: Vec<String>,
    pub axioms: usize,
    pub theorems: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CreateSession {
    pub theory: String,
    pub premises: Vec<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct ApplyRequest {
    /// Option id from `/options`.
    pub option: Option<String>,
    /// Option index; checked against `option` when both are given.
    pub index: Option<usize>,
    /// A line as `statement  justification`, e.g. `add [b a] [g]  axi2a [1]`.
    pub literal: Option<String>,
    pub version: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SplitRequest {
    pub line: usize,
    pub version: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ContractRequest {
    /// The starred line to contract.
    pub line: usize,
    #[serde(rename = "lemmaA")]
    pub lemma_a: String,
    #[serde(rename = "lemmaB")]
    pub lemma_b: String,
    /// The contracted statement, when the branches agree on several.
    pub stmt: Option<String>,
    pub version: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ExtractRequest {
    pub label: String,
    #[serde(default = "theorem_kind")]
    pub kind: RuleKind,
    /// Append the extracted rule to the server-side theory.
    #[serde(default)]
    pub store: bool,
}

fn theorem_kind() -> RuleKind {
    RuleKind::Theorem
}

#[derive(Debug, Clone, Deserialize)]
pub struct EvalRequest {
    pub theory: String,
    /// One statement per line.
    pub program: String,
    /// `name = value` lines, or an object of names to values.
    pub env: serde_json::Value,
    pub nint: Option<i64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CheckRequest {
    pub theory: String,
    /// One or more proof scripts.
    pub proofs: String,
}

fn stmts(p: &Program) -> Vec<String> {
    p.stmts.iter().map(|s| s.to_string()).collect()
}

fn line_text(l: &Line) -> String {
    l.as_ref().map_or_else(|| ":false".to_string(), |s| s.to_string())
}

fn view(th: &Theory, rec: &SessionRecord) -> SessionView {
    let s = &rec.session;
    let lines = s
        .lines
        .iter()
        .enumerate()
        .map(|(k, l)| LineView {
            number: k + 1,
            stmt: line_text(&l.stmt),
            star: l.star,
            justification: l.step.as_ref().map(Step::justification),
        })
        .collect();
    let branches = s
        .starred()
        .into_iter()
        .filter_map(|k| {
            let ops = s.operands(th, k + 1).ok()?;
            Some(BranchView { line: k + 1, operands: ops.iter().map(|o| o.iter().map(line_text).collect()).collect() })
        })
        .collect();
    SessionView {
        id: rec.id.clone(),
        theory: rec.theory.clone(),
        created: rec.created,
        modified: rec.modified,
        version: s.version,
        premise: stmts(&s.premise),
        lines,
        branches,
    }
}

impl AppState {
    fn theory_or_404(&self, name: &str) -> Result<Arc<Theory>, ApiError> {
        self.theory(name).ok_or_else(|| ApiError::not_found("theory", name))
    }

    fn entry(&self, id: &str) -> Result<Arc<Mutex<SessionRecord>>, ApiError> {
        self.sessions.read().expect("session lock poisoned").get(id).cloned().ok_or_else(|| ApiError::not_found("session", id))
    }

    fn snapshot(&self, id: &str) -> Result<SessionRecord, ApiError> {
        Ok(self.entry(id)?.lock().expect("session poisoned").clone())
    }

    fn persist(&self, rec: &SessionRecord) -> Result<(), ApiError> {
        match &self.dir {
            Some(d) => d.save(rec).map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Persistence", e.to_string())),
            None => Ok(()),
        }
    }

    /// Runs `f` on the session under its lock, after the version check; bumps
    /// the modification time and saves on success.
    fn mutate(
        &self,
        id: &str,
        version: Option<u64>,
        f: impl FnOnce(&Theory, &mut Session) -> Result<(), ApiError>,
    ) -> ApiResult<SessionView> {
        let entry = self.entry(id)?;
        let mut rec = entry.lock().expect("session poisoned");
        if let Some(v) = version.filter(|&v| v != rec.session.version) {
            return Err(ApiError::conflict(format!("session is at version {}, request was for {v}", rec.session.version)));
        }
        let th = self.theory_or_404(&rec.theory)?;
        let mut next = rec.session.clone();
        f(&th, &mut next)?;
        let mut updated = rec.clone();
        updated.session = next;
        updated.touch();
        self.persist(&updated)?;
        *rec = updated;
        Ok(Json(view(&th, &rec)))
    }
}

pub async fn create_session(
    State(state): State<Arc<AppState>>,
    Json(req): Json<CreateSession>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let th = state.theory_or_404(&req.theory)?;
    let premise = th.parse_program(&req.premises.join("\n")).map_err(|e| ApiError::unprocessable("InvalidPremise", e.to_string()))?;
    let session = Session::new(&th, premise)?;
    let rec = SessionRecord::new(uuid::Uuid::new_v4().simple().to_string(), session);
    state.persist(&rec)?;
    let v = view(&th, &rec);
    state.sessions.write().expect("session lock poisoned").insert(rec.id.clone(), Arc::new(Mutex::new(rec)));
    Ok((StatusCode::CREATED, Json(v)))
}

pub async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<SessionView> {
    let rec = state.snapshot(&id)?;
    let th = state.theory_or_404(&rec.theory)?;
    Ok(Json(view(&th, &rec)))
}

fn option_views(th: &Theory, s: &Session) -> Vec<OptionView> {
    s.options(th)
        .iter()
        .enumerate()
        .map(|(index, step)| OptionView {
            index,
            id: s.option_id(step),
            stmt: step.result.to_string(),
            justification: step.justification(),
            label: step.label.clone(),
            refs: step.refs.clone(),
        })
        .collect()
}

pub async fn get_options(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<OptionsView> {
    let rec = state.snapshot(&id)?;
    let th = state.theory_or_404(&rec.theory)?;
    Ok(Json(OptionsView { version: rec.session.version, options: option_views(&th, &rec.session) }))
}

fn parse_literal(th: &Theory, s: &Session, literal: &str) -> Result<Step, ApiError> {
    let n = s.lines.len() + 1;
    let line = parse_line(&format!("{n} {literal}"), n, th).map_err(|e| ApiError::unprocessable("ParseError", e.to_string()))?;
    let just = line.just.as_ref().ok_or_else(|| ApiError::unprocessable("ParseError", "the line has no justification"))?;
    Ok(Step::from_line(line.stmt.clone(), just))
}

pub async fn apply(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<ApplyRequest>,
) -> ApiResult<SessionView> {
    state.mutate(&id, req.version, |th, s| {
        if let Some(lit) = &req.literal {
            let step = parse_literal(th, s, lit)?;
            return Ok(s.apply(th, &step)?);
        }
        match (req.index, &req.option) {
            (Some(i), id) => {
                let opts = s.options(th);
                let step = opts.get(i).ok_or_else(|| ApiError::conflict(format!("there is no option {i} at this version")))?;
                if id.as_ref().is_some_and(|id| *id != s.option_id(step)) {
                    return Err(ApiError::conflict(format!("option {i} changed since it was listed")));
                }
                let step = step.clone();
                Ok(s.apply(th, &step)?)
            }
            (None, Some(id)) => s.apply_by_id(th, id).map(drop).map_err(ApiError::from),
            (None, None) => Err(ApiError::unprocessable("BadRequest", "give `option`, `index` or `literal`")),
        }
    })
}

pub async fn split(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<SplitRequest>,
) -> ApiResult<SessionView> {
    state.mutate(&id, req.version, |th, s| Ok(s.split(th, req.line)?))
}

pub async fn contract(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<ContractRequest>,
) -> ApiResult<SessionView> {
    state.mutate(&id, req.version, |th, s| {
        if !s.lines.get(req.line.wrapping_sub(1)).is_some_and(|l| l.star) {
            return Err(ApiError::unprocessable("NotSplit", format!("line {} is not a split disjunction", req.line)));
        }
        let want = match &req.stmt {
            Some(t) if t.trim() == ":false" => Some(None),
            Some(t) => Some(Some(th.parse_statement(t).map_err(|e| ApiError::unprocessable("ParseError", e.to_string()))?)),
            None => None,
        };
        let step = s
            .contractions(th, &req.lemma_a, &req.lemma_b)
            .into_iter()
            .filter(|st| st.refs.contains(&req.line))
            .find(|st| match &want {
                None => true,
                Some(target) => {
                    let got = st.result.as_line();
                    match (target, &got) {
                        (Some(a), Some(b)) => a.same_up_to_outputs(b),
                        (None, None) => true,
                        _ => false,
                    }
                }
            })
            .ok_or(ApplyError::NotAnOption)?;
        Ok(s.apply(th, &step)?)
    })
}

pub async fn extract(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<ExtractRequest>,
) -> ApiResult<RuleView> {
    let rec = state.snapshot(&id)?;
    let th = state.theory_or_404(&rec.theory)?;
    let rule = rec.session.extract(&th, &req.label, req.kind)?;
    if req.store {
        let mut theories = state.theories.write().expect("theory lock poisoned");
        let slot = theories.get_mut(&rec.theory).ok_or_else(|| ApiError::not_found("theory", &rec.theory))?;
        Arc::make_mut(slot).store_rule(rule.clone()).map_err(|e| match e {
            TheoryError::DuplicateLabel(_) => ApiError::new(StatusCode::CONFLICT, "DuplicateLabel", e.to_string()),
            e => ApiError::unprocessable("InvalidRule", e.to_string()),
        })?;
    }
    Ok(Json(RuleView::from(&rule)))
}

pub async fn list_theories(State(state): State<Arc<AppState>>) -> Json<Vec<TheoryView>> {
    let theories = state.theories.read().expect("theory lock poisoned");
    Json(
        theories
            .values()
            .map(|t| TheoryView {
                name: t.name.clone(),
                parents: t.parents.clone(),
                atoms: t.atoms.keys().cloned().collect(),
                disjunctions: t.disjunctions.keys().cloned().collect(),
                axioms: t.store.axioms().count(),
                theorems: t.store.theorems().count(),
            })
            .collect(),
    )
}

pub async fn get_rule(State(state): State<Arc<AppState>>, Path((name, label)): Path<(String, String)>) -> ApiResult<RuleView> {
    let th = state.theory_or_404(&name)?;
    let rule = th.rule(&label).ok_or_else(|| ApiError::not_found("rule", &label))?;
    Ok(Json(RuleView::from(rule)))
}

fn env_text(v: &serde_json::Value) -> Result<String, ApiError> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Object(m) => m
            .iter()
            .map(|(k, v)| match v {
                serde_json::Value::String(s) => Ok(format!("{k} = {s}")),
                serde_json::Value::Number(n) => Ok(format!("{k} = {n}")),
                _ => Err(ApiError::unprocessable("ParseError", format!("value of `{k}` must be a string or a number"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|l| l.join("\n")),
        _ => Err(ApiError::unprocessable("ParseError", "`env` must be a string or an object")),
    }
}

/// Evaluation outcomes are 200 responses: `{"outputs": ...}` or `{"error": ...}`.
pub async fn eval(State(state): State<Arc<AppState>>, Json(req): Json<EvalRequest>) -> Result<Json<serde_json::Value>, ApiError> {
    let th = state.theory_or_404(&req.theory)?;
    let mut mach = th.machine;
    if let Some(n) = req.nint {
        mach.nint = n;
        mach.validate().map_err(|e| ApiError::unprocessable("InvalidMach", e.to_string()))?;
    }
    let p = th.parse_program(&req.program).map_err(|e| ApiError::unprocessable("ParseError", e.to_string()))?;
    th.validate_program(&p).map_err(|e| ApiError::unprocessable("InvalidProgram", format!("{e:?}")))?;
    let env = Env::parse(&env_text(&req.env)?, rat_scale(&th), &th.consts).map_err(|e| ApiError::unprocessable("ParseError", e.to_string()))?;
    let outs = p.outputs();
    let out = match Evaluator::new(&th, mach).eval(&p, &env) {
        Ok(r) => {
            let outputs: serde_json::Map<String, serde_json::Value> =
                r.iter().filter(|(k, _)| outs.contains(k)).map(|(k, v)| (k.clone(), json!(v.render(mach.scale())))).collect();
            json!({ "outputs": outputs })
        }
        Err(e) => json!({ "error": { "kind": format!("{:?}", e.kind), "site": e.site, "detail": e.detail, "message": e.to_string() } }),
    };
    Ok(Json(out))
}

pub async fn check(State(state): State<Arc<AppState>>, Json(req): Json<CheckRequest>) -> ApiResult<Vec<ProofVerdict>> {
    let th = state.theory_or_404(&req.theory)?;
    let scripts = ProofScript::parse_all(&req.proofs, &th).map_err(|e| ApiError::unprocessable("ParseError", e.to_string()))?;
    verify(&th, &scripts).map(Json).map_err(|e| ApiError::unprocessable("BatchError", e.to_string()))
}
