use std::time::Duration;

use futures::{SinkExt, StreamExt};
use prepost::game::replay_text;
use prepost::service::{spawn, RunningService, ServerFrame, ServiceConfig, Store};
use prepost::verdict::{BlobKind, Overall, Status};
use serde_json::{json, Value};
use tokio_tungstenite::tungstenite::Message;

const TOKEN: &str = "teacher-secret";
const GET_MAX: &str = "method getMax(a: int[]) -> int;
pre(a != null);
pre(a.length > 0);
post(exists(a, i -> a[i] == retval));
post(forall(a, i -> a[i] <= retval));";

fn config(dir: &std::path::Path) -> ServiceConfig {
    let mut cfg = ServiceConfig { address: "127.0.0.1:0".into(), teacher_tokens: vec![TOKEN.into()], store_dir: dir.into(), ..Default::default() };
    cfg.game.tick_ms = 1;
    cfg
}

struct Client {
    http: reqwest::Client,
    base: String,
    bodies: Vec<String>,
}

impl Client {
    fn new(svc: &RunningService) -> Client {
        Client { http: reqwest::Client::new(), base: format!("http://{}", svc.addr), bodies: Vec::new() }
    }

    async fn call(&mut self, method: reqwest::Method, path: &str, token: Option<&str>, body: Option<Value>) -> (u16, Value) {
        let mut req = self.http.request(method, format!("{}{}", self.base, path));
        if let Some(t) = token {
            req = req.bearer_auth(t);
        }
        if let Some(b) = body {
            req = req.json(&b);
        }
        let resp = req.send().await.unwrap();
        let status = resp.status().as_u16();
        let text = resp.text().await.unwrap();
        self.bodies.push(text.clone());
        (status, serde_json::from_str(&text).unwrap_or(Value::Null))
    }

    async fn create(&mut self, body: Value) -> (u16, Value) {
        self.call(reqwest::Method::POST, "/api/exercises", Some(TOKEN), Some(body)).await
    }

    async fn submit(&mut self, id: &str, body: Value) -> (u16, Value) {
        self.call(reqwest::Method::POST, &format!("/api/exercises/{id}/submissions"), None, Some(body)).await
    }
}

type Ws = tokio_tungstenite::WebSocketStream<tokio_tungstenite::MaybeTlsStream<tokio::net::TcpStream>>;

async fn connect(svc: &RunningService, session: &str) -> Ws {
    let (ws, _) = tokio_tungstenite::connect_async(format!("ws://{}/api/sessions/{session}", svc.addr)).await.unwrap();
    ws
}

async fn next_frame(ws: &mut Ws, bodies: &mut Vec<String>) -> Option<ServerFrame> {
    loop {
        let msg = tokio::time::timeout(Duration::from_secs(20), ws.next()).await.expect("frame in time")?.ok()?;
        match msg {
            Message::Text(t) => {
                bodies.push(t.to_string());
                return Some(serde_json::from_str(&t).unwrap());
            }
            Message::Close(_) => return None,
            _ => continue,
        }
    }
}

async fn send(ws: &mut Ws, v: Value) {
    ws.send(Message::Text(v.to_string().into())).await.unwrap();
}

#[tokio::test(flavor = "multi_thread")]
async fn exercise_submission_and_session_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let svc = spawn(config(dir.path())).await.unwrap();
    let mut c = Client::new(&svc);

    let payload = json!({"id": "getMax", "title": "Maximum", "description": "Largest element of a non-empty array.", "modelSpec": GET_MAX});
    let (s, _) = c.call(reqwest::Method::POST, "/api/exercises", None, Some(payload.clone())).await;
    assert_eq!(s, 401);
    let (s, _) = c.call(reqwest::Method::POST, "/api/exercises", Some("wrong"), Some(payload.clone())).await;
    assert_eq!(s, 401);

    let (s, ex) = c.create(payload.clone()).await;
    assert_eq!(s, 201, "{ex}");
    assert_eq!(ex["selfCheck"]["overall"], "equivalent");
    assert_eq!(ex["signature"], "method getMax(a: int[]) -> int;");
    let (s, _) = c.create(payload).await;
    assert_eq!(s, 409);

    let (s, bad) = c.create(json!({"title": "bad", "modelSpec": "method f(x: int) -> int; pre(retval > 0);"})).await;
    assert_eq!(s, 422);
    assert_eq!(bad["diagnostics"][0]["kind"], "retvalInPre");

    let (s, list) = c.call(reqwest::Method::GET, "/api/exercises", None, None).await;
    assert_eq!(s, 200);
    assert_eq!(list.as_array().unwrap().len(), 1);
    let (s, _) = c.call(reqwest::Method::GET, "/api/exercises/nope", None, None).await;
    assert_eq!(s, 404);

    let (s, same) = c.submit("getMax", json!({"specText": GET_MAX})).await;
    assert_eq!(s, 200, "{same}");
    assert_eq!(same["verdict"]["overall"], "equivalent");
    for entry in same["blobSummary"].as_array().unwrap() {
        assert!(entry["kind"] != "redUnmarked" && entry["kind"] != "blueMarked", "{entry}");
    }
    let (_, again) = c.submit("getMax", json!({"specText": GET_MAX})).await;
    assert_eq!(serde_json::to_string(&same["verdict"]).unwrap(), serde_json::to_string(&again["verdict"]).unwrap());

    let weak = "method getMax(a: int[]) -> int; pre(a != null); pre(a.length > 0); post(exists(a, i -> a[i] == retval));";
    let (_, w) = c.submit("getMax", json!({"specText": weak})).await;
    assert_eq!(w["verdict"]["post"]["status"], "tooWeak");
    assert_eq!(w["verdict"]["pre"]["status"], "equivalent");
    assert!(w["verdict"]["post"]["quadrants"]["nMS"]["witnesses"].as_array().unwrap().is_empty(), "witnesses redacted");

    let doc = prepost::dsl::spec_to_doc(&prepost::dsl::parse_checked(GET_MAX).unwrap());
    let (s, ast) = c.submit("getMax", json!({"specAst": {"pres": doc["pres"], "posts": doc["posts"]}})).await;
    assert_eq!(s, 200, "{ast}");
    assert_eq!(ast["verdict"]["overall"], "equivalent");

    let (s, diag) = c.submit("getMax", json!({"specText": "method getMax(a: int[]) -> int; pre(a > );"})).await;
    assert_eq!(s, 422);
    assert_eq!(diag["diagnostics"][0]["kind"], "syntax");
    let (s, _) = c.submit("getMax", json!({"specText": "method getMax(a: long[]) -> int;"})).await;
    assert_eq!(s, 422);

    // Scripted play: zappers around the input scanner, one refused placement, then the wave.
    let session = same["sessionId"].as_str().unwrap().to_string();
    let mut bodies = Vec::new();
    let mut ws = connect(&svc, &session).await;
    let Some(ServerFrame::Snapshot { snapshot }) = next_frame(&mut ws, &mut bodies).await else { panic!("snapshot first") };
    assert_eq!(snapshot.tick, 0);
    assert_eq!(snapshot.budget, 100);
    send(&mut ws, json!({"action": "placeTower", "params": {"kind": "zapper", "cell": [5, 5]}})).await;
    send(&mut ws, json!({"action": "placeTower", "params": {"kind": "zapper", "cell": [3, 4]}})).await;
    send(&mut ws, json!({"action": "placeTower", "params": {"kind": "zapper", "cell": [9, 3]}})).await;
    send(&mut ws, json!({"action": "fly"})).await;
    let mut errors = Vec::new();
    let mut budget = 100;
    while errors.len() < 2 {
        match next_frame(&mut ws, &mut bodies).await.unwrap() {
            ServerFrame::Error { code, .. } => errors.push(code),
            ServerFrame::Snapshot { snapshot } => budget = snapshot.budget,
            other => panic!("unexpected {other:?}"),
        }
    }
    assert_eq!(errors, ["insufficientBudget", "malformedAction"]);
    assert_eq!(budget, 20);

    send(&mut ws, json!({"action": "startWave"})).await;
    let mut last_tick = 0;
    for _ in 0..5 {
        if let Some(ServerFrame::Snapshot { snapshot }) = next_frame(&mut ws, &mut bodies).await {
            last_tick = snapshot.tick;
        }
    }
    drop(ws);

    // Reconnect resumes from the current tick and runs to the score.
    let mut ws = connect(&svc, &session).await;
    let Some(ServerFrame::Snapshot { snapshot }) = next_frame(&mut ws, &mut bodies).await else { panic!("snapshot first") };
    assert!(snapshot.tick >= last_tick);
    assert_eq!(snapshot.towers.len(), 2);
    let score = loop {
        match next_frame(&mut ws, &mut bodies).await.expect("stream ends with a score") {
            ServerFrame::Score { score } => break score,
            ServerFrame::Snapshot { .. } => {}
            other => panic!("unexpected {other:?}"),
        }
    };
    assert_eq!(score.outcomes.blue_destroyed, 0);
    assert_eq!(score.outcomes.unresolved, 0);
    assert!(next_frame(&mut ws, &mut bodies).await.is_none());

    let mut log = None;
    for _ in 0..100 {
        if let Ok(text) = std::fs::read_to_string(dir.path().join("sessions").join(format!("{session}.log"))) {
            log = Some(text);
            break;
        }
        tokio::time::sleep(Duration::from_millis(20)).await;
    }
    assert_eq!(replay_text(&log.expect("action log saved")).unwrap(), score);

    let mut ended = connect(&svc, &session).await;
    assert!(matches!(next_frame(&mut ended, &mut bodies).await, Some(ServerFrame::Snapshot { .. })));
    assert!(matches!(next_frame(&mut ended, &mut bodies).await, Some(ServerFrame::Score { .. })));
    let mut unknown = connect(&svc, "ses-none").await;
    assert!(matches!(next_frame(&mut unknown, &mut bodies).await, Some(ServerFrame::Error { code, .. }) if code == "unknownSession"));

    // The model specification never leaves the server.
    for body in c.bodies.iter().chain(&bodies) {
        for needle in [GET_MAX, "forall(a", "exists(a", "a[i] <= retval", "a[i] == retval", "modelSpec"] {
            assert!(!body.contains(needle), "`{needle}` leaked in {body}");
        }
    }

    // Restart on the same directory: every record reloads unchanged.
    let before = (svc.state.store.exercises(), svc.state.store.submissions());
    assert_eq!(before.1.len(), 4);
    let (_, listed_before) = c.call(reqwest::Method::GET, "/api/exercises/getMax", None, None).await;
    svc.shutdown().await.unwrap();
    let reopened = Store::open(dir.path()).unwrap();
    assert_eq!((reopened.exercises(), reopened.submissions()), before);
    let svc = spawn(config(dir.path())).await.unwrap();
    let mut c = Client::new(&svc);
    let (_, listed_after) = c.call(reqwest::Method::GET, "/api/exercises/getMax", None, None).await;
    assert_eq!(listed_before, listed_after);
    assert_eq!(svc.state.store.exercise("getMax").unwrap().self_check.overall, Overall::Equivalent);
    let (_, next) = c.submit("getMax", json!({"specText": weak})).await;
    assert!(!before.1.iter().any(|s| s.id == next["submissionId"]));
    svc.shutdown().await.unwrap();
}

#[tokio::test(flavor = "multi_thread")]
async fn stronger_pre_is_too_strong_and_values_hint_shows_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.hint_level = prepost::service::HintLevel::Values;
    let svc = spawn(cfg).await.unwrap();
    let mut c = Client::new(&svc);
    let (s, _) = c.create(json!({"id": "gm", "title": "Maximum", "modelSpec": GET_MAX})).await;
    assert_eq!(s, 201);
    let strong = format!("{GET_MAX}\npre(a.length > 1);");
    let (_, r) = c.submit("gm", json!({"specText": strong})).await;
    let verdict: prepost::verdict::Verdict = serde_json::from_value(r["verdict"].clone()).unwrap();
    assert_eq!(verdict.pre.status, Status::TooStrong);
    assert!(!verdict.pre.quadrant(prepost::problem::Quadrant::MnS).witnesses.is_empty());
    let kinds: Vec<String> = r["blobSummary"].as_array().unwrap().iter().map(|e| e["kind"].as_str().unwrap().to_string()).collect();
    assert!(kinds.contains(&serde_json::to_value(BlobKind::BlueMarked).unwrap().as_str().unwrap().to_string()));
    svc.shutdown().await.unwrap();
}
