use std::net::SocketAddr;
use std::path::Path;
use std::sync::{Arc, RwLock};

use catfid_judge::{router, JudgeStore, Session, SharedStore};
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

struct Server {
    base: String,
    store: SharedStore,
    task: tokio::task::JoinHandle<()>,
}

async fn start(log: &Path) -> Server {
    let store: SharedStore = Arc::new(RwLock::new(JudgeStore::open(log).unwrap()));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr: SocketAddr = listener.local_addr().unwrap();
    let app = router(store.clone(), None);
    let task = tokio::spawn(async move {
        axum::serve(listener, app).await.unwrap();
    });
    Server {
        base: format!("http://{addr}"),
        store,
        task,
    }
}

fn texts(prefix: &str, n: usize) -> Value {
    Value::Array(
        (0..n)
            .map(|i| json!({"id": format!("{prefix}-{i}"), "codec": "utf8-text", "payload": format!("{prefix} sample {i}")}))
            .collect(),
    )
}

async fn create(client: &reqwest::Client, base: &str, n: usize, seed: u64) -> String {
    let r = client
        .post(format!("{base}/sessions"))
        .json(&json!({"original": texts("orig", n), "generated": texts("gen", n), "config": {"epsilon": 0.2}, "seed": seed}))
        .send()
        .await
        .unwrap();
    assert_eq!(r.status(), 201);
    r.json::<Value>().await.unwrap()["session_id"].as_str().unwrap().to_string()
}

/// Nothing a judge can see before close may say where an item came from.
fn assert_blind(body: &Value) {
    fn walk(v: &Value) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    assert!(
                        !matches!(k.as_str(), "provenance" | "role" | "label" | "features" | "id"),
                        "leaked key `{k}` in {v}"
                    );
                    walk(v);
                }
            }
            Value::Array(items) => items.iter().for_each(walk),
            Value::String(s) => assert!(!s.starts_with("orig-") && !s.starts_with("gen-"), "leaked id {s}"),
            _ => {}
        }
    }
    walk(body);
}

/// Walk one judge through the session. `call` sees the payload text only.
async fn judge(client: &reqwest::Client, base: &str, session: &str, judge: &str, mut call: impl FnMut(&str) -> &'static str) {
    loop {
        let r = client
            .get(format!("{base}/sessions/{session}/next?judge={judge}"))
            .send()
            .await
            .unwrap();
        if r.status() == 204 {
            return;
        }
        assert_eq!(r.status(), 200);
        let item: Value = r.json().await.unwrap();
        assert_blind(&item);
        let keys: Vec<&str> = item.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["answered", "codec", "item_id", "payload", "total"]);
        let r = client
            .post(format!("{base}/sessions/{session}/verdicts"))
            .json(&json!({"judge_id": judge, "item_id": item["item_id"], "call": call(item["payload"].as_str().unwrap())}))
            .send()
            .await
            .unwrap();
        assert_eq!(r.status(), 200);
        let ack: Value = r.json().await.unwrap();
        assert_blind(&ack);
        assert_eq!(ack["accepted"], true);
    }
}

fn perfect(payload: &str) -> &'static str {
    if payload.starts_with("orig") {
        "original"
    } else {
        "generated"
    }
}

async fn close(client: &reqwest::Client, base: &str, session: &str) -> (u16, Value) {
    let r = client.post(format!("{base}/sessions/{session}/close")).send().await.unwrap();
    (r.status().as_u16(), r.json().await.unwrap())
}

#[tokio::test(flavor = "multi_thread")]
async fn perfect_judge_separates_completely() {
    let dir = tempfile::tempdir().unwrap();
    let server = start(&dir.path().join("log.jsonl")).await;
    let client = reqwest::Client::new();
    let id = create(&client, &server.base, 5, 1).await;
    judge(&client, &server.base, &id, "alice", perfect).await;
    let (status, result) = close(&client, &server.base, &id).await;
    assert_eq!(status, 200);
    assert_eq!(result["delta"], 1.0);
    assert_eq!(result["pass"], false);
    assert_eq!(result["items"].as_array().unwrap().len(), 10);
    for item in result["items"].as_array().unwrap() {
        let expected = if item["provenance"] == "original" { 1.0 } else { 0.0 };
        assert_eq!(item["fraction_original"], expected);
    }
    server.task.abort();
}

#[tokio::test(flavor = "multi_thread")]
async fn random_judges_stay_near_zero() {
    let dir = tempfile::tempdir().unwrap();
    let server = Arc::new(start(&dir.path().join("log.jsonl")).await);
    let client = reqwest::Client::new();
    let mut tasks = Vec::new();
    for s in 0..200u64 {
        let (client, server) = (client.clone(), server.clone());
        tasks.push(tokio::spawn(async move {
            let id = create(&client, &server.base, 10, s).await;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1000 + s);
            for j in 0..10 {
                judge(&client, &server.base, &id, &format!("judge{j}"), |_| {
                    if rng.random::<bool>() {
                        "original"
                    } else {
                        "generated"
                    }
                })
                .await;
            }
            let (status, result) = close(&client, &server.base, &id).await;
            assert_eq!(status, 200);
            result["delta"].as_f64().unwrap()
        }));
    }
    let mut deltas = Vec::new();
    for t in tasks {
        deltas.push(t.await.unwrap());
    }
    let mean = deltas.iter().sum::<f64>() / deltas.len() as f64;
    assert!(mean < 0.15, "mean delta {mean}");
    let wide = deltas.iter().filter(|&&d| d > 0.3).count();
    assert!(wide <= 2, "{wide} sessions above 0.3");
}

#[tokio::test(flavor = "multi_thread")]
async fn session_lifecycle_errors() {
    let dir = tempfile::tempdir().unwrap();
    let server = start(&dir.path().join("log.jsonl")).await;
    let client = reqwest::Client::new();
    let base = &server.base;

    let r = client.post(format!("{base}/sessions")).body("{\"original\": 3}").send().await.unwrap();
    assert_eq!(r.status(), 422);
    let r = client
        .post(format!("{base}/sessions"))
        .json(&json!({"original": [{"id": "b", "codec": "opaque-bytes", "payload": "AA=="}], "generated": texts("gen", 1)}))
        .send()
        .await
        .unwrap();
    assert_eq!(r.status(), 422);
    let r = client
        .post(format!("{base}/sessions"))
        .json(&json!({"original": [], "generated": texts("gen", 1)}))
        .send()
        .await
        .unwrap();
    assert_eq!(r.status(), 422);
    let r = client.get(format!("{base}/sessions/nope/next?judge=a")).send().await.unwrap();
    assert_eq!(r.status(), 404);

    let id = create(&client, base, 2, 3).await;
    let r = client.get(format!("{base}/sessions/{id}/result")).send().await.unwrap();
    assert_eq!(r.status(), 409);
    assert_blind(&r.json().await.unwrap());
    let (status, body) = close(&client, base, &id).await;
    assert_eq!(status, 422);
    assert_blind(&json!({"error": null, "unanswered": body["unanswered"]}));
    assert_eq!(body["unanswered"].as_array().unwrap().len(), 4);

    let r = client
        .post(format!("{base}/sessions/{id}/verdicts"))
        .json(&json!({"judge_id": "a", "item_id": "missing", "call": "original"}))
        .send()
        .await
        .unwrap();
    assert_eq!(r.status(), 404);
    let r = client
        .post(format!("{base}/sessions/{id}/verdicts"))
        .json(&json!({"judge_id": "a", "item_id": "x", "call": "maybe"}))
        .send()
        .await
        .unwrap();
    assert_eq!(r.status(), 422);

    let first: Value = client
        .get(format!("{base}/sessions/{id}/next?judge=a"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    for (call, accepted) in [("original", true), ("generated", false)] {
        let ack: Value = client
            .post(format!("{base}/sessions/{id}/verdicts"))
            .json(&json!({"judge_id": "a", "item_id": first["item_id"], "call": call}))
            .send()
            .await
            .unwrap()
            .json()
            .await
            .unwrap();
        assert_eq!(ack["accepted"], accepted);
    }
    judge(&client, base, &id, "a", |_| "generated").await;

    let (status, once) = close(&client, base, &id).await;
    assert_eq!(status, 200);
    let (status, twice) = close(&client, base, &id).await;
    assert_eq!(status, 200);
    assert_eq!(once, twice);
    let stored = once["items"]
        .as_array()
        .unwrap()
        .iter()
        .find(|i| i["item_id"] == first["item_id"])
        .unwrap()
        .clone();
    assert_eq!(stored["fraction_original"], 1.0);
    let r = client.get(format!("{base}/sessions/{id}/result")).send().await.unwrap();
    assert_eq!(r.status(), 200);
    assert_eq!(r.json::<Value>().await.unwrap(), once);

    let r = client
        .post(format!("{base}/sessions/{id}/verdicts"))
        .json(&json!({"judge_id": "b", "item_id": first["item_id"], "call": "original"}))
        .send()
        .await
        .unwrap();
    assert_eq!(r.status(), 409);
    let r = client.get(format!("{base}/sessions/{id}/next?judge=b")).send().await.unwrap();
    assert_eq!(r.status(), 409);
}

fn snapshot(store: &SharedStore) -> Vec<Session> {
    store.read().unwrap().sessions().cloned().collect()
}

#[tokio::test(flavor = "multi_thread")]
async fn restart_replays_identical_state() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.jsonl");
    let client = reqwest::Client::new();

    let server = start(&log).await;
    let a = create(&client, &server.base, 4, 7).await;
    let b = create(&client, &server.base, 3, 8).await;
    judge(&client, &server.base, &a, "x", perfect).await;
    judge(&client, &server.base, &b, "y", |_| "original").await;
    close(&client, &server.base, &a).await;
    let before = snapshot(&server.store);
    server.task.abort();
    drop(server);

    // a write that never got its ack
    use std::io::Write;
    std::fs::OpenOptions::new()
        .append(true)
        .open(&log)
        .unwrap()
        .write_all(b"{\"seq\":99,\"kind\":\"verd")
        .unwrap();

    let server = start(&log).await;
    assert_eq!(snapshot(&server.store), before);
    let r = client.get(format!("{}/sessions/{a}/result", server.base)).send().await.unwrap();
    assert_eq!(r.status(), 200);
    judge(&client, &server.base, &b, "z", perfect).await;
    let (status, result) = close(&client, &server.base, &b).await;
    assert_eq!(status, 200);
    assert_eq!(result["judges"], 2);
    let after = snapshot(&server.store);
    server.task.abort();
    drop(server);
    let server = start(&log).await;
    assert_eq!(snapshot(&server.store), after);
}
