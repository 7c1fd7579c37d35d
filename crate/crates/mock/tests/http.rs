use std::collections::HashSet;
use std::io::{Read, Write};
use std::net::TcpStream;

use serde_json::{json, Value};
use synthaug_mock::fixtures::{default_sizes, generate, labels_of, Sizes};
use synthaug_mock::{MockOptions, MockServer};

fn post(server: &MockServer, path: &str, body: &str, auth: Option<&str>) -> (u16, Value) {
    let addr = server.base_url().trim_start_matches("http://").split('/').next().unwrap().to_string();
    let mut stream = TcpStream::connect(addr).unwrap();
    let auth = auth.map(|k| format!("Authorization: Bearer {k}\r\n")).unwrap_or_default();
    write!(
        stream,
        "POST /v1/{path} HTTP/1.1\r\nHost: x\r\nContent-Type: application/json\r\n{auth}Content-Length: {}\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut raw = String::new();
    stream.read_to_string(&mut raw).unwrap();
    let status = raw.split_whitespace().nth(1).unwrap().parse().unwrap();
    let payload = raw.split_once("\r\n\r\n").unwrap().1;
    (status, serde_json::from_str(payload).unwrap())
}

#[test]
fn chat_is_a_pure_function_of_the_request() {
    let server = MockServer::start().unwrap();
    let body = json!({"model": "m", "seed": 4, "messages": [{"role": "user", "content": "Generate 5 sentences that are positive reviews to a movie"}]}).to_string();
    let (s1, a) = post(&server, "chat/completions", &body, None);
    let (s2, b) = post(&server, "chat/completions", &body, None);
    assert_eq!((s1, s2), (200, 200));
    assert_eq!(a, b);
    assert!(a["choices"][0]["message"]["content"].as_str().unwrap().contains("5. "));
    assert_eq!(server.requests(), 2);
}

#[test]
fn embeddings_and_translation() {
    let server = MockServer::start().unwrap();
    let (_, e) = post(&server, "embeddings", &json!({"input": ["a", "b c"]}).to_string(), None);
    let data = e["data"].as_array().unwrap();
    assert_eq!(data.len(), 2);
    assert_eq!(data[1]["embedding"].as_array().unwrap().len(), 64);
    let (_, t) = post(&server, "translate", &json!({"q": "hi", "source": "en", "target": "ja"}).to_string(), None);
    assert_eq!(t["translatedText"], "[ja] hi");
}

#[test]
fn errors_and_injected_failures() {
    let server = MockServer::start_with(MockOptions {
        fail_first: 1,
        fail_status: 500,
        require_key: Some("k".into()),
        ..MockOptions::default()
    })
    .unwrap();
    assert_eq!(post(&server, "translate", "{}", None).0, 401);
    assert_eq!(post(&server, "translate", "{}", Some("k")).0, 500);
    assert_eq!(post(&server, "translate", "not json", Some("k")).0, 400);
    assert_eq!(post(&server, "nowhere", "{}", Some("k")).0, 404);
}

#[test]
fn fixtures_are_balanced_unique_and_seeded() {
    for task in ["sst2", "snips", "trec"] {
        let sizes = default_sizes(task);
        let records = generate(task, sizes, 7);
        let labels = labels_of(task);
        assert_eq!(records.len(), labels.len() * (sizes.train + sizes.dev + sizes.test));
        for split in ["train", "dev", "test"] {
            let texts: HashSet<&str> = records.iter().filter(|r| r.split == split).map(|r| r.text.as_str()).collect();
            let n = records.iter().filter(|r| r.split == split).count();
            assert_eq!(texts.len(), n, "{task}/{split}");
        }
        assert_eq!(records, generate(task, sizes, 7));
        assert_ne!(records, generate(task, sizes, 8));
    }
    let tiny = generate("sst2", Sizes { train: 1, dev: 0, test: 1 }, 0);
    assert_eq!(tiny.len(), 4);
}
