//! `synthaug-mock serve [ADDR]` or `synthaug-mock fixtures OUT_DIR [SEED]`.

use std::path::PathBuf;
use std::process::ExitCode;

use synthaug_mock::{fixtures, MockOptions, MockServer};

const TASKS: [&str; 3] = ["sst2", "snips", "trec"];

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let result = match args.first().map(String::as_str) {
        Some("serve") => serve(args.get(1).map_or("127.0.0.1:8080", String::as_str)),
        Some("fixtures") if args.len() >= 2 => {
            let seed = match args.get(2).map(|s| s.parse::<u64>()) {
                None => Ok(7),
                Some(Ok(s)) => Ok(s),
                Some(Err(e)) => Err(std::io::Error::new(std::io::ErrorKind::InvalidInput, e)),
            };
            seed.and_then(|seed| write_fixtures(&PathBuf::from(&args[1]), seed))
        }
        _ => {
            eprintln!("usage: synthaug-mock serve [ADDR] | synthaug-mock fixtures OUT_DIR [SEED]");
            return ExitCode::from(2);
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn serve(addr: &str) -> std::io::Result<()> {
    let server = MockServer::bind(addr, MockOptions::default())?;
    println!("listening on {}", server.base_url());
    server.wait();
    Ok(())
}

fn write_fixtures(dir: &std::path::Path, seed: u64) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for task in TASKS {
        let path = dir.join(format!("{task}.jsonl"));
        fixtures::write_jsonl(&fixtures::generate(task, fixtures::default_sizes(task), seed), &path)?;
        println!("{}", path.display());
    }
    Ok(())
}
