//! Serve the JSON API over a dataset.
//!
//! cargo run --example serve [DATASET_DIR] [ADDR]
//! then e.g. curl localhost:8080/entries/43

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Result;
use jambu::cldf::load_wordlist;
use jambu::service::{router, serve, ServiceConfig};

#[tokio::main]
async fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini"));
    let addr = args.next().unwrap_or_else(|| "127.0.0.1:8080".into());

    let db = Arc::new(load_wordlist(&dir)?);
    let app = router(db, &ServiceConfig { cors_origin: Some("*".into()) });
    let listener = tokio::net::TcpListener::bind(&addr).await?;
    println!("serving {} on http://{}", dir.display(), listener.local_addr()?);
    serve(listener, app).await?;
    Ok(())
}
