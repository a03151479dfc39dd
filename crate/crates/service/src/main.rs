use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::Context;
use clap::Parser;

use vigilsim_service::routes::spawn_evictor;
use vigilsim_service::{router, AppState, Content, SessionStore};

#[derive(Parser)]
#[command(name = "vigilsim-serve", version, about = "Serve vigilance game sessions over HTTP")]
struct Args {
    /// Directory holding `scenarios/*.json` and `configs/*.toml`.
    #[arg(long, default_value = "fixtures")]
    content: PathBuf,
    /// Built web UI, served for every non-API path.
    #[arg(long = "static")]
    static_dir: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Sessions idle this long are dropped.
    #[arg(long, default_value_t = 120)]
    idle_minutes: u64,
    /// Write the history of each evicted session here.
    #[arg(long)]
    export_dir: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    let content = Content::discover(&args.content)
        .with_context(|| format!("load content from {}", args.content.display()))?;
    if let Some(dir) = &args.export_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("create {}", dir.display()))?;
    }
    let store = SessionStore::new(Duration::from_secs(args.idle_minutes * 60), args.export_dir.clone());
    let state = AppState::new(content, store);
    spawn_evictor(state.store.clone(), Duration::from_secs(60));
    let app = router(state.clone(), args.static_dir.as_deref());

    let listener = tokio::net::TcpListener::bind(args.addr)
        .await
        .with_context(|| format!("bind {}", args.addr))?;
    eprintln!(
        "listening on http://{} ({} scenarios)",
        listener.local_addr()?,
        state.content.scenario_infos().len()
    );
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
