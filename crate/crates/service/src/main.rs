use std::net::SocketAddr;
use std::path::PathBuf;

use bedplan_service::{app, AppState};
use clap::Parser;

#[derive(Debug, Parser)]
#[command(name = "bedplan-service", version, about = "Planning engine over HTTP")]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// Keep uploaded datasets here and reload them on start.
    #[arg(long = "data-dir")]
    data_dir: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let state = match &args.data_dir {
        Some(dir) => AppState::persistent(dir)?,
        None => AppState::in_memory(),
    };
    log::info!("{} dataset(s) restored", state.len());
    let listener = tokio::net::TcpListener::bind(args.bind).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
