//! `tagstock` command line: the readability tables, the latency summary and
//! the cashier-station server.
//!
//! Table commands write CSV to stdout, or to `--out`. Bad arguments exit
//! with status 2 (clap's usage-error code); runtime failures exit with 1.

use std::error::Error;
use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use tagstock_core::experiments::{latency_compare, table2_csv, table3_csv};
use tagstock_core::inventory::SystemClock;
use tagstock_core::tag_codec::MAX_TLV_PAYLOAD;
use tagstock_core::ScanMode;
use tagstock_service::{router, serve, AppState, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "tagstock", version, about = "NFC vs barcode inventory toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Angle readability sweep for both technologies.
    Table2 {
        /// Angle sampling step in degrees.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=360))]
        step: u32,
        #[command(flatten)]
        out: OutArg,
    },
    /// Label size and readability class by payload length.
    Table3 {
        #[command(flatten)]
        out: OutArg,
    },
    /// Mean per-item read latency, barcode vs NFC.
    Latency {
        /// Number of items scanned.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Bytes stored on each NFC tag.
        #[arg(long, default_value_t = MAX_TLV_PAYLOAD as u64,
              value_parser = clap::value_parser!(u64).range(0..=MAX_TLV_PAYLOAD as u64))]
        payload_bytes: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run the HTTP/JSON service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "INV_BIND", default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    /// Event log and snapshot directory; the store is in-memory without it.
    #[arg(long, env = "INV_DATA_DIR")]
    pub data_dir: Option<PathBuf>,
    /// Deterministic scan model (the default).
    #[arg(long, env = "INV_DETERMINISTIC", conflicts_with = "seed")]
    pub deterministic: bool,
    /// Stochastic scan model seeded with N: DIFFICULT labels read with
    /// probability `--difficult-success`.
    #[arg(long, env = "INV_SEED", value_name = "N")]
    pub seed: Option<u64>,
    #[arg(long, env = "INV_DIFFICULT_SUCCESS", default_value_t = 0.5)]
    pub difficult_success: f64,
    /// Events between snapshots; 0 disables snapshots.
    #[arg(long, env = "INV_SNAPSHOT_EVERY", default_value_t = 100)]
    pub snapshot_every: u64,
    #[arg(long, env = "INV_LOG", default_value = "info")]
    pub log_level: tracing::Level,
}

impl ServeArgs {
    pub fn config(&self) -> Result<ServiceConfig, Box<dyn Error>> {
        let (scan_mode, seed) = match self.seed {
            Some(seed) => (ScanMode::stochastic(self.difficult_success)?, seed),
            None => (ScanMode::Deterministic, 0),
        };
        Ok(ServiceConfig {
            data_dir: self.data_dir.clone(),
            scan_mode,
            seed,
            snapshot_every: (self.snapshot_every > 0).then_some(self.snapshot_every),
            clock: Arc::new(SystemClock),
            ..ServiceConfig::default()
        })
    }
}

pub fn run(cli: Cli) -> Result<(), Box<dyn Error>> {
    match cli.command {
        Command::Table2 { step, out } => emit(&out, &table2_csv(step)?),
        Command::Table3 { out } => emit(&out, &table3_csv()),
        Command::Latency {
            n,
            payload_bytes,
            out,
        } => {
            let summary = latency_compare(n as usize, payload_bytes as usize)?;
            emit(&out, &summary.to_csv())
        }
        Command::Serve(args) => run_server(&args),
    }
}

fn emit(out: &OutArg, text: &str) -> Result<(), Box<dyn Error>> {
    match &out.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_server(args: &ServeArgs) -> Result<(), Box<dyn Error>> {
    tracing_subscriber::fmt()
        .with_max_level(args.log_level)
        .with_writer(io::stderr)
        .init();
    let config = args.config()?;
    let state = AppState::new(config)?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(args.bind).await?;
        tracing::info!(addr = %listener.local_addr()?, "listening");
        serve(listener, router(state), async {
            let _ = tokio::signal::ctrl_c().await;
            tracing::info!("shutting down");
        })
        .await
    })?;
    Ok(())
}
