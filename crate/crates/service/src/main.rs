use std::net::{IpAddr, Ipv4Addr, SocketAddr};

use clap::Parser;

/// Local HTTP API for the spectral designer.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[arg(long, default_value_t = spectral_service::DEFAULT_PORT)]
    port: u16,
    /// Address to bind; loopback unless overridden.
    #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
    host: IpAddr,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let args = Args::parse();
    spectral_service::serve(SocketAddr::new(args.host, args.port)).await
}
