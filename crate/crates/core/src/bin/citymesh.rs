use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use citymesh::citygml::{validate_triangles, ExportOptions, OpeningPlacement, SchemaLocations};
use citymesh::server::Server;
use citymesh::session::{self, Session, SessionService};

#[derive(Parser)]
#[command(name = "citymesh", version, about = "OBJ building mesh to CityGML 2.0 LOD3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the JSON session protocol over TCP.
    Serve {
        #[arg(long, default_value_t = 7878)]
        port: u16,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
    /// Replay a saved session on a model and write CityGML.
    Convert {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Document name; defaults to the output file name.
        #[arg(long)]
        name: Option<String>,
        /// Write 2.0 schema locations instead of the legacy 1.0 ones.
        #[arg(long)]
        corrected_schema: bool,
        /// Nest openings under the wall they adjoin.
        #[arg(long)]
        nested_openings: bool,
    },
    /// Report ring problems per triangle of the raw file.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Print mesh statistics.
    Info {
        #[arg(long)]
        model: PathBuf,
    },
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Serve { port, model, host } => {
            let session = Session::open(&model)?;
            let server = Server::bind((host.as_str(), port), Arc::new(SessionService::new(session)))?;
            log::info!("listening on {}", server.local_addr()?);
            println!("listening on {}", server.local_addr()?);
            server.run()?;
        }
        Command::Convert {
            model,
            session: session_file,
            out,
            name,
            corrected_schema,
            nested_openings,
        } => {
            let options = ExportOptions {
                schema: if corrected_schema {
                    SchemaLocations::Corrected
                } else {
                    SchemaLocations::Legacy
                },
                openings: if nested_openings {
                    OpeningPlacement::Nested
                } else {
                    OpeningPlacement::Flat
                },
            };
            let faces = session::convert(&model, &session_file, &out, name.as_deref(), &options)?;
            log::info!("wrote {} ({faces} faces)", out.display());
        }
        Command::Validate { model } => {
            let data = citymesh::obj::parse_obj_file(&model)?;
            let issues = validate_triangles(&data.vertices, &data.triangles);
            for issue in &issues {
                println!("{}\t{}", issue.face, issue.code.as_str());
            }
            if !issues.is_empty() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Info { model } => {
            let session = Session::open(&model)?;
            let mesh = session.mesh();
            println!("model\t{}", model.display());
            println!("sha256\t{}", session.model_sha256());
            println!("vertices\t{}", mesh.vertices().len());
            println!("faces\t{}", mesh.face_count());
            println!("dropped_degenerate\t{}", mesh.dropped_degenerate());
            println!("components\t{}", session.components().len());
            if let Some(b) = mesh.bounds() {
                println!("bounds_min\t{} {} {}", b.min.x, b.min.y, b.min.z);
                println!("bounds_max\t{} {} {}", b.max.x, b.max.y, b.max.z);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CITYMESH_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
