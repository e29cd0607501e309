use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "fixtures", about = "Scripted mock REST services")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the fixture catalog
    List,
    /// Print a fixture's OpenAPI document
    Spec { name: String },
    /// Serve a fixture until interrupted
    Serve {
        name: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

fn main() {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for name in apirefine_fixtures::catalog() {
                let f = apirefine_fixtures::fixture(name).expect("catalog entries build");
                println!("{name:<14} {}", f.summary);
            }
        }
        Command::Spec { name } => match apirefine_fixtures::fixture(&name) {
            Some(f) => print!("{}", f.document),
            None => fail(&format!("unknown fixture `{name}`")),
        },
        Command::Serve { name, port } => {
            let Some(f) = apirefine_fixtures::fixture(&name) else { fail(&format!("unknown fixture `{name}`")) };
            match apirefine_fixtures::serve_fixture(f, port) {
                Ok(h) => {
                    println!("{name} listening on {}", h.base_url());
                    h.wait();
                }
                Err(e) => fail(&e.to_string()),
            }
        }
    }
}

fn fail(msg: &str) -> ! {
    eprintln!("fixtures: {msg}");
    std::process::exit(1)
}
