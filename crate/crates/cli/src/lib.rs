//! Command-line front end: parameter resolution, subcommand dispatch,
//! output files and run manifests.
//!
//! Every run writes its outputs plus `manifest.txt` into the output directory
//! (`--out`, else `$RHIZOME_OUT`, else `rhizome-out`). `rhizome replay
//! <manifest>` re-runs a recorded invocation.
//!
//! Exit codes: 0 success, 1 domain or I/O error, 2 usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches, Command};

mod commands;
pub mod params;
pub mod svg;

pub use params::{ParamSpec, Params};
pub use svg::{render_svg, Artifact};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] rhizome::Error),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Files and console text produced by one subcommand.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outputs {
    pub files: BTreeMap<String, String>,
    pub stdout: String,
}

impl Outputs {
    pub fn file(&mut self, name: &str, contents: impl Into<String>) {
        self.files.insert(name.to_string(), contents.into());
    }

    pub fn say(&mut self, line: impl AsRef<str>) {
        self.stdout.push_str(line.as_ref());
        self.stdout.push('\n');
    }
}

pub struct CommandSpec {
    pub name: &'static str,
    pub about: &'static str,
    pub params: Vec<ParamSpec>,
    pub run: fn(&Params) -> Result<Outputs, CliError>,
}

/// What a finished run wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub out_dir: PathBuf,
    pub params: Params,
    pub outputs: Outputs,
}

pub fn command_specs() -> Vec<CommandSpec> {
    commands::all()
}

fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

fn cli(specs: &[CommandSpec]) -> Command {
    let common = |c: Command| {
        c.arg(Arg::new("config").long("config").value_name("FILE").help("key = value file"))
            .arg(
                Arg::new("set")
                    .long("set")
                    .value_name("KEY=VALUE")
                    .action(ArgAction::Append)
                    .help("override any parameter; applied last"),
            )
            .arg(Arg::new("out").long("out").value_name("DIR").help("output directory"))
    };
    let mut app = Command::new("rhizome")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Root-growth computing simulations")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for spec in specs {
        let mut sub = common(Command::new(spec.name).about(spec.about));
        for p in &spec.params {
            let help = if p.default.is_empty() {
                p.help.to_string()
            } else {
                format!("{} [default: {}]", p.help, p.default)
            };
            sub = sub.arg(
                Arg::new(p.key)
                    .long(flag_name(p.key))
                    .value_name("VALUE")
                    .allow_negative_numbers(true)
                    .help(help),
            );
        }
        app = app.subcommand(sub);
    }
    app.subcommand(
        Command::new("replay")
            .about("re-run a recorded manifest")
            .arg(Arg::new("manifest").required(true).value_name("MANIFEST"))
            .arg(Arg::new("out").long("out").value_name("DIR").help("output directory")),
    )
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn resolve(spec: &CommandSpec, m: &ArgMatches) -> Result<Params, CliError> {
    let mut params = Params::defaults(&spec.params);
    if let Some(cfg) = m.get_one::<String>("config") {
        let text = read(Path::new(cfg))?;
        for (k, v) in params::parse_key_values(&text, cfg)? {
            params.set(&k, &v)?;
        }
    }
    for p in &spec.params {
        if m.value_source(p.key) == Some(ValueSource::CommandLine) {
            if let Some(v) = m.get_one::<String>(p.key) {
                params.set(p.key, v)?;
            }
        }
    }
    for kv in m.get_many::<String>("set").into_iter().flatten() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        params.set(k.trim(), v.trim())?;
    }
    Ok(params)
}

fn out_dir(m: &ArgMatches) -> PathBuf {
    m.get_one::<String>("out")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("RHIZOME_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("rhizome-out"))
}

fn execute(spec: &CommandSpec, params: Params, dir: PathBuf) -> Result<RunReport, CliError> {
    let outputs = (spec.run)(&params)?;
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
    for (name, contents) in &outputs.files {
        let p = dir.join(name);
        std::fs::write(&p, contents).map_err(|e| CliError::Io(p.display().to_string(), e))?;
    }
    let names: Vec<&str> = outputs.files.keys().map(String::as_str).collect();
    let manifest = params::manifest_text(spec.name, &params, &names);
    let mp = dir.join(params::MANIFEST);
    std::fs::write(&mp, manifest).map_err(|e| CliError::Io(mp.display().to_string(), e))?;
    Ok(RunReport {
        command: spec.name.to_string(),
        out_dir: dir,
        params,
        outputs,
    })
}

/// Parses `argv` (program name first) and runs the subcommand. Help and
/// version requests come back as `Ok(None)` after printing.
pub fn run<I, T>(argv: I) -> Result<Option<RunReport>, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let specs = command_specs();
    let matches = match cli(&specs).try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    Ok(None)
                }
                _ => Err(CliError::Usage(e.render().to_string())),
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    if name == "replay" {
        let manifest = Path::new(sub.get_one::<String>("manifest").expect("required"));
        let (command, assignments) = params::read_manifest(&read(manifest)?)?;
        let spec = specs
            .iter()
            .find(|s| s.name == command)
            .ok_or_else(|| CliError::Usage(format!("manifest names unknown command {command:?}")))?;
        let mut params = Params::defaults(&spec.params);
        for (k, v) in assignments {
            params.set(&k, &v)?;
        }
        return execute(spec, params, out_dir(sub)).map(Some);
    }
    let spec = specs.iter().find(|s| s.name == name).expect("registered subcommand");
    let params = resolve(spec, sub)?;
    execute(spec, params, out_dir(sub)).map(Some)
}

/// Runs `argv` and maps the outcome to a process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run(argv) {
        Ok(Some(report)) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(report.outputs.stdout.as_bytes());
            let _ = writeln!(out, "wrote {}", report.out_dir.join(params::MANIFEST).display());
            0
        }
        Ok(None) => 0,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprint!("{}", if msg.ends_with('\n') { msg.clone() } else { format!("error: {msg}\n") }),
                other => eprintln!("error: {other}"),
            }
            e.exit_code()
        }
    }
}
