fn main() {
    std::process::exit(rhizome_cli::dispatch(std::env::args_os()));
}
