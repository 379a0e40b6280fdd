fn main() {
    std::process::exit(fas_extremes::cli::run_cli(std::env::args_os()));
}
