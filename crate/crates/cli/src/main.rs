fn main() {
    std::process::exit(kbshell_cli::run_cli(std::env::args_os()));
}
