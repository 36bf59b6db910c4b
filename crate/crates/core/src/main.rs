fn main() {
    std::process::exit(heatbind::cli::main_with_args(std::env::args_os()));
}
