fn main() {
    std::process::exit(schema_ensemble::cli::run(std::env::args_os()));
}
