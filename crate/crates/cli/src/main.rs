fn main() {
    std::process::exit(goa_ids_cli::run(std::env::args_os()));
}
