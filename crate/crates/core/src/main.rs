fn main() {
    std::process::exit(margulis_bounds::cli::run(std::env::args_os()));
}
