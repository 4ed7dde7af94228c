fn main() {
    std::process::exit(bergman_bands::cli::dispatch(std::env::args_os()));
}
