fn main() {
    std::process::exit(gelp::cli::dispatch(std::env::args_os()));
}
