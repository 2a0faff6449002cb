fn main() {
    std::process::exit(rda_core::cli_io::cli_dispatch(std::env::args_os()));
}
