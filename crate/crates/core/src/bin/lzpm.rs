fn main() {
    std::process::exit(lzpm::harness::cli::cli_main(std::env::args_os()));
}
