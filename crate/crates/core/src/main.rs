fn main() {
    std::process::exit(qgated_polar::harness::cli_main(std::env::args_os()));
}
