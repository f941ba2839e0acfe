fn main() {
    std::process::exit(netiv::cli::run(std::env::args_os()));
}
