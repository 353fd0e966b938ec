fn main() {
    std::process::exit(rstsf::cli::run(std::env::args_os()));
}
