fn main() {
    std::process::exit(rpqrewrite::cli::run(std::env::args_os()));
}
