fn main() {
    std::process::exit(butterfly_ramsey::cli::run(std::env::args_os()));
}
