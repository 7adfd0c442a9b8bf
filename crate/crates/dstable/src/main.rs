fn main() {
    std::process::exit(dstable::cli::run(std::env::args_os()));
}
