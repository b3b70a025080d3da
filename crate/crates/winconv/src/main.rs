fn main() {
    std::process::exit(winconv::cli::run());
}
