fn main() {
    std::process::exit(samplescreen::cli::run(std::env::args_os()));
}
