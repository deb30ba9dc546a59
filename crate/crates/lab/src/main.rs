fn main() {
    std::process::exit(fockgibbs_lab::cli::run(std::env::args_os()));
}
