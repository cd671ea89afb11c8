fn main() {
    std::process::exit(fbregion::cli::run(std::env::args_os()));
}
