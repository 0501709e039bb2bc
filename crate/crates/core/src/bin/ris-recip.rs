fn main() {
    std::process::exit(ris_recip::cli::run(std::env::args_os()));
}
