fn main() {
    std::process::exit(mrclab_core::cli::run(std::env::args_os()));
}
