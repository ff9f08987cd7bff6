fn main() {
    std::process::exit(oam_cat::cli::run());
}
