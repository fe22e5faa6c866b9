fn main() {
    std::process::exit(mtl_synth::cli::run());
}
