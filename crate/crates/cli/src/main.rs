fn main() {
    std::process::exit(hadamard_cli::app::run() as i32)
}
