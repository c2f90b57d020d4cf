fn main() {
    let seed = std::env::var(decouple_cli::SEED_ENV).ok();
    std::process::exit(decouple_cli::main_with(std::env::args_os(), seed.as_deref()));
}
