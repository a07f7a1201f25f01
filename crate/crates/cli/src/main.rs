fn main() {
    let seed = std::env::var(degen_atlas_cli::SEED_ENV).ok();
    let out = degen_atlas_cli::run(std::env::args_os(), seed.as_deref());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
