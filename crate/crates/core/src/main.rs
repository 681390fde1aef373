fn main() {
    // Unlocked handles: progress lines are written to stderr from worker threads.
    let code = geogrowth::cli::run(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    std::process::exit(code);
}
