fn main() {
    let tolerance = std::env::var(mmsim::TOLERANCE_ENV).ok();
    let code = mmsim::run(
        std::env::args_os(),
        tolerance.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
