use std::io;

fn main() {
    let code = corrterm_cli::run(
        std::env::args_os(),
        std::env::var_os(corrterm_cli::CACHE_ENV),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
