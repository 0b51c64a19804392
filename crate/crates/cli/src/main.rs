use figforge_core::HttpTransport;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    let code = figforge_cli::dispatch(&argv, &HttpTransport, &mut stdout, &mut stderr);
    std::process::exit(code);
}
