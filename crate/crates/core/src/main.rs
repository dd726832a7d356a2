fn main() {
    let threads = std::env::var("GERMLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    std::process::exit(germlab::cli::run(std::env::args_os(), threads));
}
