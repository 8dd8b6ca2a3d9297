fn main() {
    std::process::exit(harq_outage::cli::run(std::env::args_os()));
}
