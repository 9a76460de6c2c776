fn main() {
    std::process::exit(gevrey_nse_cli::run(std::env::args_os()));
}
