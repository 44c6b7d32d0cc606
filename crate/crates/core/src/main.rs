fn main() {
    std::process::exit(ags_qaoa::cli::cli_main(std::env::args_os()));
}
