fn main() { std::process::exit(demon_opt::cli::run()); }
