fn main() { std::process::exit(circlegather::cli::main()); }
