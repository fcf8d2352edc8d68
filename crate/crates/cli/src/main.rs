fn main() {
    std::process::exit(pisot_ifs_cli::main_entry(std::env::args_os()));
}
