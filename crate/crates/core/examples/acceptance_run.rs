fn main() {
    for check in baseloci::verification::run_acceptance() {
        println!("{}", check.line());
    }
}
