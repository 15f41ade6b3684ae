fn main() {
    // CLI wiring arrives with the cli module.
}
