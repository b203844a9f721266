use lrbac::oracle::{run_suite, SuiteConfig};
fn main() {
    let terms: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let start = std::time::Instant::now();
    let cfg = SuiteConfig { seed: 0xC0FFEE, terms, depth: 6, fuel: 10_000 };
    let report = run_suite(&cfg).unwrap();
    for c in &report.checks {
        println!("{:<24} cases={:<5} failed={} flagged={} {:?}",
            c.name, c.cases, c.failed, c.flagged, c.counterexamples.first());
    }
    println!("elapsed for terms={terms}: {:?}", start.elapsed());
}
