//! Prints a synthetic panel CSV.
//!
//! cargo run -p esgrisk --example synthetic_panel -- <seed> <assets> <dates>

fn main() {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let (seed, assets, dates) = match args[..] {
        [s, a, d] => (s, a as usize, d as usize),
        _ => {
            eprintln!("usage: synthetic_panel <seed> <assets> <dates>");
            std::process::exit(1);
        }
    };
    print!(
        "{}",
        esgrisk::generate::synthetic_panel_csv(seed, assets, dates)
    );
}
