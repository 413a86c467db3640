//! Generates seeded instances from both problem families and prints a short
//! summary for each, plus the canonical JSON of one instance.

use bion::generate::{generate, generate_batch, GenSpec};
use bion::serialize_instance;

fn main() {
    let bp = generate_batch(&GenSpec::bin_packing_default(42), 3).unwrap();
    let js = generate_batch(&GenSpec::jobshop_default(42), 3).unwrap();

    for m in bp.iter().chain(&js) {
        println!(
            "{:<24} {:>3} vars {:>3} constraints objective {} in [{}, {}]",
            m.name,
            m.variables.len(),
            m.constraints.len(),
            m.objective,
            m.objective_domain().lb,
            m.objective_domain().ub,
        );
    }

    let one = generate(&GenSpec::bin_packing_default(7)).unwrap();
    println!("\ncanonical JSON of {}:", one.name);
    print!("{}", String::from_utf8(serialize_instance(&one)).unwrap());
}
