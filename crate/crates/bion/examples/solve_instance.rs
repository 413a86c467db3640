//! Solves one instance of each family with the branch-and-bound solver and
//! prints the improving-solution log, verdict, and search effort.

use bion::generate::{generate, GenSpec};
use bion::solver::solve;
use bion::SolverConfig;

fn main() {
    for spec in [GenSpec::bin_packing_default(3), GenSpec::jobshop_default(3)] {
        let m = generate(&spec).unwrap();
        let out = solve(&m, &SolverConfig::default());
        println!("{}:", m.name);
        for s in &out.solution_log {
            println!("  node {:>6}: objective {}", s.nodes, s.objective);
        }
        println!(
            "  verdict {:?}, optimum {:?}, {} nodes explored",
            out.verdict, out.best_objective, out.nodes_explored
        );
        if let Some(assignment) = &out.assignment {
            let obj = assignment[&m.objective];
            println!("  {} = {} in the final assignment\n", m.objective, obj);
        }
    }
}
