//! Extracts raw instance features, fits a preprocessing recipe on a small
//! training set, and shows the scaled feature vector for a held-out instance.

use bion::features::{apply_recipe, fit_recipe, raw_features, ScalingMode};
use bion::generate::{generate, GenSpec};

fn main() {
    let train: Vec<_> = (0..8)
        .map(|i| generate(&GenSpec::bin_packing_default(i)).unwrap())
        .collect();
    let held_out = generate(&GenSpec::bin_packing_default(99)).unwrap();

    let raw = raw_features(&held_out);
    println!("{} raw features for {}:", raw.len(), held_out.name);
    for (name, value) in raw.iter().take(8) {
        println!("  {name:<28} {value:.4}");
    }
    println!("  ...");

    // the recipe keeps only informative features and freezes training-set
    // scaling parameters, so held-out instances never influence the scaling
    let recipe = fit_recipe(&train, ScalingMode::Standardize, 0.0).unwrap();
    println!(
        "\nrecipe keeps {} of {} features (schema {})",
        recipe.kept_features.len(),
        raw.len(),
        recipe.schema_id
    );

    let fv = apply_recipe(&held_out, &recipe).unwrap();
    for (name, value) in recipe.kept_features.iter().zip(&fv.values).take(8) {
        println!("  {name:<28} {value:+.4}");
    }
    println!("  ...");
}
