//! Write a sampled field to an HHF1 file and read it back.

use hardy_hodge::grid::{lp_norm, FieldKind, GridSpec};
use hardy_hodge::io::{read_field, sidecar_path, write_field, write_sidecar};
use hardy_hodge::synth::{synth_field, Recipe};
use serde_json::json;

fn main() -> hardy_hodge::Result<()> {
    let spec = GridSpec::new(vec![24, 16], vec![3.0, 2.0])?;
    let recipe = Recipe::BandlimitedRandom { max_freq: 5 };
    let field = synth_field(&spec, FieldKind::Paravector, &recipe, 11)?;

    let dir = std::env::temp_dir().join("hardy-hodge-field-io");
    std::fs::create_dir_all(&dir).map_err(|e| hardy_hodge::Error::Io { path: dir.clone(), source: e })?;
    let path = dir.join("field.hhf");
    write_field(&field, &path)?;
    write_sidecar(&path, &json!({ "recipe": recipe, "seed": 11 }))?;

    let back = read_field(&path)?;
    let bytes = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
    println!("wrote {} ({bytes} bytes) and {}", path.display(), sidecar_path(&path).display());
    println!("kind {}, shape {:?}, lengths {:?}", back.kind(), back.spec().shape, back.spec().lengths);
    println!("identical after round trip: {}", back == field);
    println!("L2 norm {:.6}", lp_norm(&back, 2.0));
    Ok(())
}
