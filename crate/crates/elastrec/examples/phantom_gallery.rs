//! Evaluate the shipped phantom presets on a mesh and print their ranges.
//!
//! Run with: cargo run --example phantom_gallery

use elastrec::{build_unit_square_mesh, compose_phantom, PhantomPreset};

fn range(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

fn main() -> elastrec::Result<()> {
    let mesh = build_unit_square_mesh(64)?;
    for preset in [
        PhantomPreset::Smooth,
        PhantomPreset::NearDiscontinuous,
        PhantomPreset::ThreeInclusions,
    ] {
        let field = compose_phantom(&preset.spec(), &mesh)?;
        let (l_lo, l_hi) = range(&field.lambda.values);
        let (m_lo, m_hi) = range(&field.mu.values);
        println!(
            "{preset:?}: lambda in [{l_lo:.3}, {l_hi:.3}] kPa, mu in [{m_lo:.3}, {m_hi:.3}] kPa"
        );
    }
    Ok(())
}
