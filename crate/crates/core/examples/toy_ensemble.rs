//! A three-layer ensemble over {1,2} in relaxed mode, its structural checks
//! and a split.
//!
//! cargo run --release --example toy_ensemble

use continuant::ensemble::{build_omega, ConstantsMode};
use continuant::Alphabet;

fn main() -> continuant::Result<()> {
    let mode = ConstantsMode::relaxed().with_override("J", 1.0)?.with_override("p", 2.0)?;
    let om = build_omega(1e9, 0.5, &Alphabet::range(2)?, &mode)?;
    for layer in &om.layers {
        let xi = &layer.xi;
        println!(
            "layer {}: M = {:.1}, shell ({:.1}, {}], length {}, {} members, first {}",
            layer.index,
            layer.m,
            xi.shell_floor(),
            xi.l,
            xi.k,
            xi.len(),
            xi.members[0]
        );
    }
    let s = om.schedule.as_ref().expect("built with a schedule");
    println!("schedule J = {}, worst identity error {:.1e}", s.j, s.verify().max_error());

    let r = om.structure_report()?;
    println!(
        "{} products, {} distinct, padding {}, fixed length {}, shells {}, golden {}",
        r.total, r.distinct_products, r.ones_padding, r.fixed_length, r.shell_membership, r.golden_ok
    );
    let split = om.split(s.at(0))?;
    println!("split at N_0: j = {}, h = {}, reconstruction {}", split.j_bar, split.h_bar, split.reconstruction_ok);
    Ok(())
}
