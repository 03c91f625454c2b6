//! Sort the one-path polarization-OAM pair state by polarization, then
//! verify the resulting OAM entanglement with the witness.
//!
//! Run with `cargo run -p spinorb --example sort_and_verify`.

use spinorb::circuits::{named_pipeline, run_pipeline};
use spinorb::witness::{bell_witness, WitnessDof};

fn main() -> Result<(), spinorb::Error> {
    // Sort the joint polarization-OAM state by polarization ...
    let pipeline = named_pipeline("pair-sort-pol")?;
    let run = run_pipeline(&pipeline, 1)?;
    assert!(run.fidelity.unwrap() > 1.0 - 1e-12);

    // ... and verify the resulting OAM entanglement between the paths.
    let witness = bell_witness(&run.registry, WitnessDof::Oam, (1, 2))?;
    let result = witness.expectation(&run.output)?;
    assert!((result.value + 0.5).abs() < 1e-12);

    println!(
        "sorted {} into {} with fidelity {:.12}",
        pipeline.source,
        pipeline.expected.unwrap(),
        run.fidelity.unwrap()
    );
    println!(
        "witness value {:+.12} (entangled: {})",
        result.value,
        result.value < 0.0
    );
    Ok(())
}
