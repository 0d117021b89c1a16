//! Sum the resolvent power series of the shift ladder and compare it with
//! the squared-eigenfunction gradient of the transition coefficient.
//!
//! Run with: cargo run --example resolvent_expansion

use alh::lattice::random_state;
use alh::scattering::{self, ResolventKind};
use alh::C64;

fn main() {
    let s = random_state(32, 42, 0.1, 0.15).unwrap();
    println!("{:>12} {:>10} {:>12} {:>12}", "z", "kind", "tail bound", "residual");
    for z in [C64::new(2.0, 0.0), C64::new(1.7, 0.3), C64::new(0.0, 3.0)] {
        // Outside the unit circle: powers of the forward ladder.
        let sum = scattering::resolvent_series(&s, z, ResolventKind::L, 30).unwrap();
        let reference = scattering::resolvent_reference(&s, z, ResolventKind::L).unwrap();
        let d = sum.field.sub(&reference).norm_inf_interior(2) / reference.norm_inf();
        println!("{:>12} {:>10} {:>12.3e} {:>12.3e}", format!("{z}"), "L", sum.tail_bound, d);
        assert!(d < 1e-8);

        // Inside the unit circle (the reciprocal point): the backward ladder.
        let zr = C64::new(1.0, 0.0) / z;
        let sum = scattering::resolvent_series(&s, zr, ResolventKind::Linv, 30).unwrap();
        let reference = scattering::resolvent_reference(&s, zr, ResolventKind::Linv).unwrap();
        let d = sum.field.sub(&reference).norm_inf_interior(2) / reference.norm_inf();
        println!("{:>12} {:>10} {:>12.3e} {:>12.3e}", format!("{zr}"), "Linv", sum.tail_bound, d);
        assert!(d < 1e-8);
    }
    println!("both resolvent expansions reproduce the gradients");
}
