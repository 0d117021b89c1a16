//! Assemble the shift-ladder operators and confirm the structural identities
//! that make the recursion operator work: inverse pairs, adjoint relations,
//! and skew-symmetry of both Hamiltonian operators.
//!
//! Run with: cargo run --example operator_identities

use alh::lattice::{bilinear_form, random_state};
use alh::operators::{self, interior_entry_diff, OpName};

fn main() {
    let s = random_state(32, 42, 0.1, 0.15).unwrap();
    let n = s.n();

    let l = operators::assemble(OpName::L, &s).unwrap();
    let linv = operators::assemble(OpName::Linv, &s).unwrap();
    let lp = operators::assemble(OpName::Lplus, &s).unwrap();
    let lm = operators::assemble(OpName::Lminus, &s).unwrap();
    let r = operators::assemble(OpName::R, &s).unwrap();
    let s3 = operators::assemble(OpName::Sigma3, &s).unwrap();

    // Lplus = L + Linv, entry by entry.
    let sum = &l.entries + &linv.entries;
    let d = (&lp.entries - &sum).map(|v| v.norm()).max();
    println!("Lplus = L + Linv                    residual {d:.3e}");
    assert!(d < 1e-13);

    // L and Linv invert each other away from the window edges.
    let prod = &l.entries * &linv.entries;
    let id = nalgebra::DMatrix::identity(2 * n, 2 * n);
    let d = interior_entry_diff(&prod, &id, n, 3);
    println!("L Linv = I (interior)               residual {d:.3e}");
    assert!(d < 1e-9);

    // Lminus is the sigma3-conjugated adjoint of Lplus.
    let lpadj = operators::adjoint(&lp, &s).unwrap();
    let conj = &s3.entries * &lpadj.entries * &s3.entries;
    let d = interior_entry_diff(&lm.entries, &conj, n, 3);
    println!("Lminus = sigma3 Lplus* sigma3       residual {d:.3e}");
    assert!(d < 1e-10);

    // The recursion operator transforms the same way.
    let radj = operators::adjoint(&r, &s).unwrap();
    let conj = &s3.entries * &r.entries * &s3.entries;
    let d = interior_entry_diff(&radj.entries, &conj, n, 3);
    println!("R* = sigma3 R sigma3                residual {d:.3e}");
    assert!(d < 1e-10);

    // Both Hamiltonian operators are skew in the lattice bilinear form.
    for name in [OpName::J, OpName::K] {
        let op = operators::assemble(name, &s).unwrap();
        let mut worst = 0.0f64;
        for pair in 0..20u64 {
            let u = random_state(n, 100 + pair, 0.3, 0.0).unwrap().qr_field();
            let v = random_state(n, 200 + pair, 0.3, 0.0).unwrap().qr_field();
            let uv = bilinear_form(&u, &operators::apply(&op, &v).unwrap(), &s).unwrap();
            let vu = bilinear_form(&v, &operators::apply(&op, &u).unwrap(), &s).unwrap();
            worst = worst.max((uv + vu).norm());
        }
        println!("{:28} residual {worst:.3e}", format!("{} skew-symmetric", name.as_str()));
        assert!(worst < 1e-10);
    }
    println!("all operator identities passed");
}
