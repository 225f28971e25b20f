//! Products in Cl(3) and the quaternions.

use hardy_hodge::clifford::{blade_product, BladeIndex, Multivector, Quaternion};

fn main() -> hardy_hodge::Result<()> {
    let n = 3;
    let e1 = Multivector::e(n, 1)?;
    let e2 = Multivector::e(n, 2)?;

    // Generators square to -1 and anticommute.
    println!("e1 e1     = {:?}", e1.mul(&e1)?.coeffs());
    println!("e1 e2     = {:?}", e1.mul(&e2)?.coeffs());
    println!("e2 e1     = {:?}", e2.mul(&e1)?.coeffs());

    let (sign, blade) = blade_product(BladeIndex(0b011), BladeIndex(0b110), n)?;
    println!("e12 e23   = {sign} * blade {:03b}", blade.0);

    // A paravector times its conjugate is |x|^2.
    let x = Multivector::paravector(n, &[1.0, 2.0, -0.5, 3.0])?;
    let xx = x.mul(&x.conjugate())?;
    println!("x conj(x) = {:.4} (|x|^2 = {:.4})", xx.sc_part(), x.norm().powi(2));
    println!("grade>0 part of x conj(x): {:.1e}", xx.nsc_part().norm());

    // Quaternions: e3 = e1 e2.
    let q = Quaternion::E1 * Quaternion::E2;
    println!("e1 e2 as quaternions = {:?}", q.to_array());
    let a = Quaternion::new(0.5, -1.0, 2.0, 0.25);
    println!("a conj(a) = {:?}", (a * a.conjugate()).to_array());
    Ok(())
}
