//! q-integers, q-factorials, binomial powers q^alpha, kappa and omega_q.

use amice_core::amice::{q_factorial_root_exponent, QParam};
use amice_core::PAdic;

fn main() -> amice_core::Result<()> {
    let q = QParam::from_int(3, 4, 40)?;
    println!("q = 4 over Z_3: |q - 1| = {}, kappa = {}, omega_q = {}", q.q_minus_one_norm(), q.kappa(), q.omega_q());
    println!("[3]_q! = {:?}", q.q_factorial(3).to_i64());
    println!("C(4, 2)_q = {:?}", q.q_binomial(4, 2)?.to_i64());
    let half = PAdic::parse_rational(3, "1/2", 40)?;
    let r = q.q_power(&half, None)?;
    println!("q^(1/2) squared recovers q: {}", r.mul(&r).agrees_with(q.q()));
    for n in [50, 100, 200] {
        println!("|[{n}]_q!|^(1/n) has exponent {:?}", q_factorial_root_exponent(&q, n));
    }

    let wide = QParam::from_int(2, 3, 40)?;
    println!("q = 3 over Z_2: kappa = {}, omega_q = {}", wide.kappa(), wide.omega_q());
    Ok(())
}
