//! Brute-force checks of the numerical lemmas in exact exponent arithmetic.

use amice_core::lemmas::{run, LemmaId, LemmaRange};

fn main() -> amice_core::Result<()> {
    for p in [2, 3, 5] {
        for which in LemmaId::ALL {
            let rep = run(&LemmaRange::default_for(which, p))?;
            println!("p = {p} {:<9} {:>7} cases, {} counterexamples", which.name(), rep.cases.len(), rep.counterexamples);
        }
    }
    let r = LemmaRange { n_min: 3, n_max: 3, k_max: 40, ..LemmaRange::default_for(LemmaId::L3_0_10, 2) };
    let rep = run(&r)?;
    println!("|k!/3!|^(1/(k-3)) >= |2|^{} for k = 4..40: {}", rep.cases[0].rhs_exponent, rep.holds());
    Ok(())
}
