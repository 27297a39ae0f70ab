// Admissible exponent region, decay rate and rescaling powers.

use hdual::{check_admissible, decay_exponent, rescaling_exponents};

pub fn main() -> hdual::Result<()> {
    for (n, p, q) in [(3, 5.0, 5.0), (3, 4.5, 6.0), (4, 3.5, 3.5), (5, 3.2, 3.2)] {
        let e = check_admissible(n, p, q)?;
        println!(
            "N={n} p={p} q={q}: p'={:.4} q'={:.4} lambda={:.4} beta=({:.4}, {:.4})",
            e.p_dual, e.q_dual, e.lambda, e.beta1, e.beta2
        );
    }
    println!("lambda(3,5,5) = {}", decay_exponent(3, 5.0, 5.0)?);
    println!("beta(4,6) = {:?}", rescaling_exponents(4.0, 6.0)?);
    for (n, p, q) in [(3, 6.0, 6.0), (3, 3.0, 8.0), (3, 4.0, 3.5)] {
        match check_admissible(n, p, q) {
            Err(hdual::Error::RegionViolation(r)) => println!("N={n} p={p} q={q}: rejected, {}", r.code()),
            other => println!("N={n} p={p} q={q}: {:?}", other.map(|e| e.lambda)),
        }
    }
    Ok(())
}
