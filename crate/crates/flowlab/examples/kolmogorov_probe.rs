//! Why the continuity argument works for the log modulus but not for the
//! iterated-log modulus.
//!
//! A power-law moment bound `phi0^alpha` needs
//! `[log(1/phi0)]^{exp(-Ct)} >= alpha log(1/phi0)` uniformly as `phi0 -> 0`.
//! The probe evaluates the ratio of the two sides on a log-scale grid: for
//! the iterated-log envelope it decays to zero (no `alpha > 0` works at any
//! `t > 0`), while the plain log envelope keeps the constant exponent
//! `exp(-Ct)` — small, but a genuine power.
//!
//! ```bash
//! cargo run -p flowlab --example kolmogorov_probe
//! ```

use flowlab::lyapunov::kolmogorov_feasibility_probe;

fn main() -> flowlab::Result<()> {
    let grid = [10.0, 1e2, 1e3, 1e4, 1e5, 1e6]; // log(1/phi0)
    for t in [0.0, 0.5, 1.0, 2.0] {
        let rep = kolmogorov_feasibility_probe(&grid, 1.0, t)?;
        println!(
            "t = {t:<4}  log-family exponent = {:.6}  iterated-log ratios:",
            rep.log_family_exponent
        );
        for (u, r) in rep.log_inv_phi0.iter().zip(&rep.ratios) {
            println!("    log(1/phi0) = {u:>9.1e}   ratio = {r:.6e}");
        }
        println!(
            "    strictly decreasing: {} {}",
            rep.ratios_strictly_decreasing,
            if t > 0.0 { "(no single power dominates)" } else { "(t = 0: identity)" }
        );
    }
    Ok(())
}
