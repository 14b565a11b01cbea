//! The non-contact transform and the probability bound it yields.
//!
//! `phi(xi) = exp(int_xi^delta_o ds/(s r(s)))` blows up as the squared pair
//! distance shrinks; the bound `phi(xi0) e^{Ct} / phi(eps)` then caps how
//! likely the pair is to contract from `xi0` to `eps` before time `t`.
//! For the log modulus `phi(xi) = log(1/xi)/log(1/delta_o)` exactly.
//!
//! ```bash
//! cargo run -p flowlab --example contact_bounds
//! ```

use flowlab::lyapunov::{noncontact_probability_bound, ContactTransform};
use flowlab::modulus::ModulusSpec;

fn main() -> flowlab::Result<()> {
    let transform = ContactTransform::new(ModulusSpec::log());
    let delta_o = transform.modulus().delta_o();

    println!("phi along a geometric grid (closed form vs quadrature):");
    for k in 0..=6 {
        let xi = delta_o * 10f64.powf(-2.0 * k as f64);
        let closed = transform.phi(xi)?;
        let quad = transform.psi_quadrature(xi)?.exp();
        println!("  xi = {xi:>12.3e}   phi = {closed:>12.6}   |closed - quad| = {:.2e}", (closed - quad).abs());
    }

    let xi0 = (-4.0f64).exp();
    println!("\nnon-contact bound from xi0 = e^-4, C = 1, horizon = 1:");
    for k in 3..=8 {
        let eps = (-2.0 * k as f64).exp();
        let bound = noncontact_probability_bound(&transform, xi0, eps, 1.0, 1.0)?;
        println!("  P(contact at eps = e^{:>3}) <= {bound:.6}", -2 * k);
    }
    println!("(the bound decays to zero as eps does: that is the non-confluence mechanism)");
    Ok(())
}
