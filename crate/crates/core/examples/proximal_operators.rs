//! The three closed-form maps the iteration is built from.

use glinf::prox::{clip_offdiag, expand, soft_threshold_offdiag};
use glinf::sym_eig::eig_sym;
use glinf::SymMatrix;

fn show(label: &str, m: &SymMatrix) {
    println!("{label}");
    for i in 0..m.order() {
        let row: Vec<String> = (0..m.order()).map(|j| format!("{:>8.4}", m.get(i, j))).collect();
        println!("  {}", row.join(" "));
    }
}

fn main() -> glinf::Result<()> {
    let a = SymMatrix::from_rows(&[&[0.5, -1.2, 0.3], &[-1.2, -0.4, 0.05], &[0.3, 0.05, 2.0]])?;
    show("A (indefinite)", &a);
    println!("  eigenvalues {:?}", eig_sym(&a)?.eigenvalues.as_slice());

    for rho in [0.5, 2.0, 50.0] {
        let t = expand(&a, rho)?;
        show(&format!("expand(A, rho = {rho})"), &t);
        let eig = eig_sym(&t)?;
        println!("  eigenvalues {:?}", eig.eigenvalues.as_slice());
        let inv = t.as_matrix().clone().try_inverse().expect("positive definite");
        let residual = (-inv + (t.as_matrix() - a.as_matrix()) * rho).amax();
        println!("  stationarity residual {residual:.2e}");
    }

    show("soft_threshold_offdiag(A, 0.25)", &soft_threshold_offdiag(&a, 0.25));
    show("clip_offdiag(A, 0.25)", &clip_offdiag(&a, 0.25));
    Ok(())
}
