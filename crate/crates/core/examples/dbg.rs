use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;
use telegain::channel::{GaussianChannel, ResourceParams};
use telegain::qubit::{build_input, teleport_dual_rail, DualRailInput};
use telegain::transition::resolve_cutoff;

fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let n = m.nrows();
    let mut scaled = eig.eigenvectors.clone();
    for (c, &v) in eig.eigenvalues.iter().enumerate() {
        let s = Complex64::new(v.max(0.0).sqrt(), 0.0);
        for r in 0..n {
            scaled[(r, c)] *= s;
        }
    }
    &scaled * eig.eigenvectors.adjoint()
}

fn main() {
    let s = 1.0 / 2.0f64.sqrt();
    let spec = DualRailInput::new(Complex64::new(s, 0.0), Complex64::new(0.0, -s), 0.69, 0.06).unwrap();
    let p = ResourceParams::new(1.01, 0.2).unwrap();
    let ch = GaussianChannel::teleport(&p, 0.79).unwrap();
    let cutoff = resolve_cutoff(None, ch.lambda()).unwrap();
    let rho_in = build_input(&spec, cutoff).unwrap();
    let rho_out = teleport_dual_rail(&spec, &ch, cutoff).unwrap();

    let sq = psd_sqrt(rho_out.matrix());
    println!("sqrt(out) nan: {}", sq.iter().any(|v| v.re.is_nan() || v.im.is_nan()));
    let inner = &sq * rho_in.matrix() * &sq;
    println!("inner nan: {}", inner.iter().any(|v| v.re.is_nan() || v.im.is_nan()));
    let h = (&inner + inner.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h.clone());
    let nan_vals = eig.eigenvalues.iter().filter(|v| v.is_nan()).count();
    println!("eig nan count: {} / {}", nan_vals, eig.eigenvalues.len());
    for (eps, it) in [(1e-13f64, 2000usize), (1e-10, 2000), (1e-9, 5000)] {
        match SymmetricEigen::try_new(h.clone(), eps, it) {
            Some(e) => {
                let nn = e.eigenvalues.iter().filter(|v| v.is_nan()).count();
                let sum: f64 = e.eigenvalues.iter().sum();
                println!("try_new eps={eps:.0e} iter={it}: nan {nn}, sum {sum:.15}, trace {:.15}", h.trace().re);
            }
            None => println!("try_new eps={eps:.0e} iter={it}: did not converge"),
        }
    }
    // check eigenvector NaN of rho_out eigen itself
    let eig2 = SymmetricEigen::new((rho_out.matrix() + rho_out.matrix().adjoint()).scale(0.5));
    println!("out eigvec nan: {}", eig2.eigenvectors.iter().any(|v| v.re.is_nan()));
    println!("inner trace {} norm {}", inner.trace(), inner.norm());
}
