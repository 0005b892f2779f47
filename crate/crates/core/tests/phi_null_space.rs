//! Dimension of the space of linear vector fields `V(u) = M u` that annihilate
//! every coordinate `x_k = uᵀ S_k u`, i.e. `Mᵀ S_k + S_k M = 0` for all `k`.

use nalgebra::DMatrix;
use quadmap::{build_matrix, FamilyDescriptor};

fn coordinate_forms(f: FamilyDescriptor) -> Vec<DMatrix<f64>> {
    let t = build_matrix(f);
    let d = f.osc_dim();
    (0..f.atom_dim())
        .map(|k| {
            let mut a = DMatrix::<f64>::zeros(d, d);
            for j in 0..d {
                let e = t.entry(k, j);
                if !e.is_zero() {
                    a[(e.index, j)] += e.sign as f64;
                }
            }
            (&a + a.transpose()) * 0.5
        })
        .collect()
}

/// Nullity of `M ↦ (Mᵀ S_k + S_k M)_k`.
fn nullity(f: FamilyDescriptor) -> usize {
    let d = f.osc_dim();
    let forms = coordinate_forms(f);
    let mut system = DMatrix::<f64>::zeros(forms.len() * d * d, d * d);
    for (k, s) in forms.iter().enumerate() {
        for a in 0..d {
            for b in 0..d {
                let row = k * d * d + a * d + b;
                // (Mᵀ S)_{ab} = Σ_c M_{ca} S_{cb};  (S M)_{ab} = Σ_c S_{ac} M_{cb}
                for c in 0..d {
                    system[(row, c * d + a)] += s[(c, b)];
                    system[(row, c * d + b)] += s[(a, c)];
                }
            }
        }
    }
    let gram = system.transpose() * &system;
    let eig = gram.symmetric_eigen();
    eig.eigenvalues.iter().filter(|&&v| v.abs() < 1e-9).count()
}

#[test]
fn coordinate_forms_are_the_symmetric_templates() {
    // ∂x_k/∂u_j = 2T_kj requires the row template itself to be symmetric
    for f in FamilyDescriptor::ALL {
        let t = build_matrix(f);
        for (k, s) in coordinate_forms(f).iter().enumerate() {
            for j in 0..f.osc_dim() {
                let e = t.entry(k, j);
                assert_eq!(s[(e.index, j)], e.sign as f64, "{f} row {}", k + 1);
            }
        }
    }
}

#[test]
fn annihilating_fields_exist_exactly_up_to_hurwitz8() {
    let got: Vec<usize> = FamilyDescriptor::ALL.iter().map(|&f| nullity(f)).collect();
    assert_eq!(got, vec![0, 1, 3, 0]);
    for f in &FamilyDescriptor::ALL[..3] {
        assert_eq!(nullity(*f), f.phi_count(), "{f}");
    }
    assert!(FamilyDescriptor::ALL[3].phi_count() > 0);
}
