//! Fixtures shared by the criterion benches.

use ivalid_core::dist::RepresentationMap;
use ivalid_core::{
    build_dgp_from_cbn, Cbn, Dag, Dgp, Intervention, InterventionSet, Kernel, LinearGaussianKernel,
    Tolerances, VarId,
};
use std::collections::BTreeMap;

/// Linear-Gaussian chain `V0 -> V1 -> ... -> V{n-1}` with one shift action
/// per node and the matching set of perfect interventions.
pub struct Chain {
    pub cbn: Cbn,
    pub dgp: Dgp,
    pub set: InterventionSet,
    pub repr: RepresentationMap,
}

fn gaussian(mean: f64, weights: Vec<f64>, var: f64) -> Kernel {
    Kernel::LinearGaussian(LinearGaussianKernel::new(mean, weights, var).unwrap())
}

pub fn chain(n: usize) -> Chain {
    let tol = Tolerances::default();
    let vars = (0..n).map(|i| VarId::new(i, format!("V{i}"))).collect();
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    let dag = Dag::from_edges(n, &edges).unwrap();
    let kernels = (0..n)
        .map(|i| {
            let w = if i == 0 { vec![] } else { vec![0.5] };
            gaussian(0.0, w, 1.0)
        })
        .collect();
    let cbn = Cbn::new(vars, dag, kernels).unwrap();
    let perfect: Vec<Intervention> = (0..n)
        .map(|i| {
            let p = cbn.dag().parents(i).len();
            Intervention::new(BTreeMap::from([(i, gaussian(1.0, vec![0.0; p], 0.5))])).unwrap()
        })
        .collect();
    let labels: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    let (dgp, _) = build_dgp_from_cbn(&cbn, &perfect, &labels, &tol).unwrap();
    let set = InterventionSet::new(&cbn, perfect, &tol).unwrap();
    Chain {
        cbn,
        dgp,
        set,
        repr: RepresentationMap::Identity,
    }
}
