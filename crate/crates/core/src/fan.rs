//! Rational polyhedral fans: the outer normal fan of a polytope and
//! user-supplied refinements.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hull::HullComplex;
use crate::lattice::{big_to_i64, extend_to_unimodular, primitive, LatticeError};

#[derive(Debug, Error)]
pub enum FanError {
    #[error("invalid fan file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("ray {0} has the wrong dimension")]
    RayDimension(usize),
    #[error("ray {0} is not a primitive nonzero vector")]
    RayNotPrimitive(usize),
    #[error("cone {cone} references missing ray {ray}")]
    MissingRay { cone: usize, ray: usize },
    #[error("cone {0} is not simplicial")]
    NotSimplicial(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Cones are sorted ray-index lists; id 0 is always the zero cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fan {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
struct FanFile {
    rays: Vec<Vec<i64>>,
    cones: Vec<Vec<usize>>,
}

impl Fan {
    fn from_cone_sets(dim: usize, rays: Vec<Vec<i64>>, cones: BTreeSet<Vec<usize>>) -> Fan {
        let mut cones: Vec<Vec<usize>> = cones.into_iter().collect();
        cones.push(Vec::new());
        cones.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        cones.dedup();
        Fan { dim, rays, cones }
    }

    /// Read `{"rays": [[..], ..], "cones": [[ray ids], ..]}` listing the
    /// maximal cones of a simplicial fan; all faces are generated.
    pub fn from_json(text: &str, dim: usize) -> Result<Fan, FanError> {
        let file: FanFile = serde_json::from_str(text)?;
        for (i, r) in file.rays.iter().enumerate() {
            if r.len() != dim {
                return Err(FanError::RayDimension(i));
            }
            if primitive(r).ok().as_ref() != Some(r) {
                return Err(FanError::RayNotPrimitive(i));
            }
        }
        let mut all = BTreeSet::new();
        for (c, cone) in file.cones.iter().enumerate() {
            if let Some(&ray) = cone.iter().find(|&&r| r >= file.rays.len()) {
                return Err(FanError::MissingRay { cone: c, ray });
            }
            let mut cone = cone.clone();
            cone.sort_unstable();
            cone.dedup();
            let gens: Vec<Vec<i64>> = cone.iter().map(|&r| file.rays[r].clone()).collect();
            let m: Vec<Vec<crate::lattice::Rational>> =
                gens.iter().map(|g| g.iter().map(|&x| crate::lattice::rat(x)).collect()).collect();
            if crate::lattice::rank(&m) != cone.len() {
                return Err(FanError::NotSimplicial(c));
            }
            for mask in 1u32..(1 << cone.len()) {
                let face: Vec<usize> =
                    cone.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, &r)| r).collect();
                all.insert(face);
            }
        }
        Ok(Fan::from_cone_sets(dim, file.rays, all))
    }

    pub fn cone_rays(&self, cone: usize) -> Vec<Vec<i64>> {
        self.cones[cone].iter().map(|&r| self.rays[r].clone()).collect()
    }

    pub fn maximal_cones(&self) -> Vec<usize> {
        (0..self.cones.len())
            .filter(|&i| {
                !self.cones.iter().any(|c| c.len() > self.cones[i].len() && self.cones[i].iter().all(|r| c.contains(r)))
            })
            .collect()
    }

    /// `σ ≺ τ` by ray containment.
    pub fn is_face(&self, sigma: usize, tau: usize) -> bool {
        self.cones[sigma].iter().all(|r| self.cones[tau].contains(r))
    }
}

/// Normal fan with outer facet normals as rays; one cone per face.
///
/// # Panics
/// Panics on a lower-dimensional polytope.
pub fn normal_fan(polytope: &HullComplex) -> Fan {
    assert!(!polytope.is_degenerate(), "normal fan of a lower-dimensional polytope");
    let d = polytope.dim;
    let rays: Vec<Vec<i64>> = polytope
        .facets
        .iter()
        .map(|f| big_to_i64(&f.normal).expect("facet normal fits in i64"))
        .collect();
    let mut cones = BTreeSet::new();
    for k in 0..d {
        for face in &polytope.faces[k] {
            let cone: Vec<usize> = polytope
                .facets
                .iter()
                .enumerate()
                .filter(|(_, f)| face.iter().all(|i| f.points.binary_search(i).is_ok()))
                .map(|(j, _)| j)
                .collect();
            cones.insert(cone);
        }
    }
    Fan::from_cone_sets(d, rays, cones)
}

/// `Ok(())` when every cone is generated by part of a lattice basis;
/// otherwise the id of the first offending cone.
pub fn fan_is_unimodular(fan: &Fan) -> Result<(), usize> {
    for (id, _) in fan.cones.iter().enumerate() {
        if extend_to_unimodular(&fan.cone_rays(id), fan.dim).is_err() {
            return Err(id);
        }
    }
    Ok(())
}
