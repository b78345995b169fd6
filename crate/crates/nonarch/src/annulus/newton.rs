//! Gauss valuations `η_r`, boundary data and Newton polygons.

use num_rational::Rational64;
use serde::Serialize;

use super::{AnnulusType, LaurentFunction};
use crate::error::{bail, Result};

/// Boundary valuations on both sides of the annulus. `nu_*` is only present
/// on boundary circles that belong to the annulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryData {
    pub eta_x: i64,
    pub v_x: i64,
    pub nu_x: Option<i64>,
    pub eta_y: i64,
    pub v_y: i64,
    pub nu_y: Option<i64>,
}

/// A radius where `η_r` has a kink; slopes are the extreme active X-degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Breakpoint {
    #[serde(serialize_with = "ser_ratio")]
    pub r: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub value: Rational64,
    /// Largest active degree (`ν` of the rescaled function).
    pub left_slope: i64,
    /// Smallest active degree (`v` of the rescaled function).
    pub right_slope: i64,
}

impl Breakpoint {
    pub fn multiplicity(&self) -> i64 {
        self.left_slope - self.right_slope
    }
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if *r.denom() == 1 {
        s.serialize_str(&r.numer().to_string())
    } else {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    pub e: usize,
    pub kind: AnnulusType,
    pub breakpoints: Vec<Breakpoint>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Active {
    pub eta: Rational64,
    pub v: i64,
    pub nu: i64,
    pub v_sure: bool,
    pub nu_sure: bool,
}

pub(crate) fn fmt_r(r: Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl LaurentFunction {
    /// `(r_lo, lo_included, r_hi, hi_included)`.
    pub fn admissible_range(&self) -> (Rational64, bool, Rational64, bool) {
        let e = Rational64::from_integer(self.e as i64);
        let zero = Rational64::from_integer(0);
        match self.kind {
            AnnulusType::Closed => (zero, true, e, true),
            AnnulusType::SemiOpen => (zero, true, e, false),
            AnnulusType::Open => (zero, false, e, false),
        }
    }

    /// Active degrees of `η_r`, checking that no coefficient outside the
    /// retained data could undercut the minimum.
    pub(crate) fn active_at(&self, r: Rational64) -> Result<Active> {
        let (known, unknown) = self.x_points();
        if known.is_empty() {
            bail!(Precision, "function is zero at retained precision");
        }
        let val = |k: i64, w: usize| Rational64::from_integer(w as i64) + r * Rational64::from_integer(k);
        let eta = known.iter().map(|&(k, w)| val(k, w)).min().expect("nonempty");
        let active: Vec<i64> = known.iter().filter(|&&(k, w)| val(k, w) == eta).map(|&(k, _)| k).collect();
        let v = *active.iter().min().expect("nonempty");
        let nu = *active.iter().max().expect("nonempty");
        let (mut v_sure, mut nu_sure) = (true, true);
        for &(k, b) in &unknown {
            let x = val(k, b);
            if x < eta {
                bail!(
                    Precision,
                    "leading data at X-degree {k} lies outside the retained window (r = {})",
                    fmt_r(r)
                );
            }
            if x == eta {
                if k < v {
                    v_sure = false;
                }
                if k > nu {
                    nu_sure = false;
                }
            }
        }
        Ok(Active { eta, v, nu, v_sure, nu_sure })
    }

    /// `η_r(f) = min_i (ord c_i + i r)` over the Laurent expansion in `X`.
    pub fn eta_r(&self, r: Rational64) -> Result<Rational64> {
        Ok(self.active_at(r)?.eta)
    }

    pub fn boundary_valuations(&self) -> Result<BoundaryData> {
        let lo = self.active_at(Rational64::from_integer(0))?;
        let hi = self.active_at(Rational64::from_integer(self.e as i64))?;
        let (nu_x_exposed, nu_y_exposed) = match self.kind {
            AnnulusType::Closed => (true, true),
            AnnulusType::SemiOpen => (true, false),
            AnnulusType::Open => (false, false),
        };
        let need = |ok: bool, what: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(crate::error::Error::Precision(format!("{what} depends on data outside the retained window")))
            }
        };
        need(lo.v_sure, "v_X")?;
        need(hi.nu_sure, "v_Y")?;
        if nu_x_exposed {
            need(lo.nu_sure, "nu_X")?;
        }
        if nu_y_exposed {
            need(hi.v_sure, "nu_Y")?;
        }
        Ok(BoundaryData {
            eta_x: lo.eta.to_integer(),
            v_x: lo.v,
            nu_x: nu_x_exposed.then_some(lo.nu),
            eta_y: hi.eta.to_integer(),
            v_y: -hi.nu,
            nu_y: nu_y_exposed.then_some(-hi.v),
        })
    }

    pub fn newton_polygon(&self) -> Result<NewtonPolygon> {
        let (known, _) = self.x_points();
        if known.is_empty() {
            bail!(Precision, "function is zero at retained precision");
        }
        let mut pts: Vec<(i64, i64)> = known.iter().map(|&(k, w)| (k, w as i64)).collect();
        pts.sort();
        // lower convex hull, monotone chain
        let mut hull: Vec<(i64, i64)> = Vec::new();
        for p in pts {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                let cross = (b.0 - a.0) as i128 * (p.1 - a.1) as i128 - (b.1 - a.1) as i128 * (p.0 - a.0) as i128;
                if cross <= 0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let (lo, lo_in, hi, hi_in) = self.admissible_range();
        let mut radii: Vec<Rational64> = hull
            .windows(2)
            .map(|w| Rational64::new(w[0].1 - w[1].1, w[1].0 - w[0].0))
            .filter(|&r| (r > lo || (r == lo && lo_in)) && (r < hi || (r == hi && hi_in)))
            .collect();
        radii.sort();
        let mut breakpoints = Vec::new();
        for r in radii {
            let a = self.active_at(r)?;
            if !a.v_sure || !a.nu_sure {
                bail!(Precision, "zero count at r = {} depends on data outside the retained window", fmt_r(r));
            }
            breakpoints.push(Breakpoint { r, value: a.eta, left_slope: a.nu, right_slope: a.v });
        }
        // endpoints: included ones need both slopes, excluded ones the inner slope
        let a = self.active_at(lo)?;
        if !a.v_sure || (lo_in && !a.nu_sure) {
            bail!(Precision, "behaviour near r = 0 depends on data outside the retained window");
        }
        let b = self.active_at(hi)?;
        if !b.nu_sure || (hi_in && !b.v_sure) {
            bail!(Precision, "behaviour near r = {} depends on data outside the retained window", self.e);
        }
        Ok(NewtonPolygon { e: self.e, kind: self.kind, breakpoints })
    }

    pub fn critical_radii(&self) -> Result<Vec<Rational64>> {
        Ok(self.newton_polygon()?.breakpoints.iter().map(|b| b.r).collect())
    }

    /// Zeros (with multiplicity) with `|π|^{r2} ≤ |X| ≤ |π|^{r1}`; an excluded
    /// endpoint of the annulus is treated as open.
    pub fn count_zeros(&self, r1: Rational64, r2: Rational64) -> Result<i64> {
        let (lo, lo_in, hi, hi_in) = self.admissible_range();
        if r1 > r2 || r1 < lo || r2 > hi {
            bail!(Domain, "range [{}, {}] is outside the annulus [0, {}]", fmt_r(r1), fmt_r(r2), self.e);
        }
        self.newton_polygon()?;
        let a = self.active_at(r1)?;
        let b = self.active_at(r2)?;
        let left = if r1 == lo && !lo_in { a.v } else { a.nu };
        let right = if r2 == hi && !hi_in { b.nu } else { b.v };
        Ok((left - right).max(0))
    }

    /// Total number of zeros on the annulus.
    pub fn total_zeros(&self) -> Result<i64> {
        let (lo, _, hi, _) = self.admissible_range();
        self.count_zeros(lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn lf(e: usize, kind: AnnulusType, s: &str) -> LaurentFunction {
        LaurentFunction::parse(&Field::prime(5).unwrap(), e, kind, 8, 20, s).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn boundary_of_two_monomials() {
        let bd = lf(2, AnnulusType::Closed, "X + Y").boundary_valuations().unwrap();
        assert_eq!((bd.eta_x, bd.v_x, bd.nu_x), (0, 1, Some(1)));
        assert_eq!((bd.eta_y, bd.v_y, bd.nu_y), (0, 1, Some(1)));
        let bd = lf(2, AnnulusType::Closed, "Y - pi").boundary_valuations().unwrap();
        assert_eq!((bd.eta_x, bd.v_x, bd.nu_x), (1, 0, Some(0)));
        assert_eq!((bd.eta_y, bd.v_y, bd.nu_y), (0, 1, Some(1)));
        let bd = lf(2, AnnulusType::Open, "pi^3").boundary_valuations().unwrap();
        assert_eq!((bd.eta_x, bd.v_x, bd.nu_x), (3, 0, None));
    }

    #[test]
    fn polygon_breakpoints() {
        let p = lf(2, AnnulusType::Closed, "X + Y").newton_polygon().unwrap();
        assert_eq!(p.breakpoints.len(), 1);
        assert_eq!(p.breakpoints[0].r, q(1, 1));
        assert_eq!(p.breakpoints[0].value, q(1, 1));
        assert_eq!((p.breakpoints[0].left_slope, p.breakpoints[0].right_slope), (1, -1));
        let f = lf(3, AnnulusType::Closed, "(Y - pi)*(Y - pi^2)");
        assert_eq!(f.critical_radii().unwrap(), vec![q(1, 1), q(2, 1)]);
        assert!(lf(3, AnnulusType::Closed, "1 + pi*X").critical_radii().unwrap().is_empty());
    }

    #[test]
    fn zero_counts() {
        assert_eq!(lf(2, AnnulusType::Closed, "Y - pi").count_zeros(q(0, 1), q(2, 1)).unwrap(), 1);
        assert_eq!(lf(2, AnnulusType::Closed, "X + Y").count_zeros(q(0, 1), q(1, 2)).unwrap(), 0);
        assert_eq!(lf(2, AnnulusType::Closed, "X + Y").count_zeros(q(1, 1), q(1, 1)).unwrap(), 2);
        // the zero on |X| = 1 does not belong to the open annulus
        assert_eq!(lf(2, AnnulusType::Open, "Y - pi^2").total_zeros().unwrap(), 0);
        assert_eq!(lf(2, AnnulusType::Closed, "Y - pi^2").total_zeros().unwrap(), 1);
    }

    #[test]
    fn truncated_leading_data_is_rejected() {
        let f = lf(1, AnnulusType::Open, "1 + X").invert_unit().unwrap();
        // the order-0 tail sits exactly on the boundary: v is fine, nu is not exposed
        assert!(f.boundary_valuations().is_ok());
        let g = f.with_kind(AnnulusType::Closed);
        assert!(g.boundary_valuations().is_err());
    }
}
