//! Executable checks of the nesting propositions (inclusion, removal, addition).

use super::afr::{boundary_points, mask_from_field, MatchedField, RegionMask};
use crate::error::{NfalError, Result};
use crate::geometry::{ArrayGeometry, Scene, Vec2, COINCIDENCE_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    StrictlyLarger,
    StrictlySmaller,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InclusionReport {
    /// Cells inside the superset's AFR but outside the subset's.
    pub violations: usize,
    /// Violations not adjacent to the subset's AFR.
    pub beyond_slack: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropReport {
    pub predicted: Verdict,
    pub direct: Verdict,
    /// Boundary points examined.
    pub boundary_points: usize,
    /// Boundary points where no critical antenna of the superset belongs to the subset.
    pub witnesses: Vec<Vec2>,
    /// Cells whose membership changed in the expected direction.
    pub changed_cells: usize,
    /// Changed cells with no membership transition in their 8-neighbourhood of the reference AFR.
    pub far_changes: usize,
    /// Cells that changed against the monotone direction.
    pub monotonicity_violations: usize,
    /// Verdicts identical.
    pub exact: bool,
    /// Verdicts identical, or differing only by a change below one cell.
    pub agree: bool,
}

fn check_spacings(a: &ArrayGeometry, b: &ArrayGeometry) -> Result<()> {
    let sa = a.sample_axes()?;
    let sb = b.sample_axes()?;
    let same = sa.len() == sb.len()
        && sa.iter().zip(&sb).all(|((xa, da), (xb, db))| xa == xb && (da - db).abs() <= 1e-9 * da.max(*db));
    if same {
        Ok(())
    } else {
        Err(NfalError::SpacingMismatch(format!("{sa:?} vs {sb:?}")))
    }
}

/// For each element of `sub`, whether it is present; returns a membership table over `sup` indices.
fn membership(sub: &ArrayGeometry, sup: &ArrayGeometry) -> Result<Vec<bool>> {
    let mut order: Vec<usize> = (0..sup.len()).collect();
    let el = sup.elements();
    order.sort_by(|&a, &b| el[a].x.total_cmp(&el[b].x));
    let xs: Vec<f64> = order.iter().map(|&i| el[i].x).collect();
    let mut member = vec![false; sup.len()];
    for &p in sub.elements() {
        let start = xs.partition_point(|&x| x < p.x - COINCIDENCE_TOL);
        let hit = order[start..]
            .iter()
            .take_while(|&&i| el[i].x <= p.x + COINCIDENCE_TOL)
            .find(|&&i| (el[i] - p).norm() <= COINCIDENCE_TOL);
        match hit {
            Some(&i) => member[i] = true,
            None => {
                return Err(NfalError::InvalidArgument(format!("antenna {p:?} of the subset is not in the superset")))
            }
        }
    }
    Ok(member)
}

fn masks(sub: &ArrayGeometry, sup: &ArrayGeometry, scene: &Scene) -> Result<(MatchedField, RegionMask, RegionMask)> {
    scene.validate_for(sup)?;
    check_spacings(sub, sup)?;
    let f_sub = MatchedField::new(sub, scene.source, scene.k())?;
    let f_sup = MatchedField::new(sup, scene.source, scene.k())?;
    let m_sub = mask_from_field(&f_sub, scene.grid(), scene.source);
    let m_sup = mask_from_field(&f_sup, scene.grid(), scene.source);
    Ok((f_sup, m_sub, m_sup))
}

/// Inclusion: the AFR of a superset lies inside the AFR of the subset.
pub fn check_inclusion(sub: &ArrayGeometry, sup: &ArrayGeometry, scene: &Scene) -> Result<InclusionReport> {
    membership(sub, sup)?;
    let (_, m_sub, m_sup) = masks(sub, sup, scene)?;
    let bad: Vec<usize> = (0..m_sup.bits.len()).filter(|&i| m_sup.bits[i] && !m_sub.bits[i]).collect();
    let beyond = bad.iter().filter(|&&i| !m_sub.touches(i)).count();
    Ok(InclusionReport { violations: bad.len(), beyond_slack: beyond, holds: beyond == 0 })
}

fn nested(
    sub: &ArrayGeometry,
    sup: &ArrayGeometry,
    scene: &Scene,
    reference_is_sup: bool,
    strict: Verdict,
) -> Result<PropReport> {
    let member = membership(sub, sup)?;
    let (f_sup, m_sub, m_sup) = masks(sub, sup, scene)?;
    let reference = if reference_is_sup { &m_sup } else { &m_sub };
    // The reference AFR's boundary; at each point ask whether a subset antenna is critical for the superset.
    let f_ref = if reference_is_sup { f_sup.clone() } else { MatchedField::new(sub, scene.source, scene.k())? };
    let pts = boundary_points(&f_ref, reference);
    let witnesses: Vec<Vec2> = pts
        .iter()
        .filter(|bp| match f_sup.cae(bp.point, bp.axis) {
            Some(c) => !c.indices.iter().any(|&i| member[i]),
            None => false,
        })
        .map(|bp| bp.point)
        .collect();
    let predicted = if witnesses.is_empty() { Verdict::Equal } else { strict };
    let n = reference.bits.len();
    let changed: Vec<usize> = (0..n).filter(|&i| m_sub.bits[i] && !m_sup.bits[i]).collect();
    let monotonicity_violations = (0..n).filter(|&i| m_sup.bits[i] && !m_sub.bits[i]).count();
    let far_changes = changed.iter().filter(|&&i| !reference.near_transition(i)).count();
    let direct = if changed.is_empty() { Verdict::Equal } else { strict };
    let exact = predicted == direct;
    let agree = exact
        || (predicted == strict && direct == Verdict::Equal)
        || (predicted == Verdict::Equal && far_changes == 0);
    Ok(PropReport {
        predicted,
        direct,
        boundary_points: pts.len(),
        witnesses,
        changed_cells: changed.len(),
        far_changes,
        monotonicity_violations,
        exact,
        agree,
    })
}

/// Removal: `reduced ⊆ full`. Equal AFRs iff a kept antenna is critical at every boundary point.
pub fn check_removal(full: &ArrayGeometry, reduced: &ArrayGeometry, scene: &Scene) -> Result<PropReport> {
    nested(reduced, full, scene, true, Verdict::StrictlyLarger)
}

/// Addition: `small ⊆ big`. Equal AFRs iff an original antenna stays critical at every boundary point.
pub fn check_addition(small: &ArrayGeometry, big: &ArrayGeometry, scene: &Scene) -> Result<PropReport> {
    nested(small, big, scene, false, Verdict::StrictlySmaller)
}
