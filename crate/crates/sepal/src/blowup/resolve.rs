//! Seidenberg resolution: iterated blow-ups at strictly singular points until
//! every saturated transform is non-singular or reduced, with divisor
//! multiplicity bookkeeping, separatrix enumeration and saddle-node scans.

use crate::algebra::jet::Jet2;
use crate::algebra::roots::{self, RootClass};
use crate::algebra::tower::{FieldElement, Tower};
use crate::algebra::upoly::UniPoly;
use crate::error::{Error, Result};
use crate::germs::{Chart, VectorField};

use super::{
    blow_up_vf, classify_singularity, direction_form_vf, is_dicritical, saturate,
    saturate_transform, DivisorPoint, SingularityClass,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NodeId(pub usize);

/// How a node was reached from its parent.
#[derive(Clone, Debug)]
pub struct Arrival {
    pub chart: Chart,
    pub center: FieldElement,
    /// Degree of the squarefree factor that defined the center (> 1 when the
    /// center is an adjoined algebraic number standing for its conjugates).
    pub defining_degree: usize,
}

/// An exceptional-divisor component through a node's origin. `axis` 0 is the
/// first coordinate (always the newest component), 1 the second.
#[derive(Clone, Debug)]
pub struct DivisorComponent {
    pub axis: usize,
    pub label: String,
    /// Multiplicity in the singular locus of the total transform of the
    /// resolved field.
    pub multiplicity: u32,
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub depth: u32,
    pub arrival: Option<Arrival>,
    pub tower: Tower,
    /// Number of actual points this node stands for (product of defining
    /// degrees along the path).
    pub conjugates: usize,
    /// The saturated local germ, origin at the point, divisor at `v1 = 0`.
    pub field: VectorField,
    pub divisors: Vec<DivisorComponent>,
    /// Strict transform of the original saturation factor through this point
    /// (`None` when trivial or not passing through).
    pub locus_strict: Option<Jet2>,
    pub dicritical: bool,
    /// Whether this node was blown up (a dicritical node can be fully
    /// blown up and still have no children when no transform point is
    /// strictly singular).
    pub blown_up: bool,
    pub class: SingularityClass,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn divisor_on_axis(&self, axis: usize) -> Option<&DivisorComponent> {
        self.divisors.iter().find(|d| d.axis == axis)
    }
}

#[derive(Clone, Debug)]
pub struct ResolutionTree {
    pub nodes: Vec<TreeNode>,
    /// Saturation factor of the original field (`None` when it was a unit).
    pub saturation_factor: Option<Jet2>,
}

impl ResolutionTree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id.0]
    }

    pub fn leaves(&self) -> impl Iterator<Item = (NodeId, &TreeNode)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_leaf())
            .map(|(i, n)| (NodeId(i), n))
    }

    pub fn depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Path of node ids from the root to `id`, inclusive.
    pub fn path(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur.0].parent {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ResolveOptions {
    pub max_depth: u32,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions { max_depth: 16 }
    }
}

/// Resolve a singular vector field: saturate, then blow up strictly singular
/// points until every leaf is non-singular or reduced.
pub fn resolve(x: &VectorField, opts: &ResolveOptions) -> Result<ResolutionTree> {
    let sat = saturate(x)?;
    let factor = if sat.factor.is_constant_unit() {
        None
    } else {
        Some(sat.factor.clone())
    };
    resolve_prepared(sat.saturated, factor, Vec::new(), opts)
}

/// Resolve an already-saturated germ, optionally with an ambient exceptional
/// divisor through the origin (`v1 = 0`, with its multiplicity in the
/// singular locus of the total transform) and the strict transform of the
/// original saturation factor.
pub fn resolve_prepared(
    field: VectorField,
    locus_strict: Option<Jet2>,
    ambient_divisors: Vec<DivisorComponent>,
    opts: &ResolveOptions,
) -> Result<ResolutionTree> {
    let class = classify_singularity(&field)?;
    let dicritical = if matches!(class, SingularityClass::NonSingular) {
        false
    } else {
        is_dicritical(&field)?
    };
    let root = TreeNode {
        parent: None,
        children: Vec::new(),
        depth: 0,
        arrival: None,
        tower: field.tower().clone(),
        conjugates: 1,
        field,
        divisors: ambient_divisors,
        locus_strict,
        dicritical,
        blown_up: false,
        class,
    };
    let mut tree = ResolutionTree {
        nodes: vec![root],
        saturation_factor: None,
    };
    if !tree.nodes[0].class.is_final() {
        expand(&mut tree, NodeId(0), opts)?;
    }
    Ok(tree)
}

/// Candidate blow-up centers of a node: zeros of the direction form for
/// non-dicritical fields; singular points of the saturated transform on the
/// divisor for dicritical ones.
fn candidate_points(y: &VectorField, dicritical: bool) -> Result<Vec<RootClass>> {
    if !dicritical {
        let h = direction_form_vf(y)?;
        return roots::root_representatives(&h, "r");
    }
    let nu = y.order()?;
    let mut out = Vec::new();
    // chart T: common zeros of both components of the saturated transform on
    // the divisor
    let raw = blow_up_vf(y, &DivisorPoint::chart_t(FieldElement::zero(y.tower())))?;
    let (_, sat) = saturate_transform(&raw, nu, true)?;
    let r1 = sat.comp1().restrict_var1_zero();
    let r2 = sat.comp2().restrict_var1_zero();
    let g = if r1.is_zero_poly() {
        r2.poly().clone()
    } else if r2.is_zero_poly() {
        r1.poly().clone()
    } else {
        r1.poly().gcd(r2.poly())?
    };
    out.extend(roots::upoly_root_classes(&g, "r")?);
    // chart S origin
    let raw_s = blow_up_vf(y, &DivisorPoint::chart_s_origin(y.tower()))?;
    let (_, sat_s) = saturate_transform(&raw_s, nu, true)?;
    let z1 = sat_s.comp1().coeff(0, 0)?;
    let z2 = sat_s.comp2().coeff(0, 0)?;
    if z1.is_zero() && z2.is_zero() {
        out.push(RootClass {
            chart_value: None,
            multiplicity: 1,
            tower: y.tower().clone(),
            conjugates: 1,
            defining_degree: 1,
            factor: None,
        });
    }
    Ok(out)
}

fn expand(tree: &mut ResolutionTree, id: NodeId, opts: &ResolveOptions) -> Result<()> {
    let (depth, y, dicritical, divisors, locus, conjugates, root_levels) = {
        let n = &tree.nodes[id.0];
        if n.depth + 1 > opts.max_depth {
            return Err(Error::DepthExceeded {
                max_depth: opts.max_depth,
            });
        }
        (
            n.depth,
            n.field.clone(),
            n.dicritical,
            n.divisors.clone(),
            n.locus_strict.clone(),
            n.conjugates,
            tree.nodes[0].tower.level_count(),
        )
    };
    tree.nodes[id.0].blown_up = true;
    let classes = candidate_points(&y, dicritical)?;
    for class in classes {
        process_point(
            tree,
            id,
            &y,
            dicritical,
            &divisors,
            &locus,
            conjugates,
            depth,
            root_levels,
            class.chart_value.clone(),
            class.tower.clone(),
            class.defining_degree,
            opts,
        )?;
    }
    Ok(())
}

/// Analyze one blow-up center; on a zero-divisor split in a level this
/// resolution created, re-run once per branch (the point and everything above
/// it migrate). Splits of levels the caller owns propagate up.
#[allow(clippy::too_many_arguments)]
fn process_point(
    tree: &mut ResolutionTree,
    parent: NodeId,
    y: &VectorField,
    dicritical: bool,
    parent_divisors: &[DivisorComponent],
    parent_locus: &Option<Jet2>,
    parent_conjugates: usize,
    parent_depth: u32,
    root_levels: usize,
    chart_value: Option<FieldElement>,
    tower: Tower,
    defining_degree: usize,
    opts: &ResolveOptions,
) -> Result<()> {
    let attempt = try_child(
        tree,
        parent,
        y,
        dicritical,
        parent_divisors,
        parent_locus,
        parent_conjugates,
        parent_depth,
        root_levels,
        &chart_value,
        &tower,
        defining_degree,
        opts,
    );
    match attempt {
        Ok(()) => Ok(()),
        Err(Error::ZeroDivisorSplit { generator, branches }) => {
            let level = tower
                .find_generator(&generator)
                .ok_or_else(|| Error::Internal(format!("split in unknown level {generator}")))?;
            if level < root_levels {
                // the split belongs to a level the caller owns
                return Err(Error::ZeroDivisorSplit { generator, branches });
            }
            for branch in branches {
                let cv = match &chart_value {
                    Some(v) => Some(v.migrate(&branch)?),
                    None => None,
                };
                process_point(
                    tree,
                    parent,
                    y,
                    dicritical,
                    parent_divisors,
                    parent_locus,
                    parent_conjugates,
                    parent_depth,
                    root_levels,
                    cv,
                    branch,
                    defining_degree,
                    opts,
                )?;
            }
            Ok(())
        }
        Err(e) => Err(e),
    }
}

/// Product of the defining degrees of the algebraic levels added above the
/// resolution root's tower.
fn effective_degree(tower: &Tower, root_levels: usize) -> usize {
    tower
        .generator_names()
        .enumerate()
        .skip(root_levels)
        .map(|(_, name)| tower.algebraic_degree(name).unwrap_or(1))
        .product()
}

#[allow(clippy::too_many_arguments)]
fn try_child(
    tree: &mut ResolutionTree,
    parent: NodeId,
    y: &VectorField,
    dicritical: bool,
    parent_divisors: &[DivisorComponent],
    parent_locus: &Option<Jet2>,
    parent_conjugates: usize,
    parent_depth: u32,
    root_levels: usize,
    chart_value: &Option<FieldElement>,
    tower: &Tower,
    defining_degree: usize,
    opts: &ResolveOptions,
) -> Result<()> {
    let _ = parent_conjugates;
    let nu = y.order()?;
    let ym = y.migrate(tower)?;
    let point = match chart_value {
        Some(t0) => DivisorPoint::chart_t(t0.clone()),
        None => DivisorPoint::chart_s_origin(tower),
    };
    let raw = blow_up_vf(&ym, &point)?;
    let (_, sat) = saturate_transform(&raw, nu, dicritical)?;
    // Divisor-restriction cross-check for non-dicritical sources: the
    // ∂v2-component on the divisor is the direction form in the chart.
    if !dicritical {
        check_divisor_restriction(&ym, &sat, &point)?;
    }
    // Multiplicity bookkeeping: new divisor multiplicity
    //   r' = (sum of parent divisor multiplicities) + ord(parent locus strict)
    //        + ν - 1   (+1 when dicritical)
    let parent_mult_sum: u32 = parent_divisors.iter().map(|d| d.multiplicity).sum();
    let locus_ord = match parent_locus {
        Some(l) if !l.is_zero() && !l.is_constant_unit() => l.order()?,
        _ => 0,
    };
    let new_mult = parent_mult_sum + locus_ord + nu - 1 + u32::from(dicritical);
    let new_label = format!("E{}", parent_depth + 1);
    let mut divisors = vec![DivisorComponent {
        axis: 0,
        label: new_label,
        multiplicity: new_mult,
    }];
    match (&point.chart, chart_value.as_ref().map(|v| v.is_zero())) {
        // chart T at t = 0 keeps the parent's axis-1 component
        (Chart::T, Some(true)) => {
            if let Some(d) = parent_divisors.iter().find(|d| d.axis == 1) {
                divisors.push(DivisorComponent {
                    axis: 1,
                    label: d.label.clone(),
                    multiplicity: d.multiplicity,
                });
            }
        }
        // chart S keeps the parent's axis-0 component
        (Chart::S, _) => {
            if let Some(d) = parent_divisors.iter().find(|d| d.axis == 0) {
                divisors.push(DivisorComponent {
                    axis: 1,
                    label: d.label.clone(),
                    multiplicity: d.multiplicity,
                });
            }
        }
        _ => {}
    }
    // Strict transform of the original saturation factor.
    let locus_strict = match parent_locus {
        Some(l) => strict_transform(&l.migrate(tower)?, &point)?,
        None => None,
    };
    let class = classify_singularity(&sat)?;
    let node_dicritical = if matches!(class, SingularityClass::NonSingular) {
        false
    } else {
        is_dicritical(&sat)?
    };
    let child = TreeNode {
        parent: Some(parent),
        children: Vec::new(),
        depth: parent_depth + 1,
        arrival: Some(Arrival {
            chart: point.chart,
            center: point.coordinate.clone(),
            defining_degree,
        }),
        tower: tower.clone(),
        conjugates: effective_degree(tower, root_levels),
        field: sat,
        divisors,
        locus_strict,
        dicritical: node_dicritical,
        blown_up: false,
        class,
    };
    let child_id = NodeId(tree.nodes.len());
    tree.nodes.push(child);
    tree.nodes[parent.0].children.push(child_id);
    if !tree.nodes[child_id.0].class.is_final() {
        expand(tree, child_id, opts)?;
    }
    Ok(())
}

/// Strict transform of an exact curve polynomial through a chart point:
/// substitute, divide by the divisor power, translate. Returns `None` when
/// the transform does not pass through the new origin.
pub fn strict_transform(curve: &Jet2, p: &DivisorPoint) -> Result<Option<Jet2>> {
    if curve.is_zero() || curve.is_constant_unit() {
        return Ok(None);
    }
    let raw = super::chart_substitute(
        curve,
        p.chart,
        match p.chart {
            Chart::T => ("x", "t"),
            Chart::S => ("y", "s"),
        },
    );
    let m = curve.order()?;
    let st = raw.div_var1_power(m)?;
    let st = if p.coordinate.is_zero() {
        st
    } else {
        st.translate_var2(&p.coordinate)?
    };
    if st.coeff(0, 0)?.is_zero() {
        Ok(Some(st))
    } else {
        Ok(None)
    }
}

fn check_divisor_restriction(
    y: &VectorField,
    sat: &VectorField,
    p: &DivisorPoint,
) -> Result<()> {
    let h = direction_form_vf(y)?;
    let (_, form) = roots::dehomogenize(&h)?;
    let expected = match p.chart {
        Chart::T => {
            // P(1, t), translated to the center
            if p.coordinate.is_zero() {
                form
            } else {
                form.translate(&p.coordinate)?
            }
        }
        Chart::S => {
            // -P(s, 1): reverse coefficients of P(1,t) against degree k+2
            let d = h.order()? as usize;
            let tower = y.tower().clone();
            let mut coeffs = vec![FieldElement::zero(&tower); d + 1];
            for (i, c) in form.coeffs().iter().enumerate() {
                coeffs[d - i] = c.neg();
            }
            UniPoly::from_coeffs(&tower, "s", coeffs)
        }
    };
    let got = sat.comp2().restrict_var1_zero();
    // compare up to the certified degree
    let top = expected.degree().unwrap_or(0) as u32;
    let cap = got.prec().unwrap_or(top).min(top);
    for i in 0..=cap {
        let g = got.coeff(i)?;
        let e = expected.coeff(i as usize);
        if !g.sub(&e)?.is_zero() {
            return Err(Error::PropertyViolation(format!(
                "divisor restriction differs from direction form at degree {i}"
            )));
        }
    }
    Ok(())
}

// ---- Separatrix enumeration ------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strength {
    Strong,
    Weak,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BranchKind {
    /// Separatrix branch transverse to every divisor component at the leaf.
    Transverse,
    /// A divisor component itself (label recorded).
    Divisor(String),
    /// Integral curve of a non-singular leaf.
    IntegralCurve,
    /// Stands for the infinitely many transverse integral curves along a
    /// dicritical divisor.
    GenericDicritical,
}

#[derive(Clone, Debug)]
pub struct SeparatrixDescriptor {
    pub node: NodeId,
    pub branch: BranchKind,
    pub strict: bool,
    pub strength: Strength,
    pub fixed: bool,
    pub in_divisor: bool,
    /// Whether the blow-down of this branch is a non-singular curve germ.
    pub smooth: bool,
    pub conjugates: usize,
}

/// The two eigendirections of a reduced leaf's linear part, paired with the
/// eigenvalues. Directions are nonzero vectors `(v1, v2)`.
fn eigendirections(
    field: &VectorField,
    l1: &FieldElement,
    l2: &FieldElement,
) -> Result<Vec<(FieldElement, (FieldElement, FieldElement))>> {
    let m = field.linear_part()?;
    let mut out = Vec::new();
    for lambda in [l1, l2] {
        // (M - λ) v = 0; rows (m11-λ, m12), (m21, m22-λ)
        let r1 = (m[0][0].sub(lambda)?, m[0][1].clone());
        let r2 = (m[1][0].clone(), m[1][1].sub(lambda)?);
        let v = if !r1.0.is_zero() || !r1.1.is_zero() {
            (r1.1.neg(), r1.0.clone())
        } else if !r2.0.is_zero() || !r2.1.is_zero() {
            (r2.1.neg(), r2.0.clone())
        } else {
            return Err(Error::Internal("scalar linear part at reduced leaf".into()));
        };
        // swap to (v1, v2) orientation: row (a, b) kills (b, -a)
        out.push((lambda.clone(), (v.0, v.1)));
    }
    Ok(out)
}

fn divisor_axis_invariant(field: &VectorField, axis: usize) -> bool {
    let comp = if axis == 0 {
        field.comp1().restrict_var1_zero()
    } else {
        field.comp2().swap_vars().restrict_var1_zero()
    };
    comp.is_zero_poly()
}

/// Whether the blow-down of a branch at `leaf`, transverse to the newest
/// divisor, is a smooth germ at the root: no step of the path may land on
/// the strict transform of the immediately preceding divisor (a chart `S`
/// arrival), except the very first blow-up.
fn blow_down_smooth(tree: &ResolutionTree, leaf: NodeId, transverse_at_leaf: bool) -> bool {
    if !transverse_at_leaf {
        return false;
    }
    let path = tree.path(leaf);
    path.iter().skip(2).all(|id| {
        !matches!(
            tree.node(*id).arrival.as_ref().map(|a| a.chart),
            Some(Chart::S)
        )
    })
}

/// Does the strict transform of the saturation factor pass through the leaf
/// origin tangent to direction `v`? (Then the branch is a fixed separatrix.)
fn locus_tangent_to(
    node: &TreeNode,
    v: &(FieldElement, FieldElement),
) -> Result<bool> {
    let Some(l) = &node.locus_strict else {
        return Ok(false);
    };
    if l.is_constant_unit() || !l.coeff(0, 0)?.is_zero() {
        return Ok(false);
    }
    let cone = l.homogeneous_part(l.order()?)?;
    let val = crate::germs::eval_homogeneous(&cone, &v.0.migrate(l.tower())?, &v.1.migrate(l.tower())?);
    match val {
        Ok(x) => Ok(x.is_zero()),
        Err(_) => Ok(false),
    }
}

/// Enumerate the separatrix branches visible in a resolved tree: two per
/// reduced leaf (divisor components and transverse branches), integral
/// curves at non-singular leaves, and a generic marker per dicritical node.
pub fn enumerate_separatrices(tree: &ResolutionTree) -> Result<Vec<SeparatrixDescriptor>> {
    let mut out = Vec::new();
    for (id, node) in tree.nodes.iter().enumerate() {
        let id = NodeId(id);
        if node.dicritical {
            out.push(SeparatrixDescriptor {
                node: id,
                branch: BranchKind::GenericDicritical,
                strict: true,
                strength: Strength::Strong,
                fixed: false,
                in_divisor: false,
                smooth: blow_down_smooth(tree, id, true),
                conjugates: node.conjugates,
            });
        }
        if !node.is_leaf() {
            continue;
        }
        match &node.class {
            SingularityClass::NonSingular => {
                let w = (
                    node.field.comp1().coeff(0, 0)?,
                    node.field.comp2().coeff(0, 0)?,
                );
                // along which axis does the integral curve run?
                let axis0 = node.divisor_on_axis(0);
                if w.0.is_zero() {
                    // tangent to the divisor v1 = 0
                    if let (Some(d), true) = (axis0, divisor_axis_invariant(&node.field, 0)) {
                        out.push(SeparatrixDescriptor {
                            node: id,
                            branch: BranchKind::Divisor(d.label.clone()),
                            strict: true,
                            strength: Strength::Strong,
                            fixed: d.multiplicity >= 1,
                            in_divisor: true,
                            smooth: true,
                            conjugates: node.conjugates,
                        });
                        continue;
                    }
                }
                out.push(SeparatrixDescriptor {
                    node: id,
                    branch: BranchKind::IntegralCurve,
                    strict: true,
                    strength: Strength::Strong,
                    fixed: false,
                    in_divisor: false,
                    smooth: blow_down_smooth(tree, id, !w.0.is_zero()),
                    conjugates: node.conjugates,
                });
            }
            SingularityClass::ReducedNonDegenerate { eigenvalues }
            | SingularityClass::ReducedSaddleNode { eigenvalues } => {
                let dirs = eigendirections(&node.field, &eigenvalues.0, &eigenvalues.1)?;
                for (lambda, v) in dirs {
                    let strength = if lambda.is_zero() {
                        Strength::Weak
                    } else {
                        Strength::Strong
                    };
                    // match the direction against invariant divisor axes
                    let mut divisor_label: Option<String> = None;
                    if v.0.is_zero() {
                        if let Some(d) = node.divisor_on_axis(0) {
                            if divisor_axis_invariant(&node.field, 0) {
                                divisor_label = Some(d.label.clone());
                            }
                        }
                    }
                    if v.1.is_zero() && divisor_label.is_none() {
                        if let Some(d) = node.divisor_on_axis(1) {
                            if divisor_axis_invariant(&node.field, 1) {
                                divisor_label = Some(d.label.clone());
                            }
                        }
                    }
                    match divisor_label {
                        Some(label) => {
                            let mult = node
                                .divisors
                                .iter()
                                .find(|d| d.label == label)
                                .map(|d| d.multiplicity)
                                .unwrap_or(0);
                            out.push(SeparatrixDescriptor {
                                node: id,
                                branch: BranchKind::Divisor(label),
                                strict: true,
                                strength,
                                fixed: mult >= 1,
                                in_divisor: true,
                                smooth: true,
                                conjugates: node.conjugates,
                            });
                        }
                        None => {
                            let fixed = locus_tangent_to(node, &v)?;
                            out.push(SeparatrixDescriptor {
                                node: id,
                                branch: BranchKind::Transverse,
                                strict: true,
                                strength,
                                fixed,
                                in_divisor: false,
                                smooth: blow_down_smooth(tree, id, !v.0.is_zero()),
                                conjugates: node.conjugates,
                            });
                        }
                    }
                }
            }
            SingularityClass::NotReduced => {
                // a dicritical node whose blow-up met no strictly singular
                // point is complete; its curves are the generic descriptor
                if !node.blown_up {
                    return Err(Error::Internal("not-reduced leaf in resolved tree".into()));
                }
            }
        }
    }
    Ok(out)
}

/// Saddle-node scan over the leaves.
pub fn contains_saddle_node(tree: &ResolutionTree) -> (bool, Vec<NodeId>) {
    let mut ids = Vec::new();
    for (id, node) in tree.leaves() {
        if matches!(node.class, SingularityClass::ReducedSaddleNode { .. }) {
            ids.push(id);
        }
    }
    (!ids.is_empty(), ids)
}

/// Second type: no saddle-node in the resolution has its weak separatrix
/// inside the exceptional divisor.
pub fn second_type(tree: &ResolutionTree, descriptors: &[SeparatrixDescriptor]) -> bool {
    !descriptors.iter().any(|d| {
        d.in_divisor
            && d.strength == Strength::Weak
            && matches!(
                tree.node(d.node).class,
                SingularityClass::ReducedSaddleNode { .. }
            )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::jet::Prec;

    fn tw() -> Tower {
        Tower::rationals()
    }

    fn xy(t: &Tower) -> (Jet2, Jet2) {
        (
            Jet2::var1(t, ("x", "y"), Prec::EXACT),
            Jet2::var2(t, ("x", "y"), Prec::EXACT),
        )
    }

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_integer(&tw(), n)
    }

    #[test]
    fn already_reduced_is_root_only() {
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(x.clone(), y.neg()).unwrap();
        let tree = resolve(&f, &ResolveOptions::default()).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert!(tree.root().class.is_reduced());
        let seps = enumerate_separatrices(&tree).unwrap();
        // two strong transverse separatrices (x = 0) and (y = 0)
        assert_eq!(seps.len(), 2);
        assert!(seps.iter().all(|s| s.strength == Strength::Strong));
        assert!(seps.iter().all(|s| !s.in_divisor));
        let (has_sn, _) = contains_saddle_node(&tree);
        assert!(!has_sn);
        assert!(second_type(&tree, &seps));
    }

    #[test]
    fn saddle_node_root() {
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(x.mul(&x).unwrap(), y.clone()).unwrap();
        let tree = resolve(&f, &ResolveOptions::default()).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        let seps = enumerate_separatrices(&tree).unwrap();
        assert_eq!(seps.len(), 2);
        let weak: Vec<_> = seps.iter().filter(|s| s.strength == Strength::Weak).collect();
        assert_eq!(weak.len(), 1);
        assert!(!weak[0].in_divisor);
        let (has_sn, ids) = contains_saddle_node(&tree);
        assert!(has_sn && ids.len() == 1);
        // no divisor at the root: second type
        assert!(second_type(&tree, &seps));
    }

    #[test]
    fn quadratic_example_resolves_depth_two() {
        // x^2 ∂x + y^2 ∂y: t = 0 leaf reduced, chain over t = 1, s = 0 leaf
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(x.mul(&x).unwrap(), y.mul(&y).unwrap()).unwrap();
        let tree = resolve(&f, &ResolveOptions::default()).unwrap();
        assert!(tree.depth() <= 2, "depth {}", tree.depth());
        for (_, leaf) in tree.leaves() {
            assert!(
                leaf.class.is_final() || (leaf.blown_up && leaf.dicritical),
                "leaf class {:?}",
                leaf.class.label()
            );
        }
        // strict separatrices tangent to [1:0], [0:1], [1:1]: the [1:1]
        // point is dicritical (the lines y = x/(1-cx) all pass through it),
        // the other two carry transverse branches
        let seps = enumerate_separatrices(&tree).unwrap();
        let transverse: Vec<_> = seps
            .iter()
            .filter(|s| s.branch == BranchKind::Transverse)
            .collect();
        assert_eq!(transverse.len(), 2, "{seps:#?}");
        assert!(transverse.iter().all(|s| s.smooth));
        assert_eq!(
            seps.iter()
                .filter(|s| s.branch == BranchKind::GenericDicritical)
                .count(),
            1
        );
    }

    #[test]
    fn radial_field_resolves_dicritically() {
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(x.clone(), y.clone()).unwrap();
        let tree = resolve(&f, &ResolveOptions::default()).unwrap();
        // the root is dicritical; its transform is non-singular everywhere,
        // so no children are needed
        assert!(tree.root().dicritical);
        let seps = enumerate_separatrices(&tree).unwrap();
        assert!(seps
            .iter()
            .any(|s| s.branch == BranchKind::GenericDicritical));
    }

    #[test]
    fn single_smooth_separatrix_family_has_saddle_node() {
        // X = (x^2 - y^2) ∂x + xy ∂y: direction form y^3, a saddle-node at
        // t = 0 with weak branch in the divisor, strong branch = (y = 0)
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(
            x.mul(&x).unwrap().sub(&y.mul(&y).unwrap()).unwrap(),
            x.mul(&y).unwrap(),
        )
        .unwrap();
        let tree = resolve(&f, &ResolveOptions::default()).unwrap();
        let seps = enumerate_separatrices(&tree).unwrap();
        let transverse: Vec<_> = seps
            .iter()
            .filter(|s| !s.in_divisor && s.branch != BranchKind::GenericDicritical)
            .collect();
        assert_eq!(transverse.len(), 1, "{seps:#?}");
        assert!(transverse[0].smooth);
        assert_eq!(transverse[0].strength, Strength::Strong);
        let (has_sn, _) = contains_saddle_node(&tree);
        assert!(has_sn);
        // weak separatrix in divisor: not of second type
        assert!(!second_type(&tree, &seps));
    }

    #[test]
    fn blow_down_of_normal_shape() {
        // x^2 ∂x + (y^2 + xy) ∂y: saddle-node over [1:0] with weak in the
        // divisor, reduced non-degenerate over [0:1]
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(
            x.mul(&x).unwrap(),
            y.mul(&y).unwrap().add(&x.mul(&y).unwrap()).unwrap(),
        )
        .unwrap();
        let tree = resolve(&f, &ResolveOptions::default()).unwrap();
        let (has_sn, ids) = contains_saddle_node(&tree);
        assert!(has_sn);
        assert_eq!(ids.len(), 1);
        let seps = enumerate_separatrices(&tree).unwrap();
        assert!(!second_type(&tree, &seps));
        // two smooth transverse separatrices: (y=0) strong at the SN leaf and
        // one at the nondegenerate leaf
        let transverse: Vec<_> = seps
            .iter()
            .filter(|s| s.branch == BranchKind::Transverse)
            .collect();
        assert_eq!(transverse.len(), 2);
    }

    #[test]
    fn nilpotent_cusp_field_resolves() {
        // X = y ∂x + x^2 ∂y (cusp): known to need several blow-ups
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(y.clone(), x.mul(&x).unwrap()).unwrap();
        let tree = resolve(&f, &ResolveOptions::default()).unwrap();
        assert!(tree.depth() >= 2);
        for (_, leaf) in tree.leaves() {
            assert!(leaf.class.is_final());
        }
        // multiplicity at least available on every divisor component
        for n in &tree.nodes {
            for d in &n.divisors {
                let _ = d.multiplicity;
            }
        }
    }

    #[test]
    fn algebraic_centers_are_handled() {
        // X = x^2 ∂x + (y^2 + 2x^2)∂y: direction form has irrational roots
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(
            x.mul(&x).unwrap(),
            y.mul(&y).unwrap()
                .add(&x.mul(&x).unwrap().scale(&fe(2)).unwrap())
                .unwrap(),
        )
        .unwrap();
        let tree = resolve(&f, &ResolveOptions::default()).unwrap();
        for (_, leaf) in tree.leaves() {
            assert!(leaf.class.is_final());
        }
        // some node lives in an extension and counts its conjugates
        assert!(tree.nodes.iter().any(|n| n.conjugates > 1));
    }
}
