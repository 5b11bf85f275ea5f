//! Explicit functors from a truncated site to finite sets.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::site::{ArrowId, ObjId, PullbackSquare, TruncatedSite};
use crate::contexts::SymbolCtx;
use crate::name::Sort;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error("element {element} is not in the fiber over {object} (which has {size} elements)")]
    ElementNotInFiber { object: String, element: usize, size: usize },
    #[error("the supporting contexts of {element} over {object} do not intersect to a support; not a sheaf")]
    NotASheaf { object: String, element: String },
    #[error("the action is not functorial: {0}")]
    NotFunctorial(String),
    #[error("context {0} is not an object of the site")]
    UnknownObject(String),
    #[error("context {0} is on the headroom level, where supports cannot be told apart")]
    Headroom(String),
    #[error("presheaves live on different sites")]
    SiteMismatch,
}

/// A copresheaf on a [`TruncatedSite`]: a finite set over each object and a
/// function between fibers for each renaming.
///
/// Elements of the fiber over `o` are `0..fiber(o)`; optional labels are used
/// only for rendering.
#[derive(Clone)]
pub struct FinitePresheaf {
    site: Arc<TruncatedSite>,
    fibers: Vec<usize>,
    action: Vec<Vec<u32>>,
    labels: Option<Vec<Vec<String>>>,
}

/// Which half of the sheaf condition failed, and where.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum SheafFailure {
    /// The element is supported along the renaming but has no preimage.
    Existence { renaming: String, element: String },
    /// The element is supported along the renaming and has several preimages.
    Uniqueness { renaming: String, element: String },
}

/// A pullback square of the site whose image is not a pullback of sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PullbackFailure {
    pub apex: String,
    pub left: String,
    pub right: String,
    pub base: String,
    /// `"injectivity"` when two elements of the apex have the same image,
    /// `"surjectivity"` when a matching pair has no preimage.
    pub reason: &'static str,
}

impl FinitePresheaf {
    /// Builds a presheaf from its fibers and per-arrow action, checking
    /// functoriality.
    pub fn new(site: Arc<TruncatedSite>, fibers: Vec<usize>, action: Vec<Vec<u32>>) -> Result<Self, SheafError> {
        if fibers.len() != site.object_count() || action.len() != site.arrow_count() {
            return Err(SheafError::NotFunctorial("wrong number of fibers or actions".into()));
        }
        let x = FinitePresheaf { site, fibers, action, labels: None };
        x.check_functorial()?;
        Ok(x)
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn site(&self) -> &Arc<TruncatedSite> {
        &self.site
    }

    pub fn fiber(&self, o: ObjId) -> usize {
        self.fibers[o]
    }

    pub fn fibers(&self) -> &[usize] {
        &self.fibers
    }

    /// `m · ρ`.
    pub fn act(&self, rho: ArrowId, m: usize) -> usize {
        self.action[rho][m] as usize
    }

    pub fn label(&self, o: ObjId, m: usize) -> String {
        match &self.labels {
            Some(l) => l[o][m].clone(),
            None => format!("#{m}"),
        }
    }

    fn check_functorial(&self) -> Result<(), SheafError> {
        let site = &self.site;
        for a in site.arrows() {
            let arrow = site.arrow(a);
            let f = &self.action[a];
            if f.len() != self.fibers[arrow.dom] || f.iter().any(|&v| v as usize >= self.fibers[arrow.cod]) {
                return Err(SheafError::NotFunctorial(format!("action of {} is not a function", site.renaming(a))));
            }
        }
        for o in site.objects() {
            let id = &self.action[site.identity(o)];
            if id.iter().enumerate().any(|(i, &v)| i != v as usize) {
                return Err(SheafError::NotFunctorial(format!("identity on {} acts non-trivially", site.object(o))));
            }
        }
        for f in site.arrows() {
            for (g, gf) in site.postcompositions(f) {
                let ok = (0..self.fibers[site.arrow(f).dom])
                    .all(|m| self.act(g, self.act(f, m)) == self.act(gf, m));
                if !ok {
                    return Err(SheafError::NotFunctorial(format!(
                        "composite of {} after {}",
                        site.renaming(g),
                        site.renaming(f)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Extends a functor given on the interior of `site` (fibers and actions
    /// for the interior objects and arrows, in the site's numbering) to the
    /// headroom level by left Kan extension: an element over a headroom
    /// context is an element over an interior context pushed forward along a
    /// renaming, modulo the action.
    pub fn from_interior(site: Arc<TruncatedSite>, fibers: Vec<usize>, action: Vec<Vec<u32>>) -> Result<Self, SheafError> {
        if fibers.len() != site.interior_object_count() || action.len() != site.interior_arrow_count() {
            return Err(SheafError::NotFunctorial("wrong number of interior fibers or actions".into()));
        }
        let x = Self::extend_unchecked(site, fibers, action);
        x.check_functorial()?;
        Ok(x)
    }

    pub(crate) fn extend_unchecked(site: Arc<TruncatedSite>, mut fibers: Vec<usize>, mut action: Vec<Vec<u32>>) -> Self {
        let n_int = fibers.len();
        let a_int = action.len();
        // generator (f, a) for each arrow f from the interior and a ∈ X(dom f)
        let mut offset = vec![usize::MAX; site.arrow_count()];
        let mut total = 0;
        for f in a_int..site.arrow_count() {
            let dom = site.arrow(f).dom;
            if dom < n_int {
                offset[f] = total;
                total += fibers[dom];
            }
        }
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for f in a_int..site.arrow_count() {
            let dom = site.arrow(f).dom;
            if dom >= n_int {
                continue;
            }
            // (f∘h, a') ~ (f, a'·h)
            for h in 0..a_int {
                if site.arrow(h).cod != dom {
                    continue;
                }
                let fh = site.compose(f, h).expect("composable");
                for a in 0..fibers[site.arrow(h).dom] {
                    let x = find(&mut parent, offset[fh] + a);
                    let y = find(&mut parent, offset[f] + action[h][a] as usize);
                    if x != y {
                        parent[x.max(y)] = x.min(y);
                    }
                }
            }
        }
        // number classes per headroom object by first generator
        let mut class = vec![u32::MAX; total];
        let mut reps: Vec<Vec<(ArrowId, usize)>> = vec![Vec::new(); site.object_count()];
        let mut root_class: HashMap<usize, u32> = HashMap::new();
        for f in a_int..site.arrow_count() {
            if offset[f] == usize::MAX {
                continue;
            }
            let cod = site.arrow(f).cod;
            for a in 0..fibers[site.arrow(f).dom] {
                let r = find(&mut parent, offset[f] + a);
                let c = *root_class.entry(r).or_insert_with(|| {
                    reps[cod].push((f, a));
                    (reps[cod].len() - 1) as u32
                });
                class[offset[f] + a] = c;
            }
        }
        fibers.extend((n_int..site.object_count()).map(|o| reps[o].len()));
        for g in a_int..site.arrow_count() {
            let arrow = site.arrow(g);
            let row = if arrow.dom < n_int {
                (0..fibers[arrow.dom]).map(|a| class[offset[g] + a]).collect()
            } else {
                reps[arrow.dom]
                    .iter()
                    .map(|&(f, a)| class[offset[site.compose(g, f).expect("composable")] + a])
                    .collect()
            };
            action.push(row);
        }
        FinitePresheaf { site, fibers, action, labels: None }
    }

    /// The terminal sheaf `1`: one element everywhere.
    pub fn terminal(site: Arc<TruncatedSite>) -> Self {
        let fibers = vec![1; site.object_count()];
        let action = vec![vec![0]; site.arrow_count()];
        let labels = vec![vec!["*".to_string()]; site.object_count()];
        FinitePresheaf { site, fibers, action, labels: Some(labels) }
    }

    /// `S_τ`: the symbols of sort `τ` in each context.
    pub fn symbols(site: Arc<TruncatedSite>, sort: &Sort) -> Self {
        let positions: Vec<Vec<usize>> = site
            .objects()
            .map(|o| {
                site.object(o)
                    .iter()
                    .enumerate()
                    .filter(|(_, (_, s))| *s == sort)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let fibers = positions.iter().map(Vec::len).collect();
        let action = site
            .arrows()
            .map(|a| {
                let arrow = site.arrow(a);
                positions[arrow.dom]
                    .iter()
                    .map(|&i| positions[arrow.cod].iter().position(|&j| j == arrow.map[i]).unwrap() as u32)
                    .collect()
            })
            .collect();
        let labels = site
            .objects()
            .map(|o| {
                let names: Vec<_> = site.object(o).names().cloned().collect();
                positions[o].iter().map(|&i| names[i].to_string()).collect()
            })
            .collect();
        FinitePresheaf { site, fibers, action, labels: Some(labels) }
    }

    /// `X ⊗ Y`, computed fiberwise.
    pub fn product(&self, other: &FinitePresheaf) -> Result<Self, SheafError> {
        if !Arc::ptr_eq(&self.site, &other.site) {
            return Err(SheafError::SiteMismatch);
        }
        let site = self.site.clone();
        let fibers: Vec<usize> = site.objects().map(|o| self.fibers[o] * other.fibers[o]).collect();
        let action = site
            .arrows()
            .map(|a| {
                let cod_right = other.fibers[site.arrow(a).cod];
                let dom_right = other.fibers[site.arrow(a).dom];
                (0..self.fibers[site.arrow(a).dom] * dom_right)
                    .map(|m| {
                        let (l, r) = (m / dom_right.max(1), m % dom_right.max(1));
                        (self.act(a, l) * cod_right + other.act(a, r)) as u32
                    })
                    .collect()
            })
            .collect();
        let labels = site
            .objects()
            .map(|o| {
                (0..fibers[o])
                    .map(|m| {
                        let r = other.fibers[o];
                        format!("({},{})", self.label(o, m / r), other.label(o, m % r))
                    })
                    .collect()
            })
            .collect();
        Ok(FinitePresheaf { site, fibers, action, labels: Some(labels) })
    }

    /// `X ⊕ Y`, computed fiberwise.
    pub fn coproduct(&self, other: &FinitePresheaf) -> Result<Self, SheafError> {
        if !Arc::ptr_eq(&self.site, &other.site) {
            return Err(SheafError::SiteMismatch);
        }
        let site = self.site.clone();
        let fibers: Vec<usize> = site.objects().map(|o| self.fibers[o] + other.fibers[o]).collect();
        let action = site
            .arrows()
            .map(|a| {
                let arrow = site.arrow(a);
                let shift = self.fibers[arrow.cod];
                let left = (0..self.fibers[arrow.dom]).map(|m| self.act(a, m) as u32);
                let right = (0..other.fibers[arrow.dom]).map(|m| (shift + other.act(a, m)) as u32);
                left.chain(right).collect()
            })
            .collect();
        let labels = site
            .objects()
            .map(|o| {
                let left = (0..self.fibers[o]).map(|m| format!("inl {}", self.label(o, m)));
                let right = (0..other.fibers[o]).map(|m| format!("inr {}", other.label(o, m)));
                left.chain(right).collect()
            })
            .collect();
        Ok(FinitePresheaf { site, fibers, action, labels: Some(labels) })
    }

    fn element_in(&self, o: ObjId, m: usize) -> Result<(), SheafError> {
        if m >= self.fibers[o] {
            return Err(SheafError::ElementNotInFiber {
                object: self.site.object(o).to_string(),
                element: m,
                size: self.fibers[o],
            });
        }
        Ok(())
    }

    /// `Υ ▶_ρ m`: every pair of renamings out of `cod ρ` that agree after `ρ`
    /// also agree on `m`. Quantifies over the whole site.
    pub fn supports(&self, rho: ArrowId, m: usize) -> Result<bool, SheafError> {
        self.element_in(self.site.arrow(rho).cod, m)?;
        Ok(self.supports_unchecked(rho, m))
    }

    fn supports_unchecked(&self, rho: ArrowId, m: usize) -> bool {
        // ρ₁, ρ₂ with ρ₁∘ρ = ρ₂∘ρ share the composite, so group by it
        let mut seen: HashMap<ArrowId, usize> = HashMap::new();
        for (g, g_rho) in self.site.postcompositions(rho) {
            let image = self.act(g, m);
            if *seen.entry(g_rho).or_insert(image) != image {
                return false;
            }
        }
        true
    }

    /// The least support of `m` over `ctx`: the intersection of all
    /// subcontexts whose inclusion supports `m`.
    ///
    /// Only defined on the interior. Over a headroom context every renaming
    /// out of it is a permutation, so any co-singleton subcontext supports
    /// everything.
    pub fn least_support(&self, ctx: &SymbolCtx, m: usize) -> Result<SymbolCtx, SheafError> {
        let o = self.site.find_object(ctx).ok_or_else(|| SheafError::UnknownObject(ctx.to_string()))?;
        if !self.site.is_interior(o) {
            return Err(SheafError::Headroom(ctx.to_string()));
        }
        self.element_in(o, m)?;
        let o = self.least_support_at(o, m)?;
        Ok(self.site.object(o).clone())
    }

    fn least_support_at(&self, o: ObjId, m: usize) -> Result<ObjId, SheafError> {
        let site = &self.site;
        let mut common: Vec<bool> = vec![true; site.size(o)];
        for sub in site.objects() {
            let Some(incl) = site.inclusion(sub, o) else { continue };
            if self.supports_unchecked(incl, m) {
                let mut kept = vec![false; site.size(o)];
                for &j in &site.arrow(incl).map {
                    kept[j] = true;
                }
                for (c, k) in common.iter_mut().zip(kept) {
                    *c &= k;
                }
            }
        }
        let bindings = site.object(o).iter().zip(&common).filter(|(_, &keep)| keep).map(|((n, s), _)| (n.clone(), s.clone()));
        let meet = SymbolCtx::from_bindings(bindings).expect("subcontext of a context");
        let not_a_sheaf = || SheafError::NotASheaf { object: site.object(o).to_string(), element: self.label(o, m) };
        let meet = site.find_object(&meet).ok_or_else(not_a_sheaf)?;
        let incl = site.inclusion(meet, o).expect("meet is a subcontext");
        if self.supports_unchecked(incl, m) {
            Ok(meet)
        } else {
            Err(not_a_sheaf())
        }
    }

    /// The sheaf condition for the atomic topology: whenever `Υ ▶_ρ n`, there
    /// is exactly one `m` with `m · ρ = n`.
    ///
    /// Renamings into the headroom level are only used as test maps: the
    /// condition is imposed on renamings whose codomain is interior, plus
    /// uniqueness (injectivity of `X(ρ)`) on every renaming.
    pub fn sheaf_failure(&self) -> Option<SheafFailure> {
        let site = &self.site;
        for rho in site.arrows() {
            let arrow = site.arrow(rho);
            let mut preimages = vec![0usize; self.fibers[arrow.cod]];
            for m in 0..self.fibers[arrow.dom] {
                preimages[self.act(rho, m)] += 1;
            }
            for (n, &count) in preimages.iter().enumerate() {
                let failure = if count > 1 {
                    // n = m·ρ is always supported along ρ
                    Some(SheafFailure::Uniqueness { renaming: site.renaming(rho).to_string(), element: self.label(arrow.cod, n) })
                } else if count == 0 && site.is_interior(arrow.cod) && self.supports_unchecked(rho, n) {
                    Some(SheafFailure::Existence { renaming: site.renaming(rho).to_string(), element: self.label(arrow.cod, n) })
                } else {
                    None
                };
                if failure.is_some() {
                    return failure;
                }
            }
        }
        None
    }

    pub fn is_sheaf(&self) -> bool {
        self.sheaf_failure().is_none()
    }

    /// Checks that every pullback square of the site is sent to a pullback
    /// of finite sets, returning the first one that is not.
    pub fn pullback_failure(&self) -> Option<PullbackFailure> {
        let site = &self.site;
        site.pullback_squares().iter().find_map(|sq| {
            let reason = self.square_failure(sq)?;
            let (fi, fj, si) = (site.arrow(sq.f_i), site.arrow(sq.f_j), site.arrow(sq.s_i));
            Some(PullbackFailure {
                apex: site.object(fi.dom).to_string(),
                left: site.object(fi.cod).to_string(),
                right: site.object(fj.cod).to_string(),
                base: site.object(si.cod).to_string(),
                reason,
            })
        })
    }

    pub fn preserves_pullbacks(&self) -> bool {
        self.pullback_failure().is_none()
    }

    fn square_failure(&self, sq: &PullbackSquare) -> Option<&'static str> {
        let site = &self.site;
        let apex = site.arrow(sq.f_i).dom;
        let (left, right) = (site.arrow(sq.s_i).dom, site.arrow(sq.s_j).dom);
        let mut hit: HashMap<(usize, usize), usize> = HashMap::new();
        for m in 0..self.fibers[apex] {
            let pair = (self.act(sq.f_i, m), self.act(sq.f_j, m));
            if hit.insert(pair, m).is_some() {
                return Some("injectivity");
            }
        }
        for a in 0..self.fibers[left] {
            for b in 0..self.fibers[right] {
                if self.act(sq.s_i, a) == self.act(sq.s_j, b) && !hit.contains_key(&(a, b)) {
                    return Some("surjectivity");
                }
            }
        }
        None
    }

    /// Rebuilds a presheaf given on the skeleton of `full` as a presheaf on
    /// `full`, by conjugating with the canonical isomorphisms.
    pub fn transport(&self, full: Arc<TruncatedSite>) -> FinitePresheaf {
        let plan = TransportPlan::new(&self.site, &full);
        self.transport_with(&plan, full)
    }

    pub(crate) fn transport_with(&self, plan: &TransportPlan, full: Arc<TruncatedSite>) -> FinitePresheaf {
        let fibers = plan.objects.iter().map(|&o| self.fibers[o]).collect();
        let action = plan.arrows.iter().map(|&a| self.action[a].clone()).collect();
        let labels = self.labels.as_ref().map(|l| plan.objects.iter().map(|&o| l[o].clone()).collect());
        FinitePresheaf { site: full, fibers, action, labels }
    }
}

/// For each object and arrow of a site, the skeleton object and arrow it is
/// conjugate to.
pub(crate) struct TransportPlan {
    objects: Vec<ObjId>,
    arrows: Vec<ArrowId>,
}

impl TransportPlan {
    pub(crate) fn new(skel: &TruncatedSite, full: &TruncatedSite) -> TransportPlan {
        let canon: Vec<(ObjId, ArrowId)> = full.objects().map(|o| full.canonical(o)).collect();
        let objects = full
            .objects()
            .map(|o| skel.find_object(full.object(canon[o].0)).expect("canonical object in skeleton"))
            .collect();
        let from_canon: Vec<ArrowId> = full
            .objects()
            .map(|o| full.arrow_of(&full.renaming(canon[o].1).inverse().expect("isomorphism")).unwrap())
            .collect();
        let arrows = full
            .arrows()
            .map(|a| {
                let arrow = full.arrow(a);
                let conj = full.compose(canon[arrow.cod].1, full.compose(a, from_canon[arrow.dom]).unwrap()).unwrap();
                skel.arrow_of(&full.renaming(conj)).expect("arrow between canonical objects")
            })
            .collect();
        TransportPlan { objects, arrows }
    }
}

impl fmt::Debug for FinitePresheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinitePresheaf").field("fibers", &self.fibers).finish()
    }
}

impl fmt::Display for SheafFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SheafFailure::Existence { renaming, element } => {
                write!(f, "existence fails: {element} is supported along {renaming} but has no preimage")
            }
            SheafFailure::Uniqueness { renaming, element } => {
                write!(f, "uniqueness fails: {element} has several preimages along {renaming}")
            }
        }
    }
}

impl fmt::Display for PullbackFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "square {} -> ({} | {}) -> {} fails {}",
            self.apex, self.left, self.right, self.base, self.reason
        )
    }
}
