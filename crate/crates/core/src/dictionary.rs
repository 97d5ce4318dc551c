//! Finite symmetric dictionaries of unit-norm atoms.

use crate::element::{Element, Functional};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{NormedSpace, SmoothSpaceX};

/// Slack granted to a preferred atom in [`weak_select`], matching the audit tolerance.
pub const WEAK_SELECT_TOL: f64 = 1e-9;

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DictionaryKind {
    /// `{+-e_j : i0 <= j <= n}`.
    Canonical { i0: usize, n: usize },
    /// `{+-g_k / ||g_k|| : 0 <= k <= k_max}` with `g_0 = e_1 + e_2 + e_3`, `g_k = e_k + e_{k+1}`.
    GSystem { k_max: usize },
    Explicit,
}

/// A normalized atom; its negative is implicitly in the dictionary too.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom<T> {
    pub id: usize,
    pub element: Element<T>,
    /// Norm of the generating element before normalization.
    pub raw_norm: T,
}

/// A signed atom picked for a functional.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection<T> {
    pub id: usize,
    pub sign: i8,
    /// `F(sign * atom)`.
    pub value: T,
    pub element: Element<T>,
}

#[derive(Debug, Clone)]
pub struct Dictionary<T> {
    kind: DictionaryKind,
    atoms: Vec<Atom<T>>,
}

impl<T: Scalar> Dictionary<T> {
    fn build<S: NormedSpace<T> + ?Sized>(
        space: &S,
        kind: DictionaryKind,
        raw: Vec<(usize, Element<T>)>,
    ) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyDictionary);
        }
        let mut atoms = Vec::with_capacity(raw.len());
        for (id, g) in raw {
            space.check_support(&g)?;
            let n = space.norm(&g)?;
            if n == T::zero() {
                return Err(Error::ZeroElement);
            }
            let element = g.scale(n.recip());
            let check = space.norm(&element)?;
            if (check - T::one()).abs() > T::of(UNIT_TOL) {
                return Err(Error::InvalidParameter(format!("atom {id} normalizes to {check}")));
            }
            atoms.push(Atom { id, element, raw_norm: n });
        }
        Ok(Dictionary { kind, atoms })
    }

    /// Atoms from arbitrary non-zero elements, identified by position.
    pub fn explicit<S: NormedSpace<T> + ?Sized>(space: &S, elements: Vec<Element<T>>) -> Result<Self> {
        Self::build(space, DictionaryKind::Explicit, elements.into_iter().enumerate().collect())
    }

    pub fn kind(&self) -> &DictionaryKind {
        &self.kind
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, id: usize) -> Option<&Atom<T>> {
        match self.kind {
            DictionaryKind::Canonical { i0, .. } => self.atoms.get(id.checked_sub(i0)?),
            _ => self.atoms.get(id).filter(|a| a.id == id).or_else(|| self.atoms.iter().find(|a| a.id == id)),
        }
    }

    /// Evaluates `F` on `sign * atom(id)`.
    pub fn selection(&self, id: usize, sign: i8, f: &Functional<T>) -> Option<Selection<T>> {
        let atom = self.atom(id)?;
        let s = if sign < 0 { -T::one() } else { T::one() };
        Some(Selection { id, sign: if sign < 0 { -1 } else { 1 }, value: s * f.apply(&atom.element), element: atom.element.scale(s) })
    }

    fn values<'a>(&'a self, f: &'a Functional<T>) -> impl Iterator<Item = (usize, T)> + 'a {
        self.atoms.iter().enumerate().map(move |(i, a)| (i, f.apply(&a.element)))
    }

    /// `sup_g F(g)` over all signed atoms, with its maximizer. Ties go to the
    /// lowest atom id, then to the positive sign.
    pub fn sup_functional(&self, f: &Functional<T>) -> (T, Selection<T>) {
        let mut best: Option<(usize, i8, T)> = None;
        for (i, v) in self.values(f) {
            for (sign, val) in [(1i8, v), (-1i8, -v)] {
                if best.map_or(true, |(_, _, b)| val > b) {
                    best = Some((i, sign, val));
                }
            }
        }
        let (i, sign, val) = best.expect("dictionary is non-empty");
        (val, self.signed(i, sign, val))
    }

    fn signed(&self, i: usize, sign: i8, value: T) -> Selection<T> {
        let a = &self.atoms[i];
        let element = if sign < 0 { a.element.scale(-T::one()) } else { a.element.clone() };
        Selection { id: a.id, sign, value, element }
    }

    /// Among the admissible atoms (`F(g) >= t sup - t'`), the one with the
    /// smallest `F(g)`; ties as in [`Dictionary::sup_functional`].
    pub fn weakest_admissible(&self, f: &Functional<T>, t: T, t_prime: T) -> Result<Selection<T>> {
        check_weakness(t, t_prime)?;
        let (sup, top) = self.sup_functional(f);
        let threshold = t * sup - t_prime;
        let mut best: Option<(usize, i8, T)> = None;
        for (i, v) in self.values(f) {
            for (sign, val) in [(1i8, v), (-1i8, -v)] {
                if val >= threshold && best.map_or(true, |(_, _, b)| val < b) {
                    best = Some((i, sign, val));
                }
            }
        }
        Ok(match best {
            Some((i, sign, val)) => self.signed(i, sign, val),
            None => top,
        })
    }
}

fn check_weakness<T: Scalar>(t: T, t_prime: T) -> Result<()> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(Error::InvalidParameter(format!("weakness t = {t} outside [0, 1]")));
    }
    if !(t_prime >= T::zero()) || !t_prime.is_finite() {
        return Err(Error::InvalidParameter(format!("weakness t' = {t_prime} must be >= 0")));
    }
    Ok(())
}

/// `{+-e_j : i0 <= j <= n}` in `space`.
pub fn canonical_dictionary<T: Scalar, S: NormedSpace<T> + ?Sized>(space: &S, i0: usize, n: usize) -> Result<Dictionary<T>> {
    if i0 > 1 {
        return Err(Error::InvalidParameter(format!("first index must be 0 or 1, got {i0}")));
    }
    if n < i0 {
        return Err(Error::InvalidParameter(format!("last index {n} below first index {i0}")));
    }
    let raw = (i0..=n).map(|j| (j, Element::basis(j))).collect();
    Dictionary::build(space, DictionaryKind::Canonical { i0, n }, raw)
}

/// `{+-g_k / ||g_k||_X : 0 <= k <= k_max}` in `X`.
pub fn g_dictionary<T: Scalar>(x: &SmoothSpaceX<T>, k_max: usize) -> Result<Dictionary<T>> {
    let need = (k_max + 1).max(3);
    if need > x.horizon() {
        return Err(Error::HorizonExceeded { index: need, horizon: x.horizon() });
    }
    let one = T::one();
    let mut raw = vec![(0, Element::from_dense(1, &[one, one, one])?)];
    for k in 1..=k_max {
        raw.push((k, Element::from_dense(k, &[one, one])?));
    }
    Dictionary::build(x, DictionaryKind::GSystem { k_max }, raw)
}

/// Returns `preference` when `F(pref) >= t sup - t'` (up to [`WEAK_SELECT_TOL`]),
/// otherwise the maximizer of `F`.
pub fn weak_select<T: Scalar>(
    dict: &Dictionary<T>,
    f: &Functional<T>,
    t: T,
    t_prime: T,
    preference: Option<(usize, i8)>,
) -> Result<Selection<T>> {
    check_weakness(t, t_prime)?;
    let (sup, top) = dict.sup_functional(f);
    if let Some((id, sign)) = preference {
        let pref = dict
            .selection(id, sign, f)
            .ok_or_else(|| Error::InvalidParameter(format!("atom {id} not in dictionary")))?;
        if pref.value >= t * sup - t_prime - T::of(WEAK_SELECT_TOL) {
            return Ok(pref);
        }
    }
    if top.value >= t * sup - t_prime {
        Ok(top)
    } else {
        Err(Error::WeakSelectionImpossible)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::LqSpace;
    use approx::assert_relative_eq;

    fn l2() -> LqSpace<f64> {
        LqSpace::new(2.0).unwrap()
    }

    fn fun(v: &[f64]) -> Functional<f64> {
        Functional::new(Element::from_dense(1, v).unwrap(), 1.0)
    }

    #[test]
    fn canonical_examples() {
        let d = canonical_dictionary(&l2(), 1, 3).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.atom(2).unwrap().element, Element::basis(2));
        let d0 = canonical_dictionary(&l2(), 0, 0).unwrap();
        assert_eq!(d0.atoms()[0].element, Element::basis(0));
        assert!(canonical_dictionary(&l2(), 2, 5).is_err());
        let x = SmoothSpaceX::<f64>::with_default_exponents(4).unwrap();
        assert!(canonical_dictionary(&x, 0, 3).is_err());
    }

    #[test]
    fn sup_examples() {
        let d = canonical_dictionary(&l2(), 1, 2).unwrap();
        let (v, s) = d.sup_functional(&fun(&[0.6, 0.8]));
        assert_eq!((v, s.id, s.sign), (0.8, 2, 1));
        let (v, s) = d.sup_functional(&Functional::zero());
        assert_eq!((v, s.id, s.sign), (0.0, 1, 1));
        let (v, s) = d.sup_functional(&fun(&[0.6, -0.8]));
        assert_eq!((v, s.id, s.sign), (0.8, 2, -1));
        assert_eq!(s.element, Element::basis(2).scale(-1.0));
    }

    #[test]
    fn weak_select_examples() {
        let d = canonical_dictionary(&l2(), 1, 2).unwrap();
        let f = fun(&[0.6, 0.8]);
        assert_eq!(weak_select(&d, &f, 1.0, 0.0, None).unwrap().id, 2);
        assert_eq!(weak_select(&d, &f, 0.5, 0.0, Some((1, 1))).unwrap().id, 1);
        assert_eq!(weak_select(&d, &f, 1.0, 0.3, Some((1, 1))).unwrap().id, 1);
        assert_eq!(weak_select(&d, &f, 1.0, 0.0, Some((1, 1))).unwrap().id, 2);
        assert!(weak_select(&d, &f, 1.5, 0.0, None).is_err());
        assert!(weak_select(&d, &f, 1.0, -0.1, None).is_err());
    }

    #[test]
    fn weakest_admissible_picks_smallest() {
        let d = canonical_dictionary(&l2(), 1, 3).unwrap();
        let f = fun(&[0.5, 0.8, -0.3]);
        let s = d.weakest_admissible(&f, 0.5, 0.0).unwrap();
        assert_eq!((s.id, s.sign), (1, 1));
        let s = d.weakest_admissible(&f, 0.3, 0.0).unwrap();
        assert_eq!((s.id, s.sign), (3, -1));
    }

    #[test]
    fn g_dictionary_norms() {
        let x = SmoothSpaceX::<f64>::with_default_exponents(8).unwrap();
        let d = g_dictionary(&x, 7).unwrap();
        let g0 = d.atom(0).unwrap().raw_norm;
        let closed = (1.0 + 2f64.powf(x.p(3) / x.p(2))).powf(1.0 / x.p(3));
        assert_relative_eq!(g0, closed, max_relative = 1e-12);
        for k in 1..=7 {
            let gk = d.atom(k).unwrap().raw_norm;
            assert_relative_eq!(gk, 2f64.powf(1.0 / x.p(k + 1)), max_relative = 1e-12);
            assert!(gk < 2.0 && gk >= 2f64.powf(1.0 / x.p(2)) - 1e-15);
            assert!(gk < g0);
        }
        assert!(matches!(g_dictionary(&x, 8), Err(Error::HorizonExceeded { .. })));
    }
}
