use std::sync::Arc;

use super::{FiniteRelationSpace, FreeGroup, FullGroupAction, Lamplighter, Lattice, ThompsonF};
use crate::error::{Error, Result};

/// Any catalogue action; dispatch with [`with_action!`](crate::with_action).
#[derive(Clone, Debug)]
pub enum AnyAction {
    Lattice(Lattice),
    Free(FreeGroup),
    Wreath(Lamplighter),
    Thompson(ThompsonF),
    Finite(FullGroupAction),
}

/// Run `$body` with `$a` bound to the concrete oracle inside an [`AnyAction`].
#[macro_export]
macro_rules! with_action {
    ($any:expr, $a:ident => $body:expr) => {
        match $any {
            $crate::action::AnyAction::Lattice($a) => $body,
            $crate::action::AnyAction::Free($a) => $body,
            $crate::action::AnyAction::Wreath($a) => $body,
            $crate::action::AnyAction::Thompson($a) => $body,
            $crate::action::AnyAction::Finite($a) => $body,
        }
    };
}

/// Names: `zd:<d>`, `free:<k>`, `wreath_z2_z`, `thompson_f_dyadic`, `finite_relation` (needs a space).
pub fn build_action(name: &str, space: Option<FiniteRelationSpace>) -> Result<AnyAction> {
    let (base, param) = match name.split_once(':') {
        Some((b, p)) => (b, Some(p)),
        None => (name, None),
    };
    let num = |default: usize| -> Result<usize> {
        param
            .map(|p| p.parse::<usize>().map_err(|_| Error::Config(format!("bad parameter in action {name:?}"))))
            .unwrap_or(Ok(default))
    };
    Ok(match base {
        "zd" => AnyAction::Lattice(Lattice::new(num(1)?)?),
        "free" => AnyAction::Free(FreeGroup::new(num(2)?)?),
        "wreath_z2_z" => AnyAction::Wreath(Lamplighter::new()),
        "thompson_f_dyadic" => AnyAction::Thompson(ThompsonF::new()),
        "finite_relation" => {
            let s = space.ok_or_else(|| Error::Config("finite_relation needs a relation space file".into()))?;
            AnyAction::Finite(FullGroupAction::new(Arc::new(s)))
        }
        _ => return Err(Error::Config(format!("unknown action {name:?}"))),
    })
}
