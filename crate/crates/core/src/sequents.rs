//! Telescopes, sequents and the parametric judgment `∇`, with the
//! wellformedness refinement `Υ ‖ Γ ⊢ M ∈wf τ`.
//!
//! The surface notation is the parser's sugar:
//!
//! | surface        | core               |
//! |----------------|--------------------|
//! | `<>` or `⋄`    | `nil`              |
//! | `H, u:A`       | `snoc[u](H, A)`    |
//! | `H >> A`       | `sequent(H, A)`    |
//! | `'u`           | `hyp[u]`           |

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::contexts::{MetaCtx, SymbolCtx, VarCtx};
use crate::name::{Name, Sort};
use crate::signature::{
    check_operator, declare_signature, Arity, OperatorDecl, OperatorSchema, Signature, SignatureError, Valence,
};
use crate::syntax::{parse_term, print_term_with, PrintOptions, SyntaxError};
use crate::term::{check, check_abs, extend_for_binder, Abstraction, CheckError, Path, Term};

pub const NABLA: &str = "nabla";

/// `∇[σ⃗] : ({σ⃗}.jdg) jdg`, one declaration per sort vector.
pub struct NablaSchema {
    instances: Mutex<HashMap<Vec<Sort>, Arc<OperatorDecl>>>,
}

fn nabla_name(sorts: &[Sort]) -> Name {
    let sorts: Vec<&str> = sorts.iter().map(Sort::as_str).collect();
    Name::from(format!("{NABLA}[{}]", sorts.join(",")))
}

fn nabla_arity(sorts: &[Sort]) -> Arity {
    let jdg = Sort::new("jdg");
    Arity::new(vec![Valence::new(sorts.to_vec(), Vec::new(), jdg.clone())], jdg)
}

impl NablaSchema {
    /// The process-wide schema; every call shares one memo table.
    pub fn shared() -> Arc<NablaSchema> {
        static SHARED: OnceLock<Arc<NablaSchema>> = OnceLock::new();
        SHARED.get_or_init(|| Arc::new(NablaSchema { instances: Mutex::new(HashMap::new()) })).clone()
    }
}

impl OperatorSchema for NablaSchema {
    fn head(&self) -> &str {
        NABLA
    }

    fn instantiate(&self, sorts: &[Sort]) -> Arc<OperatorDecl> {
        let mut table = self.instances.lock().unwrap_or_else(|e| e.into_inner());
        table
            .entry(sorts.to_vec())
            .or_insert_with(|| Arc::new(OperatorDecl::new(nabla_name(sorts), Vec::new(), nabla_arity(sorts))))
            .clone()
    }

    fn owns(&self, decl: &OperatorDecl) -> bool {
        match decl.arity.valences.as_slice() {
            [v] => decl.params.is_empty() && *decl == OperatorDecl::new(nabla_name(&v.symbols), Vec::new(), nabla_arity(&v.symbols)),
            _ => false,
        }
    }
}

/// Sorts `exp, prop, tele, jdg`; operators `nil`, `snoc`, `hyp`, `sequent`,
/// `P`, `pred`; and the `∇` schema.
pub fn sequent_signature() -> Signature {
    let [exp, prop, tele, jdg] = ["exp", "prop", "tele", "jdg"].map(Sort::new);
    let plain = Valence::plain;
    declare_signature(
        vec![exp.clone(), prop.clone(), tele.clone(), jdg.clone()],
        vec![
            OperatorDecl::new("nil", vec![], Arity::new(vec![], tele.clone())),
            OperatorDecl::new(
                "snoc",
                vec![exp.clone()],
                Arity::new(vec![plain(tele.clone()), plain(prop.clone())], tele.clone()),
            ),
            OperatorDecl::new("hyp", vec![exp.clone()], Arity::new(vec![], exp.clone())),
            OperatorDecl::new("sequent", vec![], Arity::new(vec![plain(tele), plain(prop.clone())], jdg)),
            OperatorDecl::new("P", vec![], Arity::new(vec![], prop.clone())),
            OperatorDecl::new("pred", vec![], Arity::new(vec![plain(exp)], prop)),
        ],
    )
    .and_then(|sig| sig.with_schema(NablaSchema::shared()))
    .expect("sequent signature is well formed")
}

/// `∇[σ⃗]`, memoized: equal sort vectors give the same `Arc`.
pub fn instantiate_nabla(sorts: &[Sort]) -> Result<Arc<OperatorDecl>, SignatureError> {
    static SIG: OnceLock<Signature> = OnceLock::new();
    SIG.get_or_init(sequent_signature).instantiate(NABLA, sorts)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WfError {
    /// The term does not even sort-check.
    #[error("presupposition fails: {0}")]
    Presupposition(CheckError),
    #[error("not wellformed at {path}: {reason}")]
    IllFormed { path: Path, reason: String },
}

impl WfError {
    pub fn path(&self) -> &Path {
        match self {
            WfError::Presupposition(e) => e.path(),
            WfError::IllFormed { path, .. } => path,
        }
    }
}

/// Decides `Υ ‖ Γ ⊢ M ∈wf τ` after checking `· ▷ Υ ‖ Γ ⊢ M : τ`.
pub fn check_wf(sig: &Signature, syms: &SymbolCtx, vars: &VarCtx, m: &Term, tau: &Sort) -> Result<(), WfError> {
    let found = check(sig, &MetaCtx::empty(), syms, vars, m).map_err(WfError::Presupposition)?;
    if &found != tau {
        return Err(WfError::Presupposition(CheckError::SortMismatch {
            expected: tau.clone(),
            found,
            path: Path::root(),
        }));
    }
    Wf { sig }.term(syms, vars, m, &Path::root())
}

/// Decides `Υ ‖ Γ ⊢ E ∈wf v` after checking `· ▷ Υ ‖ Γ ⊢ E : v`.
pub fn check_abs_wf(
    sig: &Signature,
    syms: &SymbolCtx,
    vars: &VarCtx,
    e: &Abstraction,
    v: &Valence,
) -> Result<(), WfError> {
    let found = check_abs(sig, &MetaCtx::empty(), syms, vars, e).map_err(WfError::Presupposition)?;
    if &found != v {
        return Err(WfError::Presupposition(CheckError::ValenceMismatch {
            expected: Box::new(v.clone()),
            found: Box::new(found),
            path: Path::root(),
        }));
    }
    Wf { sig }.abs(syms, vars, e, &Path::root())
}

struct Wf<'a> {
    sig: &'a Signature,
}

impl Wf<'_> {
    fn abs(&self, syms: &SymbolCtx, vars: &VarCtx, e: &Abstraction, path: &Path) -> Result<(), WfError> {
        let (syms, vars) = extend_for_binder(syms, vars, e, path).map_err(WfError::Presupposition)?;
        self.term(&syms, &vars, &e.body, path)
    }

    fn term(&self, syms: &SymbolCtx, vars: &VarCtx, m: &Term, path: &Path) -> Result<(), WfError> {
        let (inst, args) = match m {
            Term::Var(_) => return Ok(()),
            Term::Meta { name, .. } => {
                return Err(ill(path, format!("metavariable `{name}` has no wellformedness rule")));
            }
            Term::Op { inst, args } => (inst, args),
        };
        let name = inst.name().as_str();
        let child = |i: usize| path.child(inst.name(), i);
        if self.sig.schema(NABLA).is_some_and(|s| s.owns(&inst.decl)) {
            return self.abs(syms, vars, &args[0], &child(0));
        }
        match (name, inst.params.as_slice()) {
            ("nil", []) => Ok(()),
            ("sequent", []) => {
                self.term(syms, vars, &args[0].body, &child(0))?;
                self.term(syms, vars, &args[1].body, &child(1))
            }
            ("snoc", [u]) => {
                let rest = syms
                    .remove(u.as_str())
                    .map_err(|_| ill(path, format!("hypothesis name `{u}` is not in scope")))?;
                self.term(&rest, vars, &args[0].body, &child(0))?;
                self.term(&rest, vars, &args[1].body, &child(1))
            }
            _ if matches!(inst.arity().target.as_str(), "exp" | "prop") => {
                check_operator(self.sig, syms, inst).map_err(|e| ill(path, e.to_string()))?;
                for (i, e) in args.iter().enumerate() {
                    self.abs(syms, vars, e, &child(i))?;
                }
                Ok(())
            }
            _ => Err(ill(path, format!("operator `{name}` has no wellformedness rule"))),
        }
    }
}

fn ill(path: &Path, reason: String) -> WfError {
    WfError::IllFormed { path: path.clone(), reason }
}

/// Parses surface notation into core terms of [`sequent_signature`].
pub fn desugar(text: &str) -> Result<Term, SyntaxError> {
    parse_term(text, &sequent_signature(), &MetaCtx::empty())
}

/// Prints a term back in surface notation.
pub fn resugar(m: &Term, unicode: bool) -> String {
    print_term_with(m, PrintOptions { unicode, sugar: true })
}
