//! Exact learning of finite-variable formulas and terms from labeled finite
//! structures, constrained by regular tree grammars and decided with tree
//! automata over formula parse trees.

pub mod automata;
pub mod eval_automata;
pub mod io;
pub mod model;
pub mod oracle;
pub mod rtg;
pub mod syntax;
pub mod synthesis;
