//! Model-definition and command languages.

mod command;
mod expr;
pub mod lexer;
mod model;
mod serialize;

pub use command::{parse_command, Command, PrintFlags, Sense, Statement};
pub use expr::{
    parse_criteria, parse_expression, parse_formula, parse_polynomial, parse_polynomial_with, parse_relation,
    RegistryResolver, Resolver,
};
pub use model::parse_model;
pub use serialize::serialize;
