//! Java front end: tokenizer, concrete syntax tree and a tolerant parser.

pub mod lexer;
pub mod parser;
pub mod syntax;

pub use lexer::{Comment, Lexed, Token, TokenKind};
pub use parser::parse_compilation_unit;
