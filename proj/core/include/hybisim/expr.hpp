#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hybisim/errors.hpp"

namespace hybisim {

// Arithmetic expression trees over named scalar variables.
//
// Grammar (also documented in the README):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' integer)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' atom
//
// '^' does not chain (x^2^3 is a parse error) and its exponent is an
// unsigned integer literal.  Recognized functions: exp, sin, cos, sqrt, abs.

enum class ExprKind { Literal, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };

enum class FuncId { Exp, Sin, Cos, Sqrt, Abs };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;
    double value = 0.0;        // Literal
    std::string name;          // Variable
    int var_index = -1;        // Variable: set by link_expr, -1 when unlinked
    FuncId func = FuncId::Exp; // Call
    int exponent = 0;          // Pow
    ExprPtr lhs, rhs;          // children (Negate/Call/Pow use lhs only)
};

ExprPtr make_literal(double v);
ExprPtr make_variable(const std::string& name);
ExprPtr make_negate(ExprPtr a);
ExprPtr make_binary(ExprKind kind, ExprPtr a, ExprPtr b);
ExprPtr make_pow(ExprPtr base, int exponent);
ExprPtr make_call(FuncId f, ExprPtr arg);

const char* func_name(FuncId f);

// Parses `text` in full; trailing input is a ParseError (position = offset of
// the first unconsumed character).
ExprPtr parse_expr(const std::string& text);

// Round-trip printer: parse_expr(print_expr(e)) reproduces `e` structurally.
// Literals print with enough digits to survive the round trip.
std::string print_expr(const ExprPtr& e);

// Structural equality; ignores var_index so linked and unlinked trees
// of the same shape compare equal.
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// Resolves every Variable node against `variables` (position = index),
// returning a new tree.  Unknown names raise LinkError.
ExprPtr link_expr(const ExprPtr& e, const std::vector<std::string>& variables);

// Evaluation by variable name; missing names raise EvalError, as do
// non-finite results (division by zero, sqrt of a negative, overflow).
double eval_expr(const ExprPtr& e, const std::map<std::string, double>& env);

// Evaluation by index after link_expr; `vals` must cover every var_index.
double eval_linked(const ExprPtr& e, const double* vals);

// Collects the distinct variable names appearing in `e`, in first-use order.
std::vector<std::string> expr_variables(const ExprPtr& e);

}  // namespace hybisim
