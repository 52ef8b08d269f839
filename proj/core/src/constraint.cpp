#include "hybisim/constraint.hpp"

#include <algorithm>
#include <cmath>

namespace hybisim {

const char* relation_symbol(Relation r) {
    switch (r) {
        case Relation::LE: return "<=";
        case Relation::LT: return "<";
        case Relation::EQ: return "=";
        case Relation::GE: return ">=";
        case Relation::GT: return ">";
    }
    return "?";
}

bool relation_is_strict(Relation r) {
    return r == Relation::LT || r == Relation::GT;
}

namespace {

struct Affine {
    Vec a;
    double c;
};

bool is_constant(const Affine& f) {
    return std::all_of(f.a.begin(), f.a.end(), [](double v) { return v == 0.0; });
}

double call_value(FuncId f, double x) {
    switch (f) {
        case FuncId::Exp: return std::exp(x);
        case FuncId::Sin: return std::sin(x);
        case FuncId::Cos: return std::cos(x);
        case FuncId::Sqrt: return std::sqrt(x);
        case FuncId::Abs: return std::fabs(x);
    }
    return 0.0;
}

// Lowers an expression to a + c form; rejects anything non-affine.
Affine extract_affine(const ExprPtr& e, const std::vector<std::string>& variables) {
    const std::size_t n = variables.size();
    switch (e->kind) {
        case ExprKind::Literal:
            return {Vec(n, 0.0), e->value};
        case ExprKind::Variable: {
            Affine f{Vec(n, 0.0), 0.0};
            for (std::size_t i = 0; i < n; ++i) {
                if (variables[i] == e->name) {
                    f.a[i] = 1.0;
                    return f;
                }
            }
            throw LinkError("unknown variable '" + e->name + "' in constraint");
        }
        case ExprKind::Negate: {
            Affine f = extract_affine(e->lhs, variables);
            for (double& v : f.a) v = -v;
            f.c = -f.c;
            return f;
        }
        case ExprKind::Add:
        case ExprKind::Sub: {
            Affine l = extract_affine(e->lhs, variables);
            Affine r = extract_affine(e->rhs, variables);
            double s = e->kind == ExprKind::Add ? 1.0 : -1.0;
            for (std::size_t i = 0; i < n; ++i) l.a[i] += s * r.a[i];
            l.c += s * r.c;
            return l;
        }
        case ExprKind::Mul: {
            Affine l = extract_affine(e->lhs, variables);
            Affine r = extract_affine(e->rhs, variables);
            if (is_constant(l)) std::swap(l, r);
            if (!is_constant(r))
                throw ParseError("constraint is not affine: product of two variable terms");
            for (double& v : l.a) v *= r.c;
            l.c *= r.c;
            return l;
        }
        case ExprKind::Div: {
            Affine l = extract_affine(e->lhs, variables);
            Affine r = extract_affine(e->rhs, variables);
            if (!is_constant(r))
                throw ParseError("constraint is not affine: division by a variable term");
            if (r.c == 0.0) throw ParseError("constant division by zero in constraint");
            for (double& v : l.a) v /= r.c;
            l.c /= r.c;
            return l;
        }
        case ExprKind::Pow: {
            if (e->exponent == 0) return {Vec(n, 0.0), 1.0};
            Affine b = extract_affine(e->lhs, variables);
            if (e->exponent == 1) return b;
            if (!is_constant(b))
                throw ParseError("constraint is not affine: variable raised to power " +
                                 std::to_string(e->exponent));
            return {Vec(n, 0.0), std::pow(b.c, static_cast<double>(e->exponent))};
        }
        case ExprKind::Call: {
            Affine arg = extract_affine(e->lhs, variables);
            if (!is_constant(arg))
                throw ParseError(std::string("constraint is not affine: ") +
                                 func_name(e->func) + " of a variable term");
            double v = call_value(e->func, arg.c);
            if (!std::isfinite(v))
                throw ParseError(std::string("constant ") + func_name(e->func) +
                                 " does not evaluate to a finite value");
            return {Vec(n, 0.0), v};
        }
    }
    throw ParseError("malformed constraint expression");
}

bool depends_on_variables(const Vec& a) {
    for (double v : a)
        if (v != 0.0) return true;
    return false;
}

AffineRow make_row(const Affine& lhs, Relation rel, const Affine& rhs,
                   const std::string& source) {
    AffineRow row;
    row.a = lhs.a;
    for (std::size_t i = 0; i < row.a.size(); ++i) row.a[i] -= rhs.a[i];
    row.rel = rel;
    row.b = rhs.c - lhs.c;
    row.source = source;
    if (!depends_on_variables(row.a))
        throw ParseError("constraint has no variable dependence: " + source);
    return row;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<AffineRow> parse_constraint(const std::string& text,
                                        const std::vector<std::string>& variables) {
    // Locate the relation operator: first occurrence of <=, >=, <, >, or =.
    std::size_t op_pos = std::string::npos;
    Relation rel = Relation::EQ;
    std::size_t op_len = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c != '<' && c != '>' && c != '=') continue;
        op_pos = i;
        if (c == '<') {
            if (i + 1 < text.size() && text[i + 1] == '=') { rel = Relation::LE; op_len = 2; }
            else { rel = Relation::LT; op_len = 1; }
        } else if (c == '>') {
            if (i + 1 < text.size() && text[i + 1] == '=') { rel = Relation::GE; op_len = 2; }
            else { rel = Relation::GT; op_len = 1; }
        } else {
            rel = Relation::EQ;
            op_len = 1;
        }
        break;
    }
    if (op_pos == std::string::npos)
        throw ParseError("constraint has no relation operator: " + trim(text));

    std::string source = trim(text);
    ExprPtr lhs = parse_expr(text.substr(0, op_pos));
    ExprPtr rhs = parse_expr(text.substr(op_pos + op_len));

    // abs(E) <= F unfolds into the pair of one-sided bounds.
    if (lhs->kind == ExprKind::Call && lhs->func == FuncId::Abs &&
        expr_variables(lhs->lhs).size() > 0) {
        if (rel != Relation::LE && rel != Relation::LT)
            throw ParseError("abs(...) is only supported with <= or <: " + source);
        Affine inner = extract_affine(lhs->lhs, variables);
        Affine bound = extract_affine(rhs, variables);
        Affine neg = inner;
        for (double& v : neg.a) v = -v;
        neg.c = -neg.c;
        return {make_row(inner, rel, bound, source), make_row(neg, rel, bound, source)};
    }

    Affine l = extract_affine(lhs, variables);
    Affine r = extract_affine(rhs, variables);
    return {make_row(l, rel, r, source)};
}

std::vector<AffineRow> parse_constraint_block(const std::string& text,
                                              const std::vector<std::string>& variables) {
    std::vector<AffineRow> rows;
    std::size_t start = 0;
    bool last = false;
    while (!last) {
        std::size_t semi = text.find(';', start);
        std::string piece;
        if (semi == std::string::npos) {
            piece = text.substr(start);
            last = true;
        } else {
            piece = text.substr(start, semi - start);
            start = semi + 1;
        }
        if (!trim(piece).empty()) {
            auto parsed = parse_constraint(piece, variables);
            rows.insert(rows.end(), parsed.begin(), parsed.end());
        }
    }
    if (rows.empty()) throw ParseError("empty constraint block");
    return rows;
}

}  // namespace hybisim
