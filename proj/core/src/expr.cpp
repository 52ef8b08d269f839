#include "hybisim/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>

namespace hybisim {

namespace {

std::shared_ptr<Expr> node(ExprKind k) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    return e;
}

}  // namespace

ExprPtr make_literal(double v) {
    auto e = node(ExprKind::Literal);
    e->value = v;
    return e;
}

ExprPtr make_variable(const std::string& name) {
    auto e = node(ExprKind::Variable);
    e->name = name;
    return e;
}

ExprPtr make_negate(ExprPtr a) {
    auto e = node(ExprKind::Negate);
    e->lhs = std::move(a);
    return e;
}

ExprPtr make_binary(ExprKind kind, ExprPtr a, ExprPtr b) {
    auto e = node(kind);
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

ExprPtr make_pow(ExprPtr base, int exponent) {
    auto e = node(ExprKind::Pow);
    e->lhs = std::move(base);
    e->exponent = exponent;
    return e;
}

ExprPtr make_call(FuncId f, ExprPtr arg) {
    auto e = node(ExprKind::Call);
    e->func = f;
    e->lhs = std::move(arg);
    return e;
}

const char* func_name(FuncId f) {
    switch (f) {
        case FuncId::Exp: return "exp";
        case FuncId::Sin: return "sin";
        case FuncId::Cos: return "cos";
        case FuncId::Sqrt: return "sqrt";
        case FuncId::Abs: return "abs";
    }
    return "?";
}

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : s(text) {}

    ExprPtr run() {
        ExprPtr e = expr();
        skip_ws();
        if (pos < s.size()) throw ParseError("unexpected trailing input", pos);
        return e;
    }

private:
    const std::string& s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    // Peeks past whitespace without consuming it.
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    void expect(char c) {
        if (peek() != c)
            throw ParseError(std::string("expected '") + c + "'", pos);
        ++pos;
    }

    ExprPtr expr() {
        ExprPtr e = term();
        while (true) {
            char c = peek();
            if (c != '+' && c != '-') return e;
            ++pos;
            e = make_binary(c == '+' ? ExprKind::Add : ExprKind::Sub, e, term());
        }
    }

    ExprPtr term() {
        ExprPtr e = factor();
        while (true) {
            char c = peek();
            if (c != '*' && c != '/') return e;
            ++pos;
            e = make_binary(c == '*' ? ExprKind::Mul : ExprKind::Div, e, factor());
        }
    }

    ExprPtr factor() {
        ExprPtr base = atom();
        if (peek() != '^') return base;
        ++pos;
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start)
            throw ParseError("expected integer exponent after '^'", pos);
        if (pos - start > 9)
            throw ParseError("exponent too large", start);
        return make_pow(std::move(base), std::stoi(s.substr(start, pos - start)));
    }

    ExprPtr atom() {
        char c = peek();
        if (pos >= s.size()) throw ParseError("expected expression", pos);
        if (c == '(') {
            ++pos;
            ExprPtr e = expr();
            expect(')');
            return e;
        }
        if (c == '-') {
            ++pos;
            return make_negate(atom());
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
        throw ParseError("unexpected character", pos);
    }

    ExprPtr number() {
        std::size_t start = pos;
        bool any_digit = false;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            ++pos;
            any_digit = true;
        }
        if (pos < s.size() && s[pos] == '.') {
            ++pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                ++pos;
                any_digit = true;
            }
        }
        if (!any_digit) throw ParseError("malformed number", start);
        if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
            std::size_t q = pos + 1;
            if (q < s.size() && (s[q] == '+' || s[q] == '-')) ++q;
            if (q < s.size() && std::isdigit(static_cast<unsigned char>(s[q]))) {
                while (q < s.size() && std::isdigit(static_cast<unsigned char>(s[q]))) ++q;
                pos = q;
            }
        }
        std::string token = s.substr(start, pos - start);
        char* end = nullptr;
        double v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size() || !std::isfinite(v))
            throw ParseError("numeric literal out of range", start);
        return make_literal(v);
    }

    ExprPtr ident() {
        std::size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        std::string name = s.substr(start, pos - start);
        if (peek() == '(') {
            FuncId f;
            if (name == "exp") f = FuncId::Exp;
            else if (name == "sin") f = FuncId::Sin;
            else if (name == "cos") f = FuncId::Cos;
            else if (name == "sqrt") f = FuncId::Sqrt;
            else if (name == "abs") f = FuncId::Abs;
            else throw ParseError("unknown function '" + name + "'", start);
            ++pos;
            ExprPtr arg = expr();
            expect(')');
            return make_call(f, std::move(arg));
        }
        return make_variable(name);
    }
};

int prec(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Add:
        case ExprKind::Sub: return 0;
        case ExprKind::Mul:
        case ExprKind::Div: return 1;
        case ExprKind::Negate: return 2;
        case ExprKind::Pow: return 3;
        default: return 4;
    }
}

void render(const ExprPtr& e, int level, std::string& out) {
    bool paren = prec(*e) < level;
    if (paren) out += '(';
    switch (e->kind) {
        case ExprKind::Literal: {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", e->value);
            out += buf;
            break;
        }
        case ExprKind::Variable:
            out += e->name;
            break;
        case ExprKind::Negate:
            out += '-';
            render(e->lhs, 4, out);
            break;
        case ExprKind::Add:
            render(e->lhs, 0, out);
            out += " + ";
            render(e->rhs, 1, out);
            break;
        case ExprKind::Sub:
            render(e->lhs, 0, out);
            out += " - ";
            render(e->rhs, 1, out);
            break;
        case ExprKind::Mul:
            render(e->lhs, 1, out);
            out += '*';
            render(e->rhs, 2, out);
            break;
        case ExprKind::Div:
            render(e->lhs, 1, out);
            out += '/';
            render(e->rhs, 2, out);
            break;
        case ExprKind::Pow:
            render(e->lhs, 4, out);
            out += '^';
            out += std::to_string(e->exponent);
            break;
        case ExprKind::Call:
            out += func_name(e->func);
            out += '(';
            render(e->lhs, 0, out);
            out += ')';
            break;
    }
    if (paren) out += ')';
}

}  // namespace

ExprPtr parse_expr(const std::string& text) { return Parser(text).run(); }

std::string print_expr(const ExprPtr& e) {
    std::string out;
    render(e, 0, out);
    return out;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprKind::Literal: return a->value == b->value;
        case ExprKind::Variable: return a->name == b->name;
        case ExprKind::Negate: return expr_equal(a->lhs, b->lhs);
        case ExprKind::Pow:
            return a->exponent == b->exponent && expr_equal(a->lhs, b->lhs);
        case ExprKind::Call:
            return a->func == b->func && expr_equal(a->lhs, b->lhs);
        default:
            return expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
    }
}

ExprPtr link_expr(const ExprPtr& e, const std::vector<std::string>& variables) {
    switch (e->kind) {
        case ExprKind::Literal:
            return e;
        case ExprKind::Variable: {
            auto it = std::find(variables.begin(), variables.end(), e->name);
            if (it == variables.end())
                throw LinkError("unknown variable '" + e->name + "'");
            auto n = node(ExprKind::Variable);
            n->name = e->name;
            n->var_index = static_cast<int>(it - variables.begin());
            return n;
        }
        case ExprKind::Negate:
            return make_negate(link_expr(e->lhs, variables));
        case ExprKind::Pow:
            return make_pow(link_expr(e->lhs, variables), e->exponent);
        case ExprKind::Call:
            return make_call(e->func, link_expr(e->lhs, variables));
        default:
            return make_binary(e->kind, link_expr(e->lhs, variables),
                               link_expr(e->rhs, variables));
    }
}

namespace {

double finite_or_throw(double v, const char* what) {
    if (!std::isfinite(v)) throw EvalError(std::string(what) + " produced a non-finite value");
    return v;
}

double apply_call(FuncId f, double a) {
    switch (f) {
        case FuncId::Exp: return finite_or_throw(std::exp(a), "exp");
        case FuncId::Sin: return std::sin(a);
        case FuncId::Cos: return std::cos(a);
        case FuncId::Sqrt: return finite_or_throw(std::sqrt(a), "sqrt");
        case FuncId::Abs: return std::fabs(a);
    }
    throw EvalError("unknown function");
}

template <typename Lookup>
double eval_rec(const ExprPtr& e, const Lookup& lookup) {
    switch (e->kind) {
        case ExprKind::Literal: return e->value;
        case ExprKind::Variable: return lookup(*e);
        case ExprKind::Negate: return -eval_rec(e->lhs, lookup);
        case ExprKind::Add:
            return finite_or_throw(eval_rec(e->lhs, lookup) + eval_rec(e->rhs, lookup), "+");
        case ExprKind::Sub:
            return finite_or_throw(eval_rec(e->lhs, lookup) - eval_rec(e->rhs, lookup), "-");
        case ExprKind::Mul:
            return finite_or_throw(eval_rec(e->lhs, lookup) * eval_rec(e->rhs, lookup), "*");
        case ExprKind::Div:
            return finite_or_throw(eval_rec(e->lhs, lookup) / eval_rec(e->rhs, lookup), "/");
        case ExprKind::Pow:
            return finite_or_throw(
                std::pow(eval_rec(e->lhs, lookup), static_cast<double>(e->exponent)), "^");
        case ExprKind::Call: return apply_call(e->func, eval_rec(e->lhs, lookup));
    }
    throw EvalError("malformed expression node");
}

}  // namespace

double eval_expr(const ExprPtr& e, const std::map<std::string, double>& env) {
    return eval_rec(e, [&env](const Expr& v) {
        auto it = env.find(v.name);
        if (it == env.end()) throw EvalError("unbound variable '" + v.name + "'");
        return it->second;
    });
}

double eval_linked(const ExprPtr& e, const double* vals) {
    return eval_rec(e, [vals](const Expr& v) {
        if (v.var_index < 0) throw EvalError("expression is not linked: '" + v.name + "'");
        return vals[v.var_index];
    });
}

namespace {

void collect_vars(const ExprPtr& e, std::vector<std::string>& out) {
    if (!e) return;
    if (e->kind == ExprKind::Variable) {
        if (std::find(out.begin(), out.end(), e->name) == out.end()) out.push_back(e->name);
        return;
    }
    collect_vars(e->lhs, out);
    collect_vars(e->rhs, out);
}

}  // namespace

std::vector<std::string> expr_variables(const ExprPtr& e) {
    std::vector<std::string> out;
    collect_vars(e, out);
    return out;
}

}  // namespace hybisim
