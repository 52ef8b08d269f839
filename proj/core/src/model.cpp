#include "hybisim/model.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "hybisim/flow.hpp"

namespace hybisim {

int HybridAutomaton::mode_index(const std::string& name) const {
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (modes[i].name == name) return static_cast<int>(i);
    return -1;
}

std::vector<int> HybridAutomaton::edges_from(int mode) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (edges[i].src == mode) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<std::string> HybridAutomaton::input_alphabet() const {
    std::vector<std::string> out;
    for (const Edge& e : edges)
        if (std::find(out.begin(), out.end(), e.input) == out.end())
            out.push_back(e.input);
    return out;
}

std::vector<std::string> HybridAutomaton::output_alphabet() const {
    std::vector<std::string> out;
    for (const Mode& m : modes)
        if (std::find(out.begin(), out.end(), m.output) == out.end())
            out.push_back(m.output);
    return out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& msg) {
    throw ParseError("line " + std::to_string(line_no) + ": " + msg);
}

// Raw blocks gathered in a first pass; expressions and constraints are
// parsed afterwards so every error can name its line.
struct RawMode {
    std::size_t line_no;
    std::string name, output;
    std::vector<std::pair<std::size_t, std::string>> flows;       // "x' = expr"
    std::vector<std::pair<std::size_t, std::string>> invariants;  // one per convex piece
};

struct RawEdge {
    std::size_t line_no;
    std::string src, dst, input;
    std::vector<std::pair<std::size_t, std::string>> guards;
    std::vector<std::pair<std::size_t, std::string>> resets;  // "x = expr"
};

}  // namespace

HybridAutomaton parse_model(const std::string& text) {
    std::vector<std::string> variables;
    std::vector<RawMode> raw_modes;
    std::vector<RawEdge> raw_edges;
    bool have_vars = false;

    enum class Section { Top, Mode, Edge } section = Section::Top;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string t = trim(line);
        if (t.empty()) continue;

        std::istringstream ls(t);
        std::string head;
        ls >> head;
        std::string rest = trim(t.substr(head.size()));

        if (head == "vars") {
            if (have_vars) fail(line_no, "duplicate vars line");
            if (section != Section::Top) fail(line_no, "vars must precede modes and edges");
            for (const std::string& v : split_ws(rest)) {
                if (!valid_name(v)) fail(line_no, "invalid variable name '" + v + "'");
                if (std::find(variables.begin(), variables.end(), v) != variables.end())
                    fail(line_no, "duplicate variable '" + v + "'");
                variables.push_back(v);
            }
            if (variables.empty()) fail(line_no, "vars line declares no variables");
            have_vars = true;
        } else if (head == "mode") {
            auto toks = split_ws(rest);
            if (toks.size() != 3 || toks[1] != "output")
                fail(line_no, "expected: mode NAME output SYMBOL");
            if (!valid_name(toks[0])) fail(line_no, "invalid mode name '" + toks[0] + "'");
            raw_modes.push_back({line_no, toks[0], toks[2], {}, {}});
            section = Section::Mode;
        } else if (head == "edge") {
            auto toks = split_ws(rest);
            if (toks.size() != 5 || toks[1] != "->" || toks[3] != "input")
                fail(line_no, "expected: edge SRC -> DST input SYMBOL");
            raw_edges.push_back({line_no, toks[0], toks[2], toks[4], {}, {}});
            section = Section::Edge;
        } else if (head == "flow") {
            if (section != Section::Mode) fail(line_no, "flow outside a mode block");
            raw_modes.back().flows.emplace_back(line_no, rest);
        } else if (head == "invariant") {
            if (section != Section::Mode) fail(line_no, "invariant outside a mode block");
            raw_modes.back().invariants.emplace_back(line_no, rest);
        } else if (head == "guard") {
            if (section != Section::Edge) fail(line_no, "guard outside an edge block");
            raw_edges.back().guards.emplace_back(line_no, rest);
        } else if (head == "reset") {
            if (section != Section::Edge) fail(line_no, "reset outside an edge block");
            raw_edges.back().resets.emplace_back(line_no, rest);
        } else {
            fail(line_no, "unknown directive '" + head + "'");
        }
    }

    if (!have_vars) throw LinkError("model has no vars line");
    if (raw_modes.empty()) throw LinkError("model declares no modes");

    HybridAutomaton h;
    h.variables = variables;
    h.source_text = text;
    const std::size_t n = variables.size();

    for (const RawMode& rm : raw_modes) {
        if (h.mode_index(rm.name) >= 0)
            throw LinkError("duplicate mode '" + rm.name + "'");
        Mode m;
        m.name = rm.name;
        m.output = rm.output;
        m.flow.assign(n, nullptr);
        for (const auto& [ln, decl] : rm.flows) {
            std::size_t tick = decl.find('\'');
            std::size_t eq = decl.find('=');
            if (tick == std::string::npos || eq == std::string::npos || tick > eq)
                fail(ln, "expected: flow VAR' = EXPR");
            std::string var = trim(decl.substr(0, tick));
            if (trim(decl.substr(tick + 1, eq - tick - 1)) != "")
                fail(ln, "expected '=' right after the primed variable");
            auto it = std::find(variables.begin(), variables.end(), var);
            if (it == variables.end())
                throw LinkError("line " + std::to_string(ln) + ": flow for unknown variable '" +
                                var + "'");
            std::size_t vi = it - variables.begin();
            if (m.flow[vi])
                throw LinkError("line " + std::to_string(ln) + ": duplicate flow for '" + var +
                                "' in mode '" + rm.name + "'");
            try {
                m.flow[vi] = link_expr(parse_expr(decl.substr(eq + 1)), variables);
            } catch (const ParseError& e) {
                fail(ln, e.what());
            }
        }
        for (std::size_t vi = 0; vi < n; ++vi)
            if (!m.flow[vi])
                throw LinkError("mode '" + rm.name + "' missing flow for '" + variables[vi] +
                                "'");
        std::vector<std::vector<AffineRow>> inv_comps;
        for (const auto& [ln, decl] : rm.invariants) {
            try {
                inv_comps.push_back(parse_constraint_block(decl, variables));
            } catch (const ParseError& e) {
                fail(ln, e.what());
            }
        }
        if (inv_comps.empty())
            throw LinkError("mode '" + rm.name + "' has no invariant");
        m.invariant = Polytope(n, std::move(inv_comps));
        h.modes.push_back(std::move(m));
    }

    for (const RawEdge& re : raw_edges) {
        Edge e;
        e.src = h.mode_index(re.src);
        e.dst = h.mode_index(re.dst);
        if (e.src < 0)
            throw LinkError("line " + std::to_string(re.line_no) + ": unknown source mode '" +
                            re.src + "'");
        if (e.dst < 0)
            throw LinkError("line " + std::to_string(re.line_no) + ": unknown target mode '" +
                            re.dst + "'");
        e.input = re.input;
        std::vector<std::vector<AffineRow>> guard_comps;
        for (const auto& [ln, decl] : re.guards) {
            try {
                guard_comps.push_back(parse_constraint_block(decl, variables));
            } catch (const ParseError& ex) {
                fail(ln, ex.what());
            }
        }
        if (guard_comps.empty())
            throw LinkError("line " + std::to_string(re.line_no) + ": edge '" + re.src +
                            " -> " + re.dst + "' has no guard");
        e.guard = Polytope(n, std::move(guard_comps));
        e.reset.clear();
        for (const std::string& v : variables) e.reset.push_back(link_expr(make_variable(v), variables));
        for (const auto& [ln, decl] : re.resets) {
            std::size_t eq = decl.find('=');
            if (eq == std::string::npos) fail(ln, "expected: reset VAR = EXPR");
            std::string var = trim(decl.substr(0, eq));
            auto it = std::find(variables.begin(), variables.end(), var);
            if (it == variables.end())
                throw LinkError("line " + std::to_string(ln) + ": reset for unknown variable '" +
                                var + "'");
            try {
                e.reset[it - variables.begin()] = link_expr(parse_expr(decl.substr(eq + 1)), variables);
            } catch (const ParseError& ex) {
                fail(ln, ex.what());
            }
        }
        h.edges.push_back(std::move(e));
    }

    return h;
}

HybridAutomaton load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EngineError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

namespace {

std::string point_str(const Vec& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(p[i]);
    }
    return s + ")";
}

// Deterministic strictly interior point of a component: a random convex
// combination of its vertices with every weight bounded away from zero.
Vec interior_probe(const std::vector<Vec>& verts, std::mt19937& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> w(verts.size());
    double total = 0.0;
    for (double& wi : w) {
        wi = 0.05 + uni(rng);
        total += wi;
    }
    Vec p(verts[0].size(), 0.0);
    for (std::size_t i = 0; i < verts.size(); ++i)
        for (std::size_t d = 0; d < p.size(); ++d) p[d] += verts[i][d] * w[i] / total;
    return p;
}

}  // namespace

std::vector<Diagnostic> validate_assumptions(const HybridAutomaton& h, const FlowConfig& cfg,
                                             unsigned probes, unsigned seed) {
    std::vector<Diagnostic> out;
    auto error = [&](const std::string& msg) {
        out.push_back({Diagnostic::Severity::Error, msg});
    };

    // Closedness: regions must not use strict relations.
    for (const Mode& m : h.modes)
        if (m.invariant.has_strict_rows())
            error("invariant of mode '" + m.name + "' uses a strict relation");
    for (std::size_t i = 0; i < h.edges.size(); ++i)
        if (h.edges[i].guard.has_strict_rows())
            error("guard of edge " + std::to_string(i) + " ('" + h.modes[h.edges[i].src].name +
                  "' -> '" + h.modes[h.edges[i].dst].name + "') uses a strict relation");

    // Target outputs must identify at most one edge per mode.
    for (std::size_t mi = 0; mi < h.modes.size(); ++mi) {
        std::vector<std::string> seen;
        for (int ei : h.edges_from(static_cast<int>(mi))) {
            const std::string& y = h.modes[h.edges[ei].dst].output;
            if (std::find(seen.begin(), seen.end(), y) != seen.end())
                error("mode '" + h.modes[mi].name + "' has two edges whose targets share output '" +
                      y + "'");
            else
                seen.push_back(y);
        }
    }

    // Sampled guard checks: containment in the source invariant, and exit
    // immediately on arrival (jumps happen only where the flow leaves).
    std::mt19937 rng(seed);
    for (std::size_t ei = 0; ei < h.edges.size(); ++ei) {
        const Edge& e = h.edges[ei];
        const std::string where = "edge " + std::to_string(ei) + " ('" + h.modes[e.src].name +
                                  "' -> '" + h.modes[e.dst].name + "')";
        for (std::size_t ci = 0; ci < e.guard.component_count(); ++ci) {
            std::vector<Vec> verts = e.guard.component_vertices(ci);
            if (verts.empty()) {
                error(where + " guard component " + std::to_string(ci) + " is empty");
                continue;
            }
            for (unsigned p = 0; p < probes; ++p) {
                Vec x = interior_probe(verts, rng);
                if (!h.modes[e.src].invariant.contains(x, 1e-9)) {
                    error(where + " guard leaves the source invariant near " + point_str(x));
                    break;
                }
                try {
                    FlowResult r = transverse(h, e.src, x, cfg);
                    if (r.kind == FlowKind::Exit && r.time > 10.0 * cfg.step) {
                        error(where + " guard point " + point_str(x) +
                              " does not exit the source mode immediately (exit after t=" +
                              std::to_string(r.time) + ")");
                        break;
                    }
                    if (r.kind == FlowKind::Equilibrium && r.time > 0.0) {
                        error(where + " guard point " + point_str(x) +
                              " flows to a rest point instead of exiting");
                        break;
                    }
                    if (r.kind == FlowKind::Timeout || r.kind == FlowKind::Escaped) {
                        error(where + " guard point " + point_str(x) +
                              " flows without a clean exit");
                        break;
                    }
                } catch (const EngineError& ex) {
                    error(where + " guard probe failed: " + ex.what());
                    break;
                }
            }
        }
    }

    return out;
}

}  // namespace hybisim
