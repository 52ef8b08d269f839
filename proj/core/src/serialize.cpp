#include "hybisim/serialize.hpp"

#include <cstdio>

namespace hybisim {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string digest_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string quote(const std::string& s) { return "\"" + json_escape(s) + "\""; }

}  // namespace

std::string to_json(const QuotientGraph& q) {
    std::string out;
    out += "{\n";
    out += "  \"metadata\": {\n";
    out += "    \"k\": " + std::to_string(q.k) + ",\n";
    out += "    \"eta\": " + format_double(q.eta) + ",\n";
    out += "    \"grid_size\": " + std::to_string(q.grid_size) + ",\n";
    out += "    \"model_digest\": " + quote(q.model_digest) + "\n";
    out += "  },\n";
    out += "  \"states\": [\n";
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const QuotientNode& n = q.nodes[i];
        out += "    {\"id\": " + std::to_string(i) + ", \"output\": " + quote(n.output) +
               ", \"representative\": {\"mode\": " + quote(n.representative_mode) +
               ", \"point\": [";
        for (std::size_t c = 0; c < n.representative.point.size(); ++c) {
            if (c) out += ", ";
            out += format_double(n.representative.point[c]);
        }
        out += "]}}";
        out += i + 1 < q.nodes.size() ? ",\n" : "\n";
    }
    out += "  ],\n";
    out += "  \"transitions\": [\n";
    for (std::size_t i = 0; i < q.edges.size(); ++i) {
        const QuotientEdge& e = q.edges[i];
        out += "    {\"src\": " + std::to_string(e.src) + ", \"input\": " + quote(e.input) +
               ", \"dst\": " + std::to_string(e.dst) + "}";
        out += i + 1 < q.edges.size() ? ",\n" : "\n";
    }
    out += "  ]\n";
    out += "}\n";
    return out;
}

std::string to_dot(const QuotientGraph& q) {
    std::string out;
    out += "digraph quotient {\n";
    out += "  node [shape=box];\n";
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        out += "  n" + std::to_string(i) + " [label=\"" + json_escape(q.nodes[i].output) +
               " #" + std::to_string(i) + "\"];\n";
    for (const QuotientEdge& e : q.edges)
        out += "  n" + std::to_string(e.src) + " -> n" + std::to_string(e.dst) + " [label=\"" +
               json_escape(e.input) + "\"];\n";
    out += "}\n";
    return out;
}

std::string points_tsv(const MappedSystem& m, const SampleGrid& grid, const QuotientGraph& q) {
    std::string out = "mode";
    for (const std::string& v : m.automaton().variables) out += "\t" + v;
    out += "\tclass\tprovenance\n";
    for (std::size_t i = 0; i < grid.states.size(); ++i) {
        const HybridState& s = m.state(grid.states[i]);
        out += m.automaton().modes[s.mode].name;
        for (double c : s.point) out += "\t" + format_double(c);
        out += "\t" + std::to_string(q.node_of_grid_state[i]) + "\t" + grid.provenance[i] + "\n";
    }
    return out;
}

}  // namespace hybisim
