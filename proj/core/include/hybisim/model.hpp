#pragma once

#include <string>
#include <vector>

#include "hybisim/expr.hpp"
#include "hybisim/polytope.hpp"

namespace hybisim {

struct FlowConfig;

struct Mode {
    std::string name;
    std::string output;
    std::vector<ExprPtr> flow;  // linked; one entry per model variable
    Polytope invariant;
};

struct Edge {
    int src = -1;
    int dst = -1;
    std::string input;
    Polytope guard;
    std::vector<ExprPtr> reset;  // linked; identity rows by default
};

struct HybridAutomaton {
    std::vector<std::string> variables;
    std::vector<Mode> modes;
    std::vector<Edge> edges;
    std::string source_text;  // exact text the model was parsed from

    int mode_index(const std::string& name) const;
    std::vector<int> edges_from(int mode) const;
    // Distinct edge input symbols in first-declaration order.
    std::vector<std::string> input_alphabet() const;
    // Distinct mode output symbols in mode-declaration order.
    std::vector<std::string> output_alphabet() const;
};

// Parses the declarative model format:
//
//   # comment
//   vars x y
//   mode NAME output SYMBOL
//     flow x' = EXPR
//     invariant CONSTRAINT{; CONSTRAINT}     (one line per convex piece)
//   edge SRC -> DST input SYMBOL
//     guard CONSTRAINT{; CONSTRAINT}         (one line per convex piece)
//     reset x = EXPR                          (identity when omitted)
//
// Malformed lines raise ParseError (message carries the line number);
// unresolved names and structural gaps raise LinkError.
HybridAutomaton parse_model(const std::string& text);

// Reads the file and parses it; I/O failures raise EngineError.
HybridAutomaton load_model(const std::string& path);

struct Diagnostic {
    enum class Severity { Error, Warning };
    Severity severity;
    std::string message;
};

// Structural and sampled checks on a parsed model:
//  - invariants and guards must be closed (no strict relations),
//  - guards must lie inside the source mode's invariant,
//  - guard points must leave the source mode immediately (jumps happen
//    only where the flow exits),
//  - no mode may have two edges whose targets share an output symbol.
// Probe points are drawn deterministically from `seed`.
std::vector<Diagnostic> validate_assumptions(const HybridAutomaton& h,
                                             const FlowConfig& cfg,
                                             unsigned probes = 40,
                                             unsigned seed = 0);

}  // namespace hybisim
