#pragma once

#include <cstdint>
#include <string>

#include "hybisim/bisim.hpp"

namespace hybisim {

// Shortest round-trip-safe decimal form ("%.17g").
std::string format_double(double v);

std::uint64_t fnv1a64(const std::string& data);

// 16 lowercase hex digits.
std::string digest_hex(std::uint64_t h);

inline std::string model_digest(const std::string& source_text) {
    return digest_hex(fnv1a64(source_text));
}

// Deterministic JSON rendering of a quotient graph: fixed key order, one
// state/transition per line, numbers via format_double.
std::string to_json(const QuotientGraph& q);

// Graphviz rendering: nodes labeled "OUTPUT #id", edges labeled by input.
std::string to_dot(const QuotientGraph& q);

// Tab-separated grid dump: mode, coordinates, quotient class, provenance.
std::string points_tsv(const MappedSystem& m, const SampleGrid& grid,
                       const QuotientGraph& q);

}  // namespace hybisim
