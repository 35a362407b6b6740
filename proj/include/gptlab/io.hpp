#pragma once

// JSON files: theories (with an optional strategy block), n-partite cone
// exports, degree-of-freedom graphs, and machine-readable reports.
//
// Theory file:
//   {"name": str, "kind": "pauli-qubit" | "gbit" | "custom",
//    "slot_dim", "gram", "unit"        (custom only),
//    "P2": [[coeff...]...], "D2": [[coeff...]...],
//    "provenance": {"P2": ["product" | "entangled" | "unknown"...], "D2": [...]},
//    "effect_space": [[coeff...]...],
//    "strategy": {"link_state", "measurement", "corrections" (d x d rows),
//                 "correlators": {"A0", "A1", "B0", "B1"}, "group_law"}}
// Graph file: {"m": int, "E": [[i, j]...], "F": [[i, j]...]}, 1-based.
//
// Malformed input raises InputError naming the offending field and, when
// it can be located, the line in the source text.

#include <optional>
#include <string>

#include <json.hpp>

#include "gptlab/chsh.hpp"
#include "gptlab/compgraph.hpp"
#include "gptlab/theory.hpp"

namespace gptlab {

using Json = nlohmann::json;

struct TheoryFile {
  TheorySpec spec;
  std::optional<Strategy> strategy;
};

TheoryFile parse_theory(const std::string& text);
TheoryFile read_theory(const std::string& path);
Json theory_to_json(const TheorySpec& spec, const Strategy* strategy = nullptr);

SwapGraph parse_graph(const std::string& text);
SwapGraph read_graph(const std::string& path);
Json graph_to_json(const SwapGraph& g);

Json extended_to_json(const TheorySpec& spec, int n, const ExtendedCones& cones);

Json report_to_json(const TheorySpec& spec, const ConsistencyReport& r);
Json chsh_to_json(const TheorySpec& spec, const ChshWitness& w);
Json game_to_json(const GameResult& r);

// Two-space indent, trailing newline.
std::string dump(const Json& j);
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace gptlab
