#pragma once

// Deterministic text forms for complexes and run artifacts: a canonical
// JSON dump whose bytes depend only on the mathematical content, a stable
// 64-bit content hash over that dump, human-readable chain-group tables,
// and rendering of graded Euler characteristics as series strings.

#include <cstdint>
#include <string>
#include <string_view>

#include "catidem/homocomplex.hpp"

namespace catidem {

std::uint64_t fnv1a64(std::string_view s);
// 16 lowercase hex digits.
std::string hash_hex(std::uint64_t h);

// Canonical JSON dump: window, per-degree summand lists, sparse
// differential entries with their element representations.  Equal
// complexes produce equal bytes; the dump is an output format, not a
// loader.
std::string cx_to_json(const TruncatedComplex& x);
// fnv1a64 over cx_to_json, in hex.
std::string cx_content_hash(const TruncatedComplex& x);

// One line per degree, top down: "deg  -2: q^2 C (+) q^4 C".  Equal
// summands are grouped with a multiplicity prefix.
std::string cx_table(const TruncatedComplex& x);
std::string summand_to_string(const Summand& s);

// Stable hash of a block morphism (endpoints plus sorted entry
// representations); used to pin residuals in reports.
std::string bm_content_hash(const Backend& B, const BlockMorphism& m);

// Render an Euler characteristic as "poly + (poly) [word] + O(q^k)".
// Classes appear in key order; the unit word prints without a bracket
// factor.  For inexact results the order marker is the smaller of
// max_order and the honest edge bound; pass max_order = 0 to use the edge
// bound alone.  Exact results carry no marker.
std::string euler_to_string(const Backend& B, const EulerResult& e,
                            int max_order = 0);

}  // namespace catidem
