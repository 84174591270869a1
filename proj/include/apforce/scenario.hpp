#pragma once

// Parsing of the named set, function and weight specs shared by command-line
// flags and scenario JSON files.

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "apforce/construction.hpp"

namespace apforce {

class ParseError : public Error {
public:
    using Error::Error;
};

Nat parse_nat(std::string_view text);
/// Decimal, or 2^e.
Nat parse_universe(std::string_view text);
/// Power of two in [2^6, 2^62].
void validate_universe(Nat bound);
/// APFORCE_UNIVERSE when set, else 2^20.
Nat default_universe();

/// "1..5", "3", "1,2,4".
std::vector<Nat> parse_ks(std::string_view text);
/// "1,2,5", "{1,2}", "empty", or "" for the empty list.
std::vector<Nat> parse_list(std::string_view text);

/// full, empty, evens, odds, powers2, multiples:m, cofinite:t, ap_rich:s,
/// singleton:v, range:a..b (inclusive), residue:r/m, file:path, an explicit
/// list, or the spaced forms "cofinite_tail t", "multiples m", "ap_rich step s".
LazySet parse_set(std::string_view text, Nat bound);
/// A string spec as above, or a JSON array of naturals.
LazySet set_from_json(const nlohmann::json& j, Nat bound);

/// identity, block-collapse, halving, table:path.
GroundFunction parse_function(std::string_view text, Nat bound);
/// reciprocal, inverse-sqrt, table:path.
WeightFunction parse_weight(std::string_view text);

/// A string spec, or {"kind": ..., "values": [...]} with an inline table.
GroundFunction function_from_json(const nlohmann::json& j, Nat bound);
/// A string spec, or {"kind": ..., "entries": [{"n","num","den"}, ...]}.
WeightFunction weight_from_json(const nlohmann::json& j);

ScheduleScope parse_scope(std::string_view text);
PosetTag parse_flavor(std::string_view text);

/// Reads a whole file; ParseError when it cannot be opened.
std::string read_file(const std::string& path);
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);

}  // namespace apforce
