#include "apforce/scenario.hpp"

#include <bit>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace apforce {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

/// Splits "name:arg" or "name arg" into the argument after the name.
std::optional<std::string_view> argument_of(std::string_view s, std::string_view name) {
    if (!starts_with(s, name) || s.size() == name.size()) return std::nullopt;
    const char sep = s[name.size()];
    if (sep != ':' && sep != ' ') return std::nullopt;
    return trim(s.substr(name.size() + 1));
}

Nat checked_element(Nat v, Nat bound) {
    if (v >= bound)
        throw ParseError("element " + std::to_string(v) + " outside universe [0, " +
                         std::to_string(bound) + ")");
    return v;
}

LazySet explicit_set(const std::vector<Nat>& values, Nat bound) {
    std::vector<Nat> vals;
    for (Nat v : values) vals.push_back(checked_element(v, bound));
    return LazySet(BoundedSet::from_unsorted(std::move(vals), bound));
}

std::vector<Nat> nat_array(const json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + " must be an array of naturals");
    std::vector<Nat> out;
    for (const auto& v : j) {
        if (!v.is_number_unsigned()) throw ParseError(what + " must hold naturals only");
        out.push_back(v.get<Nat>());
    }
    return out;
}

GroundFunction table_function(std::vector<Nat> values, Nat bound) {
    if (values.size() != bound)
        throw ParseError("function table has " + std::to_string(values.size()) +
                         " entries, universe is " + std::to_string(bound));
    return GroundFunction::table(std::move(values));
}

}  // namespace

Nat parse_nat(std::string_view text) {
    text = trim(text);
    Nat v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end)
        throw ParseError("expected a natural number, got '" + std::string(text) + "'");
    return v;
}

Nat parse_universe(std::string_view text) {
    text = trim(text);
    Nat bound = 0;
    if (starts_with(text, "2^")) {
        const Nat e = parse_nat(text.substr(2));
        if (e > 62) throw ParseError("universe exponent " + std::to_string(e) + " exceeds 62");
        bound = Nat{1} << e;
    } else {
        bound = parse_nat(text);
    }
    validate_universe(bound);
    return bound;
}

void validate_universe(Nat bound) {
    if (!std::has_single_bit(bound) || bound < 64 || bound > kMaxUniverse)
        throw ParseError("universe bound must be a power of two in [2^6, 2^62], got " +
                         std::to_string(bound));
}

Nat default_universe() {
    if (const char* env = std::getenv("APFORCE_UNIVERSE"); env && *env) {
        try {
            return parse_universe(env);
        } catch (const ParseError& e) {
            throw ParseError(std::string("APFORCE_UNIVERSE: ") + e.what());
        }
    }
    return Nat{1} << 20;
}

std::vector<Nat> parse_ks(std::string_view text) {
    text = trim(text);
    std::vector<Nat> out;
    if (const auto dots = text.find(".."); dots != std::string_view::npos) {
        const Nat lo = parse_nat(text.substr(0, dots));
        const Nat hi = parse_nat(text.substr(dots + 2));
        if (lo == 0 || hi < lo) throw ParseError("bad k range '" + std::string(text) + "'");
        if (hi - lo > 4096) throw ParseError("k range too long");
        for (Nat k = lo; k <= hi; ++k) out.push_back(k);
        return out;
    }
    out = parse_list(text);
    if (out.empty()) throw ParseError("empty k list");
    for (Nat k : out)
        if (k == 0) throw ParseError("k must be positive");
    return out;
}

std::vector<Nat> parse_list(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '{' && text.back() == '}')
        text = trim(text.substr(1, text.size() - 2));
    std::vector<Nat> out;
    if (text.empty() || text == "empty") return out;
    for (auto part : split(text, ',')) out.push_back(parse_nat(part));
    return out;
}

LazySet parse_set(std::string_view text, Nat bound) {
    text = trim(text);
    if (text == "full") return LazySet::full(bound);
    if (text == "empty") return LazySet(BoundedSet(bound));
    if (text == "evens") return LazySet::residue(2, 0, bound).with_label("evens");
    if (text == "odds") return LazySet::residue(2, 1, bound).with_label("odds");
    if (text == "powers2") {
        std::vector<Nat> vals;
        for (Nat p = 1; p < bound; p <<= 1) vals.push_back(p);
        return LazySet(BoundedSet(std::move(vals), bound)).with_label("powers2");
    }
    if (auto a = argument_of(text, "multiples")) {
        const Nat m = parse_nat(*a);
        if (m == 0) throw ParseError("multiples step must be positive");
        return LazySet::multiples(m, bound);
    }
    if (auto a = argument_of(text, "cofinite")) return LazySet::cofinite_tail(std::min(parse_nat(*a), bound), bound);
    if (auto a = argument_of(text, "cofinite_tail"))
        return LazySet::cofinite_tail(std::min(parse_nat(*a), bound), bound);
    if (auto a = argument_of(text, "ap_rich")) {
        auto arg = *a;
        if (auto s = argument_of(arg, "step")) arg = *s;
        const Nat s = parse_nat(arg);
        if (s == 0) throw ParseError("ap_rich step must be positive");
        return LazySet::ap_rich(s, bound);
    }
    if (auto a = argument_of(text, "singleton")) return explicit_set({parse_nat(*a)}, bound);
    if (auto a = argument_of(text, "range")) {
        const auto dots = a->find("..");
        if (dots == std::string_view::npos) throw ParseError("range needs the form range:a..b");
        const Nat lo = parse_nat(a->substr(0, dots));
        const Nat hi = parse_nat(a->substr(dots + 2));
        if (hi < lo) throw ParseError("empty range '" + std::string(text) + "'");
        checked_element(hi, bound);
        return LazySet::interval(lo, hi + 1, bound);
    }
    if (auto a = argument_of(text, "residue")) {
        const auto slash = a->find('/');
        if (slash == std::string_view::npos) throw ParseError("residue needs the form residue:r/m");
        const Nat r = parse_nat(a->substr(0, slash));
        const Nat m = parse_nat(a->substr(slash + 1));
        if (m == 0 || r >= m) throw ParseError("residue needs 0 <= r < m");
        return LazySet::residue(m, r, bound);
    }
    if (auto a = argument_of(text, "file")) {
        const std::string path(*a);
        return explicit_set(nat_array(parse_json_text(read_file(path), path), path), bound);
    }
    std::vector<Nat> values;
    try {
        values = parse_list(text);
    } catch (const ParseError&) {
        throw ParseError("unknown set spec '" + std::string(text) + "'");
    }
    return explicit_set(values, bound);
}

LazySet set_from_json(const json& j, Nat bound) {
    if (j.is_string()) return parse_set(j.get<std::string>(), bound);
    if (j.is_array()) return explicit_set(nat_array(j, "generator"), bound);
    throw ParseError("a set must be a spec string or an array of naturals");
}

GroundFunction parse_function(std::string_view text, Nat bound) {
    text = trim(text);
    if (text == "identity") return GroundFunction::identity(bound);
    if (text == "block-collapse" || text == "block_collapse") return GroundFunction::block_collapse(bound);
    if (text == "halving") return GroundFunction::halving(bound);
    if (auto a = argument_of(text, "table")) {
        const std::string path(*a);
        return table_function(nat_array(parse_json_text(read_file(path), path), path), bound);
    }
    throw ParseError("unknown function '" + std::string(text) + "'");
}

WeightFunction parse_weight(std::string_view text) {
    text = trim(text);
    if (text == "reciprocal") return WeightFunction::reciprocal();
    if (text == "inverse-sqrt" || text == "inverse_sqrt") return WeightFunction::inverse_sqrt();
    if (auto a = argument_of(text, "table")) {
        try {
            return load_weight_table_file(std::string(*a));
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(std::string("weight table: ") + e.what());
        }
    }
    throw ParseError("unknown weight '" + std::string(text) + "'");
}

GroundFunction function_from_json(const json& j, Nat bound) {
    if (j.is_string()) return parse_function(j.get<std::string>(), bound);
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ParseError("function must be a name or an object with a \"kind\"");
    const auto kind = j["kind"].get<std::string>();
    if (kind == "table") {
        if (j.contains("values")) return table_function(nat_array(j["values"], "function values"), bound);
        if (j.contains("file")) return parse_function("table:" + j["file"].get<std::string>(), bound);
        throw ParseError("table function needs \"values\" or \"file\"");
    }
    return parse_function(kind, bound);
}

WeightFunction weight_from_json(const json& j) {
    if (j.is_string()) return parse_weight(j.get<std::string>());
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ParseError("weight must be a name or an object with a \"kind\"");
    const auto kind = j["kind"].get<std::string>();
    if (kind == "table") {
        if (j.contains("entries")) {
            try {
                return load_weight_table(j["entries"].dump());
            } catch (const std::exception& e) {
                throw ParseError(std::string("weight table: ") + e.what());
            }
        }
        if (j.contains("file")) return parse_weight("table:" + j["file"].get<std::string>());
        throw ParseError("table weight needs \"entries\" or \"file\"");
    }
    return parse_weight(kind);
}

ScheduleScope parse_scope(std::string_view text) {
    text = trim(text);
    if (text == "seed") return ScheduleScope::Seed;
    if (text == "generators") return ScheduleScope::Generators;
    if (text == "meets") return ScheduleScope::Meets;
    throw ParseError("scope must be seed, generators or meets");
}

PosetTag parse_flavor(std::string_view text) {
    text = trim(text);
    if (text == "w" || text == "W") return PosetTag::W;
    if (text == "g" || text == "G") return PosetTag::G;
    throw ParseError("flavor must be w or g");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

}  // namespace apforce
