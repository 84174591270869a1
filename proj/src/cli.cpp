#include "apforce/cli.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "apforce/scenario.hpp"
#include "apforce/trace_json.hpp"

namespace apforce::cli {

namespace {

using nlohmann::json;
using json_io::to_json;

constexpr std::size_t kWeightSumCap = 4096;
constexpr std::size_t kLongestApCap = 1 << 14;

template <class T>
T field(const json& j, const char* key, const T& fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    try {
        return j[key].get<T>();
    } catch (const json::exception&) {
        throw ParseError(std::string("field \"") + key + "\" has the wrong type");
    }
}

json value_or(const json& j, const char* key, json fallback) {
    return j.contains(key) && !j[key].is_null() ? j[key] : std::move(fallback);
}

Nat universe_of(const json& j) {
    if (!j.contains("universe_bound") || j["universe_bound"].is_null()) return default_universe();
    const auto& u = j["universe_bound"];
    if (u.is_string()) return parse_universe(u.get<std::string>());
    if (!u.is_number_unsigned()) throw ParseError("universe_bound must be a natural");
    const Nat b = u.get<Nat>();
    validate_universe(b);
    return b;
}

std::vector<Nat> ks_of(const json& j, const char* fallback) {
    if (!j.contains("ks") || j["ks"].is_null()) return parse_ks(fallback);
    if (j["ks"].is_string()) return parse_ks(j["ks"].get<std::string>());
    auto ks = field<std::vector<Nat>>(j, "ks", {});
    if (ks.empty()) throw ParseError("empty k list");
    for (Nat k : ks)
        if (k == 0) throw ParseError("k must be positive");
    return ks;
}

std::vector<Nat> list_of(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return {};
    if (j[key].is_string()) return parse_list(j[key].get<std::string>());
    return field<std::vector<Nat>>(j, key, {});
}

std::string verdict(const std::string& scope, const Check& c) {
    return (c.pass ? "PASS " : "FAIL ") + scope + c.name + ": " + c.detail;
}

void stage_verdicts(const std::vector<StageLog>& stages, std::vector<std::string>& lines) {
    for (const auto& s : stages) {
        const std::string scope = "stage " + std::to_string(s.index) + " " + s.function +
                                  (s.weight ? ":" + *s.weight : "") + " ";
        lines.push_back("     " + scope + "branch " + to_string(s.branch));
        for (const auto& c : s.checks) lines.push_back(verdict(scope, c));
    }
}

// Picks "table:<path>" or a bare name off the front of "f:g".
std::pair<std::string, std::string> split_stage(const std::string& s) {
    std::size_t cut = s.find(':');
    if (s.rfind("table:", 0) == 0) cut = s.find(':', 6);
    if (cut == std::string::npos) return {s, ""};
    return {s.substr(0, cut), s.substr(cut + 1)};
}

std::vector<std::string> comma_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// ---- extend ----------------------------------------------------------------

json extend_failure_doc(const json& input, const ExtensionFailure& e) {
    json scan = json::array();
    for (const auto& s : e.scan()) scan.push_back({{"block", s.block}, {"image_size", s.image_size}});
    json doc = {{"input", input}, {"error", e.what()}, {"scan", scan}};
    doc["threshold"] = e.threshold() ? json(*e.threshold()) : json(nullptr);
    doc["search_lo"] = e.search_lo();
    doc["search_hi"] = e.search_hi();
    return doc;
}

// ---- construct -------------------------------------------------------------

Outcome construct_w_not_q(const json& sc) {
    const Nat bound = sc["universe_bound"].get<Nat>();
    std::vector<GroundFunction> fs;
    for (const auto& s : sc["stages"]) fs.push_back(function_from_json(s, bound));
    WNotQOptions opt;
    opt.universe_bound = bound;
    opt.seed_tails = sc["seed_tails"].get<std::vector<Nat>>();
    opt.scope = parse_scope(sc["scope"].get<std::string>());
    opt.arity_cap = sc["arity_cap"].get<std::size_t>();
    if (!sc["test_set"].is_null()) opt.test_set = set_from_json(sc["test_set"], bound);
    if (!sc["dichotomy_k_cap"].is_null()) opt.dichotomy_k_cap = sc["dichotomy_k_cap"].get<Nat>();

    Outcome out;
    const auto run = run_w_not_q(fs, sc["ks"].get<std::vector<Nat>>(), opt);
    out.doc = {{"scenario", sc}, {"result", to_json(run)}};
    stage_verdicts(run.stages, out.lines);
    for (const auto& c : run.final_checks) out.lines.push_back(verdict("final ", c));
    out.code = run.pass() ? kExitOk : kExitConstruction;
    return out;
}

Outcome construct_rapid(const json& sc) {
    const Nat bound = sc["universe_bound"].get<Nat>();
    std::vector<std::pair<GroundFunction, WeightFunction>> pairs;
    for (const auto& s : sc["stages"])
        pairs.emplace_back(function_from_json(s["f"], bound), weight_from_json(s["g"]));
    RapidOptions opt;
    opt.universe_bound = bound;
    for (const auto& s : sc["seed"]) opt.seed.push_back(set_from_json(s, bound));
    opt.scope = parse_scope(sc["scope"].get<std::string>());
    opt.arity_cap = sc["arity_cap"].get<std::size_t>();

    Outcome out;
    const auto run = run_rapid_no_w(pairs, sc["ks"].get<std::vector<Nat>>(), opt);
    out.doc = {{"scenario", sc}, {"result", to_json(run)}};
    stage_verdicts(run.stages, out.lines);
    out.code = run.pass() ? kExitOk : kExitConstruction;
    return out;
}

Outcome construct_generic(const json& sc) {
    const Nat bound = sc["universe_bound"].get<Nat>();
    const PosetTag flavor = parse_flavor(sc["flavor"].get<std::string>());
    std::vector<LazySet> gens;
    for (const auto& s : sc["generators"]) gens.push_back(set_from_json(s, bound));
    GenericSetup setup{flavor, FilterBase(gens, bound), function_from_json(sc["f"], bound),
                       std::nullopt};
    if (flavor == PosetTag::G) setup.g = weight_from_json(sc["g"]);

    std::vector<DenseSetSpec> schedule;
    for (const auto& s : sc["schedule"]) {
        DenseSetSpec spec;
        spec.generators = s["generators"].get<IndexSet>();
        spec.k = s["k"].get<Nat>();
        spec.flavor = flavor;
        for (auto i : spec.generators)
            if (i >= gens.size()) throw ParseError("schedule names generator " + std::to_string(i));
        schedule.push_back(std::move(spec));
    }
    const auto start_vals = sc["start"].get<std::vector<Nat>>();
    for (Nat v : start_vals)
        if (v >= bound) throw ParseError("start element outside the universe");
    const Condition start{BoundedSet::from_unsorted(start_vals, bound), flavor};

    Outcome out;
    const auto run = run_generic(start, schedule, setup);
    out.doc = {{"scenario", sc}, {"result", to_json(run)}};
    for (const auto& c : run.checks) out.lines.push_back(verdict("", c));
    out.code = run.pass() ? kExitOk : kExitConstruction;
    return out;
}

json stage_list(const std::vector<StageLog>& stages) {
    json j = json::array();
    for (const auto& s : stages) j.push_back(to_json(s));
    return j;
}

// ---- analyze ---------------------------------------------------------------

json analyze_set(const std::string& spec, Nat bound, const std::optional<WeightFunction>& g,
                 const std::vector<Nat>& ks, std::vector<std::string>& lines) {
    const LazySet set = parse_set(spec, bound);
    json j;
    j["spec"] = spec;
    j["label"] = set.label();
    const Nat cap = std::max<Nat>(kLongestApCap, kWeightSumCap);
    const Nat count = set.count_in(0, bound, cap + 1);
    const bool small = count <= cap;
    j["size"] = small ? json(count) : json(nullptr);
    std::string line = spec + ":";
    std::optional<BoundedSet> elems;
    if (small) elems = set.materialize();
    if (elems && elems->size() <= kLongestApCap) {
        const auto diag = vdw_diagnostic(*elems);
        const auto& d = std::get<VdwDetail>(diag.detail);
        j["longest_ap"] = {{"length", d.longest_length}, {"witness", to_json(d.witness)}};
        line += " size " + std::to_string(elems->size()) + ", longest AP " +
                std::to_string(d.longest_length);
    } else {
        j["longest_ap"] = nullptr;
        line += " more than " + std::to_string(kLongestApCap) + " elements, longest AP skipped";
    }
    if (g) {
        j["weight"] = g->name();
        if (elems && elems->size() <= kWeightSumCap) {
            const auto sum = weight_sum(*elems, *g);
            j["weight_sum"] = to_string(sum);
            line += ", " + g->name() + " weight " + to_string(sum);
        } else {
            j["weight_sum"] = nullptr;
        }
    }
    const auto spade = spade_check(set, ks);
    j["spade"] = to_json(spade);
    line += std::string(", spade ") + (spade.pass() ? "holds" : "fails") + " up to k = " +
            std::to_string(ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end()));
    lines.push_back(line);
    return j;
}

// ---- report ----------------------------------------------------------------

void report_checks(const json& checks, const std::string& indent, std::ostream& out) {
    for (const auto& [name, c] : checks.items())
        out << indent << (c.value("pass", false) ? "PASS " : "FAIL ") << name << ": "
            << c.value("detail", "") << "\n";
}

void report_generic(const json& r, const std::string& indent, std::ostream& out) {
    out << indent << "flavor " << r.value("flavor", "?") << ", " << r["steps"].size() << " specs, "
        << r["chain"].size() << " conditions, |G| = " << r["union"].size() << "\n";
    report_checks(r["checks"], indent, out);
}

void report_stages(const json& stages, std::ostream& out) {
    for (const auto& s : stages) {
        out << "stage " << s.value("index", 0) << " " << s.value("function", "?");
        if (s.contains("weight")) out << ":" << s["weight"].get<std::string>();
        out << " branch " << s.value("branch", "?");
        if (s.contains("generator_added")) out << ", added " << s["generator_added"].get<std::string>();
        out << "\n";
        if (s.contains("run")) report_generic(s["run"], "    ", out);
        report_checks(s["checks"], "  ", out);
    }
}

void report(const json& doc, std::ostream& out) {
    if (doc.contains("input")) {
        const auto& in = doc["input"];
        out << "extend " << in.value("flavor", "?") << " k = " << in.value("k", 0) << " universe "
            << in.value("universe_bound", 0) << "\n";
        if (doc.contains("error")) {
            out << "failed: " << doc["error"].get<std::string>() << "\n";
            return;
        }
        out << "case " << doc.value("case", "?") << ", block " << doc["block"].dump() << "\n";
        out << "L  = " << doc["L"].dump() << "\nL' = " << doc["L_prime"].dump()
            << "\nK  = " << doc["K"].dump() << "\n";
        return;
    }
    if (doc.contains("scenario")) {
        const auto& sc = doc["scenario"];
        out << "construct " << sc.value("mode", "?") << " universe " << sc.value("universe_bound", 0)
            << "\n";
        if (doc.contains("error")) {
            out << "failed: " << doc["error"].get<std::string>() << "\n";
            if (doc.contains("completed")) report_stages(doc["completed"], out);
            if (doc.contains("partial")) report_generic(doc["partial"], "  ", out);
            return;
        }
        const auto& r = doc["result"];
        if (r.contains("stages")) {
            report_stages(r["stages"], out);
            if (r.contains("final_checks")) report_checks(r["final_checks"], "", out);
            out << "generators:";
            for (const auto& g : r["generators"]) out << " " << g.get<std::string>();
            out << "\n";
        } else {
            report_generic(r, "", out);
        }
        out << "verdict " << (doc["result"].value("pass", true) ? "PASS" : "FAIL") << "\n";
        return;
    }
    if (doc.contains("sets")) {
        for (const auto& s : doc["sets"]) {
            out << s.value("spec", "?") << ": size " << s["size"].dump() << ", longest AP "
                << (s["longest_ap"].is_null() ? std::string("skipped")
                                              : s["longest_ap"]["length"].dump())
                << "\n";
        }
        return;
    }
    throw ParseError("unrecognized log document");
}

// ---- output ----------------------------------------------------------------

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot write '" + path + "'");
    f << text;
}

int emit(const Outcome& o, const std::string& out_path, std::ostream& out, std::ostream& err) {
    const std::string text = json_io::render(o.doc);
    std::ostream& human = out_path.empty() ? err : out;
    if (out_path.empty()) out << text;
    else write_file(out_path, text);
    for (const auto& l : o.lines) human << l << "\n";
    return o.code;
}

}  // namespace

// ---- requests --------------------------------------------------------------

json normalize_extend(const json& input) {
    if (!input.is_object()) throw ParseError("extend input must be an object");
    json n;
    const PosetTag flavor = parse_flavor(field<std::string>(input, "flavor", "w"));
    const Nat bound = universe_of(input);
    n["flavor"] = flavor == PosetTag::W ? "w" : "g";
    n["universe_bound"] = bound;
    n["L"] = list_of(input, "L");
    n["F"] = value_or(input, "F", "full");
    n["f"] = value_or(input, "f", "identity");
    n["k"] = field<Nat>(input, "k", 1);
    n["g"] = flavor == PosetTag::G ? value_or(input, "g", "reciprocal") : json(nullptr);
    return n;
}

Outcome run_extend(const json& raw) {
    const json input = normalize_extend(raw);
    const Nat bound = input["universe_bound"].get<Nat>();
    const auto l_vals = input["L"].get<std::vector<Nat>>();
    for (Nat v : l_vals)
        if (v >= bound) throw ParseError("L element outside the universe");
    const BoundedSet l_set = BoundedSet::from_unsorted(l_vals, bound);
    const LazySet f_set = set_from_json(input["F"], bound);
    const GroundFunction f = function_from_json(input["f"], bound);
    const Nat k = input["k"].get<Nat>();
    if (k == 0) throw ParseError("k must be positive");

    Outcome out;
    try {
        Extension ext;
        if (input["flavor"] == "w") {
            ext = extend_w(Condition{l_set, PosetTag::W}, f_set.materialize(), f, k);
        } else {
            ext = extend_g(Condition{l_set, PosetTag::G}, f_set, f, weight_from_json(input["g"]), k);
        }
        out.doc = to_json(ext.trace);
        out.doc["input"] = input;
        out.lines.push_back("case " + to_string(ext.trace.case_taken) + ", K = " +
                            ext.trace.k_set.to_string());
    } catch (const ExtensionFailure& e) {
        out.doc = extend_failure_doc(input, e);
        out.code = kExitConstruction;
        out.lines.push_back(std::string("extension failed: ") + e.what());
    }
    return out;
}

json normalize_scenario(const json& scenario) {
    if (!scenario.is_object()) throw ParseError("scenario must be an object");
    const auto mode = field<std::string>(scenario, "mode", "");
    const Nat bound = universe_of(scenario);
    json n;
    n["mode"] = mode;
    n["universe_bound"] = bound;
    n["ks"] = ks_of(scenario, "1..4");
    if (mode == "w-not-q") {
        n["stages"] = value_or(scenario, "stages", json::array({"identity", "block-collapse", "halving"}));
        n["seed_tails"] = scenario.contains("seed_tails") ? json(list_of(scenario, "seed_tails"))
                                                          : json::array({0});
        n["scope"] = field<std::string>(scenario, "scope", "seed");
        n["arity_cap"] = field<std::size_t>(scenario, "arity_cap", 3);
        n["test_set"] = value_or(scenario, "test_set", nullptr);
        n["dichotomy_k_cap"] = value_or(scenario, "dichotomy_k_cap", nullptr);
    } else if (mode == "rapid-no-w") {
        auto stages = value_or(scenario, "stages",
                               json::array({{{"f", "identity"}, {"g", "reciprocal"}},
                                            {{"f", "block-collapse"}, {"g", "inverse-sqrt"}}}));
        for (auto& s : stages)
            if (!s.is_object() || !s.contains("f") || !s.contains("g"))
                throw ParseError("rapid-no-w stages need {\"f\", \"g\"}");
        n["stages"] = stages;
        n["seed"] = value_or(scenario, "seed", json::array({"full"}));
        n["scope"] = field<std::string>(scenario, "scope", "meets");
        n["arity_cap"] = field<std::size_t>(scenario, "arity_cap", 3);
    } else if (mode == "generic") {
        const auto flavor = parse_flavor(field<std::string>(scenario, "flavor", "w"));
        n["flavor"] = flavor == PosetTag::W ? "w" : "g";
        n["generators"] = value_or(scenario, "generators", json::array({"full"}));
        if (!n["generators"].is_array() || n["generators"].empty())
            throw ParseError("generic mode needs at least one generator");
        n["f"] = value_or(scenario, "f", "identity");
        n["g"] = flavor == PosetTag::G ? value_or(scenario, "g", "reciprocal") : json(nullptr);
        n["start"] = list_of(scenario, "start");
        const json sched = value_or(scenario, "schedule", "ks");
        json specs = json::array();
        if (sched.is_string()) {
            if (sched == "ks") {
                for (Nat k : n["ks"].get<std::vector<Nat>>())
                    for (std::size_t i = 0; i < n["generators"].size(); ++i)
                        specs.push_back({{"generators", {i}}, {"k", k}});
            } else if (sched != "empty") {
                throw ParseError("schedule must be ks, empty or a list of specs");
            }
        } else if (sched.is_array()) {
            for (const auto& s : sched) {
                if (!s.is_object() || !s.contains("generators") || !s.contains("k"))
                    throw ParseError("schedule entries need \"generators\" and \"k\"");
                specs.push_back({{"generators", s["generators"]}, {"k", s["k"]}});
            }
        } else {
            throw ParseError("schedule must be ks, empty or a list of specs");
        }
        n["schedule"] = specs;
    } else {
        throw ParseError("mode must be w-not-q, rapid-no-w or generic");
    }
    return n;
}

Outcome run_construct(const json& raw) {
    const json sc = normalize_scenario(raw);
    try {
        const auto mode = sc["mode"].get<std::string>();
        if (mode == "w-not-q") return construct_w_not_q(sc);
        if (mode == "rapid-no-w") return construct_rapid(sc);
        return construct_generic(sc);
    } catch (const StageFailure& e) {
        Outcome out;
        out.doc = {{"scenario", sc}, {"error", e.what()}, {"completed", stage_list(e.completed())}};
        stage_verdicts(e.completed(), out.lines);
        out.lines.push_back(std::string("FAIL construction: ") + e.what());
        out.code = kExitConstruction;
        return out;
    } catch (const GenericRunError& e) {
        Outcome out;
        out.doc = {{"scenario", sc}, {"error", e.what()}, {"partial", to_json(e.partial())}};
        out.lines.push_back(std::string("FAIL construction: ") + e.what());
        out.code = kExitConstruction;
        return out;
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
}

Outcome replay(const json& doc) {
    if (doc.contains("input")) return run_extend(doc["input"]);
    if (doc.contains("scenario")) return run_construct(doc["scenario"]);
    throw ParseError("document carries neither \"input\" nor \"scenario\"");
}

// ---- entry point -----------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Desk-scale forcing constructions over arithmetic progressions", "apforce"};
    app.require_subcommand(1);

    std::vector<std::string> a_sets;
    std::string a_universe, a_g, a_ks = "1..4", a_out;
    auto* analyze = app.add_subcommand("analyze", "progression, weight and spade reports for sets");
    analyze->add_option("--set", a_sets, "set spec (repeatable)")->required();
    analyze->add_option("--universe", a_universe, "universe bound, N or 2^e");
    analyze->add_option("--g", a_g, "weight for weight sums");
    analyze->add_option("--ks", a_ks, "k values for the spade report");
    analyze->add_option("--out", a_out, "write JSON here");

    std::string e_flavor = "w", e_l, e_f_set = "full", e_f = "identity", e_g, e_universe, e_out;
    Nat e_k = 1;
    auto* extend = app.add_subcommand("extend", "meet one dense set from a condition");
    extend->add_option("--flavor", e_flavor, "w or g");
    extend->add_option("--L", e_l, "starting condition");
    extend->add_option("--F", e_f_set, "set spec for F");
    extend->add_option("--f", e_f, "ground function");
    extend->add_option("--g", e_g, "weight (g flavor)");
    extend->add_option("--k", e_k, "required count")->required();
    extend->add_option("--universe", e_universe, "universe bound, N or 2^e");
    extend->add_option("--out", e_out, "write the trace here");

    std::string c_mode, c_stages, c_ks, c_scope, c_test_set, c_schedule, c_flavor, c_f, c_g, c_start,
        c_universe, c_out, c_tails;
    std::vector<std::string> c_seed, c_gens, c_scenarios;
    std::size_t c_jobs = 1;
    auto* construct = app.add_subcommand("construct", "run a construction and verify it");
    construct->add_option("--mode", c_mode, "w-not-q, rapid-no-w or generic");
    construct->add_option("--stages", c_stages, "comma list of f (w-not-q) or f:g (rapid-no-w)");
    construct->add_option("--ks", c_ks, "k values");
    construct->add_option("--seed", c_seed, "seed generator spec (rapid-no-w, repeatable)");
    construct->add_option("--tails", c_tails, "cofinite seed tails (w-not-q)");
    construct->add_option("--scope", c_scope, "seed, generators or meets");
    construct->add_option("--test-set", c_test_set, "set A for the dichotomy (w-not-q)");
    construct->add_option("--schedule", c_schedule, "ks or empty (generic)");
    construct->add_option("--flavor", c_flavor, "w or g (generic)");
    construct->add_option("--F", c_gens, "generator spec (generic, repeatable)");
    construct->add_option("--f", c_f, "ground function (generic)");
    construct->add_option("--g", c_g, "weight (generic, g flavor)");
    construct->add_option("--start", c_start, "starting condition (generic)");
    construct->add_option("--universe", c_universe, "universe bound, N or 2^e");
    construct->add_option("--scenario", c_scenarios, "scenario JSON file (repeatable)");
    construct->add_option("--jobs", c_jobs, "scenarios run in parallel")->check(CLI::Range(1, 256));
    construct->add_option("--out", c_out, "output file, or a directory for several scenarios");

    std::string v_trace;
    auto* verify = app.add_subcommand("verify", "re-run an emitted document and compare bytes");
    verify->add_option("--trace", v_trace, "trace or log JSON")->required();

    std::string r_log;
    auto* report_cmd = app.add_subcommand("report", "human summary of a trace or log");
    report_cmd->add_option("--log", r_log, "trace or log JSON")->required();

    std::vector<const char*> argv{"apforce"};
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "apforce: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*analyze) {
            const Nat bound = a_universe.empty() ? default_universe() : parse_universe(a_universe);
            std::optional<WeightFunction> g;
            if (!a_g.empty()) g = parse_weight(a_g);
            const auto ks = parse_ks(a_ks);
            Outcome o;
            o.doc["universe_bound"] = bound;
            o.doc["sets"] = json::array();
            for (const auto& s : a_sets) o.doc["sets"].push_back(analyze_set(s, bound, g, ks, o.lines));
            return emit(o, a_out, out, err);
        }
        if (*extend) {
            json input = {{"flavor", e_flavor}, {"L", e_l}, {"F", e_f_set}, {"f", e_f}, {"k", e_k}};
            if (!e_g.empty()) input["g"] = e_g;
            if (!e_universe.empty()) input["universe_bound"] = parse_universe(e_universe);
            return emit(run_extend(input), e_out, out, err);
        }
        if (*construct) {
            if (!c_scenarios.empty()) {
                std::vector<json> scenarios;
                for (const auto& p : c_scenarios) scenarios.push_back(parse_json_text(read_file(p), p));
                if (scenarios.size() > 1 && c_out.empty())
                    throw ParseError("several scenarios need --out naming a directory");
                std::vector<Outcome> results(scenarios.size());
                std::vector<std::string> errors(scenarios.size());
                std::atomic<std::size_t> next{0};
                auto worker = [&] {
                    for (std::size_t i; (i = next++) < scenarios.size();) {
                        try {
                            results[i] = run_construct(scenarios[i]);
                        } catch (const std::exception& e) {
                            errors[i] = e.what();
                        }
                    }
                };
                std::vector<std::thread> pool;
                for (std::size_t t = 0; t < std::min(c_jobs, scenarios.size()); ++t) pool.emplace_back(worker);
                for (auto& t : pool) t.join();
                int code = kExitOk;
                for (std::size_t i = 0; i < scenarios.size(); ++i) {
                    if (!errors[i].empty()) {
                        err << "apforce: " << c_scenarios[i] << ": " << errors[i] << "\n";
                        code = std::max(code, kExitUsage);
                        continue;
                    }
                    std::string path = c_out;
                    if (scenarios.size() > 1) {
                        std::filesystem::create_directories(c_out);
                        path = (std::filesystem::path(c_out) /
                                std::filesystem::path(c_scenarios[i]).filename())
                                   .string();
                    }
                    if (scenarios.size() > 1) out << "== " << c_scenarios[i] << " -> " << path << "\n";
                    code = std::max(code, emit(results[i], path, out, err));
                }
                return code;
            }
            if (c_mode.empty()) throw ParseError("construct needs --mode or --scenario");
            json sc = {{"mode", c_mode}};
            if (!c_universe.empty()) sc["universe_bound"] = parse_universe(c_universe);
            if (!c_ks.empty()) sc["ks"] = parse_ks(c_ks);
            if (!c_scope.empty()) sc["scope"] = c_scope;
            if (c_mode == "w-not-q") {
                if (!c_stages.empty()) sc["stages"] = comma_list(c_stages);
                if (!c_tails.empty()) sc["seed_tails"] = parse_list(c_tails);
                if (!c_test_set.empty()) sc["test_set"] = c_test_set;
            } else if (c_mode == "rapid-no-w") {
                if (!c_stages.empty()) {
                    json stages = json::array();
                    for (const auto& s : comma_list(c_stages)) {
                        auto [f, g] = split_stage(s);
                        stages.push_back({{"f", f}, {"g", g.empty() ? "reciprocal" : g}});
                    }
                    sc["stages"] = stages;
                }
                if (!c_seed.empty()) sc["seed"] = c_seed;
            } else if (c_mode == "generic") {
                if (!c_flavor.empty()) sc["flavor"] = c_flavor;
                if (!c_gens.empty()) sc["generators"] = c_gens;
                if (!c_f.empty()) sc["f"] = c_f;
                if (!c_g.empty()) sc["g"] = c_g;
                if (!c_start.empty()) sc["start"] = c_start;
                if (!c_schedule.empty()) sc["schedule"] = c_schedule;
            }
            return emit(run_construct(sc), c_out, out, err);
        }
        if (*verify) {
            const std::string original = read_file(v_trace);
            const auto fresh = json_io::render(replay(parse_json_text(original, v_trace)).doc);
            if (fresh == original) {
                out << "verify: " << v_trace << " reproduced byte for byte\n";
                return kExitOk;
            }
            std::size_t line = 1;
            for (std::size_t i = 0; i < std::min(fresh.size(), original.size()) && fresh[i] == original[i]; ++i)
                if (fresh[i] == '\n') ++line;
            out << "verify: " << v_trace << " differs from the re-run at line " << line << "\n";
            return kExitConstruction;
        }
        if (*report_cmd) {
            report(parse_json_text(read_file(r_log), r_log), out);
            return kExitOk;
        }
    } catch (const ParseError& e) {
        err << "apforce: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "apforce: " << e.what() << "\n";
        return kExitUsage;
    } catch (const json::exception& e) {
        err << "apforce: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "apforce: " << e.what() << "\n";
        return kExitConstruction;
    }
    return kExitUsage;
}

}  // namespace apforce::cli
