#include "apforce/trace_json.hpp"

namespace apforce::json_io {

namespace {

template <class T>
Json optional_value(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

Json index_set(const IndexSet& idx) { return Json(std::vector<std::size_t>(idx.begin(), idx.end())); }

}  // namespace

Json to_json(const BoundedSet& s) { return Json(std::vector<Nat>(s.begin(), s.end())); }

Json to_json(const ArithmeticProgression& ap) {
    return {{"start", ap.start}, {"step", ap.step}, {"length", ap.length}};
}

Json to_json(const std::optional<ArithmeticProgression>& ap) {
    return ap ? to_json(*ap) : Json(nullptr);
}

Json to_json(const LongestAp& l) { return {{"length", l.length}, {"witness", to_json(l.witness)}}; }

Json to_json(const std::vector<Check>& checks) {
    Json j = Json::object();
    for (const auto& c : checks) j[c.name] = {{"pass", c.pass}, {"detail", c.detail}};
    return j;
}

Json to_json(const ExtensionTrace& t) {
    Json j;
    j["case"] = to_string(t.case_taken);
    j["universe_bound"] = t.universe_bound;
    j["k"] = t.k;
    j["L"] = to_json(t.l_set);
    j["L_prime"] = to_json(t.l_prime);
    j["K"] = to_json(t.k_set);
    j["block"] = optional_value(t.chosen_block);
    if (t.case_taken == ExtensionCase::G) {
        j["threshold"] = optional_value(t.threshold);
        j["weight_cutoff"] = t.weight_cutoff ? Json(to_string(*t.weight_cutoff)) : Json(nullptr);
        j["ap"] = to_json(t.ap);
        j["bootstrap"] = t.bootstrap;
        return j;
    }
    j["max_image_L"] = t.max_image_l;
    j["n0"] = t.n0;
    j["value_cutoff"] = t.value_cutoff;
    j["case_ii_threshold"] = t.case_ii_threshold;
    Json scan = Json::array();
    for (const auto& s : t.scan) scan.push_back({{"block", s.block}, {"image_size", s.image_size}});
    j["scan"] = std::move(scan);
    if (t.case_taken == ExtensionCase::WCaseI) {
        j["m"] = optional_value(t.m);
        j["l"] = optional_value(t.l);
    } else {
        Json ex = Json::array();
        for (const auto& e : t.exclusions)
            ex.push_back({{"i", e.i}, {"excluded", e.excluded}, {"l", e.l}, {"bound", e.bound}});
        j["exclusions"] = std::move(ex);
    }
    return j;
}

Json to_json(const DenseSetSpec& spec) {
    return {{"generators", index_set(spec.generators)}, {"k", spec.k}};
}

Json to_json(const GenericRun& run) {
    Json j;
    j["flavor"] = to_string(run.flavor);
    j["universe_bound"] = run.universe_bound;
    Json chain = Json::array();
    for (const auto& c : run.chain) chain.push_back(to_json(c));
    j["chain"] = std::move(chain);
    Json steps = Json::array();
    for (const auto& s : run.steps) {
        Json step;
        step["spec"] = to_json(s.spec);
        step["case"] = s.already_met ? std::string("already-met") : to_string(s.trace->case_taken);
        if (s.witness_block) step["block"] = *s.witness_block;
        else if (s.witness_ap) step["block"] = block_index(s.witness_ap->start);
        else step["block"] = nullptr;
        step["witness"] = s.witness_points;
        if (s.trace) {
            step["L_prime"] = to_json(s.trace->l_prime);
            if (s.trace->threshold) step["threshold"] = *s.trace->threshold;
        }
        steps.push_back(std::move(step));
    }
    j["steps"] = std::move(steps);
    j["union"] = to_json(run.union_set);
    j["checks"] = to_json(run.checks);
    return j;
}

Json to_json(const SpadeReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"k", row.k}, {"block", optional_value(row.block)}, {"count", row.count}});
    return {{"set", r.label}, {"universe_bound", r.universe_bound}, {"rows", rows}, {"pass", r.pass()}};
}

Json to_json(const DichotomyResult& d) {
    Json j;
    j["branch"] = to_string(d.branch);
    j["universe_bound"] = d.universe_bound;
    j["k_cap"] = d.k_cap;
    j["horizon"] = d.horizon;
    j["arity_cap"] = d.arity_cap;
    j["F0"] = d.f0 ? index_set(*d.f0) : Json(nullptr);
    j["failing_k"] = optional_value(d.failing_k);
    j["k0"] = optional_value(d.k0);
    Json rows = Json::array();
    for (const auto& r : d.rows) {
        Json row = {{"meet", index_set(r.meet)},
                    {"k", r.k},
                    {"block", optional_value(r.block)},
                    {"count", r.count}};
        if (d.branch == DichotomyBranch::WithComplement) {
            row["count_in_A"] = r.count_in_a;
            row["count_complement"] = r.count_complement;
        }
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

Json to_json(const QPointSplit& q) {
    return {{"enumeration", q.enumeration},
            {"U0", to_json(q.u0)},
            {"U1", to_json(q.u1)},
            {"image0", to_json(q.image0)},
            {"image1", to_json(q.image1)},
            {"image0_3ap_free", q.image0_free},
            {"image1_3ap_free", q.image1_free}};
}

Json to_json(const StageLog& log) {
    Json j;
    j["index"] = log.index;
    j["function"] = log.function;
    if (log.weight) j["weight"] = *log.weight;
    j["branch"] = to_string(log.branch);
    if (log.existing_meet) j["existing_meet"] = index_set(*log.existing_meet);
    if (log.budget_cap) {
        j["budget_cap"] = to_string(*log.budget_cap);
        j["preprocessing_candidates"] = log.preprocessing_candidates;
    }
    if (log.preprocessing_k) j["preprocessing_K"] = to_json(*log.preprocessing_k);
    if (log.generator_label) j["generator_added"] = *log.generator_label;
    if (log.generator_elements) j["generator_elements"] = to_json(*log.generator_elements);
    if (log.run) j["run"] = to_json(*log.run);
    j["generators_before"] = log.generators_before;
    j["generators_after"] = log.generators_after;
    if (!log.spade.empty()) {
        Json sp = Json::array();
        for (const auto& s : log.spade) sp.push_back(to_json(s));
        j["spade"] = std::move(sp);
    }
    j["checks"] = to_json(log.checks);
    j["pass"] = log.pass();
    return j;
}

Json to_json(const WNotQRun& run) {
    Json stages = Json::array();
    for (const auto& s : run.stages) stages.push_back(to_json(s));
    Json j = {{"mode", "w-not-q"},
              {"universe_bound", run.universe_bound},
              {"ks", run.ks},
              {"stages", stages},
              {"generators", run.generators},
              {"final_checks", to_json(run.final_checks)},
              {"pass", run.pass()}};
    j["dichotomy"] = run.dichotomy ? to_json(*run.dichotomy) : Json(nullptr);
    return j;
}

Json to_json(const RapidRun& run) {
    Json stages = Json::array();
    for (const auto& s : run.stages) stages.push_back(to_json(s));
    return {{"mode", "rapid-no-w"},
            {"universe_bound", run.universe_bound},
            {"ks", run.ks},
            {"stages", stages},
            {"generators", run.generators},
            {"pass", run.pass()}};
}

Json to_json(const DominationReport& r) {
    return {{"size", r.size},
            {"threshold", optional_value(r.threshold)},
            {"last_violation", optional_value(r.last_violation)},
            {"pass", r.threshold.has_value()}};
}

std::string render(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace apforce::json_io
