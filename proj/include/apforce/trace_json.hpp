#pragma once

// JSON renderings of traces, runs and stage logs. Keys come out sorted, so a
// value always serializes to the same bytes.

#include "json.hpp"

#include "apforce/construction.hpp"

namespace apforce::json_io {

using Json = nlohmann::json;

Json to_json(const BoundedSet& s);
Json to_json(const ArithmeticProgression& ap);
Json to_json(const std::optional<ArithmeticProgression>& ap);
Json to_json(const LongestAp& l);
Json to_json(const std::vector<Check>& checks);
Json to_json(const ExtensionTrace& t);
Json to_json(const DenseSetSpec& spec);
Json to_json(const GenericRun& run);
Json to_json(const SpadeReport& r);
Json to_json(const DichotomyResult& d);
Json to_json(const QPointSplit& q);
Json to_json(const StageLog& log);
Json to_json(const WNotQRun& run);
Json to_json(const RapidRun& run);
Json to_json(const DominationReport& r);

/// Two-space indented dump followed by a newline.
std::string render(const Json& j);

}  // namespace apforce::json_io
