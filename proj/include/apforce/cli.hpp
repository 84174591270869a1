#pragma once

// Batch front end behind the apforce executable.

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace apforce::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConstruction = 3;

/// A finished command: the JSON document it emits, human verdict lines and
/// the exit code.
struct Outcome {
    int code = kExitOk;
    nlohmann::json doc;
    std::vector<std::string> lines;
};

/// Fills defaults into an extend request; the result is what traces embed.
nlohmann::json normalize_extend(const nlohmann::json& input);
Outcome run_extend(const nlohmann::json& input);

/// Fills defaults into a construct scenario.
nlohmann::json normalize_scenario(const nlohmann::json& scenario);
Outcome run_construct(const nlohmann::json& scenario);

/// Re-runs the request embedded in an emitted document.
Outcome replay(const nlohmann::json& doc);

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace apforce::cli
