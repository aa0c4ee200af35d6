#pragma once

#include "mhill/spectrum.hpp"
#include "mhill/verify.hpp"

#include <json.hpp>

#include <string>

namespace mhill {

// One structured document per run: meta (config echo, version, rotation),
// results, diagnostics. Lists are emitted sorted, numbers round-trip exact.

extern const char* const kVersion;

nlohmann::json meta_json(const nlohmann::json& config_echo, const NormalizedPotential& pot);

nlohmann::json to_json(const SpectralReport& report);
nlohmann::json to_json(const std::vector<EigenvalueEntry>& eigs);
nlohmann::json to_json(const std::vector<ResonanceEntry>& res);
nlohmann::json to_json(const std::vector<CheckResult>& checks);

/// (lambda, delta1, delta2, rho, D+, D-) rows; 17 significant digits.
std::string sweep_csv(const std::vector<std::array<double, 6>>& rows);

std::string format_double(double v); // %.17g

} // namespace mhill
