#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "trapoptics/detection.hpp"

namespace trapoptics::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command. args excludes the program name. Results go to out (or the
/// --out file), diagnostics and usage text to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Preset overrides from JSON: one object or an array of objects with keys
/// name, eta, gain, enf, dark_cps, cap_farad, pixel_latency_s. A known name
/// patches that preset; a new name needs every field but pixel_latency_s.
std::vector<DetectorModel> load_presets_json(std::string_view text, std::vector<DetectorModel> base);

/// Shortest round-trip decimal, independent of the C++ locale.
std::string format_number(double v);

}  // namespace trapoptics::cli
