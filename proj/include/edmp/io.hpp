#pragma once

// Matrix files (CSV or JSON), report documents and sweep tables.

#include <string>
#include <string_view>

#include <json.hpp>

#include "edmp/perturbation.hpp"

namespace edmp::io {

using nlohmann::json;

inline constexpr std::string_view kSchemaVersion = "1.0";

/// JSON when the first non-blank character is '{', CSV otherwise. CSV lines
/// starting with '#' and blank lines are skipped. Throws InvalidInput.
Matrix parse_matrix(std::string_view text);

/// Reads path, or standard input for "-".
Matrix read_matrix(const std::string& path);

/// 17 significant digits per value; comment lines are prefixed with "# ".
std::string to_csv(const Matrix& d, const std::vector<std::string>& comments = {});
std::string to_json(const Matrix& d, const json& meta = nullptr);

json profile_json(const EdmProfile& prof);
json tolerances_json(const TolerancePolicy& tol);

json analyze_report(const EdmProfile& prof);

/// Report for one entry of a unit spherical profile, including the
/// bordered-matrix cross-check.
json entry_report(const EdmProfile& prof, EntryIndex entry);

/// Header plus num rows over [lo - margin, hi + margin] of the yielding interval.
std::string sweep_csv(const EdmProfile& prof, EntryIndex entry, int num, double margin);

/// Key-sorted, two-space indented, trailing newline.
std::string dump(const json& doc);

}  // namespace edmp::io
