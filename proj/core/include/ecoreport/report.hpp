#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecoreport/anova.hpp"
#include "ecoreport/mda.hpp"
#include "ecoreport/scoring.hpp"
#include "ecoreport/sem.hpp"

namespace ecoreport {

/// Whatever analyses have been run; absent parts are skipped in the report.
struct ResultsBundle {
  std::vector<SectorShare> composition;  // empty = no composition section
  std::optional<std::vector<AnovaRow>> anova;
  std::optional<MdaResult> mda;
  std::optional<SemResult> sem;
};

/// Plain-text summary in a fixed order: sector composition, ANOVA, MDA
/// tests (Wilks, Box's M, classification), SEM fit. Throws ValidationError
/// when no analysis result is present.
std::string emit_report(const ResultsBundle& bundle);
void write_report(const std::filesystem::path& path, const ResultsBundle& bundle);

/// "59.7%" style rendering of a percentage.
std::string format_percent(double percent, int decimals = 1);

}  // namespace ecoreport
