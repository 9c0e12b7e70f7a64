#pragma once

// CSV emission for traces and sweep summaries. Numbers carry 12 significant digits.

#include <string>
#include <vector>

#include "cavsim/adiabatic.hpp"
#include "cavsim/particles.hpp"

namespace cavsim {

/// "%.12g" formatting used for every numeric CSV field.
std::string format_number(double v);

std::string field_trace_csv(const FieldTrace& trace);
std::string particle_trace_csv(const ParticleTrace& trace);

struct SummaryTable {
  std::string description;  // written after '#' on the first line
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// First line: '# <description>; columns: c1, c2, ...', then a header row and the rows.
std::string summary_csv(const SummaryTable& table);

/// Writes to a temporary file in the target directory, then renames it over `path`.
/// Throws IoError on failure.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace cavsim
