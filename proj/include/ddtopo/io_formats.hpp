#pragma once

#include <map>
#include <string>
#include <vector>

#include "ddtopo/domain_grid.hpp"
#include "ddtopo/evolution.hpp"
#include "ddtopo/pd_metric.hpp"
#include "ddtopo/persistence.hpp"

namespace ddtopo {

// Density fields serialize to binary P5 graymaps, one byte per cell
// (0 = void, 255 = material, inactive cells 0; top image row = highest y),
// plus a ".meta" sidecar naming the mask type and resolution.
void write_density_pgm(const DensityField& field, const std::string& path);
DensityField read_density_pgm(const std::string& path);

// Diagram CSV: header "birth,death", one pair per line, sorted by (birth, death).
void write_diagram_csv(const PersistenceDiagram& d, const std::string& path);
PersistenceDiagram read_diagram_csv(const std::string& path);

// n lines of n comma-separated reals.
void write_matrix_csv(const DistanceMatrix& a, const std::string& path);

// Pareto export: header "F1,F2,rank,candidate_id", sorted by
// (rank, F1, F2, id).
void write_front_csv(const std::vector<Candidate>& members, const std::string& path);

// Reads objective pairs from a CSV whose first two columns are F1,F2
// (header line required, extra columns ignored).
std::vector<std::array<double, 2>> read_objectives_csv(const std::string& path);

// line-oriented "key = value" file; '#' starts a comment
std::map<std::string, std::string> read_key_value_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ddtopo
