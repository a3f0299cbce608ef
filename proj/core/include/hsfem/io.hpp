#pragma once

#include "hsfem/config.hpp"
#include "hsfem/diagnostics.hpp"
#include "hsfem/mesh.hpp"
#include "hsfem/sparse.hpp"
#include "hsfem/stepper.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hsfem {

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_double(double v);

/// Writes `content` to a temporary sibling and renames it over `path`.
/// Throws IoError naming the path.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// VTK legacy ASCII unstructured grid; triangles as cell type 5.
void write_mesh_vtk(const Mesh& mesh, const std::filesystem::path& path);

/// Nodal density and pressure. VTK carries the point scalars `density`,
/// `pressure` and `density_minus_pressure`; CSV has columns x,y,density,pressure.
void write_field(const SimState& state, const std::filesystem::path& path, FieldFormat format);

struct FieldTable {
    std::vector<Point> points;
    std::vector<double> density;
    std::vector<double> pressure;
};

FieldTable read_field_csv(const std::filesystem::path& path);

/// Column header of the diagnostics series.
const std::string& series_header();

void write_series(std::span<const DiagnosticsRecord> records, const std::filesystem::path& path);

/// One `row col value` line per stored entry (zero-based indices).
void write_matrix_coo(const SparseOperator& A, const std::filesystem::path& path);

/// Plain numeric CSV table.
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);

} // namespace hsfem
