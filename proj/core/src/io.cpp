#include "hsfem/io.hpp"

#include "hsfem/errors.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

namespace hsfem {

namespace fs = std::filesystem;

std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    if (ec != std::errc()) {
        throw IoError("format_double: conversion failed");
    }
    return std::string(buf, ptr);
}

void write_file_atomic(const fs::path& path, const std::string& content)
{
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory for '" + path.string() + "': " + ec.message());
        }
    }
    std::random_device rd;
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(rd());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            fs::remove(tmp, ec);
            throw IoError("write failed for '" + path.string() + "'");
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "'");
    }
}

namespace {

void vtk_geometry(std::ostringstream& os, const Mesh& mesh, const std::string& title)
{
    os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.num_nodes() << " double\n";
    for (const Point& p : mesh.nodes()) {
        os << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
    }
    os << "CELLS " << mesh.num_elements() << ' ' << 4 * mesh.num_elements() << '\n';
    for (const Triangle& t : mesh.elements()) {
        os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    os << "CELL_TYPES " << mesh.num_elements() << '\n';
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        os << "5\n";
    }
}

void vtk_scalars(std::ostringstream& os, const std::string& name, std::span<const double> values)
{
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) {
        os << format_double(v) << '\n';
    }
}

std::vector<double> parse_row(const std::string& line, std::size_t expected, const fs::path& path)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= line.size()) {
        const auto comma = line.find(',', start);
        const std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size()) {
            throw IoError("malformed number '" + cell + "' in '" + path.string() + "'");
        }
        out.push_back(v);
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    if (out.size() != expected) {
        throw IoError("wrong column count in '" + path.string() + "'");
    }
    return out;
}

} // namespace

void write_mesh_vtk(const Mesh& mesh, const fs::path& path)
{
    std::ostringstream os;
    vtk_geometry(os, mesh, "hsfem mesh");
    write_file_atomic(path, os.str());
}

void write_field(const SimState& state, const fs::path& path, FieldFormat format)
{
    if (!state.n.mesh()) {
        throw InvalidArgument("write_field: state without mesh");
    }
    const Mesh& mesh = *state.n.mesh();
    std::ostringstream os;
    if (format == FieldFormat::Vtk) {
        vtk_geometry(os, mesh, "hsfem field t=" + format_double(state.t));
        os << "POINT_DATA " << mesh.num_nodes() << '\n';
        vtk_scalars(os, "density", state.n.values());
        vtk_scalars(os, "pressure", state.p.values());
        std::vector<double> diff(mesh.num_nodes());
        for (Index a = 0; a < diff.size(); ++a) {
            diff[a] = state.n[a] - state.p[a];
        }
        vtk_scalars(os, "density_minus_pressure", diff);
    } else {
        os << "x,y,density,pressure\n";
        for (Index a = 0; a < mesh.num_nodes(); ++a) {
            const Point& p = mesh.node(a);
            os << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(state.n[a]) << ','
               << format_double(state.p[a]) << '\n';
        }
    }
    write_file_atomic(path, os.str());
}

FieldTable read_field_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line != "x,y,density,pressure") {
        throw IoError("'" + path.string() + "' is not a field CSV");
    }
    FieldTable table;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto row = parse_row(line, 4, path);
        table.points.push_back(Point{row[0], row[1]});
        table.density.push_back(row[2]);
        table.pressure.push_back(row[3]);
    }
    return table;
}

const std::string& series_header()
{
    static const std::string header =
        "t,min_n,max_n,min_dtn,mass,mass_balance_residual,energy_lhs,energy_rhs,grad_p,complementarity,snaps";
    return header;
}

void write_series(std::span<const DiagnosticsRecord> records, const fs::path& path)
{
    std::ostringstream os;
    os << series_header() << '\n';
    for (const DiagnosticsRecord& r : records) {
        os << format_double(r.t) << ',' << format_double(r.min_n) << ',' << format_double(r.max_n) << ','
           << format_double(r.min_dtn) << ',' << format_double(r.mass) << ','
           << format_double(r.mass_balance_residual) << ',' << format_double(r.energy_lhs) << ','
           << format_double(r.energy_rhs) << ',' << format_double(r.grad_p_norm) << ','
           << format_double(r.complementarity) << ',' << r.snaps << '\n';
    }
    write_file_atomic(path, os.str());
}

void write_matrix_coo(const SparseOperator& A, const fs::path& path)
{
    std::ostringstream os;
    const auto& rp = A.pattern().row_ptr;
    const auto& col = A.pattern().col;
    const auto vals = A.values();
    for (Index i = 0; i < A.size(); ++i) {
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
            os << i << ' ' << col[k] << ' ' << format_double(vals[k]) << '\n';
        }
    }
    write_file_atomic(path, os.str());
}

void write_table(const fs::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) {
        os << (i ? "," : "") << header[i];
    }
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << format_double(row[i]);
        }
        os << '\n';
    }
    write_file_atomic(path, os.str());
}

} // namespace hsfem
