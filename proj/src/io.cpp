#include "topoflow/io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace topoflow {

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] =
      std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  if (ec != std::errc{}) throw IoError("format_double: conversion failed");
  return std::string(buffer, ptr);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << contents;
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() +
                  "': " + ec.message());
  }
}

void write_field_vtk(const TriMesh& mesh, const std::vector<NamedNodalField>& nodal,
                     const std::vector<NamedCellField>& cell,
                     const std::filesystem::path& path) {
  for (const auto& field : nodal) {
    if (field.values.size() != mesh.num_vertices()) {
      throw IoError("vtk: point field '" + field.name + "' size does not match mesh");
    }
  }
  for (const auto& field : cell) {
    if (field.values.size() != mesh.num_triangles()) {
      throw IoError("vtk: cell field '" + field.name + "' size does not match mesh");
    }
  }

  std::ostringstream out;
  out << "# vtk DataFile Version 3.0\n";
  out << "topoflow fields\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    out << format_double(mesh.vertices(v, 0)) << " " << format_double(mesh.vertices(v, 1))
        << " 0\n";
  }
  out << "CELLS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles() << "\n";
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    out << "3 " << mesh.triangles(e, 0) << " " << mesh.triangles(e, 1) << " "
        << mesh.triangles(e, 2) << "\n";
  }
  out << "CELL_TYPES " << mesh.num_triangles() << "\n";
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    out << "5\n";
  }
  if (!nodal.empty()) {
    out << "POINT_DATA " << mesh.num_vertices() << "\n";
    for (const auto& field : nodal) {
      out << "SCALARS " << field.name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (Eigen::Index i = 0; i < field.values.size(); ++i) {
        out << format_double(field.values[i]) << "\n";
      }
    }
  }
  if (!cell.empty()) {
    out << "CELL_DATA " << mesh.num_triangles() << "\n";
    for (const auto& field : cell) {
      out << "SCALARS " << field.name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (Eigen::Index i = 0; i < field.values.size(); ++i) {
        out << format_double(field.values[i]) << "\n";
      }
    }
  }
  write_text_atomic(path, out.str());
}

const Eigen::VectorXd* VtkFile::find_point_data(const std::string& name) const {
  for (const auto& [n, values] : point_data) {
    if (n == name) return &values;
  }
  return nullptr;
}

const Eigen::VectorXd* VtkFile::find_cell_data(const std::string& name) const {
  for (const auto& [n, values] : cell_data) {
    if (n == name) return &values;
  }
  return nullptr;
}

namespace {

class TokenReader {
 public:
  explicit TokenReader(const std::filesystem::path& path) : in_(path) {
    if (!in_) throw IoError("cannot open '" + path.string() + "'");
  }

  std::string next() {
    std::string token;
    if (!(in_ >> token)) throw IoError("vtk: unexpected end of file");
    return token;
  }

  bool peek(std::string& token) { return static_cast<bool>(in_ >> token); }

  double next_double() {
    const std::string token = next();
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw IoError("vtk: expected a number, got '" + token + "'");
    }
    return value;
  }

  long next_int() {
    const std::string token = next();
    long value = 0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw IoError("vtk: expected an integer, got '" + token + "'");
    }
    return value;
  }

  void expect(const std::string& token) {
    const std::string got = next();
    if (got != token) throw IoError("vtk: expected '" + token + "', got '" + got + "'");
  }

  void skip_line() {
    std::string line;
    std::getline(in_, line);
  }

 private:
  std::ifstream in_;
};

}  // namespace

VtkFile read_vtk(const std::filesystem::path& path) {
  TokenReader reader(path);
  reader.skip_line();  // # vtk DataFile Version ...
  reader.skip_line();  // title
  reader.expect("ASCII");
  reader.expect("DATASET");
  reader.expect("UNSTRUCTURED_GRID");

  VtkFile file;
  enum class Section { none, point, cell } section = Section::none;
  std::string token;
  while (true) {
    if (!reader.peek(token)) break;
    if (token == "POINTS") {
      const long n = reader.next_int();
      reader.next();  // value type
      file.points.resize(n, 2);
      for (long i = 0; i < n; ++i) {
        file.points(i, 0) = reader.next_double();
        file.points(i, 1) = reader.next_double();
        reader.next_double();  // z, always 0
      }
    } else if (token == "CELLS") {
      const long n = reader.next_int();
      reader.next_int();  // total index count
      file.cells.resize(n, 3);
      for (long i = 0; i < n; ++i) {
        if (reader.next_int() != 3) throw IoError("vtk: only triangle cells supported");
        file.cells(i, 0) = static_cast<int>(reader.next_int());
        file.cells(i, 1) = static_cast<int>(reader.next_int());
        file.cells(i, 2) = static_cast<int>(reader.next_int());
      }
    } else if (token == "CELL_TYPES") {
      const long n = reader.next_int();
      for (long i = 0; i < n; ++i) {
        if (reader.next_int() != 5) throw IoError("vtk: only triangle cells supported");
      }
    } else if (token == "POINT_DATA") {
      reader.next_int();
      section = Section::point;
    } else if (token == "CELL_DATA") {
      reader.next_int();
      section = Section::cell;
    } else if (token == "SCALARS") {
      const std::string name = reader.next();
      reader.next();  // value type
      reader.next();  // component count
      reader.expect("LOOKUP_TABLE");
      reader.next();  // table name
      const long n = section == Section::point ? file.points.rows() : file.cells.rows();
      if (section == Section::none) throw IoError("vtk: SCALARS outside a data section");
      Eigen::VectorXd values(n);
      for (long i = 0; i < n; ++i) values[i] = reader.next_double();
      if (section == Section::point) {
        file.point_data.emplace_back(name, std::move(values));
      } else {
        file.cell_data.emplace_back(name, std::move(values));
      }
    } else {
      throw IoError("vtk: unexpected token '" + token + "'");
    }
  }
  return file;
}

ElementwiseField chi_from_vtk(const VtkFile& file, const TriMesh& mesh) {
  if (file.points.rows() != mesh.num_vertices() ||
      file.cells.rows() != mesh.num_triangles()) {
    throw IoError("vtk: stored shape does not match the configured mesh resolution");
  }
  const Eigen::VectorXd* chi = file.find_cell_data("chi");
  if (chi == nullptr) throw IoError("vtk: no 'chi' cell array in file");
  for (Eigen::Index e = 0; e < chi->size(); ++e) {
    if ((*chi)[e] != 0.0 && (*chi)[e] != 1.0) {
      throw IoError("vtk: 'chi' values must be exactly 0 or 1");
    }
  }
  return {*chi};
}

LevelSet psi_from_vtk(const VtkFile& file, const TriMesh& mesh) {
  if (file.points.rows() != mesh.num_vertices()) {
    throw IoError("vtk: stored level set does not match the configured mesh resolution");
  }
  const Eigen::VectorXd* psi = file.find_point_data("psi");
  if (psi == nullptr) throw IoError("vtk: no 'psi' point array in file");
  return {{*psi}};
}

void write_history_csv(const std::vector<IterationRecord>& history,
                       const std::filesystem::path& path) {
  std::ostringstream out;
  out << "iter,J,P,theta,volume,fulfillment,kappa\n";
  for (const auto& rec : history) {
    out << rec.iteration << "," << format_double(rec.objective) << ","
        << format_double(rec.penalty) << "," << format_double(rec.angle) << ","
        << format_double(rec.volume) << "," << format_double(rec.fulfillment) << ","
        << format_double(rec.kappa) << "\n";
  }
  write_text_atomic(path, out.str());
}

void write_summary_json(const DeflationResult& result, const TriMesh& mesh,
                        const std::filesystem::path& path) {
  nlohmann::json summary;
  summary["minimizers"] = nlohmann::json::array();
  for (size_t i = 0; i < result.rounds.size(); ++i) {
    const RoundResult& round = result.rounds[i];
    nlohmann::json entry;
    entry["round"] = round.round;
    entry["objective"] = round.objective;
    entry["fulfillment"] = round.fulfillment;
    entry["volume"] = round.volume;
    entry["deflated_iterations"] = round.deflated_iterations;
    entry["restart_iterations"] = round.restart_iterations;
    entry["deflated_converged"] = round.deflated_converged;
    entry["restart_converged"] = round.restart_converged;
    auto distances = nlohmann::json::array();
    for (size_t j = 0; j < i; ++j) {
      distances.push_back(
          shape_distance(mesh, result.archive.entries[i].chi, result.archive.entries[j].chi));
    }
    entry["distances_to_previous"] = std::move(distances);
    summary["minimizers"].push_back(std::move(entry));
  }
  write_text_atomic(path, summary.dump(2) + "\n");
}

std::vector<NamedNodalField> flow_point_fields(const P2DofMap& dm, const FlowState& flow,
                                               const VectorFieldP2& u_s) {
  const auto u = evaluate_at_vertices(dm, flow.u);
  const auto us = evaluate_at_vertices(dm, u_s);
  std::vector<NamedNodalField> fields;
  fields.push_back({"speed", u.rowwise().norm()});
  fields.push_back({"smoothed_speed", us.rowwise().norm()});
  return fields;
}

}  // namespace topoflow
