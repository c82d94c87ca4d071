#pragma once

#include "topoflow/deflation.hpp"
#include "topoflow/fem.hpp"
#include "topoflow/mesh.hpp"
#include "topoflow/optimizer.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace topoflow {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedNodalField {
  std::string name;
  Eigen::VectorXd values;  // one per vertex
};

struct NamedCellField {
  std::string name;
  Eigen::VectorXd values;  // one per triangle
};

// binary64 values printed with 17 significant digits (lossless round trip)
std::string format_double(double value);

// write-then-rename so readers never observe partial files
void write_text_atomic(const std::filesystem::path& path, const std::string& contents);

// Legacy ASCII unstructured-grid file: points, triangle cells, one scalar
// array per field. Deterministic: index order, 17 significant digits.
void write_field_vtk(const TriMesh& mesh, const std::vector<NamedNodalField>& nodal,
                     const std::vector<NamedCellField>& cell,
                     const std::filesystem::path& path);

struct VtkFile {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  Eigen::Matrix<int, Eigen::Dynamic, 3> cells;
  std::vector<std::pair<std::string, Eigen::VectorXd>> point_data;
  std::vector<std::pair<std::string, Eigen::VectorXd>> cell_data;

  const Eigen::VectorXd* find_point_data(const std::string& name) const;
  const Eigen::VectorXd* find_cell_data(const std::string& name) const;
};

// reads files produced by write_field_vtk
VtkFile read_vtk(const std::filesystem::path& path);

// extracts the `chi` cell array and checks it against the expected mesh
ElementwiseField chi_from_vtk(const VtkFile& file, const TriMesh& mesh);
// extracts the `psi` point array
LevelSet psi_from_vtk(const VtkFile& file, const TriMesh& mesh);

// header `iter,J,P,theta,volume,fulfillment,kappa`, one row per record
void write_history_csv(const std::vector<IterationRecord>& history,
                       const std::filesystem::path& path);

// one JSON record per archived minimizer with distances to earlier ones
void write_summary_json(const DeflationResult& result, const TriMesh& mesh,
                        const std::filesystem::path& path);

// the standard field bundle written for a solved shape
std::vector<NamedNodalField> flow_point_fields(const P2DofMap& dofmap,
                                               const FlowState& flow,
                                               const VectorFieldP2& u_s);

}  // namespace topoflow
