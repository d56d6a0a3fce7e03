#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curldiv/green.hpp"

namespace curldiv {

struct VtkFields {
  std::vector<std::pair<std::string, const ScalarField*>> scalars;
  std::vector<std::pair<std::string, const VectorField*>> vectors;
  std::vector<std::pair<std::string, const std::vector<double>*>> cell_scalars;
};

/// Legacy ASCII STRUCTURED_POINTS; node data on the grid nodes, cell data per cell.
void write_vtk(const std::string& path, const GridDomain& dom, const VtkFields& fields);

/// Columns t, x0..x2, y0..y2, g00..g22 (row-major), dx, dy.
void write_kernel_csv(const std::string& path, const std::vector<GreensSample>& samples, double t = 0.0);
void write_kernel_csv(const std::string& path, const std::vector<HeatKernelSnapshot>& snaps,
                      const std::vector<int>& xs);

/// Columns iteration, residual, relaxation.
void write_trace_csv(const std::string& path, const IterationTrace& trace);

/// Plain table with a header row.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_json(const std::string& path, const nlohmann::json& j);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace curldiv
