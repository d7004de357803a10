#pragma once

#include <filesystem>
#include <vector>

#include "roomreg/types.hpp"

namespace roomreg {

/// Matrix Market coordinate files with 17 significant digits, so a write
/// followed by a read reproduces every entry exactly.
void write_matrix_market(const std::filesystem::path& path, const SpMat& m);
void write_matrix_market(const std::filesystem::path& path, const Mat& m);
SpMat read_matrix_market_sparse(const std::filesystem::path& path);
Mat read_matrix_market_dense(const std::filesystem::path& path);

/// Columns x, y, value for nodal field snapshots.
void write_field_csv(const std::filesystem::path& path, const std::vector<Eigen::Vector2d>& nodes,
                     const Vec& values);

}  // namespace roomreg
