#include "roomreg/matrix_io.hpp"

#include <fstream>

#include <unsupported/Eigen/SparseExtra>

namespace roomreg {

void write_matrix_market(const std::filesystem::path& path, const SpMat& m) {
  if (!Eigen::saveMarket(m, path.string())) throw std::runtime_error("cannot write " + path.string());
}

void write_matrix_market(const std::filesystem::path& path, const Mat& m) {
  write_matrix_market(path, SpMat(m.sparseView(0.0, 0.0)));
}

SpMat read_matrix_market_sparse(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw std::runtime_error("missing matrix file " + path.string());
  SpMat m;
  if (!Eigen::loadMarket(m, path.string())) throw std::runtime_error("cannot read " + path.string());
  return m;
}

Mat read_matrix_market_dense(const std::filesystem::path& path) {
  return Mat(read_matrix_market_sparse(path));
}

void write_field_csv(const std::filesystem::path& path, const std::vector<Eigen::Vector2d>& nodes,
                     const Vec& values) {
  if (static_cast<Eigen::Index>(nodes.size()) != values.size())
    throw std::invalid_argument("field values do not match the node list");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "x,y,value\n";
  for (size_t i = 0; i < nodes.size(); ++i)
    out << nodes[i].x() << ',' << nodes[i].y() << ',' << values[static_cast<Eigen::Index>(i)] << '\n';
}

}  // namespace roomreg
