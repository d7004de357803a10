#include "roomreg/controller.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "roomreg/dense_linalg.hpp"
#include "roomreg/matrix_io.hpp"

namespace roomreg {
namespace {

Mat or_identity(const Mat& m, int n, const char* name) {
  if (m.size() == 0) return Mat::Identity(n, n);
  if (m.rows() != n || m.cols() != n)
    throw std::invalid_argument(std::string("synthesis weight ") + name + " has wrong size");
  return m;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

}  // namespace

Gains compute_gains(const DenseSystem& sys, const InternalModel& im, const SynthesisParams& prm) {
  const int N = sys.states(), m = sys.inputs(), p = sys.outputs();
  if (sys.E.size() != 0 && !sys.E.isIdentity(0.0))
    throw std::invalid_argument("synthesis expects a standard-form plant (E = I)");
  if (im.G2.cols() != p)
    throw std::invalid_argument("internal model output dimension does not match the plant");
  if (prm.alpha1 < 0.0 || prm.alpha2 < 0.0) throw std::invalid_argument("stability margins must be non-negative");
  const int nz = im.dim();
  const Mat R1 = or_identity(prm.R1, p, "R1");
  const Mat R2 = or_identity(prm.R2, m, "R2");
  const Mat Q1 = or_identity(prm.Q1Q1t, N, "Q1Q1*");
  const Mat Q2 = or_identity(prm.Q2tQ2, N, "Q2*Q2");
  Mat Q0tQ0;
  if (prm.Q0.size() == 0) Q0tQ0 = Mat::Identity(nz, nz);
  else if (prm.Q0.cols() != nz) throw std::invalid_argument("synthesis weight Q0 has wrong size");
  else Q0tQ0 = prm.Q0.transpose() * prm.Q0;

  Gains g;
  CareOptions opt;
  opt.shift = prm.alpha1;
  try {
    g.filter = solve_care(sys.A.transpose(), Mat(), sys.C.transpose(), Q1, R1, opt);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("filter Riccati equation: ") + e.what());
  }
  g.L = -g.filter.X * sys.C.transpose() * R1.inverse();

  g.Ac = Mat::Zero(nz + N, nz + N);
  g.Ac.topLeftCorner(nz, nz) = im.G1;
  g.Ac.topRightCorner(nz, N) = im.G2 * sys.C;
  g.Ac.bottomRightCorner(N, N) = sys.A;
  g.Bc = Mat::Zero(nz + N, m);
  g.Bc.bottomRows(N) = sys.B;
  Mat Qc = Mat::Zero(nz + N, nz + N);
  Qc.topLeftCorner(nz, nz) = Q0tQ0;
  Qc.bottomRightCorner(N, N) = Q2;
  opt.shift = prm.alpha2;
  try {
    g.control = solve_care(g.Ac, Mat(), g.Bc, Qc, R2, opt);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("control Riccati equation: ") + e.what());
  }
  const Mat K = -R2.llt().solve(g.Bc.transpose() * g.control.X);
  g.K1 = K.leftCols(nz);
  g.K2 = K.rightCols(N);
  return g;
}

ControllerRealization assemble_controller(const InternalModel& im, const Mat& K1, const Mat& A_L,
                                          const Mat& B_L, const Mat& L_r, const Mat& K2_r) {
  const int nz = im.dim(), r = static_cast<int>(A_L.rows());
  const int m = static_cast<int>(K1.rows()), p = static_cast<int>(im.G2.cols());
  if (K1.cols() != nz || A_L.cols() != r || B_L.rows() != r || B_L.cols() != m ||
      L_r.rows() != r || L_r.cols() != p || K2_r.rows() != m || K2_r.cols() != r)
    throw std::invalid_argument("controller blocks have inconsistent dimensions");
  ControllerRealization c;
  c.G1 = im.G1;
  c.G2 = im.G2;
  c.K1 = K1;
  c.A_L = A_L;
  c.B_L = B_L;
  c.L_r = L_r;
  c.K2_r = K2_r;
  c.dim_zim = nz;
  c.r = r;
  c.cal_G1 = Mat::Zero(nz + r, nz + r);
  c.cal_G1.topLeftCorner(nz, nz) = im.G1;
  c.cal_G1.bottomLeftCorner(r, nz) = B_L * K1;
  c.cal_G1.bottomRightCorner(r, r) = A_L + B_L * K2_r;
  c.cal_G2 = Mat::Zero(nz + r, p);
  c.cal_G2.topRows(nz) = im.G2;
  c.cal_G2.bottomRows(r) = -L_r;
  c.K = Mat::Zero(m, nz + r);
  c.K.leftCols(nz) = K1;
  c.K.rightCols(r) = K2_r;
  return c;
}

SynthesisResult synthesize_controller(const DenseSystem& sys, const InternalModel& im,
                                      const std::vector<double>& frequencies,
                                      const SynthesisParams& prm) {
  SynthesisResult res;
  res.gains = compute_gains(sys, im, prm);
  const int m = sys.inputs(), p = sys.outputs();
  const Mat AL = sys.A + res.gains.L * sys.C;
  Mat BL(sys.states(), m + p);
  BL << sys.B, res.gains.L;
  res.reduction = balanced_truncate(AL, Mat(), BL, res.gains.K2, prm.order);
  const auto& red = res.reduction;
  res.controller = assemble_controller(im, res.gains.K1, red.A, red.B.leftCols(m),
                                       red.B.rightCols(p), red.C);
  res.controller.frequencies = frequencies;
  res.controller.hankel = red.hankel;
  res.controller.truncation_bound = red.error_bound;
  return res;
}

void save_controller(const std::filesystem::path& dir, const ControllerRealization& c) {
  std::filesystem::create_directories(dir);
  const std::map<std::string, const Mat*> blocks = {
      {"G1", &c.G1},   {"G2", &c.G2},         {"K1", &c.K1},         {"A_L", &c.A_L},
      {"B_L", &c.B_L}, {"L_r", &c.L_r},       {"K2_r", &c.K2_r},     {"calG1", &c.cal_G1},
      {"calG2", &c.cal_G2}, {"K", &c.K}};
  for (const auto& [name, m] : blocks) write_matrix_market(dir / (name + ".mtx"), *m);
  std::ofstream out(dir / "manifest.txt");
  if (!out) throw std::runtime_error("cannot write controller manifest in " + dir.string());
  out.precision(17);
  out << "dim_z = " << c.dim() << "\n";
  out << "dim_zim = " << c.dim_zim << "\n";
  out << "r = " << c.r << "\n";
  out << "inputs = " << c.inputs() << "\n";
  out << "outputs = " << c.outputs() << "\n";
  out << "frequencies = " << join(c.frequencies) << "\n";
  out << "truncation_bound = " << c.truncation_bound << "\n";
  out << "hankel = " << join(std::vector<double>(c.hankel.data(), c.hankel.data() + c.hankel.size()))
      << "\n";
}

ControllerRealization load_controller(const std::filesystem::path& dir) {
  const auto manifest = dir / "manifest.txt";
  std::ifstream in(manifest);
  if (!in) throw std::runtime_error("controller artifact missing (" + manifest.string() + ")");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(' '), b = s.find_last_not_of(' ');
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto numbers = [&](const std::string& key) {
    std::vector<double> v;
    std::istringstream is(kv[key]);
    double x;
    while (is >> x) v.push_back(x);
    return v;
  };
  ControllerRealization c;
  c.G1 = read_matrix_market_dense(dir / "G1.mtx");
  c.G2 = read_matrix_market_dense(dir / "G2.mtx");
  c.K1 = read_matrix_market_dense(dir / "K1.mtx");
  c.A_L = read_matrix_market_dense(dir / "A_L.mtx");
  c.B_L = read_matrix_market_dense(dir / "B_L.mtx");
  c.L_r = read_matrix_market_dense(dir / "L_r.mtx");
  c.K2_r = read_matrix_market_dense(dir / "K2_r.mtx");
  c.cal_G1 = read_matrix_market_dense(dir / "calG1.mtx");
  c.cal_G2 = read_matrix_market_dense(dir / "calG2.mtx");
  c.K = read_matrix_market_dense(dir / "K.mtx");
  c.dim_zim = static_cast<int>(c.G1.rows());
  c.r = static_cast<int>(c.A_L.rows());
  c.frequencies = numbers("frequencies");
  const auto h = numbers("hankel");
  c.hankel = Eigen::Map<const Vec>(h.data(), static_cast<Eigen::Index>(h.size()));
  if (!kv["truncation_bound"].empty()) c.truncation_bound = std::stod(kv["truncation_bound"]);
  if (c.dim() != std::stoi(kv["dim_z"]))
    throw std::runtime_error("controller manifest does not match the stored blocks");
  return c;
}

}  // namespace roomreg
