#include "roomreg/internal_model.hpp"

#include <cmath>
#include <stdexcept>

namespace roomreg {

void SignalSpec::validate() const {
  if (p < 1) throw std::invalid_argument("signal output dimension must be at least 1");
  if (frequencies.empty()) throw std::invalid_argument("signals.frequencies must not be empty");
  if (orders.size() != frequencies.size())
    throw std::invalid_argument("signals.orders needs one entry per frequency");
  for (size_t k = 0; k < frequencies.size(); ++k) {
    if (!(frequencies[k] >= 0.0) || !std::isfinite(frequencies[k]))
      throw std::invalid_argument("frequencies must be finite and non-negative");
    if (k > 0 && !(frequencies[k] > frequencies[k - 1]))
      throw std::invalid_argument("frequencies must be strictly increasing");
    if (orders[k] < 1) throw std::invalid_argument("polynomial orders must be at least 1");
  }
}

InternalModel build_internal_model(const SignalSpec& spec) {
  spec.validate();
  const int p = spec.p;
  int n = 0;
  for (size_t k = 0; k < spec.frequencies.size(); ++k)
    n += (spec.frequencies[k] == 0.0 ? 1 : 2) * p * spec.orders[k];

  InternalModel im;
  im.G1 = Mat::Zero(n, n);
  im.G2 = Mat::Zero(n, p);
  const Mat I = Mat::Identity(p, p);
  int off = 0;
  for (size_t k = 0; k < spec.frequencies.size(); ++k) {
    const double w = spec.frequencies[k];
    const int nk = spec.orders[k];
    const int bs = (w == 0.0 ? 1 : 2) * p;  // Jordan block size
    for (int j = 0; j < nk; ++j) {
      const int o = off + j * bs;
      if (w != 0.0) {
        im.G1.block(o, o + p, p, p) = w * I;
        im.G1.block(o + p, o, p, p) = -w * I;
      }
      if (j + 1 < nk) im.G1.block(o, o + bs, bs, bs).setIdentity();
    }
    im.G2.block(off + (nk - 1) * bs, 0, p, p) = I;
    off += nk * bs;
  }
  return im;
}

}  // namespace roomreg
