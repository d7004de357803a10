#pragma once

#include <string>
#include <vector>

#include "roomreg/internal_model.hpp"

namespace roomreg {

/// a(t) cos(w t) or a(t) sin(w t) with a polynomial coefficient
/// a(t) = c[0] + c[1] t + ... A constant-frequency term (w = 0) is written
/// as a cosine.
struct SignalTerm {
  enum class Kind { Cos, Sin };
  Kind kind = Kind::Cos;
  double frequency = 0.0;
  std::vector<double> coefficients;

  double operator()(double t) const;
  bool operator==(const SignalTerm&) const = default;
};

struct ScalarSignal {
  std::vector<SignalTerm> terms;

  double operator()(double t) const;
  ScalarSignal scaled(double factor) const;
  /// Canonical text form, re-parsed by parse_signal.
  std::string text() const;
  bool operator==(const ScalarSignal&) const = default;
};

/// Grammar: terms separated by ';', each one of
///   const: c0 c1 ...
///   cos <w>: c0 c1 ...
///   sin <w>: c0 c1 ...
/// An empty string or "0" is the zero signal.
ScalarSignal parse_signal(const std::string& text);

struct ExogenousSignals {
  std::vector<ScalarSignal> reference;    // one per output
  std::vector<ScalarSignal> disturbance;  // one per disturbance input

  Vec reference_at(double t) const;
  Vec disturbance_at(double t) const;
  /// Frequencies must belong to the signal spec and polynomial degrees stay below
  /// the orders; the reference count must equal spec.p.
  void validate(const SignalSpec& spec) const;
  bool operator==(const ExogenousSignals&) const = default;
};

}  // namespace roomreg
