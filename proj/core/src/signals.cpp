#include "roomreg/signals.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace roomreg {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

double number(const std::string& tok, const std::string& context) {
  double v = 0.0;
  const char* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw std::invalid_argument("bad number '" + tok + "' in signal term '" + context + "'");
  return v;
}

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

double SignalTerm::operator()(double t) const {
  double a = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) a = a * t + *it;
  return a * (kind == Kind::Cos ? std::cos(frequency * t) : std::sin(frequency * t));
}

double ScalarSignal::operator()(double t) const {
  double s = 0.0;
  for (const auto& term : terms) s += term(t);
  return s;
}

ScalarSignal ScalarSignal::scaled(double factor) const {
  ScalarSignal out = *this;
  for (auto& term : out.terms)
    for (double& c : term.coefficients) c *= factor;
  return out;
}

std::string ScalarSignal::text() const {
  if (terms.empty()) return "0";
  std::string s;
  for (size_t i = 0; i < terms.size(); ++i) {
    const auto& term = terms[i];
    if (i) s += "; ";
    if (term.frequency == 0.0 && term.kind == SignalTerm::Kind::Cos) s += "const:";
    else s += (term.kind == SignalTerm::Kind::Cos ? "cos " : "sin ") + shortest(term.frequency) + ":";
    for (double c : term.coefficients) s += " " + shortest(c);
  }
  return s;
}

ScalarSignal parse_signal(const std::string& text) {
  ScalarSignal sig;
  const std::string whole = trim(text);
  if (whole.empty() || whole == "0") return sig;
  std::stringstream ss(whole);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("signal term '" + item + "' lacks ':'");
    std::istringstream head(item.substr(0, colon));
    std::string kind, freq, extra;
    head >> kind >> freq >> extra;
    if (!extra.empty()) throw std::invalid_argument("malformed signal term '" + item + "'");
    SignalTerm term;
    if (kind == "const") {
      if (!freq.empty()) throw std::invalid_argument("const term takes no frequency: '" + item + "'");
    } else if (kind == "cos" || kind == "sin") {
      if (freq.empty()) throw std::invalid_argument("missing frequency in '" + item + "'");
      term.kind = kind == "cos" ? SignalTerm::Kind::Cos : SignalTerm::Kind::Sin;
      term.frequency = number(freq, item);
      if (term.frequency < 0.0) throw std::invalid_argument("negative frequency in '" + item + "'");
    } else {
      throw std::invalid_argument("unknown signal term kind '" + kind + "'");
    }
    std::istringstream body(item.substr(colon + 1));
    std::string tok;
    while (body >> tok) term.coefficients.push_back(number(tok, item));
    if (term.coefficients.empty()) throw std::invalid_argument("no coefficients in '" + item + "'");
    sig.terms.push_back(term);
  }
  return sig;
}

Vec ExogenousSignals::reference_at(double t) const {
  Vec v(static_cast<Eigen::Index>(reference.size()));
  for (size_t i = 0; i < reference.size(); ++i) v[static_cast<Eigen::Index>(i)] = reference[i](t);
  return v;
}

Vec ExogenousSignals::disturbance_at(double t) const {
  Vec v(static_cast<Eigen::Index>(disturbance.size()));
  for (size_t i = 0; i < disturbance.size(); ++i) v[static_cast<Eigen::Index>(i)] = disturbance[i](t);
  return v;
}

void ExogenousSignals::validate(const SignalSpec& spec) const {
  if (static_cast<int>(reference.size()) != spec.p)
    throw std::invalid_argument("need one reference signal per output (" + std::to_string(spec.p) + ")");
  auto check = [&](const ScalarSignal& s, const std::string& name) {
    for (const auto& term : s.terms) {
      const double w = term.frequency;
      size_t k = 0;
      while (k < spec.frequencies.size() && std::abs(spec.frequencies[k] - w) > 1e-12 * (1.0 + w)) ++k;
      if (k == spec.frequencies.size())
        throw std::invalid_argument(name + " uses frequency " + shortest(w) +
                                    " which is not in signals.frequencies");
      if (static_cast<int>(term.coefficients.size()) > spec.orders[k])
        throw std::invalid_argument(name + " has polynomial degree above the order at frequency " +
                                    shortest(w));
    }
  };
  for (size_t i = 0; i < reference.size(); ++i) check(reference[i], "reference " + std::to_string(i + 1));
  for (size_t i = 0; i < disturbance.size(); ++i)
    check(disturbance[i], "disturbance " + std::to_string(i + 1));
}

}  // namespace roomreg
