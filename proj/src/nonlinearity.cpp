#include "ewl/nonlinearity.hpp"

#include <cmath>
#include <random>
#include <utility>

#include "ewl/error.hpp"

namespace ewl {

namespace {

double quintic(double u) {
  const double u2 = u * u;
  return u2 * u2 * u;
}

}  // namespace

Nonlinearity::Nonlinearity(std::string name, double gamma, Eval eval,
                           std::optional<Potential> potential, NonlinearityFlags flags)
    : name_(std::move(name)),
      gamma_(gamma),
      eval_(std::move(eval)),
      potential_(std::move(potential)),
      flags_(flags) {
  if (!(gamma_ >= 0.0)) throw ContractError("nonlinearity: gamma must be nonnegative");
  if (!eval_) throw ContractError("nonlinearity: missing evaluator");
}

Nonlinearity Nonlinearity::zero() {
  Nonlinearity F("zero", 0.0, [](double, double, double) { return 0.0; },
                 Potential([](double, double) { return 0.0; }),
                 NonlinearityFlags{.defocusing = true});
  F.zero_ = true;
  return F;
}

Nonlinearity Nonlinearity::focusing_quintic() {
  return {"focusing_quintic", 1.0, [](double, double, double u) { return quintic(u); },
          Potential([](double, double u) { return -quintic(u) * u / 6.0; }),
          NonlinearityFlags{}};
}

Nonlinearity Nonlinearity::defocusing_quintic() {
  return {"defocusing_quintic", 1.0, [](double, double, double u) { return -quintic(u); },
          Potential([](double, double u) { return quintic(u) * u / 6.0; }),
          NonlinearityFlags{.defocusing = true}};
}

Nonlinearity Nonlinearity::weighted_power(std::function<double(double)> c, double gamma,
                                          std::string label, bool defocusing) {
  auto eval = [c](double r, double, double u) { return c(r) * quintic(u); };
  auto pot = [c](double r, double u) { return -c(r) * quintic(u) * u / 6.0; };
  return {std::move(label), gamma, eval, Potential(pot),
          NonlinearityFlags{.defocusing = defocusing}};
}

Nonlinearity Nonlinearity::from_name(const std::string& name, double gamma) {
  if (name == "zero") return zero();
  if (name == "focusing_quintic") return focusing_quintic();
  if (name == "defocusing_quintic") return defocusing_quintic();
  if (name == "weighted_power") {
    return weighted_power([gamma](double r) { return -gamma / (1.0 + r * r); }, gamma,
                          "weighted_power", true);
  }
  throw ContractError("unknown nonlinearity '" + name +
                      "' (expected zero|focusing_quintic|defocusing_quintic|weighted_power)");
}

double Nonlinearity::potential(double r, double u) const {
  if (!potential_) throw UnsupportedOperation("nonlinearity '" + name_ + "' has no potential");
  return (*potential_)(r, u);
}

AssumptionReport Nonlinearity::spot_check(std::uint64_t seed, int samples) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rdist(0.0, 50.0);
  std::uniform_real_distribution<double> tdist(-50.0, 50.0);
  std::uniform_real_distribution<double> logu(-6.0, 2.0);
  std::bernoulli_distribution sign(0.5);
  AssumptionReport rep;
  for (int k = 0; k < samples; ++k) {
    const double r = rdist(rng);
    const double t = tdist(rng);
    double u = std::pow(10.0, logu(rng));
    if (sign(rng)) u = -u;
    const double f = eval_(r, t, u);
    ++rep.samples;
    const double bound = gamma_ * std::abs(quintic(u));
    if (bound > 0.0) rep.worst_growth_ratio = std::max(rep.worst_growth_ratio, std::abs(f) / bound);
    if (flags_.growth && std::abs(f) > bound * (1.0 + 1e-12) + 1e-300) ++rep.growth_violations;
    if (flags_.defocusing && u * f > 0.0) ++rep.defocusing_violations;
  }
  return rep;
}

}  // namespace ewl
