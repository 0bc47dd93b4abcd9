// Copyright 2026 The laserstate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// laserstate: experiment runner.
//
//   laserstate <subcommand> [--config FILE] [--param key=value ...] [--seed N] [--out FILE] [--check]
//
// Exit status: 0 success, 1 runtime failure, 2 usage or config error,
// 3 an embedded tolerance failed under --check.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "laserstate/io.hpp"
#include "laserstate/laserstate.hpp"
#include "params.hpp"

namespace {

using namespace laserstate;
using laserstate::cli::CheckList;
using laserstate::cli::Params;
using laserstate::cli::UsageError;
using Json = nlohmann::ordered_json;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCheck = 3;

struct Output {
  std::string text;
  CheckList checks;
  bool checks_embedded = false;  ///< already part of text (JSON reports)
};

double r12(double x) { return round12(x); }

Json complex_json(Complex z) { return Json::array({r12(z.real()), r12(z.imag())}); }

Json checks_json(const CheckList& checks) {
  Json arr = Json::array();
  for (const auto& c : checks.items())
    arr.push_back({{"name", c.name}, {"value", r12(c.value)}, {"limit", r12(c.limit)}, {"pass", c.pass}});
  return arr;
}

double wrap(double x) { return std::remainder(x, 2.0 * kPi); }

DensityOperator fock(const std::string& label, int n_max, int n) {
  return DensityOperator::from_state(fock_state(ModeSpace(label, n_max), n));
}

TwoCavityState number_pair(int na, int nb) {
  if (double(na + 1) * double(nb + 1) > 3000.0)
    throw UsageError("state dimension (n_a+1)(n_b+1) = " + std::to_string((na + 1) * (nb + 1)) +
                     " exceeds 3000");
  return TwoCavityState::product(fock("a", na, na), fock("b", nb, nb));
}

/// Zips two lists, broadcasting a single value.
std::vector<std::pair<int, int>> pairs(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() && a.size() != 1 && b.size() != 1)
    throw UsageError("n_a and n_b lists must have equal length or one entry");
  const std::size_t n = std::max(a.size(), b.size());
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(a[a.size() == 1 ? 0 : i], b[b.size() == 1 ? 0 : i]);
  return out;
}

// ---------------------------------------------------------------------------

Params ratio_params() {
  return {"two-laser-ratio", {{"n_a", Json::array({1, 2, 5, 10, 20, 50})},
                              {"n_b", Json::array({1, 2, 5, 10, 20, 50})},
                              {"gamma", 0.0}}};
}

Output run_ratio(const Params& p) {
  const auto rows = pairs(p.integers("n_a", 0, 2999), p.integers("n_b", 0, 2999));
  const double gamma = p.number("gamma");
  Output out;
  std::ostringstream os;
  os << "n_a,n_b,ratio_numeric,ratio_analytic\n";
  for (const auto& [na, nb] : rows) {
    if (na + nb < 2) throw UsageError("two-laser-ratio needs n_a + n_b >= 2 for a second detection");
    const auto r = second_detection_ratio(number_pair(na, nb), gamma);
    os << na << ',' << nb << ',' << format_number(r.ratio) << ',' << format_number(r.ratio_analytic) << '\n';
    out.checks.at_most("ratio n_a=" + std::to_string(na) + " n_b=" + std::to_string(nb),
                       std::abs(r.ratio - r.ratio_analytic), 1e-10);
  }
  out.text = os.str();
  return out;
}

Params phase_params() {
  return {"two-laser-phase", {{"n_a", 5}, {"n_b", 5}, {"gamma", 0.0}, {"detector", 1},
                              {"grid_size", kDefaultGridSize}, {"p_max", -1}, {"window_origin", -kPi}}};
}

Output run_phase(const Params& p) {
  const int na = p.integer("n_a", 0, 2999), nb = p.integer("n_b", 0, 2999);
  if (na + nb < 1) throw UsageError("two-laser-phase needs at least one photon");
  const DetectionEvent ev{p.integer("detector", 1, 2), p.number("gamma")};
  const int grid = p.integer("grid_size", 8, 1 << 20);
  const int p_max = p.integer("p_max", -1, 10000);
  const auto cmp = post_collapse_phase_distribution(number_pair(na, nb), ev, grid, p_max, p.number("window_origin"));
  Output out;
  std::ostringstream os;
  write_phase_csv(os, cmp.numeric, &cmp.analytic);
  out.text = os.str();
  out.checks.at_most("pointwise deviation from closed form", cmp.max_deviation, 1e-9);
  return out;
}

Params sim_params() {
  return {"two-laser-sim", {{"state", "number"}, {"n_a", 20}, {"n_b", 20}, {"alpha_a", 1.0}, {"alpha_b", 1.0},
                            {"phase_a", 0.0}, {"phase_b", 0.0}, {"gamma", 0.0}, {"n_events", 2}, {"seeds", 200},
                            {"seed", 0}, {"grid_size", kDefaultGridSize}, {"threads", 0}}};
}

Output run_sim(const Params& p) {
  const auto kind = p.choice("state", {"number", "coherent"});
  const double gamma = p.number("gamma");
  const int n_events = p.integer("n_events", 0, 1000);
  const int seeds = p.integer("seeds", 1, 100000);
  const std::uint64_t base = p.unsigned64("seed");
  const int grid = p.integer("grid_size", 8, 1 << 20);
  int threads = p.integer("threads", 0, 256);
  if (threads == 0) threads = int(std::max(1u, std::thread::hardware_concurrency()));

  std::optional<TwoCavityState> initial;
  std::optional<double> fringe;
  if (kind == "number") {
    initial = number_pair(p.integer("n_a", 0, 2999), p.integer("n_b", 0, 2999));
    fringe = post_collapse_fringe_amplitude(field_moments(*initial));
  } else {
    const double ma = p.number("alpha_a", 0.0, 4.0), mb = p.number("alpha_b", 0.0, 4.0);
    const int n = coherent_n_max(std::max(ma, mb), 1e-24);
    auto coh = [&](const std::string& label, double m, double ph) {
      return DensityOperator::from_state(coherent_state(std::polar(m, ph), ModeSpace(label, n)));
    };
    initial = TwoCavityState::product(coh("a", ma, p.number("phase_a")), coh("b", mb, p.number("phase_b")));
  }
  const auto m0 = field_moments(*initial);
  if (m0.mean_a + m0.mean_b + 1e-9 < n_events)
    throw UsageError("n_events exceeds the mean photon number of the cavities");

  std::vector<SimulationTrace> traces(static_cast<std::size_t>(seeds));
  for (int start = 0; start < seeds; start += threads) {
    std::vector<std::future<SimulationTrace>> batch;
    for (int s = start; s < std::min(seeds, start + threads); ++s)
      batch.push_back(std::async(std::launch::async, [&, s] {
        return sequential_detection_simulation(*initial, gamma, n_events, base + std::uint64_t(s), grid);
      }));
    for (std::size_t k = 0; k < batch.size(); ++k) traces[std::size_t(start) + k] = batch[k].get();
  }

  std::vector<double> analytic(std::size_t(n_events) + 1, std::nan(""));
  if (fringe) {
    analytic[0] = kPi * kPi / 3.0;
    if (n_events >= 1) analytic[1] = kPi * kPi / 3.0 - 4.0 * *fringe;
  }
  auto ref = [&](std::size_t k) -> Json { return std::isnan(analytic[k]) ? Json(nullptr) : Json(r12(analytic[k])); };

  Output out;
  std::ostringstream os;
  std::vector<double> mean(std::size_t(n_events) + 1, 0.0);
  int hom_same = 0;
  for (const auto& tr : traces) {
    os << Json{{"seed", tr.seed}, {"event_index", 0}, {"detector", nullptr}, {"weight1", nullptr},
               {"weight2", nullptr}, {"variance", r12(tr.variance[0])}, {"variance_analytic", ref(0)}}
              .dump()
       << '\n';
    for (std::size_t k = 0; k < tr.events.size(); ++k)
      os << Json{{"seed", tr.seed}, {"event_index", k + 1}, {"detector", tr.events[k].detector},
                 {"weight1", r12(tr.weight1[k])}, {"weight2", r12(tr.weight2[k])},
                 {"variance", r12(tr.variance[k + 1])}, {"variance_analytic", ref(k + 1)}}
                .dump()
         << '\n';
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += tr.variance[k] / seeds;
    if (tr.events.size() >= 2 && tr.events[0].detector == tr.events[1].detector) ++hom_same;
  }
  Json summary{{"summary", true}, {"seeds", seeds}, {"mean_variance", Json::array()}};
  for (double v : mean) summary["mean_variance"].push_back(r12(v));
  if (fringe) {
    out.checks.at_most("mean variance before detection", std::abs(mean[0] - analytic[0]), 2e-3);
    if (n_events >= 1) out.checks.at_most("mean variance after first click", std::abs(mean[1] - analytic[1]), 2e-3);
    if (n_events >= 2 && initial->rho.space()[0].n_max() == 1 && initial->rho.space()[1].n_max() == 1)
      out.checks.at_least("seeds with second click at first detector", hom_same, seeds);
  }
  summary["checks"] = checks_json(out.checks);
  os << summary.dump() << '\n';
  out.text = os.str();
  out.checks_embedded = true;
  return out;
}

Params retro_params() {
  return {"retrodict", {{"n_max", 30}, {"alpha_a", 2.0}, {"alpha_b", 2.0}, {"points", 64}, {"detector", 1},
                        {"gamma", 0.0}}};
}

Output run_retro(const Params& p) {
  const int n_max = p.integer("n_max", 1, 60);
  const int points = p.integer("points", 1, 1024);
  const DetectionEvent ev{p.integer("detector", 1, 2), p.number("gamma")};
  const double ma = p.number("alpha_a", 0.0, 10.0), mb = p.number("alpha_b", 0.0, 10.0);
  const auto ea = CoherentEnsemble::uniform(ModeSpace("a", n_max), ma, points);
  const auto eb = CoherentEnsemble::uniform(ModeSpace("b", n_max), mb, points);
  const auto r = retrodict_coherent_ensemble(ea, eb, ev);
  const auto prior = TwoCavityState::product(ea.density(), eb.density());
  const auto collapsed = collapse_first_detection(prior, ev);
  const double diff = max_abs_diff(r.posterior.op(), collapsed.rho.op());

  Eigen::Index bi = 0, bk = 0;
  r.posterior_weights.maxCoeff(&bi, &bk);
  const double peak = wrap(ea.phases[std::size_t(bi)] - eb.phases[std::size_t(bk)]);
  const double expected = wrap(ev.effective_gamma());

  Output out;
  out.checks.at_most("posterior vs collapsed prior (max elementwise)", diff, 1e-8);
  out.checks.at_most("posterior weight sum", std::abs(r.posterior_weights.sum() - 1.0), 1e-12);
  out.checks.at_most("peak phase difference", std::abs(wrap(peak - expected)), 2.0 * kPi / points);
  Json report{{"experiment", "retrodict"},
              {"parameters", p.all()},
              {"max_abs_difference", r12(diff)},
              {"max_abs_difference_analytic", 0.0},
              {"detection_weight", r12(detection_weight(prior, ev))},
              {"posterior_weight_sum", r12(r.posterior_weights.sum())},
              {"peak_phase_difference", r12(peak)},
              {"peak_phase_difference_analytic", r12(expected)},
              {"checks", checks_json(out.checks)}};
  out.text = report.dump(2) + '\n';
  out.checks_embedded = true;
  return out;
}

Params sources_params() {
  return {"sources", {{"lambda", 1.0}, {"times", Json::array({0.1, 0.3, 0.6, 1.0, 2.0})}, {"field_n_max", 8},
                      {"mixture_weights", Json::array({0.1, 0.2, 0.3, 0.4})}, {"atoms", 3}, {"atom_theta", 0.6},
                      {"gamma_modulus", std::sqrt(2.0)}, {"gamma_phase", 0.8},
                      {"coherent_times", Json::array({0.05, 0.1, 0.2, 0.3})}}};
}

Output run_sources(const Params& p) {
  const double lambda = p.number("lambda", 1e-6, 1e6);
  const auto times = p.numbers("times", 0.0, 1e4);
  const int field_n_max = p.integer("field_n_max", 1, 40);
  const auto weights = p.numbers("mixture_weights", 0.0, 1.0);
  const int n_atoms = p.integer("atoms", 1, kMaxAtoms);
  const double theta = p.number("atom_theta");
  const double gmod = p.number("gamma_modulus", 0.0, 2.0);
  const Complex g = std::polar(gmod, p.number("gamma_phase"));
  const auto ctimes = p.numbers("coherent_times", 0.0, 1e4);
  Output out;

  Json mixture = Json::array();
  {
    const auto sys = build_oscillator_source(int(weights.size()) - 1, field_n_max, lambda);
    for (double t : times) {
      const auto rho = number_mixture_field(sys, weights, t);
      double mean = 0.0, expected = 0.0;
      for (Eigen::Index n = 0; n < rho.dim(); ++n) mean += double(n) * rho.matrix()(n, n).real();
      for (std::size_t big = 0; big < weights.size(); ++big)
        expected += weights[big] * double(big) * std::pow(std::sin(lambda * t), 2);
      const double off = max_off_diagonal(rho);
      out.checks.at_most("number mixture off-diagonal t=" + format_number(t), off, 1e-10);
      mixture.push_back({{"t", r12(t)}, {"max_off_diagonal", r12(off)}, {"max_off_diagonal_analytic", 0.0},
                         {"mean_photons", r12(mean)}, {"mean_photons_analytic", r12(expected)}});
    }
  }

  Json atomic = Json::array();
  Json superposed = Json::array();
  {
    const auto sys = build_atomic_source(std::vector<double>(std::size_t(n_atoms), lambda), field_n_max);
    const auto vac = DensityOperator::from_state(fock_state(sys.field_space(), 0));
    Vector excited = Vector::Unit(2, 1);
    Vector sup(2);
    sup << 1.0 / std::sqrt(2.0), std::exp(kI * theta) / std::sqrt(2.0);
    Vector all_e = excited, all_s = sup;
    for (int k = 1; k < n_atoms; ++k) {
      all_e = Eigen::kroneckerProduct(all_e, excited).eval();
      all_s = Eigen::kroneckerProduct(all_s, sup).eval();
    }
    const StateVector ee(sys.source_space(), all_e), ss(sys.source_space(), all_s);
    for (double t : times) {
      const double off = max_off_diagonal(atomic_source_field(sys, ee, vac, t));
      out.checks.at_most("excited atoms off-diagonal t=" + format_number(t), off, 1e-10);
      atomic.push_back({{"t", r12(t)}, {"max_off_diagonal", r12(off)}, {"max_off_diagonal_analytic", 0.0}});
    }
    const double t_sup = 0.3 / lambda;
    const auto rho = atomic_source_field(sys, ss, vac, t_sup);
    const double c01 = std::abs(rho.matrix()(0, 1));
    out.checks.at_least("superposed atoms |<0|rho|1>| at lambda t = 0.3", c01, 1e-3);
    superposed = {{"t", r12(t_sup)}, {"coherence_01", r12(c01)},
                  {"phase", r12(std::arg(phase_moment(rho, 1)))}, {"phase_analytic", r12(wrap(theta))}};
  }

  Json transfer = Json::array();
  {
    const int n = coherent_n_max(std::max(gmod, 1e-3), 1e-20);
    const auto sys = build_oscillator_source(n, std::max(n, field_n_max), lambda);
    const StateVector src(ModeSpace("source", n), coherent_state(g, ModeSpace("source", n)).amplitudes());
    for (double t : ctimes) {
      const auto r = coherence_transfer_check(sys, src, t);
      out.checks.at_most("coherent source residual t=" + format_number(t), r.eigen_residual, 1e-3);
      if (gmod > 0.0 && std::abs(r.alpha) > 0.0)
        out.checks.at_most("coherent source phase t=" + format_number(t), r.arg_alignment, 1e-6);
      transfer.push_back({{"t", r12(t)}, {"alpha", complex_json(r.alpha)}, {"alpha_analytic", complex_json(r.alpha_exact)},
                          {"eigen_residual", r12(r.eigen_residual)}, {"arg_alignment", r12(r.arg_alignment)}});
    }
  }

  Json report{{"experiment", "sources"},      {"parameters", p.all()},    {"number_mixture", mixture},
              {"excited_atoms", atomic},      {"superposed_atoms", superposed}, {"coherent_source", transfer},
              {"checks", checks_json(out.checks)}};
  out.text = report.dump(2) + '\n';
  out.checks_embedded = true;
  return out;
}

Params jc_params() {
  return {"jc-pulse", {{"field", "number"}, {"n", 5}, {"lambda", 1.0}, {"n_max", -1}, {"mean", 2.0}, {"seed", 0}}};
}

Output run_jc(const Params& p) {
  const auto kind = p.choice("field", {"number", "coherent", "poisson", "random"});
  const int n = p.integer("n", 1, 200);
  const double lambda = p.number("lambda", 1e-6, 1e6);
  const double mean = p.number("mean", 0.0, 100.0);
  int n_max = p.integer("n_max", -1, 300);
  if (n_max < 0) n_max = n + kFieldMargin;
  if (kind == "coherent" && p.raw("n_max") == -1) n_max = std::max(n_max, coherent_n_max(std::sqrt(double(n)), 1e-20));
  if (n_max < n + kFieldMargin)
    throw UsageError("n_max = " + std::to_string(n_max) + " must be at least n + " + std::to_string(kFieldMargin));
  const ModeSpace f("field", n_max);

  std::variant<StateVector, DensityOperator> field = fock_state(f, n);
  if (kind == "coherent") {
    field = coherent_state(std::sqrt(double(n)), f);
  } else if (kind == "poisson") {
    Matrix m = Matrix::Zero(f.dim(), f.dim());
    for (int k = 0; k <= n_max; ++k) m(k, k) = std::exp(-mean + k * std::log(std::max(mean, 1e-300)) - std::lgamma(k + 1.0));
    if (mean == 0.0) m(0, 0) = 1.0;
    m /= m.trace();
    field = DensityOperator(LinearOperator(f, m));
  } else if (kind == "random") {
    std::mt19937_64 rng(p.unsigned64("seed"));
    std::normal_distribution<double> g;
    Matrix a(f.dim(), f.dim());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Complex(g(rng), g(rng));
    Matrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    field = DensityOperator(LinearOperator(f, rho));
  }
  const auto r = disrupted_pi_pulse(field, n, lambda);
  const double dev = combined_unitary_identity_check(n_max, lambda, n);

  Output out;
  out.checks.at_most("atom ground probability", std::abs(r.ground_probability - 1.0), 1e-9);
  out.checks.at_most("combined unitary deviation", dev, 1e-9);
  Json report{{"experiment", "jc-pulse"},
              {"parameters", p.all()},
              {"pi_pulse_time", r12(pi_pulse_time(n, lambda))},
              {"ground_probability", r12(r.ground_probability)},
              {"ground_probability_analytic", 1.0},
              {"midpoint_ground_probability", r12(atom_ground_probability(r.midpoint))},
              {"combined_unitary_deviation", r12(dev)},
              {"combined_unitary_deviation_analytic", 0.0}};
  if (kind == "number") {
    report["midpoint_ground_probability_analytic"] = 0.5;
    const auto& v = std::get<StateVector>(r.final_state.state).amplitudes();
    report["final_amplitude"] = complex_json(v(n));
    report["final_amplitude_analytic"] = complex_json(n % 2 ? -1.0 : 1.0);
    out.checks.at_most("final amplitude (-1)^n", std::abs(v(n) - (n % 2 ? -1.0 : 1.0)), 1e-9);
  }
  report["checks"] = checks_json(out.checks);
  out.text = report.dump(2) + '\n';
  out.checks_embedded = true;
  return out;
}

Params spin_params() { return {"spin-example", Json::object()}; }

Output run_spin(const Params& p) {
  const CompositeSpace s(aux_space("spin", 2));
  auto ket = [&](Complex a, Complex b) {
    Vector v(2);
    v << a, b;
    return StateVector(s, v).normalized();
  };
  const auto up_z = ket(1, 0), down_z = ket(0, 1), up_x = ket(1, 1), down_x = ket(1, -1), up_y = ket(1, kI),
             down_y = ket(1, -kI);
  const PrepDevice z{{{"+z", Complex(0.5) * up_z.projector()}, {"-z", Complex(0.5) * down_z.projector()}}};
  const PrepDevice y{{{"+y", Complex(0.5) * up_y.projector()}, {"-y", Complex(0.5) * down_y.projector()}}};
  const Pom x{{{"+x", up_x.projector()}, {"-x", down_x.projector()}}};
  require_valid(z);
  require_valid(x);

  const double pred = predictive_probability(DensityOperator::from_state(up_z), x, "+x");
  const double retro = retrodictive_probability(z, x.at("+x"), "+z");
  const double joint = joint_probability(z, x.items, "+z", "+x");
  const double prior = a_priori_preparation_probability(z, "+z");
  const double retro_y = retrodictive_probability(y, x.at("+x"), "+y");
  const double pred_mixed_z = predictive_probability(density_from_prep(z), x, "+x");
  const double pred_mixed_y = predictive_probability(density_from_prep(y), x, "+x");

  Output out;
  out.checks.at_most("P(+x|+z)", std::abs(pred - 0.5), 1e-10);
  out.checks.at_most("P(+z|+x)", std::abs(retro - 0.5), 1e-10);
  out.checks.at_most("P(+z,+x)", std::abs(joint - 0.25), 1e-10);
  out.checks.at_most("P(+y|+x)", std::abs(retro_y - 0.5), 1e-10);
  out.checks.at_most("z and y ensembles predict alike", std::abs(pred_mixed_z - pred_mixed_y), 1e-10);
  Json report{{"experiment", "spin-example"},
              {"parameters", p.all()},
              {"predictive_plus_x_given_plus_z", r12(pred)},
              {"predictive_plus_x_given_plus_z_analytic", 0.5},
              {"retrodictive_plus_z_given_plus_x", r12(retro)},
              {"retrodictive_plus_z_given_plus_x_analytic", 0.5},
              {"joint_plus_z_plus_x", r12(joint)},
              {"joint_plus_z_plus_x_analytic", 0.25},
              {"prior_plus_z", r12(prior)},
              {"prior_plus_z_analytic", 0.5},
              {"retrodictive_plus_y_given_plus_x", r12(retro_y)},
              {"retrodictive_plus_y_given_plus_x_analytic", 0.5},
              {"predictive_plus_x_z_ensemble", r12(pred_mixed_z)},
              {"predictive_plus_x_y_ensemble", r12(pred_mixed_y)},
              {"checks", checks_json(out.checks)}};
  out.text = report.dump(2) + '\n';
  out.checks_embedded = true;
  return out;
}

struct Experiment {
  std::string name;
  std::string help;
  std::function<Params()> params;
  std::function<Output(const Params&)> run;
};

std::vector<Experiment> experiments() {
  return {
      {"two-laser-ratio",
       "Second-click ratio P12/P11 for number-state pairs.\n"
       "CSV columns: n_a,n_b,ratio_numeric,ratio_analytic.\n"
       "Parameters: n_a, n_b (integer or list), gamma.",
       ratio_params, run_ratio},
      {"two-laser-phase",
       "Phase-difference distribution after one click on |n_a>|n_b>.\n"
       "CSV columns: delta_radians,density,density_analytic.\n"
       "Parameters: n_a, n_b, gamma, detector, grid_size, p_max (-1 for all), window_origin.",
       phase_params, run_phase},
      {"two-laser-sim",
       "Sequential detection simulation, one JSON line per event and seed, then a summary line.\n"
       "Fields: seed, event_index (0 = before any click), detector, weight1, weight2, variance, variance_analytic.\n"
       "Parameters: state (number|coherent), n_a, n_b, alpha_a, alpha_b, phase_a, phase_b, gamma, n_events,\n"
       "seeds, seed (first seed; --seed overrides), grid_size, threads (0 = all cores).",
       sim_params, run_sim},
      {"retrodict",
       "Retrodiction over uniform coherent phase ensembles against collapse of the prior (JSON report).\n"
       "Parameters: n_max, alpha_a, alpha_b, points, detector, gamma.",
       retro_params, run_retro},
      {"sources",
       "Field coherences produced by number-mixture, atomic and coherent sources (JSON report).\n"
       "Parameters: lambda, times, field_n_max, mixture_weights, atoms, atom_theta, gamma_modulus,\n"
       "gamma_phase, coherent_times.",
       sources_params, run_sources},
      {"jc-pulse",
       "Pi-pulse with a pi phase kick at the midpoint (JSON report).\n"
       "Parameters: field (number|coherent|poisson|random), n (sets t_pi; |alpha|^2 for coherent), lambda,\n"
       "n_max (-1 = automatic), mean (poisson), seed (random).",
       jc_params, run_jc},
      {"spin-example",
       "Spin-1/2 prediction and retrodiction probabilities (JSON report). No parameters.",
       spin_params, run_spin},
  };
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"laserstate experiment runner"};
  app.require_subcommand(1);
  std::string config, out_path;
  std::vector<std::string> flags;
  std::uint64_t seed = 0;
  bool check = false;

  const auto list = experiments();
  std::map<CLI::App*, const Experiment*> by_app;
  for (const auto& e : list) {
    auto* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", config, "JSON object of parameters");
    sub->add_option("--out", out_path, "output file (default stdout)");
    sub->add_option("--seed", seed, "RNG seed (overrides the config)");
    sub->add_option("--param", flags, "key=value override, repeatable");
    sub->add_flag("--check", check, "exit 3 if any embedded tolerance fails");
    by_app[sub] = &e;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const Experiment* exp = nullptr;
  CLI::App* sub = nullptr;
  for (auto& [a, e] : by_app)
    if (a->parsed()) {
      exp = e;
      sub = a;
    }

  try {
    Params params = exp->params();
    if (!config.empty()) params.load_file(config);
    for (const auto& f : flags) params.apply_flag(f);
    if (sub->count("--seed")) params.set("seed", seed);
    const Output result = exp->run(params);
    emit(result.text, out_path);
    if (check) {
      if (!result.checks_embedded)
        for (const auto& c : result.checks.items())
          std::cerr << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << format_number(c.value) << " (limit "
                    << format_number(c.limit) << ")\n";
      if (!result.checks.all_pass()) {
        std::cerr << exp->name << ": tolerance check failed\n";
        return kExitCheck;
      }
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << exp->name << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const laserstate::PreconditionError& e) {
    std::cerr << exp->name << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const laserstate::TruncationError& e) {
    std::cerr << exp->name << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << exp->name << ": " << e.what() << '\n';
    return kExitRuntime;
  }
}
