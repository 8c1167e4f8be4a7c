// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "oracles.hpp"
#include "spotiv/dgp.hpp"
#include "spotiv/error.hpp"
#include "spotiv/io.hpp"
#include "spotiv/parallel.hpp"
#include "spotiv/partial_mean.hpp"
#include "spotiv/pipeline.hpp"
#include "spotiv/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace spotiv;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& measured) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " | "
            << measured << std::endl;
  failures += !ok;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

bool in(double x, double lo, double hi) { return x >= lo && x <= hi; }

SimulationRow cell(Scenario sc, Eigen::Index n, double c_gamma) {
  SimulationConfig config;
  config.cell = ScenarioSpec{.scenario = sc, .n = n, .c_gamma = c_gamma};
  config.replications = 200;
  config.n_boot = 50;
  config.threads = default_threads();
  return run_cell(config);
}

std::string row_text(const SimulationRow& r) {
  std::string s = "MAE=" + fmt(r.mae) + " COV=" + fmt(r.cov) + " SE=" + fmt(r.se);
  if (r.mt) s += " MT=" + fmt(*r.mt);
  s += " failures=" + std::to_string(r.failures);
  return s;
}

// Guards a criterion so an exception counts as a failure rather than aborting.
void run(int id, const std::string& what, const std::function<std::pair<bool, std::string>()>& f) {
  try {
    const auto [ok, measured] = f();
    report(id, ok, what, measured);
  } catch (const std::exception& e) {
    report(id, false, what, std::string("exception: ") + e.what());
  }
}

struct Fitted {
  Dataset data;
  FirstStageFit fs;
  StructuralFit fit;
  KernelConfig H;
};

Fitted fitted(const ScenarioSpec& spec) {
  Fitted f;
  f.data = generate(spec).data;
  f.fs = fit_first_stage(f.data);
  f.fit = fit_structural(fit_sir(f.data, f.fs), f.fs);
  f.H = make_kernel_config(sample_indices(f.data, f.fit, f.fs.v_hat));
  return f;
}

}  // namespace

int main() {
  std::cout << "threads: " << default_threads() << std::endl;

  run(1, "binary (i), n=1000, c=0.8: MAE in [0.026,0.066], COV in [0.91,0.99], SE in [0.04,0.12]",
      [] {
        const auto r = cell(Scenario::BinaryI, 1000, 0.8);
        const bool ok = in(r.mae, 0.026, 0.066) && in(r.cov, 0.91, 0.99) && in(r.se, 0.04, 0.12);
        return std::pair{ok, row_text(r)};
      });

  run(2, "binary (i), n=500, c=0.4: COV >= 0.87, MAE <= 0.16", [] {
    const auto r = cell(Scenario::BinaryI, 500, 0.4);
    return std::pair{r.cov >= 0.87 && r.mae <= 0.16, row_text(r)};
  });

  run(3, "majority test, n=1000, c=0.6: MT <= 0.10 under violation (a), MT >= 0.90 under (i)",
      [] {
        const auto bad = cell(Scenario::ViolationA, 1000, 0.6);
        const auto good = cell(Scenario::BinaryI, 1000, 0.6);
        const bool ok = bad.mt && good.mt && *bad.mt <= 0.10 && *good.mt >= 0.90;
        return std::pair{ok, "violation_a " + row_text(bad) + "; binary_i " + row_text(good)};
      });

  run(4, "continuous (ii), n=1000, c=0.8: COV in [0.90,0.99], MAE <= 0.07", [] {
    const auto r = cell(Scenario::ContinuousII, 1000, 0.8);
    return std::pair{in(r.cov, 0.90, 0.99) && r.mae <= 0.07, row_text(r)};
  });

  run(5, "partial mean equals the O(n^2) double loop to 1e-12 relative on 50 instances", [] {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> size(30, 200);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    int instances = 0;
    for (std::uint64_t seed = 1; instances < 50; ++seed) {
      const Scenario sc = seed % 2 ? Scenario::BinaryI : Scenario::ContinuousII;
      Fitted f;
      try {
        f = fitted(ScenarioSpec{.scenario = sc, .n = size(rng), .c_gamma = 0.4 + 0.4 * unit(rng),
                                .seed = seed});
      } catch (const Error&) {
        continue;  // e.g. no instrument selected in a tiny sample
      }
      Eigen::VectorXd h = f.H.bandwidths * (0.5 + 2.0 * unit(rng));
      KernelConfig H{.bandwidths = h, .rule = BandwidthRule::Fixed};
      const double d = -2.0 + 4.0 * unit(rng);
      const Eigen::VectorXd w = 0.2 * Eigen::VectorXd::NullaryExpr(7, [&] { return unit(rng); });
      const std::vector<double> hv(h.data(), h.data() + h.size());
      const auto bf = oracle::brute_force_phi(d, w, f.fit.B_hat, f.data.y, f.data.d, f.data.W,
                                              f.fs.v_hat, hv);
      if (std::isnan(bf.phi)) continue;
      const auto est = estimate_phi(d, w, f.fit, f.fs, f.data, H);
      worst = std::max(worst, std::abs(est.phi - bf.phi) / std::max(std::abs(bf.phi), 1e-300));
      if (est.dropped != bf.dropped) worst = INFINITY;
      ++instances;
    }
    return std::pair{worst <= 1e-12, "max relative error " + fmt(worst)};
  });

  run(6, "median rule recovers B* from noiseless Theta* to 1e-10", [] {
    const auto par = default_params(ScenarioSpec{});
    Eigen::MatrixXd B_star = Eigen::MatrixXd::Zero(8, 2);
    B_star(0, 0) = par.beta;
    B_star.col(0).tail(7) = par.kappa;
    B_star.col(1).tail(7) = par.eta;
    Eigen::MatrixXd gamma_I(7, 8);
    gamma_I << par.gamma, Eigen::MatrixXd::Identity(7, 7);
    const auto fit = fit_structural(gamma_I * B_star, par.gamma, {0, 1, 2, 3, 4, 5, 6});
    const double err = (fit.B_hat - B_star).cwiseAbs().maxCoeff();
    return std::pair{err <= 1e-10, "max abs error " + fmt(err)};
  });

  run(7, "property suite", [] {
    std::string notes;
    bool ok = true;
    auto check = [&](bool cond, const std::string& name) {
      notes += name + (cond ? "=ok " : "=FAILED ");
      ok = ok && cond;
    };

    bool bounded = true, antisym = true, flat = true, normalized = true;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto f = fitted(ScenarioSpec{.n = 400, .seed = seed});
      EvalPoint point = default_eval_point();
      const auto fwd = estimate_cate(point, f.fit, f.fs, f.data, f.H);
      bounded = bounded && in(fwd.phi_d, 0.0, 1.0) && in(fwd.phi_dprime, 0.0, 1.0);
      std::swap(point.d, point.d_prime);
      antisym = antisym && estimate_cate(point, f.fit, f.fs, f.data, f.H).cate == -fwd.cate;
      const auto wide = make_kernel_config(sample_indices(f.data, f.fit, f.fs.v_hat),
                                           Eigen::VectorXd::Constant(1, 1e6));
      flat = flat && std::abs(estimate_cate(point, f.fit, f.fs, f.data, wide).cate) < 1e-12;
      const auto phi = estimate_phi(-1.0, point.w, f.fit, f.fs, f.data, f.H);
      normalized = normalized && std::abs(phi.weights.sum() - phi.retained / 400.0) < 1e-12;
    }
    check(bounded, "phi_in_[0,1]");
    check(antisym, "antisymmetry");
    check(flat, "h=1e6_flat");
    check(normalized, "weights_sum");

    int within = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const auto sim = generate(ScenarioSpec{.scenario = Scenario::ContinuousII, .n = 5000,
                                             .seed = seed});
      const auto fs = fit_first_stage(sim.data);
      const auto sir = fit_sir(sim.data, fs);
      Eigen::MatrixXd theta_star(7, 2);
      theta_star << sim.params.beta * sim.params.gamma + sim.params.kappa, sim.params.eta;
      within += oracle::principal_angle_deg(sir.Theta_hat, theta_star) < 15.0;
    }
    check(within >= 90, "subspace_15deg(" + std::to_string(within) + "/100)");

    Eigen::VectorXd spike(4);
    spike << 0.5, 0, 0, 0;
    check(select_rank(spike, 1000, 4, 0.5) == 1, "select_rank");
    return std::pair{ok, notes};
  });

  run(8, "reports are byte-identical across thread counts", [] {
    SimulationConfig config;
    config.cell = ScenarioSpec{.n = 400, .c_gamma = 0.6};
    config.replications = 6;
    config.n_boot = 10;
    config.oracle_draws = 200000;
    config.seed = 31;
    std::vector<std::string> json, csv;
    for (unsigned t : {1u, 2u, 5u}) {
      config.threads = t;
      SimulationReport rep;
      rep.rows.push_back(run_cell(config));
      json.push_back(to_json(rep).dump(2));
      std::ostringstream os;
      write_simulation_csv(os, rep);
      csv.push_back(os.str());
    }
    const auto data = generate(ScenarioSpec{.n = 300, .seed = 2}).data;
    std::vector<std::string> est;
    for (unsigned t : {1u, 4u}) {
      est.push_back(
          to_json(estimate_with_bootstrap(data, default_eval_point(), {}, 20, 0.05, 9, t),
                  default_eval_point())
              .dump());
    }
    const bool ok = json[0] == json[1] && json[0] == json[2] && csv[0] == csv[1] &&
                    csv[0] == csv[2] && est[0] == est[1];
    return std::pair{ok, "simulation json/csv at 1,2,5 threads; estimate at 1,4 threads"};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
