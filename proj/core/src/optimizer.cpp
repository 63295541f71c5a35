#include "qsyn/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <thread>

#include "qsyn/error.hpp"
#include "qsyn/evaluator.hpp"

namespace qsyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool finite(double v) { return std::isfinite(v); }

// Evaluation counter and best-point tracker shared by the line search and the
// outer loop.
class Tracker {
 public:
  Tracker(const Objective& f, std::size_t n, int cap)
      : f_(f), cap_(cap), best_x_(n), trial_x_(n), trial_g_(n) {}

  double eval(std::span<const double> x, std::span<double> g) {
    ++evaluations_;
    double v = f_(x, g);
    if (!finite(v)) v = std::numeric_limits<double>::infinity();
    if (v < best_value_) {
      best_value_ = v;
      std::copy(x.begin(), x.end(), best_x_.begin());
    }
    return v;
  }

  bool exhausted() const { return evaluations_ >= cap_; }
  int evaluations() const { return evaluations_; }
  double best_value() const { return best_value_; }
  const std::vector<double>& best_x() const { return best_x_; }
  std::vector<double>& trial_x() { return trial_x_; }
  std::vector<double>& trial_g() { return trial_g_; }

 private:
  const Objective& f_;
  int cap_;
  int evaluations_ = 0;
  double best_value_ = std::numeric_limits<double>::infinity();
  std::vector<double> best_x_;
  std::vector<double> trial_x_;
  std::vector<double> trial_g_;
};

struct LineSearchResult {
  bool ok = false;
  double step = 0.0;
  double value = 0.0;
  std::vector<double> gradient;
};

// Minimizer of the cubic interpolating (a, fa, da) and (b, fb, db), or the
// midpoint if it falls outside the safeguarded interior of [a, b].
double cubic_step(double a, double fa, double da, double b, double fb, double db) {
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  double t = 0.5 * (a + b);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = db - da + 2.0 * d2;
    if (denom != 0.0) t = b - (b - a) * (db + d2 - d1) / denom;
  }
  const double margin = 0.1 * (hi - lo);
  if (!finite(t) || t < lo + margin || t > hi - margin) t = 0.5 * (a + b);
  return t;
}

// Strong-Wolfe line search (bracketing + zoom) along `dir` from x.
LineSearchResult wolfe_search(Tracker& tr, std::span<const double> x, double f0,
                              double slope0, std::span<const double> dir, double initial_step) {
  constexpr double c1 = 1e-4;
  constexpr double c2 = 0.9;
  constexpr int kMaxBracket = 20;
  constexpr int kMaxZoom = 30;
  const std::size_t n = x.size();

  auto probe = [&](double step, double& value, double& slope) {
    auto& tx = tr.trial_x();
    auto& tg = tr.trial_g();
    for (std::size_t i = 0; i < n; ++i) tx[i] = x[i] + step * dir[i];
    value = tr.eval(tx, tg);
    slope = finite(value) ? dot(tg, dir) : std::numeric_limits<double>::infinity();
  };
  auto accept = [&](double step, double value) {
    return LineSearchResult{true, step, value, tr.trial_g()};
  };

  double prev_step = 0.0, prev_value = f0, prev_slope = slope0;
  double step = initial_step;
  for (int i = 0; i < kMaxBracket && !tr.exhausted(); ++i) {
    double value, slope;
    probe(step, value, slope);
    double lo, flo, dlo, hi, fhi, dhi;
    if (value > f0 + c1 * step * slope0 || (i > 0 && value >= prev_value)) {
      lo = prev_step, flo = prev_value, dlo = prev_slope;
      hi = step, fhi = value, dhi = slope;
    } else if (std::abs(slope) <= -c2 * slope0) {
      return accept(step, value);
    } else if (slope >= 0.0) {
      lo = step, flo = value, dlo = slope;
      hi = prev_step, fhi = prev_value, dhi = prev_slope;
    } else {
      prev_step = step, prev_value = value, prev_slope = slope;
      step *= 2.0;
      continue;
    }

    // Zoom: [lo, hi] brackets a point satisfying the strong Wolfe conditions.
    for (int z = 0; z < kMaxZoom && !tr.exhausted(); ++z) {
      double t = finite(fhi) && finite(dhi) ? cubic_step(lo, flo, dlo, hi, fhi, dhi)
                                            : 0.5 * (lo + hi);
      double ft, dt;
      probe(t, ft, dt);
      if (ft > f0 + c1 * t * slope0 || ft >= flo) {
        hi = t, fhi = ft, dhi = dt;
      } else {
        if (std::abs(dt) <= -c2 * slope0) return accept(t, ft);
        if (dt * (hi - lo) >= 0.0) hi = lo, fhi = flo, dhi = dlo;
        lo = t, flo = ft, dlo = dt;
      }
      if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
    }
    // Fall back to the best sufficient-decrease point found in the bracket.
    if (lo > 0.0 && flo < f0) {
      double v, s;
      probe(lo, v, s);
      if (v < f0) return accept(lo, v);
    }
    return {};
  }
  return {};
}

}  // namespace

OptimizerResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                               const LocalOptions& options) {
  const std::size_t n = x0.size();
  Tracker tr(objective, n, std::max(1, options.max_evaluations));
  std::vector<double> x = std::move(x0);
  std::vector<double> g(n);
  double f = tr.eval(x, g);
  if (!finite(f)) throw ValidationError("local optimization: objective is not finite at x0");

  auto finish = [&](bool converged) {
    OptimizerResult r;
    r.params = tr.best_x();
    r.value = tr.best_value();
    r.evaluations = tr.evaluations();
    r.converged = converged || r.value < options.tol;
    return r;
  };
  if (f < options.tol || n == 0) return finish(true);

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> memory;
  std::vector<double> dir(n), alpha(static_cast<std::size_t>(options.memory));
  int stalls = 0;

  while (!tr.exhausted()) {
    if (max_norm(g) < options.gradient_tol) return finish(true);

    // Two-loop recursion: dir = −H·g.
    for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
    for (std::size_t k = memory.size(); k-- > 0;) {
      alpha[k] = memory[k].rho * dot(memory[k].s, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha[k] * memory[k].y[i];
    }
    if (!memory.empty()) {
      const Pair& last = memory.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& d : dir) d *= gamma;
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const double beta = memory[k].rho * dot(memory[k].y, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += (alpha[k] - beta) * memory[k].s[i];
    }

    double slope = dot(g, dir);
    if (!(slope < 0.0)) {
      memory.clear();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
      slope = -dot(g, g);
    }
    const double initial_step =
        memory.empty() ? std::min(1.0, 1.0 / std::sqrt(dot(g, g))) : 1.0;

    LineSearchResult ls = wolfe_search(tr, x, f, slope, dir, initial_step);
    if (!ls.ok) {
      if (memory.empty()) break;
      memory.clear();  // retry once along steepest descent
      continue;
    }

    Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = ls.step * dir[i];
      p.y[i] = ls.gradient[i] - g[i];
      x[i] += p.s[i];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-16 * dot(p.y, p.y)) {
      p.rho = 1.0 / sy;
      memory.push_back(std::move(p));
      if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
    }
    const double decrease = f - ls.value;
    f = ls.value;
    g = std::move(ls.gradient);
    if (f < options.tol) return finish(true);
    // Stop after repeated negligible progress on a plateau.
    stalls = decrease <= 1e-15 * std::max(1.0, std::abs(f)) ? stalls + 1 : 0;
    if (stalls >= 3) break;
  }
  return finish(max_norm(g) < options.gradient_tol);
}

OptimizerResult local_minimize(const CircuitStructure& structure, const UnitaryMatrix& target,
                               std::vector<double> x0, double tol, int max_evaluations) {
  if (static_cast<int>(x0.size()) != structure.param_count()) {
    throw ArityError("local_minimize: expected " + std::to_string(structure.param_count()) +
                     " parameters, got " + std::to_string(x0.size()));
  }
  CircuitEvaluator eval(structure, target);
  Objective f = [&eval](std::span<const double> x, std::span<double> g) {
    return eval.value_and_gradient(x, g);
  };
  LocalOptions opts;
  opts.tol = tol;
  opts.max_evaluations = max_evaluations;
  return lbfgs_minimize(f, std::move(x0), opts);
}

double wrapped_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = std::fmod(std::abs(a[i] - b[i]), kTwoPi);
    d = std::min(d, kTwoPi - d);
    sum += d * d;
  }
  return std::sqrt(sum);
}

MultistartResult multistart_minimize(const ObjectiveFactory& make_objective, int dimension,
                                     const MultistartConfig& config, double tol,
                                     const std::vector<std::vector<double>>& seeds) {
  if (config.num_starts < 1) throw ConfigError("multistart: num_starts must be positive");
  if (config.eval_budget <= 0) throw ConfigError("multistart: evaluation budget must be positive");
  if (!(config.radius_decay > 0.0 && config.radius_decay < 1.0)) {
    throw ConfigError("multistart: radius_decay must lie in (0, 1)");
  }
  if (config.batch_size() < 1) throw ConfigError("multistart: sample batch must be positive");
  if (dimension < 0) throw ConfigError("multistart: negative dimension");

  struct Point {
    std::vector<double> x;
    double value;
    double grad_norm;
    bool started = false;
  };

  const std::size_t n = static_cast<std::size_t>(dimension);
  std::mt19937_64 rng(config.rng_seed);
  std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
  Objective sampler = make_objective();
  std::vector<double> grad(n);

  MultistartResult result;
  result.value = std::numeric_limits<double>::infinity();
  result.best_sample_value = std::numeric_limits<double>::infinity();
  std::int64_t evaluations = 0;
  std::vector<Point> points;
  // Known points for the r_k test: samples plus local-run end points.
  std::vector<std::pair<std::vector<double>, double>> run_ends;

  auto consider = [&](const std::vector<double>& x, double value) {
    if (value < result.value) {
      result.value = value;
      result.params = x;
    }
  };
  auto done = [&] {
    return result.value < tol || static_cast<int>(result.runs.size()) >= config.num_starts ||
           evaluations >= config.eval_budget;
  };

  if (n == 0) {
    // Nothing to optimize: a single evaluation decides.
    result.value = result.best_sample_value = sampler(result.params, grad);
    result.samples = 1;
    result.evaluations = 1;
    result.converged = result.value < tol;
    return result;
  }

  double radius = config.initial_radius;
  for (int batch = 0; !done(); ++batch) {
    std::vector<std::vector<double>> fresh;
    if (batch == 0) {
      for (const auto& s : seeds) {
        if (s.size() != n) throw ArityError("multistart: seed has wrong dimension");
        fresh.push_back(s);
      }
    }
    for (int i = 0; i < config.batch_size(); ++i) {
      std::vector<double> x(n);
      for (double& v : x) v = uniform(rng);
      fresh.push_back(std::move(x));
    }
    for (auto& x : fresh) {
      if (evaluations >= config.eval_budget) break;
      double v = sampler(x, grad);
      ++evaluations;
      if (!finite(v)) v = std::numeric_limits<double>::infinity();
      result.best_sample_value = std::min(result.best_sample_value, v);
      consider(x, v);
      points.push_back(Point{std::move(x), v, max_norm(grad)});
    }
    if (done()) break;

    // Admission, evaluated once per batch boundary.
    std::vector<std::size_t> admitted;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Point& p = points[i];
      if (p.started || !(p.grad_norm > kStationaryGradient) || !finite(p.value)) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
        dominated = j != i && points[j].value < p.value &&
                    wrapped_distance(points[j].x, p.x) <= radius;
      }
      for (std::size_t j = 0; j < run_ends.size() && !dominated; ++j) {
        dominated = run_ends[j].second < p.value && wrapped_distance(run_ends[j].first, p.x) <= radius;
      }
      if (!dominated) admitted.push_back(i);
    }
    std::stable_sort(admitted.begin(), admitted.end(), [&](std::size_t a, std::size_t b) {
      return points[a].value < points[b].value;
    });
    const std::size_t slots =
        static_cast<std::size_t>(config.num_starts) - result.runs.size();
    if (admitted.size() > slots) admitted.resize(slots);

    auto run_one = [&](std::size_t idx, const Objective& f, std::int64_t cap) {
      LocalOptions opts;
      opts.tol = tol;
      opts.max_evaluations = static_cast<int>(cap);
      return lbfgs_minimize(f, points[idx].x, opts);
    };

    const int workers = std::max(1, config.workers);
    if (workers == 1) {
      for (std::size_t idx : admitted) {
        if (done()) break;
        const std::int64_t cap =
            std::min<std::int64_t>(config.local_max_evaluations, config.eval_budget - evaluations);
        points[idx].started = true;
        OptimizerResult r = run_one(idx, sampler, cap);
        evaluations += r.evaluations;
        result.runs.push_back(LocalRunRecord{batch, radius, points[idx].x, points[idx].value,
                                             r.params, r.value, r.evaluations});
        run_ends.emplace_back(r.params, r.value);
        consider(r.params, r.value);
      }
    } else {
      // Runs in this batch share the remaining budget evenly.
      const std::int64_t remaining = config.eval_budget - evaluations;
      const std::int64_t cap = std::min<std::int64_t>(
          config.local_max_evaluations,
          admitted.empty() ? 0 : remaining / static_cast<std::int64_t>(admitted.size()));
      std::vector<OptimizerResult> out(admitted.size());
      for (std::size_t i0 = 0; i0 < admitted.size() && cap > 0; i0 += workers) {
        std::vector<std::jthread> pool;
        for (std::size_t i = i0; i < std::min(admitted.size(), i0 + workers); ++i) {
          pool.emplace_back([&, i] {
            Objective f = make_objective();
            out[i] = run_one(admitted[i], f, cap);
          });
        }
      }
      for (std::size_t i = 0; i < admitted.size() && cap > 0; ++i) {
        const std::size_t idx = admitted[i];
        points[idx].started = true;
        evaluations += out[i].evaluations;
        result.runs.push_back(LocalRunRecord{batch, radius, points[idx].x, points[idx].value,
                                             out[i].params, out[i].value, out[i].evaluations});
        run_ends.emplace_back(out[i].params, out[i].value);
        consider(out[i].params, out[i].value);
      }
    }
    radius *= config.radius_decay;
  }

  result.samples = static_cast<int>(points.size());
  result.evaluations = static_cast<int>(std::min<std::int64_t>(
      evaluations, std::numeric_limits<int>::max()));
  result.converged = result.value < tol;
  if (result.params.empty()) result.params.assign(n, 0.0);
  return result;
}

MultistartResult multistart_minimize(const CircuitStructure& structure,
                                     const UnitaryMatrix& target, const MultistartConfig& config,
                                     double tol, const std::vector<std::vector<double>>& seeds) {
  ObjectiveFactory factory = [&structure, &target]() -> Objective {
    auto eval = std::make_shared<CircuitEvaluator>(structure, target);
    return [eval](std::span<const double> x, std::span<double> g) {
      return eval->value_and_gradient(x, g);
    };
  };
  return multistart_minimize(factory, structure.param_count(), config, tol, seeds);
}

}  // namespace qsyn
