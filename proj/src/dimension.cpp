#include "uclab/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include <boost/multiprecision/cpp_int.hpp>

#include "uclab/error.hpp"

namespace uclab {

double alpha_from_delta0(double delta0) {
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw OutOfRangeError("delta0 must lie in (0, 1)");
  return delta0 / (3.0 - 2.0 * delta0);
}

double eps0_from_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw OutOfRangeError("alpha must lie in (0, 1)");
  return std::exp2(alpha / (1.0 - alpha)) - 1.0;
}

double rate_z(double beta, double delta0) {
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw OutOfRangeError("delta0 must lie in (0, 1)");
  if (beta < 0.0 || beta >= 1.0) throw OutOfRangeError("beta must lie in [0, 1)");
  if (beta == 0.0) return 1.0 - delta0;
  return std::exp(beta * std::log(delta0) + (1.0 - beta) * std::log1p(-delta0) - beta * std::log(beta) -
                  (1.0 - beta) * std::log1p(-beta));
}

double CombinatorialParams::M() const { return std::exp2(static_cast<double>((d - 1) * K)); }

void CombinatorialParams::validate() const {
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw ConfigError("delta0 must lie in (0, 1)");
  if (d != 2 && d != 3) throw ConfigError("dimension must be 2 or 3");
  if (K < 1) throw ConfigError("K must be at least 1");
  if (!(n0 > 1.0)) throw ConfigError("N0 must exceed 1");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (!(eps < eps0())) throw ConfigError("eps must be below eps0(alpha)");
}

double binomial_cdf(int j, long long k_max, double delta0) {
  if (j < 0) throw OutOfRangeError("j must be nonnegative");
  if (k_max < 0) return 0.0;
  if (k_max >= j) return 1.0;
  const double lp = std::log(delta0), lq = std::log1p(-delta0);
  const double lj = std::lgamma(j + 1.0);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(k_max + 1));
  double top = -std::numeric_limits<double>::infinity();
  for (long long i = 0; i <= k_max; ++i) {
    const double di = static_cast<double>(i);
    const double t = lj - std::lgamma(di + 1.0) - std::lgamma(j - di + 1.0) + di * lp + (j - di) * lq;
    terms.push_back(t);
    top = std::max(top, t);
  }
  double s = 0.0;
  for (double t : terms) s += std::exp(t - top);
  return std::min(1.0, std::exp(top + std::log(s)));
}

double binomial_tail_exact(int j, double beta, double delta0) {
  if (j < 1) throw OutOfRangeError("j must be at least 1");
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw OutOfRangeError("delta0 must lie in (0, 1)");
  if (beta >= 1.0) return 1.0;
  if (beta < 0.0) return 0.0;
  // floor(j beta) with a relative guard against representation error in beta.
  const long long k = static_cast<long long>(std::floor(j * beta * (1.0 + 1e-12)));
  return binomial_cdf(j, k, delta0);
}

TailBound binomial_tail_bound(int j, double beta, double delta0) {
  if (j < 1) throw OutOfRangeError("j must be at least 1");
  if (!(beta > 0.0 && beta < 1.0)) throw OutOfRangeError("beta must lie in (0, 1)");
  TailBound t;
  t.bound = 2.0 / std::sqrt(2.0 * M_PI * j * beta * (1.0 - beta)) * std::pow(rate_z(beta, delta0), j);
  t.exact = binomial_tail_exact(j, beta, delta0);
  t.ratio = t.exact / t.bound;
  const double q = delta0 / (1.0 - delta0) * (1.0 - beta) / beta;
  t.regime_ok = beta < delta0 && q > 2.0 && q < 4.0;
  return t;
}

RatioInequalityReport ratio_inequality_exact(int j_max, long long p, long long q) {
  using boost::multiprecision::cpp_int;
  if (!(p > 0 && q > p)) throw OutOfRangeError("beta = p/q must lie in (0, 1)");
  RatioInequalityReport rep;
  for (int j = 1; j <= j_max; ++j) {
    const long long k_max = static_cast<long long>(j) * p / q;
    cpp_int prev = 1;  // C(j, 0)
    for (long long k = 1; k <= k_max; ++k) {
      const cpp_int cur = prev * (j - k + 1) / k;
      ++rep.checked;
      if (!(prev * (q - p) < cur * p)) {
        rep.holds = false;
        if (rep.fail_j < 0) {
          rep.fail_j = j;
          rep.fail_k = static_cast<int>(k);
        }
      }
      prev = cur;
    }
  }
  return rep;
}

double dimension_bound(const CombinatorialParams& params) {
  const double log_m = std::log(params.M());
  return (params.d - 1) * (log_m + std::log(rate_z(params.alpha(), params.delta0))) / log_m;
}

SimulationReport branching_simulate(const CombinatorialParams& params, const SimulationOptions& options) {
  if (!(params.delta0 > 0.0 && params.delta0 < 1.0)) throw ConfigError("delta0 must lie in (0, 1)");
  if (options.trials < 1) throw ConfigError("trials must be at least 1");
  if (options.depth < 1 || options.depth * (params.d - 1) * params.K > 40)
    throw ConfigError("depth (d-1) K must lie in [1, 40]");
  if (!(options.root_ratio >= 1.0)) throw ConfigError("root ratio must be at least 1");
  const double m = params.M();
  const auto mm = static_cast<std::uint64_t>(m);
  const double raw = params.delta0 * m;
  const auto good = static_cast<std::uint64_t>(options.mode == GoodMode::Ceil ? std::ceil(raw - 1e-9 * m)
                                                                                : std::floor(raw + 1e-9 * m));
  const double alpha = params.alpha();
  const double log2_ratio = std::log2(options.root_ratio);
  auto threshold = [&](int j) { return alpha + log2_ratio / j; };

  SimulationReport rep;
  rep.good_children = static_cast<int>(good);
  std::vector<long long> alive(static_cast<std::size_t>(options.depth + 1), 0);
  for (int trial = 0; trial < options.trials; ++trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::uint64_t> child(0, mm - 1);
    long long goods = 0;
    for (int j = 1; j <= options.depth; ++j) {
      // Children are exchangeable, so labelling the good subset 0..good-1
      // and choosing the path child uniformly gives the same law.
      if (child(rng) < good) ++goods;
      if (!(static_cast<double>(goods) / j < threshold(j))) break;
      ++alive[static_cast<std::size_t>(j)];
    }
  }
  const double p_good = static_cast<double>(good) / m;
  std::vector<double> sides, counts;
  for (int j = 1; j <= options.depth; ++j) {
    SimulationDepth sd;
    sd.depth = j;
    sd.fraction = static_cast<double>(alive[static_cast<std::size_t>(j)]) / options.trials;
    sd.survivors = std::pow(m, j) * sd.fraction;
    long long k_max = -1;
    for (long long k = 0; k <= j; ++k)
      if (static_cast<double>(k) / j < threshold(j)) k_max = k;
    if (p_good >= 1.0)
      sd.exact_tail = k_max >= j ? 1.0 : 0.0;
    else if (p_good <= 0.0)
      sd.exact_tail = k_max >= 0 ? 1.0 : 0.0;
    else
      sd.exact_tail = binomial_cdf(j, k_max, p_good);
    sd.sigma = std::sqrt(sd.exact_tail * (1.0 - sd.exact_tail) / options.trials);
    sd.within_3sigma = std::abs(sd.fraction - sd.exact_tail) <= std::max(3.0 * sd.sigma, 1e-15);
    const double beta = threshold(j);
    sd.stirling_bound = beta > 0.0 && beta < 1.0 && p_good > 0.0 && p_good < 1.0
                            ? binomial_tail_bound(j, beta, p_good).bound
                            : std::numeric_limits<double>::quiet_NaN();
    rep.depths.push_back(sd);
    if (sd.survivors > 0.0) {
      sides.push_back(std::exp2(-static_cast<double>(j * params.K)));
      counts.push_back(sd.survivors);
    }
  }
  rep.slope = sides.size() >= 2 ? fit_box_counts(sides, counts).slope : 0.0;
  rep.bound = dimension_bound(params);
  return rep;
}

BoxCountReport fit_box_counts(std::vector<double> sides, std::vector<double> counts) {
  BoxCountReport rep;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (counts[i] <= 0.0) continue;
    xs.push_back(-std::log(sides[i]));
    ys.push_back(std::log(counts[i]));
  }
  rep.sides = std::move(sides);
  rep.counts = std::move(counts);
  if (xs.size() < 2) throw CoverageError("box counting needs at least two nonempty scales");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw CoverageError("box counting needs at least two distinct scales");
  rep.slope = sxy / sxx;
  rep.intercept = my - rep.slope * mx;
  return rep;
}

BoxCountReport box_count_cells(const std::vector<std::array<long long, 2>>& cells, int m, int base, int finest,
                               const std::vector<int>& levels) {
  if (m < 1 || m > 2) throw OutOfRangeError("cell sets live in dimension 1 or 2");
  if (base < 2) throw OutOfRangeError("base must be at least 2");
  std::vector<double> sides, counts;
  for (int level : levels) {
    if (level < 0 || level > finest) throw OutOfRangeError("level outside [0, finest]");
    long long div = 1;
    for (int i = level; i < finest; ++i) div *= base;
    std::set<std::array<long long, 2>> boxes;
    for (const auto& c : cells) boxes.insert({c[0] / div, m == 2 ? c[1] / div : 0});
    sides.push_back(std::pow(static_cast<double>(base), -level));
    counts.push_back(static_cast<double>(boxes.size()));
  }
  return fit_box_counts(sides, counts);
}

BoxCountReport box_count_points(const std::vector<Vec>& points, int m, const Vec& origin,
                                const std::vector<double>& sides) {
  if (m < 1 || m > 3) throw OutOfRangeError("point sets live in dimension 1 to 3");
  std::vector<double> counts;
  for (double s : sides) {
    if (!(s > 0.0)) throw OutOfRangeError("box side must be positive");
    std::set<std::array<long long, 3>> boxes;
    for (const Vec& p : points) {
      std::array<long long, 3> key{0, 0, 0};
      for (int i = 0; i < m; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        key[ui] = static_cast<long long>(std::floor((p[ui] - origin[ui]) / s));
      }
      boxes.insert(key);
    }
    counts.push_back(static_cast<double>(boxes.size()));
  }
  return fit_box_counts(sides, counts);
}

TreeIndexState modified_index_recursion(const WhitneyTree& tree, const std::vector<NodeData>& data,
                                        const CombinatorialParams& params) {
  if (data.size() != tree.nodes.size()) throw ConfigError("node data must cover every tree node");
  if (params.K < 1) throw ConfigError("K must be at least 1");
  const std::size_t n = tree.nodes.size();
  TreeIndexState st;
  st.n_prime.assign(n, std::numeric_limits<double>::quiet_NaN());
  st.good.assign(n, 0);
  st.case_a.assign(n, 0);
  st.survivor.assign(n, 0);
  st.goodness.assign(n, 0.0);
  std::vector<int> goods(n, 0);
  std::vector<std::uint8_t> pure_a(n, 0);  // every step on the path was case (a)

  auto base_value = [&](int id) {
    const NodeData& nd = data[static_cast<std::size_t>(id)];
    if (!nd.has_n) {
      ++st.undetermined;
      return params.n0 / 2.0;
    }
    return std::max(nd.n, params.n0 / 2.0);
  };
  auto translate_definite = [&](int id) {
    const Verdict v = data[static_cast<std::size_t>(id)].translate;
    if (v == Verdict::Undetermined) ++st.undetermined;
    return definite(v);
  };

  st.root_value = base_value(0);
  st.n_prime[0] = st.root_value;
  st.case_a[0] = translate_definite(0) ? 1 : 0;
  pure_a[0] = 1;
  st.survivor[0] = 1;
  st.steps.push_back({0});
  const double alpha = params.alpha();
  const double log2_ratio = std::log2(2.0 * st.root_value / params.n0);

  for (int j = 1; j * params.K <= tree.depth; ++j) {
    std::vector<int> next;
    for (int q : st.steps.back()) {
      const auto uq = static_cast<std::size_t>(q);
      std::vector<int> ch = descendants(tree, q, params.K);
      const double parent = st.n_prime[uq];
      if (st.case_a[uq]) {
        std::stable_sort(ch.begin(), ch.end(), [&](int a, int b) {
          const NodeData& da = data[static_cast<std::size_t>(a)];
          const NodeData& db = data[static_cast<std::size_t>(b)];
          const double va = da.has_n ? da.n : std::numeric_limits<double>::infinity();
          const double vb = db.has_n ? db.n : std::numeric_limits<double>::infinity();
          return va < vb;
        });
        const auto halves = static_cast<std::size_t>(std::floor(params.delta0 * static_cast<double>(ch.size()) + 1e-9));
        for (std::size_t i = 0; i < ch.size(); ++i) {
          const auto uc = static_cast<std::size_t>(ch[i]);
          st.good[uc] = i < halves ? 1 : 0;
          st.n_prime[uc] = i < halves ? parent / 2.0 : (1.0 + params.eps) * parent;
          st.case_a[uc] = 1;
        }
      } else {
        for (int c : ch) {
          const auto uc = static_cast<std::size_t>(c);
          const bool sd = translate_definite(c);
          st.good[uc] = sd ? 1 : 0;
          st.n_prime[uc] = sd ? parent / 2.0 : base_value(c);
          st.case_a[uc] = sd ? 1 : 0;
        }
      }
      for (int c : ch) {
        const auto uc = static_cast<std::size_t>(c);
        goods[uc] = goods[uq] + st.good[uc];
        st.goodness[uc] = static_cast<double>(goods[uc]) / j;
        const double bar = alpha + log2_ratio / j;
        st.survivor[uc] = st.survivor[uq] && st.goodness[uc] < bar ? 1 : 0;
        pure_a[uc] = pure_a[uq] && st.case_a[uq] ? 1 : 0;
        if (pure_a[uc] && st.goodness[uc] >= bar) {
          ++st.audit_checked;
          if (!(st.n_prime[uc] < params.n0 / 2.0)) ++st.audit_failures;
        }
      }
      next.insert(next.end(), ch.begin(), ch.end());
    }
    st.steps.push_back(std::move(next));
  }
  return st;
}

BoxCountReport survivor_dimension(const WhitneyTree& tree, const TreeIndexState& state, int K) {
  std::vector<double> sides, counts;
  const double side = tree.root().q.side;
  for (std::size_t j = 0; j < state.steps.size(); ++j) {
    double c = 0.0;
    for (int id : state.steps[j]) c += state.survivor[static_cast<std::size_t>(id)];
    sides.push_back(side * std::exp2(-static_cast<double>(j) * K));
    counts.push_back(c);
  }
  return fit_box_counts(sides, counts);
}

}  // namespace uclab
