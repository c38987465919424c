#include "acim/ergodics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "acim/common.hpp"
#include "acim/transfer.hpp"

namespace acim {

namespace {

bool has_analytic_branch(const PiecewiseMap& map) {
  if (!map.finite() && !map.tail_full_affine()) return true;
  for (std::size_t i = 1; i <= map.stored_count(); ++i)
    if (!map.branch(i).is_affine()) return true;
  return false;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

OrbitSampler::OrbitSampler(PiecewiseMap map, double x0, std::uint64_t seed,
                           std::uint64_t stream, double jitter)
    : map_(std::move(map)),
      x_(std::clamp(x0, 0.0, std::nextafter(1.0, 0.0))),
      jitter_(jitter),
      rng_(seed, stream) {}

double OrbitSampler::next() {
  double y = map_.apply(x_).value;
  if (y < -1e-9 || y > 1.0 + 1e-9)
    fail(errc::orbit_escape, "orbit left the unit interval at " + std::to_string(y));
  if (jitter_ > 0.0) y += jitter_ * (2.0 * rng_.uniform() - 1.0);
  x_ = std::clamp(y, 0.0, std::nextafter(1.0, 0.0));
  return x_;
}

CorrelationReport correlations(const PiecewiseMap& map, const StepFunction& mu,
                               const StepFunction& f, const StepFunction& g,
                               std::size_t n_max, CorrMethod method, double tail_tol,
                               std::size_t orbit_len, std::size_t burn_in,
                               std::uint64_t seed) {
  CorrelationReport out;
  out.method = method;
  out.values.assign(n_max + 1, 0.0);

  if (method == CorrMethod::exact_matrix) {
    // C_n = int g d(tau^n_*(f mu)) - int f dmu int g dmu, all integrals exact.
    const double mean_f = inner(f, mu);
    const double mean_g = inner(g, mu);
    StepFunction w = f * mu;
    out.values[0] = inner(g, w) - mean_f * mean_g;
    for (std::size_t n = 1; n <= n_max; ++n) {
      w = fp_step(map, w, tail_tol).density;
      out.values[n] = inner(g, w) - mean_f * mean_g;
    }
  } else {
    if (orbit_len <= n_max + 1) fail(errc::bad_config, "orbit shorter than the requested lag");
    OrbitSampler orbit(map, 0.3141592653589793, seed, 1);
    for (std::size_t t = 0; t < burn_in; ++t) orbit.next();
    std::vector<double> fv(orbit_len), gv(orbit_len);
    for (std::size_t t = 0; t < orbit_len; ++t) {
      double x = orbit.next();
      fv[t] = f.value_at(x);
      gv[t] = g.value_at(x);
    }
    const double mf = mean_of(fv), mg = mean_of(gv);
    constexpr std::size_t kBlocks = 32;
    double worst_se = 0.0;
    for (std::size_t n = 0; n <= n_max; ++n) {
      const std::size_t pairs = orbit_len - n;
      double total = 0.0;
      std::vector<double> block_means;
      const std::size_t block = std::max<std::size_t>(1, pairs / kBlocks);
      double bsum = 0.0;
      std::size_t bcount = 0;
      for (std::size_t t = 0; t < pairs; ++t) {
        const double p = fv[t] * gv[t + n];
        total += p;
        bsum += p;
        if (++bcount == block) {
          block_means.push_back(bsum / static_cast<double>(bcount));
          bsum = 0.0;
          bcount = 0;
        }
      }
      if (bcount > 0) block_means.push_back(bsum / static_cast<double>(bcount));
      out.values[n] = total / static_cast<double>(pairs) - mf * mg;
      if (block_means.size() >= 2) {
        const double bm = mean_of(block_means);
        double var = 0.0;
        for (double b : block_means) var += (b - bm) * (b - bm);
        var /= static_cast<double>(block_means.size() - 1);
        worst_se = std::max(worst_se, std::sqrt(var / static_cast<double>(block_means.size())));
      }
    }
    out.orbit_se = worst_se;
  }

  DecayFit fit = fit_decay(out.values, 1, n_max);
  out.q_fit = fit.q;
  out.prefactor = fit.H;
  out.fit_degenerate = fit.degenerate;
  return out;
}

DecayFit fit_decay(const std::vector<double>& values, std::size_t lo, std::size_t hi) {
  DecayFit out;
  std::vector<std::pair<double, double>> pts;
  hi = std::min(hi, values.empty() ? 0 : values.size() - 1);
  for (std::size_t n = lo; n <= hi && n < values.size(); ++n) {
    const double a = std::abs(values[n]);
    if (a > 1e-14) pts.emplace_back(static_cast<double>(n), std::log(a));
  }
  if (pts.size() < 2) {
    out.degenerate = true;
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(pts.size());
  const double denom = m * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) {
    out.degenerate = true;
    return out;
  }
  const double slope = (m * sxy - sx * sy) / denom;
  const double icept = (sy - slope * sx) / m;
  out.q = std::exp(slope);
  out.H = std::exp(icept);
  return out;
}

double birkhoff(const PiecewiseMap& map, const std::function<double(double)>& f, double x0,
                std::size_t n, std::size_t burn_in, std::uint64_t seed) {
  if (n == 0) fail(errc::bad_config, "birkhoff average needs at least one step");
  OrbitSampler orbit(map, x0, seed, 2);
  for (std::size_t t = 0; t < burn_in; ++t) orbit.next();
  double s = 0.0;
  for (std::size_t t = 0; t < n; ++t) s += f(orbit.next());
  return s / static_cast<double>(n);
}

CltReport clt_probe(const PiecewiseMap& map, const StepFunction& mu, const StepFunction& f,
                    std::size_t n, std::size_t samples, std::uint64_t seed,
                    std::size_t gk_n_max, double tail_tol) {
  if (n == 0 || samples == 0) fail(errc::bad_config, "clt probe needs n > 0 and samples > 0");
  const double mean_f = inner(f, mu);
  if (std::abs(mean_f) > 1e-6)
    fail(errc::not_centered, "observable mean under the measure is " + std::to_string(mean_f));

  CltReport out;
  out.n = n;
  out.samples = samples;
  out.sums.resize(samples);

  const double root_n = std::sqrt(static_cast<double>(n));
  for (std::size_t s = 0; s < samples; ++s) {
    Rng start(seed ^ 0x9e3779b97f4a7c15ull, s + 1);
    const double x0 = mu.quantile(start.uniform());
    OrbitSampler orbit(map, x0, seed, s + 1);
    double acc = f.value_at(orbit.x());
    for (std::size_t t = 1; t < n; ++t) acc += f.value_at(orbit.next());
    out.sums[s] = acc / root_n;
  }

  const double mean_s = mean_of(out.sums);
  double var = 0.0;
  for (double v : out.sums) var += (v - mean_s) * (v - mean_s);
  var /= static_cast<double>(samples > 1 ? samples - 1 : 1);
  out.sigma2 = var;

  if (var <= 1e-12) {
    out.degenerate = true;
    out.normal_distance = 0.0;
  } else {
    std::vector<double> sorted = out.sums;
    std::sort(sorted.begin(), sorted.end());
    const double sd = std::sqrt(var);
    const double m = static_cast<double>(samples);
    double d = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const double F = normal_cdf(sorted[i] / sd);
      d = std::max(d, std::max(F - static_cast<double>(i) / m,
                               static_cast<double>(i + 1) / m - F));
    }
    out.normal_distance = d;
  }

  const CorrMethod gk_method =
      has_analytic_branch(map) ? CorrMethod::orbit_average : CorrMethod::exact_matrix;
  CorrelationReport corr =
      correlations(map, mu, f, f, gk_n_max, gk_method, tail_tol, 200000, 1000, seed + 1);
  out.green_kubo = corr.values[0];
  for (std::size_t k = 1; k <= gk_n_max; ++k) out.green_kubo += 2.0 * corr.values[k];
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace acim
