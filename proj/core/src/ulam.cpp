#include "acim/ulam.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "acim/common.hpp"
#include "acim/ergodics.hpp"
#include "acim/io.hpp"
#include "acim/iterate.hpp"
#include "acim/rng.hpp"
#include "acim/transfer.hpp"

namespace acim {

namespace {

double l1(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double vsum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Depth at which every unmaterialized branch fits inside a single bin, so the
// tail can be filled in closed form. Only meaningful for full-affine tails.
std::size_t tail_fits_bin_depth(const PiecewiseMap& map, std::size_t bins, bool& fits) {
  const double n = static_cast<double>(bins);
  auto fit = [&](std::size_t k) {
    auto [lo, hi] = map.tail_hull(k);
    if (!(hi > lo)) return true;
    double j = std::floor(lo * n);
    return hi <= (j + 1.0) / n && lo >= j / n;
  };
  std::size_t a = 1;
  if (fit(a)) {
    fits = true;
    map.ensure_count(a);
    return a;
  }
  std::size_t cap = std::min(kPreimageCap, map.tail()->max_index);
  std::size_t b = 16;
  while (b < cap && !fit(b)) {
    a = b;
    b *= 2;
  }
  b = std::min(b, cap);
  if (!fit(b)) {
    fits = false;
    map.ensure_count(b);
    return b;
  }
  while (a + 1 < b) {
    std::size_t mid = a + (b - a) / 2;
    if (fit(mid)) b = mid; else a = mid;
  }
  fits = true;
  // The found depth, not the stored count: the map may already be materialized
  // far deeper, and walking those extra branches would blow up the entry count.
  map.ensure_count(b);
  return b;
}

}  // namespace

double UlamMatrix::row_sum(std::size_t j) const {
  double s = 0.0;
  for (const auto& [k, w] : rows[j]) s += w;
  return s;
}

void UlamMatrix::apply_left(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(bins, 0.0);
  for (std::size_t j = 0; j < bins; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    for (const auto& [k, w] : rows[j]) y[k] += xj * w;
  }
}

void UlamMatrix::apply_right(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(bins, 0.0);
  for (std::size_t j = 0; j < bins; ++j) {
    double s = 0.0;
    for (const auto& [k, w] : rows[j]) s += w * x[k];
    y[j] = s;
  }
}

double UlamMatrix::max_defect() const {
  double d = 0.0;
  for (double x : row_defect) d = std::max(d, x);
  return d;
}

UlamMatrix build_ulam(const PiecewiseMap& map, std::size_t bins, double tail_tol) {
  if (bins < 2) fail(errc::bad_config, "bin count must be at least 2");
  const double n = static_cast<double>(bins);

  bool tail_fits = false;
  std::size_t n_eff;
  if (map.finite()) {
    n_eff = map.stored_count();
  } else if (map.tail_full_affine() && map.tail()->generator) {
    n_eff = tail_fits_bin_depth(map, bins, tail_fits);
  } else {
    n_eff = map.ensure_slope_sum(tail_tol, kPreimageCap);
    if (!map.finite() && map.tail_full_affine()) {
      auto [lo, hi] = map.tail_hull(n_eff);
      double j = std::floor(lo * n);
      tail_fits = !(hi > lo) || (hi <= (j + 1.0) / n && lo >= j / n);
    }
  }
  if (n_eff > 0 && n_eff * bins > std::size_t{50'000'000})
    fail(errc::truncation_overflow, "ulam matrix would exceed the entry cap");

  UlamMatrix out;
  out.bins = bins;
  out.rows.assign(bins, {});

  for (std::size_t i = 1; i <= n_eff; ++i) {
    Branch br = map.branch(i);
    const double a = br.a(), b = br.b();
    auto j0 = static_cast<std::size_t>(std::clamp(std::floor(a * n), 0.0, n - 1.0));
    for (std::size_t j = j0; j < bins && static_cast<double>(j) / n < b; ++j) {
      const double x0 = std::max(a, static_cast<double>(j) / n);
      const double x1 = std::min(b, static_cast<double>(j + 1) / n);
      if (!(x1 > x0)) continue;
      const double y0 = x0 <= a ? br.image_left() : br.value(x0);
      const double y1 = x1 >= b ? br.image_right() : br.value(x1);
      if (!(y1 > y0)) continue;
      auto k0 = static_cast<std::size_t>(std::clamp(std::floor(y0 * n), 0.0, n - 1.0));
      double x_prev = x0;
      for (std::size_t k = k0; k < bins && static_cast<double>(k) / n < y1; ++k) {
        const double yhi = std::min(y1, static_cast<double>(k + 1) / n);
        const double x_next =
            yhi >= y1 ? x1 : std::clamp(br.inverse(yhi), x0, x1);
        const double w = (x_next - x_prev) * n;
        if (w > 0.0) out.rows[j].emplace_back(static_cast<std::uint32_t>(k), w);
        x_prev = x_next;
      }
    }
  }

  if (!map.finite() && map.tail_full_affine() && tail_fits) {
    const double tl = map.tail_length(n_eff);
    if (tl > 0.0) {
      auto [lo, hi] = map.tail_hull(n_eff);
      auto j = static_cast<std::size_t>(std::clamp(std::floor(lo * n), 0.0, n - 1.0));
      (void)hi;
      // Affine branches onto [0,1) spread their bin's tail mass uniformly.
      for (std::size_t k = 0; k < bins; ++k)
        out.rows[j].emplace_back(static_cast<std::uint32_t>(k), tl);
    }
  }

  for (auto& row : out.rows) {
    std::sort(row.begin(), row.end(),
              [](const auto& p, const auto& q) { return p.first < q.first; });
    std::size_t w = 0;
    for (std::size_t r = 0; r < row.size(); ++r) {
      if (w > 0 && row[w - 1].first == row[r].first) {
        row[w - 1].second += row[r].second;
      } else {
        row[w++] = row[r];
      }
    }
    row.resize(w);
  }

  out.row_defect.resize(bins);
  for (std::size_t j = 0; j < bins; ++j) out.row_defect[j] = 1.0 - out.row_sum(j);
  return out;
}

PowerResult invariant_masses(const UlamMatrix& m, double tol, std::size_t max_iter) {
  PowerResult out;
  const std::size_t n = m.bins;
  std::vector<double> x(n, 1.0 / static_cast<double>(n)), y;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    m.apply_left(x, y);
    double s = vsum(y);
    if (!(s > 0.0)) {
      out.iterations = it;
      break;
    }
    for (double& v : y) v /= s;
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += std::abs(y[j] - x[j]);
    x.swap(y);
    out.iterations = it;
    out.residual = r;
    if (r <= tol) {
      out.converged = true;
      break;
    }
  }
  out.masses = std::move(x);
  return out;
}

StepFunction masses_to_density(const std::vector<double>& masses) {
  const std::size_t n = masses.size();
  std::vector<double> t(n + 1), v(n);
  for (std::size_t j = 0; j <= n; ++j) t[j] = static_cast<double>(j) / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = masses[j] * static_cast<double>(n);
  return StepFunction(std::move(t), std::move(v));
}

EigenEstimate second_eigenvalue(const UlamMatrix& m, const std::vector<double>& pi,
                                double tol, std::size_t max_iter, std::uint64_t seed) {
  EigenEstimate out;
  const std::size_t n = m.bins;
  Rng rng(seed, 0x5eedu);
  std::vector<double> w(n), y;
  for (double& v : w) v = rng.uniform() - 0.5;
  auto deflate = [&](std::vector<double>& v) {
    double s = vsum(v);
    for (std::size_t j = 0; j < n; ++j) v[j] -= s * pi[j];
  };
  auto reinit = [&] {
    for (double& v : w) v = rng.uniform() - 0.5;
    deflate(w);
    double norm = l1(w);
    if (!(norm > 0.0)) return false;
    for (double& v : w) v /= norm;
    return true;
  };
  if (!reinit()) return out;

  int collapses = 0;
  double prev_ratio = 0.0, prev_est = -1.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    m.apply_left(w, y);
    deflate(y);
    double r = l1(y);
    out.iterations = it;
    if (r <= 1e-13) {
      // One annihilated iterate can be incidental; a second independent start
      // collapsing as well certifies a nilpotent complement.
      if (++collapses >= 2) {
        // The complement is (numerically) nilpotent: no subdominant direction.
        out.lambda2_abs = 0.0;
        out.residual = 0.0;
        out.converged = true;
        return out;
      }
      if (!reinit()) return out;
      prev_ratio = 0.0;
      prev_est = -1.0;
      continue;
    }
    for (double& v : y) v /= r;
    w.swap(y);
    if (prev_ratio > 0.0) {
      double est = std::sqrt(r * prev_ratio);
      out.lambda2_abs = est;
      if (prev_est >= 0.0) {
        out.residual = std::abs(est - prev_est);
        if (out.residual <= tol * std::max(est, 1e-12)) {
          out.converged = true;
          return out;
        }
      }
      prev_est = est;
    }
    prev_ratio = r;
  }
  return out;
}

GapProbe spectral_gap_probe(const UlamMatrix& m, std::size_t n_max, std::uint64_t seed,
                            std::size_t n_random) {
  GapProbe out;
  const std::size_t n = m.bins;
  std::vector<std::vector<double>> family;
  Rng rng(seed, 0x6a9u);
  for (std::size_t f = 0; f < n_random; ++f) {
    std::vector<double> u(n);
    for (double& v : u) v = rng.uniform() - 0.5;
    family.push_back(std::move(u));
  }
  for (std::size_t period : {std::size_t{1}, std::size_t{2}, std::size_t{4}}) {
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = ((j / period) % 2 == 0) ? 1.0 : -1.0;
    family.push_back(std::move(u));
  }
  {
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = 2.0 * static_cast<double>(j) / n - 1.0;
    family.push_back(std::move(u));
  }
  for (auto& u : family) {
    double s = vsum(u) / static_cast<double>(n);
    for (double& v : u) v -= s;  // zero-sum: no overlap with the fixed direction
    double norm = l1(u);
    if (norm > 0.0)
      for (double& v : u) v /= norm;
  }

  out.envelope.assign(n_max + 1, 0.0);
  out.envelope[0] = 1.0;
  std::vector<double> y;
  bool hit_floor = false;
  for (std::size_t step = 1; step <= n_max; ++step) {
    double mx = 0.0;
    for (auto& u : family) {
      m.apply_left(u, y);
      u.swap(y);
      // keep rounding from reseeding the fixed direction
      double drift = vsum(u) / static_cast<double>(n);
      for (double& v : u) v -= drift;
      mx = std::max(mx, l1(u));
    }
    out.envelope[step] = mx;
    if (mx <= 1e-14) hit_floor = true;
  }

  if (hit_floor) {
    // The whole family was annihilated within the window, either by a
    // nilpotent complement or by decay too fast to resolve: the measurable
    // rate is 0, and a log-linear fit would only see the transient.
    out.q_fit = 0.0;
    out.H_fit = out.envelope[1];
    out.degenerate = true;
    return out;
  }
  DecayFit fit = fit_decay(out.envelope, 1, n_max);
  out.q_fit = fit.q;
  out.H_fit = fit.H;
  out.degenerate = fit.degenerate;
  return out;
}

SpectralReport spectral_report(const PiecewiseMap& map, std::size_t bins, double tol,
                               std::size_t max_iter, double tail_tol, std::uint64_t seed) {
  UlamMatrix m = build_ulam(map, bins, tail_tol);
  PowerResult pr = invariant_masses(m, tol, max_iter);
  EigenEstimate ee = second_eigenvalue(m, pr.masses, std::max(tol, 1e-10), max_iter, seed);
  GapProbe gp = spectral_gap_probe(m, 12, seed + 7, 8);

  SpectralReport out;
  out.density = masses_to_density(pr.masses);
  out.lambda2_abs = ee.lambda2_abs;
  out.q_fit = gp.q_fit;
  out.H_fit = gp.H_fit;
  out.iterations = pr.iterations;
  out.residual = pr.residual;
  out.converged = pr.converged && ee.converged;
  out.degenerate_fit = gp.degenerate;
  out.max_defect = m.max_defect();
  return out;
}

LyProbeReport ly_probe(const PiecewiseMap& map, std::size_t n, std::size_t n_random,
                       double tail_tol, std::uint64_t seed) {
  LyProbeReport out;
  out.n = n;

  std::vector<StepFunction> family;
  constexpr std::size_t kGrid = 16;
  Rng rng(seed, 0x17u);
  for (std::size_t f = 0; f < n_random; ++f) {
    std::vector<double> t(kGrid + 1), v(kGrid);
    for (std::size_t j = 0; j <= kGrid; ++j) t[j] = static_cast<double>(j) / kGrid;
    for (double& x : v) x = rng.uniform();
    family.emplace_back(std::move(t), std::move(v));
  }
  for (std::size_t j = 1; j < kGrid; ++j)
    family.push_back(StepFunction::indicator(0.0, static_cast<double>(j) / kGrid));
  {
    std::vector<double> t(kGrid + 1), v(kGrid);
    for (std::size_t j = 0; j <= kGrid; ++j) t[j] = static_cast<double>(j) / kGrid;
    for (std::size_t j = 0; j < kGrid; ++j) v[j] = (j % 2 == 0) ? 1.0 : 0.0;
    family.emplace_back(std::move(t), std::move(v));
  }
  family.push_back(StepFunction::constant(1.0));
  out.family_size = family.size();

  double best_b = -1.0;
  for (const auto& f : family) {
    StepFunction g = f;
    for (std::size_t step = 0; step < n; ++step) g = fp_step(map, g, tail_tol).density;
    const double vf = variation(f), vg = variation(g);
    const double l1f = f.abs_integral();
    if (!(l1f > 0.0)) continue;
    const double b = (vg - 0.5 * vf) / l1f;
    if (b > best_b) {
      best_b = b;
      out.worst = f;
      out.worst_ratio = vf > 0.0 ? vg / vf : 0.0;
    }
  }
  out.B_n_est = std::max(0.0, best_b);
  out.C_est = 0.5 + out.B_n_est;

  SlopeCertificate cert = min_slope_certificate(map, 2.0, std::max<std::size_t>(n, 1));
  out.expansion_certified = cert.found && n >= cert.n;
  return out;
}

void export_matrix(const UlamMatrix& m, std::ostream& os) {
  for (std::size_t j = 0; j < m.bins; ++j)
    for (const auto& [k, w] : m.rows[j])
      os << j << ' ' << k << ' ' << g17(w) << '\n';
}

}  // namespace acim
