#pragma once

// Monte-Carlo integration of graph weights over gauge-fixed configuration
// spaces, plus the append-only weight cache.  A weight is the integral of the
// product of edge 1-forms over the quotient by translations and dilations,
// sampled on an explicit slice: one tangent per slice coordinate, the edge
// rows assembled into a determinant, and the slice orientation compared
// against translation, dilation, and the ambient coordinate order.

#include "bimod/geometry.hpp"
#include "bimod/graphs.hpp"
#include "bimod/splitting.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace bimod {

// Gauge section: one axis point pinned to the origin and, when a second axis
// point exists, another pinned at unit distance.  With fewer axis points the
// scale is fixed through the first half-plane point instead.
struct Gauge {
  int zero_slot = -1;   // -1 picks the marked point when present, else the left end
  int scale_slot = -1;  // -1 picks the end farthest from the zero pin
};

struct WeightOptions {
  int workers = 1;
  Gauge gauge;
  std::optional<std::vector<PropagatorKind>> kinds;  // per edge, sorted edge order
  double singular_threshold = 1e-3;
};

struct WeightEstimate {
  double value = 0;
  double std_err = 0;
  long samples = 0;
  std::uint64_t seed = 0;
  enum class Method { MonteCarlo, Exact } method = Method::MonteCarlo;
  double singular_rate = 0;
  bool flagged = false;
};

// The propagator kind an edge carries when the splitting leaves no choice:
// loops carry the divergence form, axis-to-axis edges the mixed color of
// their side, edges at the marked point its single surviving color.  Other
// edges admit one color per nonzero index class; if more than one distinct
// kind survives the weight is not a single integral and the caller must pass
// kinds explicitly.
inline PropagatorKind derive_kind(const AdmissibleGraph& g, const Splitting& split,
                                  std::pair<int, int> e) {
  if (e.first == e.second) {
    if (g.special < 0) throw std::domain_error("loop weight needs a marked axis point");
    return PropagatorKind::Rho;
  }
  const bool a_axis = g.is_axis(e.first);
  const bool b_axis = g.is_axis(e.second);
  if (a_axis && b_axis) {
    if (g.special < 0) throw std::domain_error("axis edge weight needs a marked axis point");
    return (e.first < g.special) ? PropagatorKind::OmegaMP : PropagatorKind::OmegaPM;
  }
  auto nonzero = [&](Block b) { return !split.block_indices(b).empty(); };
  std::set<PropagatorKind> cand;
  if (g.special >= 0) {
    if (e.second == g.special) return PropagatorKind::OmegaPP;
    if (e.first == g.special) return PropagatorKind::OmegaMM;
    const std::pair<Block, PropagatorKind> table[] = {
        {Block::Both, PropagatorKind::OmegaPP},
        {Block::UOnly, PropagatorKind::OmegaPM},
        {Block::VOnly, PropagatorKind::OmegaMP},
        {Block::Neither, PropagatorKind::OmegaMM}};
    for (auto [b, k] : table)
      if (nonzero(b)) cand.insert(k);
  } else {
    const std::pair<Block, PropagatorKind> table_a[] = {
        {Block::Both, PropagatorKind::OmegaPlus},
        {Block::UOnly, PropagatorKind::OmegaPlus},
        {Block::VOnly, PropagatorKind::OmegaMinus},
        {Block::Neither, PropagatorKind::OmegaMinus}};
    const std::pair<Block, PropagatorKind> table_b[] = {
        {Block::Both, PropagatorKind::OmegaPlus},
        {Block::VOnly, PropagatorKind::OmegaPlus},
        {Block::UOnly, PropagatorKind::OmegaMinus},
        {Block::Neither, PropagatorKind::OmegaMinus}};
    for (auto [b, k] : table_a)
      if (nonzero(b)) cand.insert(k);
    for (auto [b, k] : table_b)
      if (nonzero(b)) cand.insert(k);
  }
  if (cand.size() == 1) return *cand.begin();
  throw std::domain_error("ambiguous propagator kind; pass kinds explicitly");
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// value with its gradient along the slice coordinates
struct Dual {
  double v = 0;
  std::vector<double> g;
  Dual() = default;
  Dual(double val, int dim) : v(val), g(static_cast<std::size_t>(dim), 0.0) {}
};

inline Dual dvar(double val, double dval, int idx, int dim) {
  Dual d(val, dim);
  d.g[static_cast<std::size_t>(idx)] = dval;
  return d;
}

inline Dual operator+(const Dual& a, const Dual& b) {
  Dual r(a.v + b.v, static_cast<int>(a.g.size()));
  for (std::size_t i = 0; i < r.g.size(); ++i) r.g[i] = a.g[i] + b.g[i];
  return r;
}

inline Dual operator-(const Dual& a, const Dual& b) {
  Dual r(a.v - b.v, static_cast<int>(a.g.size()));
  for (std::size_t i = 0; i < r.g.size(); ++i) r.g[i] = a.g[i] - b.g[i];
  return r;
}

inline Dual operator*(const Dual& a, const Dual& b) {
  Dual r(a.v * b.v, static_cast<int>(a.g.size()));
  for (std::size_t i = 0; i < r.g.size(); ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  return r;
}

struct Prim {
  double v, d;
};

// (0,1) -> (0,inf); the square makes a single crossing-edge factor exact
inline Prim gap_map(double u) {
  double t = std::tan(kPi * u / 2);
  double c = std::cos(kPi * u / 2);
  return {t * t, kPi * t / (c * c)};
}

// (0,1) -> (-inf,inf)
inline Prim line_map(double u) {
  double t = std::tan(kPi * (u - 0.5));
  double c = std::cos(kPi * (u - 0.5));
  return {t, kPi / (c * c)};
}

struct SliceSample {
  Configuration cfg;
  std::vector<Tangent> tang;
  int or_sign = 1;
};

inline int sign_det(std::vector<std::vector<double>>& a) {
  const int nn = static_cast<int>(a.size());
  int sgn = 1;
  for (int c = 0; c < nn; ++c) {
    int p = c;
    for (int r = c + 1; r < nn; ++r)
      if (std::fabs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) >
          std::fabs(a[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)]))
        p = r;
    double piv = a[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)];
    if (std::fabs(piv) < 1e-300) return 0;
    if (p != c) {
      std::swap(a[static_cast<std::size_t>(p)], a[static_cast<std::size_t>(c)]);
      sgn = -sgn;
    }
    if (a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)] < 0) sgn = -sgn;
    for (int r = c + 1; r < nn; ++r) {
      double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] /
                 a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
      for (int k = c; k < nn; ++k)
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] -=
            f * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
    }
  }
  return sgn;
}

inline double det_value(std::vector<std::vector<double>>& a) {
  const int nn = static_cast<int>(a.size());
  double det = 1;
  for (int c = 0; c < nn; ++c) {
    int p = c;
    for (int r = c + 1; r < nn; ++r)
      if (std::fabs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) >
          std::fabs(a[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)]))
        p = r;
    double piv = a[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)];
    if (std::fabs(piv) < 1e-300) return 0;
    if (p != c) {
      std::swap(a[static_cast<std::size_t>(p)], a[static_cast<std::size_t>(c)]);
      det = -det;
    }
    det *= a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    for (int r = c + 1; r < nn; ++r) {
      double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] /
                 a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
      for (int k = c; k < nn; ++k)
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] -=
            f * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
    }
  }
  return det;
}

inline void resolve_gauge(int m, int special_r, const Gauge& gauge, int& zero, int& scale) {
  zero = gauge.zero_slot;
  scale = gauge.scale_slot;
  if (m < 2) {
    if (zero >= 0 || scale >= 0)
      throw std::invalid_argument("explicit gauge slots need two axis points");
    return;
  }
  if (zero < 0) zero = (special_r >= 0) ? special_r : 0;
  if (zero >= m) throw std::invalid_argument("gauge zero slot out of range");
  if (scale < 0) scale = (zero == m - 1) ? 0 : m - 1;
  if (scale >= m || scale == zero) throw std::invalid_argument("gauge scale slot invalid");
}

// u in (0,1)^d -> a configuration on the slice with its tangent frame and
// the sign of (translation, dilation, frame) against the coordinate order
inline SliceSample build_slice(int n, int m, int special_r, int zero, int scale,
                               const std::vector<double>& u) {
  const int d = 2 * n + m - 2;
  SliceSample s;
  int ui = 0;
  std::vector<Dual> re(static_cast<std::size_t>(m), Dual(0, d));
  std::vector<Dual> hx(static_cast<std::size_t>(n), Dual(0, d));
  std::vector<Dual> hy(static_cast<std::size_t>(n), Dual(0, d));
  int hfree = 0;  // first half-plane point with free coordinates

  if (m >= 2) {
    const int lo = std::min(zero, scale);
    const int hi = std::max(zero, scale);
    const double lov = (zero < scale) ? 0.0 : -1.0;
    const double hiv = (zero < scale) ? 1.0 : 0.0;
    re[static_cast<std::size_t>(lo)] = Dual(lov, d);
    re[static_cast<std::size_t>(hi)] = Dual(hiv, d);
    Dual prev = re[static_cast<std::size_t>(lo)];
    for (int j = lo + 1; j < hi; ++j) {
      Dual uu = dvar(u[static_cast<std::size_t>(ui)], 1.0, ui, d);
      ++ui;
      re[static_cast<std::size_t>(j)] = prev + (Dual(hiv, d) - prev) * uu;
      prev = re[static_cast<std::size_t>(j)];
    }
    prev = re[static_cast<std::size_t>(lo)];
    for (int j = lo - 1; j >= 0; --j) {
      Prim p = gap_map(u[static_cast<std::size_t>(ui)]);
      re[static_cast<std::size_t>(j)] = prev - dvar(p.v, p.d, ui, d);
      ++ui;
      prev = re[static_cast<std::size_t>(j)];
    }
    prev = re[static_cast<std::size_t>(hi)];
    for (int j = hi + 1; j < m; ++j) {
      Prim p = gap_map(u[static_cast<std::size_t>(ui)]);
      re[static_cast<std::size_t>(j)] = prev + dvar(p.v, p.d, ui, d);
      ++ui;
      prev = re[static_cast<std::size_t>(j)];
    }
  } else if (m == 1) {
    re[0] = Dual(0, d);
    Prim px = line_map(u[static_cast<std::size_t>(ui)]);
    hx[0] = dvar(px.v, px.d, ui, d);
    ++ui;
    hy[0] = Dual(1, d);
    hfree = 1;
  } else {
    if (n == 0) throw std::invalid_argument("empty configuration");
    hx[0] = Dual(0, d);
    hy[0] = Dual(1, d);
    hfree = 1;
  }
  for (int k = hfree; k < n; ++k) {
    Prim px = line_map(u[static_cast<std::size_t>(ui)]);
    hx[static_cast<std::size_t>(k)] = dvar(px.v, px.d, ui, d);
    ++ui;
    Prim py = gap_map(u[static_cast<std::size_t>(ui)]);
    hy[static_cast<std::size_t>(k)] = dvar(py.v, py.d, ui, d);
    ++ui;
  }
  if (ui != d) throw std::logic_error("slice coordinate count mismatch");

  s.cfg.marked = special_r;
  for (int k = 0; k < n; ++k)
    s.cfg.h.emplace_back(hx[static_cast<std::size_t>(k)].v, hy[static_cast<std::size_t>(k)].v);
  for (int j = 0; j < m; ++j) s.cfg.r.push_back(re[static_cast<std::size_t>(j)].v);
  for (int q = 0; q < d; ++q) {
    Tangent t = Tangent::zero(s.cfg);
    for (int k = 0; k < n; ++k)
      t.dh[static_cast<std::size_t>(k)] = {hx[static_cast<std::size_t>(k)].g[static_cast<std::size_t>(q)],
                                           hy[static_cast<std::size_t>(k)].g[static_cast<std::size_t>(q)]};
    for (int j = 0; j < m; ++j)
      t.dr[static_cast<std::size_t>(j)] = re[static_cast<std::size_t>(j)].g[static_cast<std::size_t>(q)];
    s.tang.push_back(std::move(t));
  }

  const int full = 2 * n + m;
  std::vector<std::vector<double>> mat(static_cast<std::size_t>(full),
                                       std::vector<double>(static_cast<std::size_t>(full), 0.0));
  auto row_h = [&](int k) { return 2 * k; };
  auto row_r = [&](int j) { return 2 * n + j; };
  for (int k = 0; k < n; ++k) {
    mat[static_cast<std::size_t>(row_h(k))][0] = 1.0;
    mat[static_cast<std::size_t>(row_h(k))][1] = hx[static_cast<std::size_t>(k)].v;
    mat[static_cast<std::size_t>(row_h(k) + 1)][1] = hy[static_cast<std::size_t>(k)].v;
  }
  for (int j = 0; j < m; ++j) {
    mat[static_cast<std::size_t>(row_r(j))][0] = 1.0;
    mat[static_cast<std::size_t>(row_r(j))][1] = re[static_cast<std::size_t>(j)].v;
  }
  for (int q = 0; q < d; ++q) {
    for (int k = 0; k < n; ++k) {
      mat[static_cast<std::size_t>(row_h(k))][static_cast<std::size_t>(2 + q)] =
          hx[static_cast<std::size_t>(k)].g[static_cast<std::size_t>(q)];
      mat[static_cast<std::size_t>(row_h(k) + 1)][static_cast<std::size_t>(2 + q)] =
          hy[static_cast<std::size_t>(k)].g[static_cast<std::size_t>(q)];
    }
    for (int j = 0; j < m; ++j)
      mat[static_cast<std::size_t>(row_r(j))][static_cast<std::size_t>(2 + q)] =
          re[static_cast<std::size_t>(j)].g[static_cast<std::size_t>(q)];
  }
  s.or_sign = sign_det(mat);
  return s;
}

struct EdgePlan {
  std::pair<int, int> e;
  PropagatorKind kind;
  bool crossing;  // evaluate through the closed-form axis restriction
};

inline double integrand(const std::vector<EdgePlan>& plan, int n, const SliceSample& s) {
  const int d = static_cast<int>(s.tang.size());
  std::vector<std::vector<double>> rows(plan.size(),
                                        std::vector<double>(static_cast<std::size_t>(d), 0.0));
  for (std::size_t r = 0; r < plan.size(); ++r) {
    const auto& p = plan[r];
    for (int q = 0; q < d; ++q) {
      const Tangent& t = s.tang[static_cast<std::size_t>(q)];
      if (p.crossing) {
        int a = p.e.first - n, b = p.e.second - n;
        int l = std::min(a, b), rr = std::max(a, b);
        rows[r][static_cast<std::size_t>(q)] = crossing_form(
            s.cfg.r[static_cast<std::size_t>(l)], s.cfg.r[static_cast<std::size_t>(rr)],
            s.cfg.r[static_cast<std::size_t>(s.cfg.marked)], t.dr[static_cast<std::size_t>(l)],
            t.dr[static_cast<std::size_t>(rr)], t.dr[static_cast<std::size_t>(s.cfg.marked)]);
      } else {
        rows[r][static_cast<std::size_t>(q)] = propagator_form(p.kind, s.cfg, p.e, t);
      }
    }
  }
  return s.or_sign * det_value(rows);
}

struct WorkerSums {
  double s1 = 0, s2 = 0;
  long singular = 0;
};

}  // namespace detail

// Unbiased plain-MC estimate of the graph weight.  Edge forms are multiplied
// in sorted edge order, matching compile's operator order.  A dimension
// mismatch between edge count and the gauge-fixed dimension is an exact zero,
// the edgeless graph on a zero-dimensional space an exact one.
inline WeightEstimate mc_weight(const AdmissibleGraph& g, const Splitting& split,
                                long samples, std::uint64_t seed,
                                const WeightOptions& opt = {}) {
  const int d = 2 * g.n + g.m - 2;
  auto edges = g.edges;
  std::sort(edges.begin(), edges.end());

  WeightEstimate est;
  est.seed = seed;
  if (static_cast<int>(edges.size()) != d || d < 0) {
    est.method = WeightEstimate::Method::Exact;
    est.value = 0;
    return est;
  }
  if (d == 0) {
    est.method = WeightEstimate::Method::Exact;
    est.value = 1;
    return est;
  }

  if (opt.kinds && opt.kinds->size() != edges.size())
    throw std::invalid_argument("one kind per edge expected");
  std::vector<detail::EdgePlan> plan;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    detail::EdgePlan p;
    p.e = edges[i];
    if (opt.kinds) {
      p.kind = (*opt.kinds)[i];
      p.crossing = false;
    } else {
      p.kind = derive_kind(g, split, edges[i]);
      p.crossing = edges[i].first != edges[i].second && g.is_axis(edges[i].first) &&
                   g.is_axis(edges[i].second);
    }
    plan.push_back(p);
  }

  const int special_r = (g.special >= 0) ? g.special - g.n : -1;
  int zero = -1, scale = -1;
  detail::resolve_gauge(g.m, special_r, opt.gauge, zero, scale);

  const int workers = std::max(1, opt.workers);
  std::vector<detail::WorkerSums> sums(static_cast<std::size_t>(workers));
  std::vector<long> counts(static_cast<std::size_t>(workers), samples / workers);
  for (long w = 0; w < samples % workers; ++w) ++counts[static_cast<std::size_t>(w)];

  auto job = [&](int w) {
    std::mt19937_64 rng(detail::splitmix64(seed ^ (0x100000001b3ull * static_cast<std::uint64_t>(w + 1))));
    auto uni = [&]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    double s1 = 0, c1 = 0, s2 = 0, c2 = 0;
    long singular = 0;
    std::vector<double> u(static_cast<std::size_t>(d));
    for (long i = 0; i < counts[static_cast<std::size_t>(w)]; ++i) {
      for (auto& x : u) x = uni();
      double f = 0;
      try {
        auto sl = detail::build_slice(g.n, g.m, special_r, zero, scale, u);
        f = detail::integrand(plan, g.n, sl);
        if (!std::isfinite(f)) {
          f = 0;
          ++singular;
        }
      } catch (const std::domain_error&) {
        f = 0;
        ++singular;
      }
      double y1 = f - c1, t1 = s1 + y1;
      c1 = (t1 - s1) - y1;
      s1 = t1;
      double y2 = f * f - c2, t2 = s2 + y2;
      c2 = (t2 - s2) - y2;
      s2 = t2;
    }
    sums[static_cast<std::size_t>(w)] = {s1, s2, singular};
  };

  if (workers == 1) {
    job(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(job, w);
    for (auto& t : pool) t.join();
  }

  double s1 = 0, s2 = 0;
  long singular = 0;
  for (const auto& ws : sums) {
    s1 += ws.s1;
    s2 += ws.s2;
    singular += ws.singular;
  }
  const double nn = static_cast<double>(samples);
  est.value = s1 / nn;
  est.std_err = (samples > 1) ? std::sqrt(std::max(0.0, (s2 - s1 * s1 / nn) / (nn - 1)) / nn) : 0;
  est.samples = samples;
  est.singular_rate = static_cast<double>(singular) / nn;
  est.flagged = est.singular_rate > opt.singular_threshold;
  return est;
}

// ---------------------------------------------------------------------------
// Weight cache

inline std::string kinds_token(const std::vector<PropagatorKind>& kinds) {
  std::string s;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (i) s += ',';
    s += kind_name(kinds[i]);
  }
  return s;
}

// Append-only JSON-lines store keyed by (graph encoding, splitting, samples,
// seed, kinds).  An empty path keeps the cache in memory.
class WeightCache {
 public:
  WeightCache() = default;
  explicit WeightCache(std::string path) : path_(std::move(path)) { load(); }

  static std::string key(const std::string& enc, const Splitting& s, long samples,
                         std::uint64_t seed, const std::string& kinds) {
    std::ostringstream os;
    os << enc << '|' << s.d_uv << ',' << s.d_uvperp << ',' << s.d_upv << ',' << s.d_perp
       << '|' << samples << '|' << seed << '|' << kinds;
    return os.str();
  }

  std::optional<WeightEstimate> find(const std::string& enc, const Splitting& s,
                                     long samples, std::uint64_t seed,
                                     const std::string& kinds = "") const {
    auto it = map_.find(key(enc, s, samples, seed, kinds));
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  void store(const std::string& enc, const Splitting& s, const std::string& kinds,
             const WeightEstimate& w) {
    map_[key(enc, s, w.samples, w.seed, kinds)] = w;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw std::runtime_error("cannot open weight cache: " + path_);
    out << to_line(enc, s, kinds, w) << '\n';
  }

  std::size_t size() const { return map_.size(); }

  static std::string to_line(const std::string& enc, const Splitting& s,
                             const std::string& kinds, const WeightEstimate& w) {
    nlohmann::json j;
    j["graph"] = enc;
    j["split"] = {s.d_uv, s.d_uvperp, s.d_upv, s.d_perp};
    j["samples"] = w.samples;
    j["seed"] = w.seed;
    j["kinds"] = kinds;
    j["value"] = w.value;
    j["stderr"] = w.std_err;
    j["method"] = (w.method == WeightEstimate::Method::Exact) ? "exact" : "mc";
    j["singular_rate"] = w.singular_rate;
    j["flagged"] = w.flagged;
    return j.dump();
  }

 private:
  void load() {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line);
      Splitting s{j["split"][0].get<int>(), j["split"][1].get<int>(), j["split"][2].get<int>(),
                  j["split"][3].get<int>()};
      WeightEstimate w;
      w.samples = j["samples"];
      w.seed = j["seed"];
      w.value = j["value"];
      w.std_err = j["stderr"];
      w.method = (j["method"] == "exact") ? WeightEstimate::Method::Exact
                                          : WeightEstimate::Method::MonteCarlo;
      w.singular_rate = j.value("singular_rate", 0.0);
      w.flagged = j.value("flagged", false);
      map_[key(j["graph"].get<std::string>(), s, w.samples, w.seed,
               j.value("kinds", std::string()))] = w;
    }
  }

  std::string path_;
  std::map<std::string, WeightEstimate> map_;
};

// Cache-aware wrapper used by the command line and the deformation assembly.
inline WeightEstimate cached_weight(WeightCache& cache, const AdmissibleGraph& g,
                                    const Splitting& split, long samples,
                                    std::uint64_t seed, const WeightOptions& opt = {}) {
  const std::string enc = canonical_encode(g);
  const std::string kt = opt.kinds ? kinds_token(*opt.kinds) : std::string();
  if (auto hit = cache.find(enc, split, samples, seed, kt)) return *hit;
  WeightEstimate w = mc_weight(g, split, samples, seed, opt);
  cache.store(enc, split, kt, w);
  return w;
}

}  // namespace bimod
