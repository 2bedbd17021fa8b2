#pragma once

// One-forms on configuration spaces of points in the closed upper half-plane.
// The two-colored forms are exact differentials of explicit angle functions;
// the four-colored refinements are built from square roots centered at a
// marked point of the axis and extend smoothly to the compactified spaces.
// Evaluation is by exact forward-mode differentiation of the closed-form
// angle arguments; nothing here differentiates numerically.  Restrictions to
// the named boundary strata are evaluated in the strata's own coordinates;
// the codimension-two restrictions onto the axis have no printed closed form
// and are recovered as extrapolated interior limits, with the one surviving
// family fitted against the arctan form documented at crossing_form.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bimod {

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Points and tangents

// Interior points carry Im > 0; boundary-limit evaluation admits Im == 0.
struct Configuration {
  std::vector<std::complex<double>> h;  // upper half-plane points, pairwise distinct
  std::vector<double> r;                // axis points, strictly increasing
  int marked = -1;                      // index into r, required by four-colored kinds

  int slots() const { return static_cast<int>(h.size() + r.size()); }
  bool is_h(int s) const { return s >= 0 && s < static_cast<int>(h.size()); }
  int marked_slot() const { return static_cast<int>(h.size()) + marked; }

  std::complex<double> at(int s) const {
    if (s < 0 || s >= slots()) throw std::out_of_range("configuration slot");
    if (is_h(s)) return h[s];
    return {r[s - static_cast<int>(h.size())], 0.0};
  }
};

struct Tangent {
  std::vector<std::complex<double>> dh;
  std::vector<double> dr;

  static Tangent zero(const Configuration& c) {
    Tangent t;
    t.dh.assign(c.h.size(), {0.0, 0.0});
    t.dr.assign(c.r.size(), 0.0);
    return t;
  }

  std::complex<double> at(const Configuration& c, int s) const {
    if (c.is_h(s)) return dh[s];
    return {dr[s - static_cast<int>(c.h.size())], 0.0};
  }
};

inline void validate(const Configuration& c) {
  for (const auto& z : c.h)
    if (!(z.imag() >= 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::invalid_argument("half-plane point below the axis");
  for (std::size_t i = 0; i + 1 < c.r.size(); ++i)
    if (!(c.r[i] < c.r[i + 1])) throw std::invalid_argument("axis points out of order");
  if (c.marked != -1 && (c.marked < 0 || c.marked >= static_cast<int>(c.r.size())))
    throw std::invalid_argument("marked index out of range");
}

// ---------------------------------------------------------------------------
// Propagator kinds

enum class PropagatorKind { OmegaPlus, OmegaMinus, OmegaPP, OmegaPM, OmegaMP, OmegaMM, Rho };

inline const char* kind_name(PropagatorKind k) {
  switch (k) {
    case PropagatorKind::OmegaPlus: return "plus";
    case PropagatorKind::OmegaMinus: return "minus";
    case PropagatorKind::OmegaPP: return "pp";
    case PropagatorKind::OmegaPM: return "pm";
    case PropagatorKind::OmegaMP: return "mp";
    case PropagatorKind::OmegaMM: return "mm";
    case PropagatorKind::Rho: return "rho";
  }
  return "?";
}

inline PropagatorKind kind_from_name(std::string_view s) {
  if (s == "plus") return PropagatorKind::OmegaPlus;
  if (s == "minus") return PropagatorKind::OmegaMinus;
  if (s == "pp") return PropagatorKind::OmegaPP;
  if (s == "pm") return PropagatorKind::OmegaPM;
  if (s == "mp") return PropagatorKind::OmegaMP;
  if (s == "mm") return PropagatorKind::OmegaMM;
  if (s == "rho") return PropagatorKind::Rho;
  throw std::domain_error("unknown propagator kind: " + std::string(s));
}

inline bool is_four_colored(PropagatorKind k) {
  return k == PropagatorKind::OmegaPP || k == PropagatorKind::OmegaPM ||
         k == PropagatorKind::OmegaMP || k == PropagatorKind::OmegaMM;
}

// ---------------------------------------------------------------------------
// Forward-mode complex jets

namespace detail {

struct Jet {
  std::complex<double> v;  // value
  std::complex<double> d;  // directional derivative
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d + b.d}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d - b.d}; }
inline Jet jconj(const Jet& a) { return {std::conj(a.v), std::conj(a.d)}; }

// Principal branch; maps the open upper half-plane into the first quadrant.
inline Jet jsqrt(const Jet& a) {
  if (a.v == std::complex<double>(0.0, 0.0))
    throw std::domain_error("singular configuration: branch point hit");
  std::complex<double> s = std::sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}

// d arg of a product of first-order factors, as sum of log-derivatives.
// A vanishing factor means coincident points: the form is singular there.
inline double arg_form(const Jet* f, const int* expo, int count) {
  double acc = 0.0;
  for (int i = 0; i < count; ++i) {
    if (f[i].v == std::complex<double>(0.0, 0.0))
      throw std::domain_error("singular configuration: coincident points");
    acc += expo[i] * std::imag(f[i].d / f[i].v);
  }
  if (!std::isfinite(acc)) throw std::domain_error("singular configuration");
  return acc / (2.0 * kPi);
}

inline double two_colored(const Jet& z, const Jet& w) {
  Jet f[2] = {z - w, jconj(z) - w};
  int e[2] = {+1, -1};
  return arg_form(f, e, 2);
}

// Mixed four-colored forms in the square-root variables u, v.
inline double four_colored(const Jet& u, const Jet& v, bool first_plus) {
  Jet vb = jconj(v);
  if (first_plus) {  // (u-v)(u+vb) / ((u-vb)(u+v))
    Jet f[4] = {u - v, u - vb, u + vb, u + v};
    int e[4] = {+1, -1, +1, -1};
    return arg_form(f, e, 4);
  }
  Jet f[4] = {u - v, u - vb, u + vb, u + v};  // (u-v)(u-vb) / ((u+vb)(u+v))
  int e[4] = {+1, +1, -1, -1};
  return arg_form(f, e, 4);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Interior evaluation

// Evaluates the 1-form of the given kind on one tangent vector.  The edge
// names (first, second) point slots; slots [0, n) are half-plane points and
// [n, n+m) axis points.  Rho has arity one: it reads edge.first against the
// marked point and ignores edge.second.  Four-colored kinds need cfg.marked.
inline double propagator_form(PropagatorKind k, const Configuration& cfg,
                              std::pair<int, int> edge, const Tangent& tg) {
  validate(cfg);
  if (tg.dh.size() != cfg.h.size() || tg.dr.size() != cfg.r.size())
    throw std::invalid_argument("tangent does not match the configuration");
  auto jet = [&](int s) -> detail::Jet {
    return {cfg.at(s), tg.at(cfg, s)};
  };
  const bool needs_marked = is_four_colored(k) || k == PropagatorKind::Rho;
  if (needs_marked && cfg.marked < 0)
    throw std::invalid_argument("kind needs a marked axis point");
  if (edge.first < 0 || edge.first >= cfg.slots())
    throw std::out_of_range("edge slot");
  if (k != PropagatorKind::Rho && (edge.second < 0 || edge.second >= cfg.slots()))
    throw std::out_of_range("edge slot");

  detail::Jet z = jet(edge.first);
  switch (k) {
    case PropagatorKind::OmegaPlus:
    case PropagatorKind::OmegaPP:
      return detail::two_colored(z, jet(edge.second));
    case PropagatorKind::OmegaMinus:
    case PropagatorKind::OmegaMM:
      return detail::two_colored(jet(edge.second), z);
    case PropagatorKind::Rho: {
      detail::Jet x = jet(cfg.marked_slot());
      detail::Jet f[1] = {z - x};
      int e[1] = {+1};
      return detail::arg_form(f, e, 1);
    }
    case PropagatorKind::OmegaPM:
    case PropagatorKind::OmegaMP: {
      detail::Jet x = jet(cfg.marked_slot());
      detail::Jet u = detail::jsqrt(z - x);
      detail::Jet v = detail::jsqrt(jet(edge.second) - x);
      return detail::four_colored(u, v, k == PropagatorKind::OmegaPM);
    }
  }
  throw std::logic_error("unhandled propagator kind");
}

// ---------------------------------------------------------------------------
// The crossing form

// Common smooth limit of the two mixed four-colored forms on the strata where
// the endpoints sit on the axis on opposite sides of the marked point x
// (axis source on the right for the first-plus kind, on the left for the
// other).  Derived by extrapolating the interior forms onto those strata and
// cross-checked against that limit in the tests:
//
//     -(2/pi) d atan( sqrt( (x - l) / (r - x) ) ),   l < x < r,
//
// l, r the endpoint positions left and right of x.  Integrating over the
// moduli of one crossing edge and three axis points gives exactly +1.
inline double crossing_form(double l, double r, double x, double dl, double dr,
                            double dx) {
  if (!(l < x && x < r)) throw std::domain_error("crossing form needs l < x < r");
  double hn = x - l, hd = r - x;
  double h = hn / hd;
  double dh = ((dx - dl) * hd - hn * (dr - dx)) / (hd * hd);
  return -dh / (kPi * std::sqrt(h) * (1.0 + h));
}

// ---------------------------------------------------------------------------
// Boundary strata

// Codimension-one strata of the eye (two-colored kinds: Alpha, Beta, Gamma)
// and of the cube over the marked point (four-colored kinds: all nine), plus
// the codimension-two strata where both endpoints reach the axis, labelled
// Codim2A..Codim2J in the order: a) z left of x, w right; b) z < w < x;
// c) x < z < w; d) w < z < x; e) w left of x, z right; f) x < w < z;
// g) w at x, z right; h) z left, w at x; i) z at x, w right; j) w left,
// z at x.
enum class Stratum {
  Alpha,
  Beta,
  Gamma,
  Delta,
  Epsilon,
  Eta,
  Theta,
  Zeta,
  Xi,
  Codim2A,
  Codim2B,
  Codim2C,
  Codim2D,
  Codim2E,
  Codim2F,
  Codim2G,
  Codim2H,
  Codim2I,
  Codim2J,
};

inline const char* stratum_name(Stratum s) {
  switch (s) {
    case Stratum::Alpha: return "alpha";
    case Stratum::Beta: return "beta";
    case Stratum::Gamma: return "gamma";
    case Stratum::Delta: return "delta";
    case Stratum::Epsilon: return "epsilon";
    case Stratum::Eta: return "eta";
    case Stratum::Theta: return "theta";
    case Stratum::Zeta: return "zeta";
    case Stratum::Xi: return "xi";
    case Stratum::Codim2A: return "a";
    case Stratum::Codim2B: return "b";
    case Stratum::Codim2C: return "c";
    case Stratum::Codim2D: return "d";
    case Stratum::Codim2E: return "e";
    case Stratum::Codim2F: return "f";
    case Stratum::Codim2G: return "g";
    case Stratum::Codim2H: return "h";
    case Stratum::Codim2I: return "i";
    case Stratum::Codim2J: return "j";
  }
  return "?";
}

inline Stratum stratum_from_name(std::string_view s) {
  static const std::pair<const char*, Stratum> table[] = {
      {"alpha", Stratum::Alpha},     {"beta", Stratum::Beta},
      {"gamma", Stratum::Gamma},     {"delta", Stratum::Delta},
      {"epsilon", Stratum::Epsilon}, {"eta", Stratum::Eta},
      {"theta", Stratum::Theta},     {"zeta", Stratum::Zeta},
      {"xi", Stratum::Xi},           {"a", Stratum::Codim2A},
      {"b", Stratum::Codim2B},       {"c", Stratum::Codim2C},
      {"d", Stratum::Codim2D},       {"e", Stratum::Codim2E},
      {"f", Stratum::Codim2F},       {"g", Stratum::Codim2G},
      {"h", Stratum::Codim2H},       {"i", Stratum::Codim2I},
      {"j", Stratum::Codim2J},
  };
  for (const auto& [name, st] : table)
    if (s == name) return st;
  throw std::domain_error("unknown stratum: " + std::string(s));
}

// A point of a named boundary stratum, in the stratum's own coordinates.
// Fields read per stratum:
//   Alpha:       t (angle of the collapsed pair over x), phi (direction of
//                the second point around the first).
//   Beta/Gamma (four-colored): zm, wm, the cluster seen at the blown-up
//                scale; the cluster position drops out of the restriction.
//   Beta/Gamma (two-colored): z, w with the on-axis point's position in the
//                real part of its field.
//   Delta..Xi:   z, w, x; the stratum's defining point is read as its real
//                part (Delta/Epsilon: the collapsed point sits at x and its
//                field is ignored).
//   Codim2*:     z, w carry axis positions in their real parts; for the
//                at-x cases the collapsed point's field is ignored.
struct StratumPoint {
  std::complex<double> z{0.0, 1.0}, w{0.0, 2.0};
  double x = 0.0;
  double t = kPi / 2;
  double phi = 0.0;
  std::complex<double> zm{0.0, 1.0}, wm{1.0, 1.0};
};

struct StratumTangent {
  std::complex<double> dz{0.0, 0.0}, dw{0.0, 0.0};
  double dx = 0.0;
  double dt = 0.0;
  double dphi = 0.0;
  std::complex<double> dzm{0.0, 0.0}, dwm{0.0, 0.0};
};

namespace detail {

inline double two_colored_at(std::complex<double> z, std::complex<double> w,
                             std::complex<double> dz, std::complex<double> dw) {
  return two_colored({z, dz}, {w, dw});
}

// Interior four-colored value at a possibly on-axis (but non-coincident)
// position; the formulas stay smooth as long as neither endpoint meets x.
inline double four_colored_at(PropagatorKind k, std::complex<double> z,
                              std::complex<double> w, double x,
                              std::complex<double> dz, std::complex<double> dw,
                              double dx) {
  Jet jx{{x, 0.0}, {dx, 0.0}};
  Jet u = jsqrt(Jet{z, dz} - jx);
  Jet v = jsqrt(Jet{w, dw} - jx);
  switch (k) {
    case PropagatorKind::OmegaPP: return two_colored({z, dz}, {w, dw});
    case PropagatorKind::OmegaMM: return two_colored({w, dw}, {z, dz});
    case PropagatorKind::OmegaPM: return four_colored(u, v, true);
    case PropagatorKind::OmegaMP: return four_colored(u, v, false);
    default: break;
  }
  throw std::logic_error("not a four-colored kind");
}

// Lifts a codimension-two stratum point into the interior at height eps and
// evaluates the form on the retained tangential differentials.
// A point sitting at x is pinned there: its position and velocity follow x.
inline double codim2_interior(PropagatorKind k, Stratum s, const StratumPoint& p,
                              const StratumTangent& v, double eps) {
  double zr = p.z.real(), wr = p.w.real();
  double dz = v.dz.real(), dw = v.dw.real();
  if (s == Stratum::Codim2G || s == Stratum::Codim2H) wr = p.x, dw = v.dx;
  if (s == Stratum::Codim2I || s == Stratum::Codim2J) zr = p.x, dz = v.dx;
  std::complex<double> z{zr, eps}, w{wr, eps};
  return four_colored_at(k, z, w, p.x, {dz, 0.0}, {dw, 0.0}, v.dx);
}

inline void require_order(bool ok) {
  if (!ok) throw std::domain_error("stratum point violates the stratum's ordering");
}

inline void validate_codim2(Stratum s, const StratumPoint& p) {
  double z = p.z.real(), w = p.w.real(), x = p.x;
  switch (s) {
    case Stratum::Codim2A: require_order(z < x && x < w); break;
    case Stratum::Codim2B: require_order(z < w && w < x); break;
    case Stratum::Codim2C: require_order(x < z && z < w); break;
    case Stratum::Codim2D: require_order(w < z && z < x); break;
    case Stratum::Codim2E: require_order(w < x && x < z); break;
    case Stratum::Codim2F: require_order(x < w && w < z); break;
    case Stratum::Codim2G: require_order(x < z); break;
    case Stratum::Codim2H: require_order(z < x); break;
    case Stratum::Codim2I: require_order(x < w); break;
    case Stratum::Codim2J: require_order(w < x); break;
    default: break;
  }
}

// Polynomial extrapolation of the interior value to the axis along the
// geometric height ladder.  Near a point pinned at x the form is smooth in
// the square root of the height (the blow-up scale there), so the at-x
// strata extrapolate in sqrt(eps).
inline double codim2_extrapolate(PropagatorKind k, Stratum s,
                                 const StratumPoint& p, const StratumTangent& v) {
  const bool at_x = s == Stratum::Codim2G || s == Stratum::Codim2H ||
                    s == Stratum::Codim2I || s == Stratum::Codim2J;
  constexpr double eps[3] = {1e-2, 1e-3, 1e-4};
  double t[3], f[3];
  for (int i = 0; i < 3; ++i) {
    double e = at_x ? eps[i] * eps[i] : eps[i];
    t[i] = eps[i];
    f[i] = codim2_interior(k, s, p, v, e);
  }
  double x01 = (t[0] * f[1] - t[1] * f[0]) / (t[0] - t[1]);
  double x12 = (t[1] * f[2] - t[2] * f[1]) / (t[1] - t[2]);
  return (t[0] * x12 - t[2] * x01) / (t[0] - t[2]);
}

// The crossing strata a) and e) carry the one nonvanishing family; the
// extrapolated limit is fitted once per kind against crossing_form and the
// coefficient cached.
inline double codim2_restriction(PropagatorKind k, Stratum s,
                                 const StratumPoint& p, const StratumTangent& v) {
  validate_codim2(s, p);
  if (s != Stratum::Codim2A && s != Stratum::Codim2E)
    return codim2_extrapolate(k, s, p, v);

  static std::map<std::pair<PropagatorKind, Stratum>, double> fit;
  static std::mutex mu;
  double coeff;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = fit.find({k, s});
    if (it == fit.end()) {
      StratumPoint ref;
      ref.x = 0.0;
      ref.z = (s == Stratum::Codim2A) ? -1.0 : 2.0;
      ref.w = (s == Stratum::Codim2A) ? 2.0 : -1.0;
      StratumTangent dv;
      dv.dz = 1.0;
      double l = std::min(ref.z.real(), ref.w.real());
      double r = std::max(ref.z.real(), ref.w.real());
      double dl = (ref.z.real() < ref.w.real()) ? 1.0 : 0.0;
      double dr = 1.0 - dl;
      double base = crossing_form(l, r, ref.x, dl, dr, 0.0);
      double c = codim2_extrapolate(k, s, ref, dv) / base;
      // second configuration guards the fit family
      StratumPoint probe;
      probe.x = 0.1;
      probe.z = (s == Stratum::Codim2A) ? -0.5 : 1.3;
      probe.w = (s == Stratum::Codim2A) ? 1.3 : -0.5;
      StratumTangent pv;
      pv.dw = 1.0;
      double pl = std::min(probe.z.real(), probe.w.real());
      double pr = std::max(probe.z.real(), probe.w.real());
      double pdl = (probe.z.real() < probe.w.real()) ? pv.dz.real() : pv.dw.real();
      double pdr = (probe.z.real() < probe.w.real()) ? pv.dw.real() : pv.dz.real();
      double want = codim2_extrapolate(k, s, probe, pv);
      double got = c * crossing_form(pl, pr, probe.x, pdl, pdr, 0.0);
      if (std::abs(want - got) > 1e-6)
        throw std::runtime_error("codim-2 limit escapes the fitted family");
      it = fit.emplace(std::make_pair(k, s), c).first;
    }
    coeff = it->second;
  }
  double z = p.z.real(), w = p.w.real();
  double l = std::min(z, w), r = std::max(z, w);
  double dl = (z < w) ? v.dz.real() : v.dw.real();
  double dr = (z < w) ? v.dw.real() : v.dz.real();
  return coeff * crossing_form(l, r, p.x, dl, dr, v.dx);
}

}  // namespace detail

// Restriction of a propagator kind to a named boundary stratum, evaluated on
// one tangent vector of the stratum.  Two-colored kinds know the eye strata
// Alpha, Beta (their first point on the axis), Gamma (second point); the
// four-colored kinds know all nine codimension-one strata over the marked
// point and the ten codimension-two axis strata.
inline double boundary_restriction(PropagatorKind k, Stratum s,
                                   const StratumPoint& p, const StratumTangent& v) {
  using PK = PropagatorKind;
  if (k == PK::Rho) throw std::domain_error("rho has no named boundary strata here");

  if (k == PK::OmegaPlus || k == PK::OmegaMinus) {
    switch (s) {
      case Stratum::Alpha:
        return v.dphi / (2.0 * kPi);
      case Stratum::Beta:  // first point on the axis
        if (k == PK::OmegaPlus) return 0.0;
        return detail::two_colored_at(p.w, {p.z.real(), 0.0}, v.dw,
                                      {v.dz.real(), 0.0});
      case Stratum::Gamma:  // second point on the axis
        if (k == PK::OmegaMinus) return 0.0;
        return detail::two_colored_at(p.z, {p.w.real(), 0.0}, v.dz,
                                      {v.dw.real(), 0.0});
      default:
        throw std::domain_error("two-colored kinds live on the eye strata only");
    }
  }

  switch (s) {
    case Stratum::Alpha:
      if (k == PK::OmegaPP || k == PK::OmegaMM) return v.dphi / (2.0 * kPi);
      return (v.dphi - v.dt) / (2.0 * kPi);
    case Stratum::Beta:  // cluster on the axis left of x
      if (k == PK::OmegaPP || k == PK::OmegaPM)
        return detail::two_colored_at(p.zm, p.wm, v.dzm, v.dwm);
      return detail::two_colored_at(p.wm, p.zm, v.dwm, v.dzm);
    case Stratum::Gamma:  // cluster on the axis right of x
      if (k == PK::OmegaPP || k == PK::OmegaMP)
        return detail::two_colored_at(p.zm, p.wm, v.dzm, v.dwm);
      return detail::two_colored_at(p.wm, p.zm, v.dwm, v.dzm);
    case Stratum::Delta:  // first point collapsed onto x
      if (k != PK::OmegaMM) return 0.0;
      return detail::two_colored_at(p.w, {p.x, 0.0}, v.dw, {v.dx, 0.0});
    case Stratum::Epsilon:  // second point collapsed onto x
      if (k != PK::OmegaPP) return 0.0;
      return detail::two_colored_at(p.z, {p.x, 0.0}, v.dz, {v.dx, 0.0});
    case Stratum::Eta:  // second point on the axis right of x
      detail::require_order(p.w.real() > p.x);
      if (k == PK::OmegaPM || k == PK::OmegaMM) return 0.0;
      return detail::four_colored_at(k, p.z, {p.w.real(), 0.0}, p.x, v.dz,
                                     {v.dw.real(), 0.0}, v.dx);
    case Stratum::Theta:  // first point on the axis right of x
      detail::require_order(p.z.real() > p.x);
      if (k == PK::OmegaPP || k == PK::OmegaMP) return 0.0;
      return detail::four_colored_at(k, {p.z.real(), 0.0}, p.w, p.x,
                                     {v.dz.real(), 0.0}, v.dw, v.dx);
    case Stratum::Zeta:  // second point on the axis left of x
      detail::require_order(p.w.real() < p.x);
      if (k == PK::OmegaMP || k == PK::OmegaMM) return 0.0;
      return detail::four_colored_at(k, p.z, {p.w.real(), 0.0}, p.x, v.dz,
                                     {v.dw.real(), 0.0}, v.dx);
    case Stratum::Xi:  // first point on the axis left of x
      detail::require_order(p.z.real() < p.x);
      if (k == PK::OmegaPP || k == PK::OmegaPM) return 0.0;
      return detail::four_colored_at(k, {p.z.real(), 0.0}, p.w, p.x,
                                     {v.dz.real(), 0.0}, v.dw, v.dx);
    default:
      return detail::codim2_restriction(k, s, p, v);
  }
}

// ---------------------------------------------------------------------------
// Orientation bookkeeping

// Sign comparing the induced orientation of a codimension-one collapse
// stratum with the product orientation of its factorization.  A cluster
// landing on the axis absorbs `absorbed` axis points starting at the 1-based
// position `first`; a cluster staying in the interior contributes -1.
struct CollapseDescriptor {
  bool to_real = true;
  int first = 1;
  int absorbed = 0;
};

inline int orientation_sign(const CollapseDescriptor& c) {
  if (!c.to_real) return -1;
  long e = static_cast<long>(c.first) * (c.absorbed + 1) - 1;
  return (e % 2 == 0) ? 1 : -1;
}

}  // namespace bimod
