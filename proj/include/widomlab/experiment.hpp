#pragma once

// Experiment configs and the four CLI commands. Every command renders into
// strings so the output can be compared byte for byte.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cheb_complex.hpp"
#include "errors.hpp"
#include "sets.hpp"
#include "widom.hpp"

namespace widomlab {

using nlohmann::json;

struct ExperimentConfig {
  std::optional<SetSpec> set;
  int degree_lo = 0, degree_hi = 0;  // inclusive; 0 when absent
  int degree = 0;                     // preimage command
  int samples = 64;                   // preimage command, targets per segment
  double tol = 1e-6;
  int per_edge = 0;
  RoutePolicy policy = RoutePolicy::Auto;
  std::string output;
  bool emit_csv = true;
  bool emit_svg = false;
  std::uint64_t seed = 0;

  std::vector<int> degrees() const {
    std::vector<int> d;
    for (int k = degree_lo; k <= degree_hi && degree_lo > 0; ++k) d.push_back(k);
    return d;
  }
};

constexpr int kMaxDegree = 400;

namespace detail {

inline void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  return j.at(key);
}

inline double as_number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + ": expected a number");
  return j.get<double>();
}

inline int as_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ConfigError(what + ": expected an integer");
  const auto v = j.get<long long>();
  if (v < -1000000000LL || v > 1000000000LL) throw ConfigError(what + ": integer out of range");
  return static_cast<int>(v);
}

// A number, or [re, im].
inline cplx as_complex(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(what + ": expected a number or [re, im]");
}

} // namespace detail

inline SetSpec parse_set(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw ConfigError("set: expected an object");
  const json& kind = field(j, "kind", "set");
  if (!kind.is_string()) throw ConfigError("set.kind: expected a string");
  const std::string k = kind.get<std::string>();
  SetSpec spec;
  if (k == "interval") {
    require_keys(j, {"kind", "a", "b"}, "interval");
    spec = Interval{as_number(field(j, "a", k), "a"), as_number(field(j, "b", k), "b")};
  } else if (k == "arc") {
    require_keys(j, {"kind", "alpha"}, "arc");
    spec = CircularArc{as_number(field(j, "alpha", k), "alpha")};
  } else if (k == "star_even") {
    require_keys(j, {"kind", "m"}, "star_even");
    spec = StarEven{as_int(field(j, "m", k), "m")};
  } else if (k == "star_odd") {
    require_keys(j, {"kind", "m"}, "star_odd");
    spec = StarOdd{as_int(field(j, "m", k), "m")};
  } else if (k == "quadratic") {
    require_keys(j, {"kind", "a", "b"}, "quadratic");
    spec = QuadraticPreimage{as_complex(field(j, "a", k), "a"), as_complex(field(j, "b", k), "b")};
  } else if (k == "poly_preimage") {
    require_keys(j, {"kind", "coeffs", "target"}, "poly_preimage");
    const json& c = field(j, "coeffs", k);
    if (!c.is_array() || c.empty()) throw ConfigError("coeffs: expected a nonempty array");
    std::vector<cplx> cs;
    for (const auto& x : c) cs.push_back(as_complex(x, "coeffs"));
    const json& t = field(j, "target", k);
    if (!t.is_array() || t.size() != 2) throw ConfigError("target: expected [lo, hi]");
    spec = PolyPreimage{Poly(std::move(cs)), as_number(t[0], "target"), as_number(t[1], "target"), false};
  } else if (k == "spiked_circle") {
    require_keys(j, {"kind", "n", "l"}, "spiked_circle");
    spec = SpikedCircle{as_int(field(j, "n", k), "n"), as_int(field(j, "l", k), "l")};
  } else if (k == "shabat") {
    require_keys(j, {"kind"}, "shabat");
    spec = shabat_example();
  } else {
    throw ConfigError("set.kind: unknown kind '" + k + "'");
  }
  try {
    validate(spec);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

inline ExperimentConfig parse_config(const json& j) {
  using namespace detail;
  require_keys(j, {"set", "degrees", "degree", "samples", "tol", "per_edge", "route", "output", "emit", "seed"},
               "config");
  ExperimentConfig c;
  if (j.contains("set")) c.set = parse_set(j.at("set"));
  if (j.contains("degrees")) {
    const json& d = j.at("degrees");
    if (!d.is_array() || d.size() != 2) throw ConfigError("degrees: expected [lo, hi]");
    c.degree_lo = as_int(d[0], "degrees");
    c.degree_hi = as_int(d[1], "degrees");
    if (c.degree_lo < 1 || c.degree_hi < c.degree_lo) throw ConfigError("degrees: need 1 <= lo <= hi");
    if (c.degree_hi > kMaxDegree) throw ConfigError("degrees: max degree is 400");
  }
  if (j.contains("degree")) {
    c.degree = as_int(j.at("degree"), "degree");
    if (c.degree < 1 || c.degree > kMaxDegree) throw ConfigError("degree: need 1 <= degree <= 400");
  }
  if (j.contains("samples")) {
    c.samples = as_int(j.at("samples"), "samples");
    if (c.samples < 2) throw ConfigError("samples: need >= 2");
  }
  if (j.contains("tol")) c.tol = as_number(j.at("tol"), "tol");
  if (j.contains("per_edge")) {
    c.per_edge = as_int(j.at("per_edge"), "per_edge");
    if (c.per_edge < 8) throw ConfigError("per_edge: need >= 8");
  }
  if (j.contains("route")) {
    const json& r = j.at("route");
    if (r == "auto") c.policy = RoutePolicy::Auto;
    else if (r == "discrete") c.policy = RoutePolicy::Discrete;
    else throw ConfigError("route: expected \"auto\" or \"discrete\"");
  }
  if (j.contains("output")) {
    if (!j.at("output").is_string()) throw ConfigError("output: expected a string");
    c.output = j.at("output").get<std::string>();
  }
  if (j.contains("emit")) {
    const json& e = j.at("emit");
    if (!e.is_array()) throw ConfigError("emit: expected an array");
    c.emit_csv = c.emit_svg = false;
    for (const auto& x : e) {
      if (x == "csv") c.emit_csv = true;
      else if (x == "svg") c.emit_svg = true;
      else throw ConfigError("emit: expected \"csv\" or \"svg\"");
    }
  }
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("seed: expected a nonnegative integer");
    c.seed = s.get<std::uint64_t>();
  }
  return c;
}

inline void check_tol_range(double tol) {
  if (!(tol >= 1e-10 && tol <= 1e-2)) throw ConfigError("tol: must lie in [1e-10, 1e-2]");
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  auto c = parse_config(j);
  check_tol_range(c.tol);
  return c;
}

// ---------------------------------------------------------------------------
// Rendering.

/// %.12g, the fixed float format of every CSV field.
inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string norms_csv(const std::vector<WidomRecord>& rows) {
  std::string s = "degree,route,norm,capacity,widom_factor,gap\n";
  for (const auto& r : rows) {
    s += std::to_string(r.degree) + ',' + route_name(r.route) + ',' + fmt(r.norm) + ',' + fmt(r.capacity) + ',' +
         fmt(r.factor) + ',' + fmt(r.gap) + '\n';
  }
  return s;
}

struct ScatterPoint {
  double x, y;
  int group;
};

/// Minimal SVG scatter plot: frame, min/max tick labels, one colour per group.
inline std::string scatter_svg(const std::vector<ScatterPoint>& pts, const std::string& xlabel,
                               const std::string& ylabel, bool equal_axes = false) {
  static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  constexpr double W = 640, H = 480, L = 70, R = 20, T = 20, B = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const auto& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
    if (first) {
      x0 = x1 = p.x;
      y0 = y1 = p.y;
      first = false;
    }
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pw = W - L - R, ph = H - T - B;
  double sx = pw / (x1 - x0), sy = ph / (y1 - y0);
  if (equal_axes) sx = sy = std::min(sx, sy);
  auto X = [&](double x) { return L + (x - x0) * sx; };
  auto Y = [&](double y) { return H - B - (y - y0) * sy; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << L << "\" y=\"" << H - B + 18 << "\" font-size=\"12\">" << fmt(x0) << "</text>\n";
  o << "<text x=\"" << W - R << "\" y=\"" << H - B + 18 << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(x1)
    << "</text>\n";
  o << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(y0)
    << "</text>\n";
  o << "<text x=\"" << L - 6 << "\" y=\"" << T + 12 << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(y1)
    << "</text>\n";
  o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 12 << "\" font-size=\"13\" text-anchor=\"middle\">" << xlabel
    << "</text>\n";
  o << "<text x=\"16\" y=\"" << T + ph / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << T + ph / 2 << ")\">" << ylabel << "</text>\n";
  for (const auto& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
    o << "<circle cx=\"" << fmt(X(p.x)) << "\" cy=\"" << fmt(Y(p.y)) << "\" r=\"2.5\" fill=\""
      << palette[static_cast<std::size_t>(p.group) % 10] << "\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

// ---------------------------------------------------------------------------
// Commands.

struct CommandResult {
  std::string csv;
  std::string svg;
  std::string log;  // human-readable notes for stderr
  int exit_code = 0;
};

inline int thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* e = std::getenv("WIDOMLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(e, &end, 10);
    if (end != e && *end == '\0' && v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
  }
  return static_cast<int>(hw);
}

namespace detail {

inline int subsequence_modulus(const SetSpec& s) {
  if (const auto* st = std::get_if<StarEven>(&s)) return 2 * st->m;
  if (const auto* so = std::get_if<StarOdd>(&s)) return so->m;
  if (std::holds_alternative<QuadraticPreimage>(s)) return 2;
  if (const auto* pp = std::get_if<PolyPreimage>(&s)) return pp->p.degree();
  return 1;
}

inline CommandResult series_result(const SetSpec& spec, const std::vector<WidomRecord>& rows) {
  CommandResult r;
  r.csv = norms_csv(rows);
  const int mod = subsequence_modulus(spec);
  std::vector<ScatterPoint> pts;
  for (const auto& w : rows) {
    if (!w.ok()) {
      r.exit_code = 1;
      r.log += "degree " + std::to_string(w.degree) + " failed: " + w.error + "\n";
      continue;
    }
    pts.push_back({static_cast<double>(w.degree), w.factor, w.degree % mod});
  }
  r.svg = scatter_svg(pts, "degree", "Widom factor");
  return r;
}

} // namespace detail

inline CommandResult cmd_norms(const ExperimentConfig& c) {
  if (!c.set) throw ConfigError("norms: missing key 'set'");
  if (c.degree_lo == 0) throw ConfigError("norms: missing key 'degrees'");
  SeriesOptions opt;
  opt.policy = c.policy;
  opt.per_edge = c.per_edge;
  opt.threads = thread_cap();
  opt.seed = c.seed;
  const auto rows = widom_inf_series(*c.set, c.degrees(), c.tol, opt);
  auto r = detail::series_result(*c.set, rows);

  // Flag violations of the observed (unproven) monotonicity along residues mod 2m.
  if (const auto* st = std::get_if<StarEven>(&*c.set)) {
    const int mod = 2 * st->m;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = i + 1; j < rows.size(); ++j)
        if (rows[j].degree == rows[i].degree + mod && rows[i].ok() && rows[j].ok()) {
          const bool above = rows[i].factor > 2.0 + 1e-12, below = rows[i].factor < 2.0 - 1e-12;
          if ((below && rows[j].factor < rows[i].factor - 1e-9) || (above && rows[j].factor > rows[i].factor + 1e-9))
            r.log += "note: subsequence not monotone toward 2 at degree " + std::to_string(rows[j].degree) + "\n";
        }
  }
  return r;
}

inline CommandResult cmd_limits(const ExperimentConfig& c) {
  if (!c.set) throw ConfigError("limits: missing key 'set'");
  CommandResult r;
  r.csv = "quantity,value,conjectural\n";
  try {
    const auto L = widom_limit(*c.set);
    const std::string flag = L.conjectural ? "true" : "false";
    if (L.split) {
      r.csv += "even_limit," + fmt(L.even) + "," + flag + "\n";
      r.csv += "odd_limit," + fmt(L.odd) + "," + flag + "\n";
    } else {
      r.csv += "limit," + fmt(L.even) + "," + flag + "\n";
    }
    if (L.conjectural) r.log += "note: conjectural value, not a theorem\n";
  } catch (const Unsupported& e) {
    r.log += std::string(e.what()) + "\n";
    r.exit_code = 1;
  }
  return r;
}

/// Discrete-route Widom factors of the built-in Shabat tree, with the
/// composition law as a cross-check at multiples of 7.
inline CommandResult cmd_shabat(const ExperimentConfig& c) {
  if (c.set && kind_name(*c.set) != "shabat") throw ConfigError("shabat: set must be {\"kind\":\"shabat\"}");
  if (c.degree_lo == 0) throw ConfigError("shabat: missing key 'degrees'");
  if (c.degree_hi > 40) throw ConfigError("shabat: max degree is 40");
  const SetSpec spec = shabat_example();
  SeriesOptions opt;
  opt.policy = RoutePolicy::Discrete;
  opt.per_edge = c.per_edge;
  opt.per_edge_factor = 60;
  opt.threads = thread_cap();
  opt.seed = c.seed;
  const auto rows = widom_inf_series(spec, c.degrees(), c.tol, opt);
  auto r = detail::series_result(spec, rows);
  const auto& pp = std::get<PolyPreimage>(spec);
  const double cap = capacity(spec).value;
  for (const auto& w : rows) {
    if (!w.ok() || w.degree % 7 != 0) continue;
    const auto e = compose_chebyshev(pp.p, w.degree / 7, Interval{pp.lo, pp.hi});
    const double exact = e.norm / std::pow(cap, w.degree);
    const bool agree = std::abs(w.factor - exact) <= 1e-3;
    r.log += "cross-check degree " + std::to_string(w.degree) + ": discrete " + fmt(w.factor) + " composition " +
             fmt(exact) + (agree ? " ok\n" : " MISMATCH\n");
    if (!agree) r.exit_code = 1;
  }
  if (!rows.empty() && rows.back().ok())
    r.log += "trend: factor at degree " + std::to_string(rows.back().degree) + " is " + fmt(rows.back().factor) +
             " (distance to 2: " + fmt(std::abs(rows.back().factor - 2.0)) + ")\n";
  return r;
}

/// Point cloud of T^{-1}(T(E)): E_2^{n,l} (plus its image under phi_star) for
/// E_2, or the tree p^{-1}([lo, hi]) for polynomial preimages.
inline CommandResult cmd_preimage(const ExperimentConfig& c) {
  if (!c.set) throw ConfigError("preimage: missing key 'set'");
  if (c.degree == 0) throw ConfigError("preimage: missing key 'degree'");
  CommandResult r;
  std::vector<ScatterPoint> pts;
  std::string csv = "kind,re,im\n";
  auto emit = [&](const char* kind, cplx z, int group) {
    csv += std::string(kind) + ',' + fmt(z.real()) + ',' + fmt(z.imag()) + '\n';
    pts.push_back({z.real(), z.imag(), group});
  };
  const auto ts = detail::parameter_samples(0.0, 1.0, c.samples, Clustering::Arcsine);

  if (const auto* st = std::get_if<StarEven>(&*c.set); st && st->m == 2) {
    const auto sn = star_norm(2, c.degree, std::max(c.tol, 1e-12));
    const Poly& t = *sn.poly;
    // T(E_2) is [-norm, norm] for even degree and the cross i^k [0, norm] otherwise.
    std::vector<cplx> targets;
    if (c.degree % 2 == 0) {
      for (const double s : ts) targets.push_back(sn.norm * (2.0 * s - 1.0));
    } else {
      for (int k = 0; k < 4; ++k)
        for (std::size_t i = (k == 0 ? 0 : 1); i < ts.size(); ++i)
          targets.push_back(std::pow(cplx{0.0, 1.0}, k) * (sn.norm * ts[i]));
    }
    std::vector<cplx> cloud;
    for (const auto& g : preimage_points(t, targets, 1e-8, c.seed))
      for (const cplx z : g) cloud.push_back(z);
    for (const cplx z : cloud) emit("set", z, 0);
    for (const cplx z : cloud) emit("phi", phi_star(z), 1);
  } else if (const auto* pp = std::get_if<PolyPreimage>(&*c.set)) {
    if (c.degree % pp->p.degree() != 0)
      throw ConfigError("preimage: degree must be a multiple of the polynomial degree");
    std::vector<cplx> targets;
    for (const double s : ts) targets.push_back(pp->lo + (pp->hi - pp->lo) * s);
    for (const auto& g : preimage_points(pp->p, targets, 1e-8, c.seed))
      for (const cplx z : g) emit("set", z, 0);
  } else {
    throw ConfigError("preimage: supported sets are star_even with m = 2, poly_preimage and shabat");
  }
  r.csv = std::move(csv);
  r.svg = scatter_svg(pts, "Re z", "Im z", true);
  return r;
}

} // namespace widomlab
