#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "sphcs/bargmann_transform.hpp"
#include "sphcs/heat_kernels.hpp"
#include "sphcs/verify.hpp"

namespace sphcs::cli {

namespace {

using json = nlohmann::ordered_json;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr const char *kDefaultThetaGrid = "0:3.141592653589793:101";

// ---------------------------------------------------------------------------
// JSON config files: flat keys apply to the active subcommand, objects named
// after a subcommand apply to that subcommand.

class JsonConfig : public CLI::Config {
public:
  std::string active;

  std::string to_config(const CLI::App *, bool, bool, std::string) const override {
    return "{}";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream &input) const override {
    json j;
    try {
      input >> j;
    } catch (const std::exception &e) {
      throw CLI::ConversionError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object())
      throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto &[key, value] : j.items()) {
      if (value.is_object()) {
        for (const auto &[k2, v2] : value.items())
          items.push_back(item({key}, k2, v2));
      } else {
        items.push_back(item(active.empty() ? std::vector<std::string>{}
                                            : std::vector<std::string>{active},
                             key, value));
      }
    }
    return items;
  }

private:
  static std::string scalar(const json &v) {
    if (v.is_string())
      return v.get<std::string>();
    if (v.is_boolean())
      return v.get<bool>() ? "true" : "false";
    return v.dump();
  }
  static CLI::ConfigItem item(std::vector<std::string> parents, const std::string &name,
                              const json &v) {
    CLI::ConfigItem it;
    it.parents = std::move(parents);
    it.name = name;
    if (v.is_array())
      for (const auto &e : v)
        it.inputs.push_back(scalar(e));
    else
      it.inputs.push_back(scalar(v));
    return it;
  }
};

// ---------------------------------------------------------------------------
// Tables and output.

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string fmt17(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos)
    return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"')
      q += '"';
    q += c;
  }
  return q + "\"";
}

json cell_json(const Cell &c) {
  if (const auto *d = std::get_if<double>(&c))
    return std::isfinite(*d) ? json(*d) : json(fmt17(*d));
  if (const auto *i = std::get_if<long long>(&c))
    return *i;
  return std::get<std::string>(c);
}

std::string cell_csv(const Cell &c) {
  if (const auto *d = std::get_if<double>(&c))
    return fmt17(*d);
  if (const auto *i = std::get_if<long long>(&c))
    return std::to_string(*i);
  return csv_field(std::get<std::string>(c));
}

struct Common {
  int dim = 2;
  std::optional<double> tau, radius, mass, omega, hbar;
  std::string format = "csv";
  std::string output = "-";
  std::uint64_t seed = 1;
};

struct Global {
  int threads = 0;
  bool timing = false;
};

void emit(const std::string &text, const Common &c, std::ostream &out) {
  if (c.output == "-") {
    out << text;
    return;
  }
  std::ofstream f(c.output, std::ios::binary);
  if (!f)
    throw InvalidArgument("cannot open output file '" + c.output + "'");
  f << text;
}

void write_table(const std::string &command, const json &meta, const Table &t,
                 const Common &c, std::ostream &out) {
  std::ostringstream s;
  if (c.format == "json") {
    json doc;
    doc["metadata"] = meta;
    json rows = json::array();
    for (const auto &r : t.rows) {
      json o;
      for (std::size_t i = 0; i < t.columns.size(); ++i)
        o[t.columns[i]] = cell_json(r[i]);
      rows.push_back(std::move(o));
    }
    doc["rows"] = std::move(rows);
    s << doc.dump(2) << "\n";
  } else {
    s << "# sphcs " << command << "\n# " << meta.dump() << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
      s << (i ? "," : "") << csv_field(t.columns[i]);
    s << "\n";
    for (const auto &r : t.rows) {
      for (std::size_t i = 0; i < r.size(); ++i)
        s << (i ? "," : "") << cell_csv(r[i]);
      s << "\n";
    }
  }
  emit(s.str(), c, out);
}

// ---------------------------------------------------------------------------
// Parameter helpers.

std::vector<double> parse_grid(const std::string &spec, const std::string &flag) {
  auto num = [&](const std::string &s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size() || !std::isfinite(v))
        throw std::invalid_argument(s);
      return v;
    } catch (const std::exception &) {
      throw InvalidArgument(flag + ": '" + s + "' is not a number");
    }
  };
  const auto c1 = spec.find(':');
  if (c1 == std::string::npos)
    return {num(spec)};
  const auto c2 = spec.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw InvalidArgument(flag + " expects start:stop:count");
  const double a = num(spec.substr(0, c1));
  const double b = num(spec.substr(c1 + 1, c2 - c1 - 1));
  const double nd = num(spec.substr(c2 + 1));
  if (nd < 1 || nd != std::floor(nd) || nd > 1e7)
    throw InvalidArgument(flag + ": count must be a positive integer");
  const int n = static_cast<int>(nd);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return out;
}

std::vector<double> parse_list(const std::string &s, const std::string &flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    out.push_back(parse_grid(tok, flag).at(0));
  return out;
}

bool has_physical(const Common &c) {
  return c.radius || c.mass || c.omega || c.hbar;
}

ModelParams model(const Common &c) {
  if (c.dim < 1 || c.dim > 3)
    throw InvalidArgument("--dim must be 1, 2 or 3");
  if (c.tau && has_physical(c))
    throw InvalidArgument("give either --tau or all of --radius --mass --omega --hbar, not both");
  if (has_physical(c)) {
    if (!(c.radius && c.mass && c.omega && c.hbar))
      throw InvalidArgument("physical entry needs all of --radius --mass --omega --hbar");
    return ModelParams::make(c.dim, *c.radius, *c.mass, *c.omega, *c.hbar);
  }
  const double tau = c.tau.value_or(0.5);
  if (!(tau > 0) || !std::isfinite(tau))
    throw InvalidArgument("--tau must be positive");
  return ModelParams::dimensionless(c.dim, tau);
}

void add_common(CLI::App *sub, Common &c, bool physical = true) {
  sub->add_option("--dim", c.dim, "dimension d of the sphere S^d")->capture_default_str();
  sub->add_option("--tau", c.tau, "dimensionless time hbar / (m omega r^2) (default 0.5)");
  if (physical) {
    sub->add_option("--radius", c.radius, "sphere radius r (physical entry)");
    sub->add_option("--mass", c.mass, "particle mass m (physical entry)");
    sub->add_option("--omega", c.omega, "frequency omega (physical entry)");
    sub->add_option("--hbar", c.hbar, "Planck constant hbar (physical entry)");
  }
  sub->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("-o,--output", c.output, "output file, - for stdout")->capture_default_str();
  sub->add_option("--seed", c.seed, "seed for random presets")->capture_default_str();
}

// Every option of the subcommand with its value or default.
json record_options(const CLI::App *sub) {
  static const std::vector<std::string> skip = {"help", "output", "config", "threads",
                                                "timing"};
  json o = json::object();
  for (const CLI::Option *opt : sub->get_options()) {
    const std::string name = opt->get_lnames().empty() ? opt->get_name()
                                                         : opt->get_lnames().front();
    if (std::find(skip.begin(), skip.end(), name) != skip.end())
      continue;
    if (opt->count() > 0) {
      const auto &res = opt->results();
      if (res.size() == 1)
        o[name] = res.front();
      else
        o[name] = res;
    } else if (!opt->get_default_str().empty()) {
      o[name] = opt->get_default_str();
    } else {
      o[name] = nullptr;
    }
  }
  return o;
}

json model_json(const ModelParams &p, const Common &c) {
  json m;
  m["d"] = p.d();
  m["tau"] = p.tau();
  m["entry"] = has_physical(c) ? "physical" : "dimensionless";
  if (has_physical(c)) {
    m["r"] = p.r();
    m["m"] = p.m();
    m["omega"] = p.omega();
    m["hbar"] = p.hbar();
  }
  return m;
}

// Great circle through e_{d+1} and e_1 with its unit tangent.
VectorXd circle_point(int d, double th) {
  VectorXd x = VectorXd::Zero(d + 1);
  x[0] = std::sin(th);
  x[d] = std::cos(th);
  return x;
}
VectorXd circle_tangent(int d, double th) {
  VectorXd e = VectorXd::Zero(d + 1);
  e[0] = std::cos(th);
  e[d] = -std::sin(th);
  return e;
}

// ---------------------------------------------------------------------------
// States.

struct StateArgs {
  std::string preset = "harmonic:1,0";
  std::string coeffs;
};

struct State {
  std::optional<BandLimitedFunction> f;
  std::optional<VectorXd> point; // point mass at a unit vector
  std::string description;
};

void add_state(CLI::App *sub, StateArgs &s) {
  sub->add_option("--preset", s.preset,
                  "harmonic:l,m | random:L | point:x1,...,x_{d+1}")
      ->capture_default_str();
  sub->add_option("--coeffs", s.coeffs,
                  "JSON file {\"cutoff\": L, \"coeffs\": [[re, im], ...]} over the basis "
                  "(d = 1, 2); overrides --preset");
}

State load_state(int dim, const StateArgs &a, std::uint64_t seed) {
  State s;
  if (!a.coeffs.empty()) {
    if (dim != 1 && dim != 2)
      throw InvalidArgument("--coeffs needs d = 1 or 2");
    std::ifstream in(a.coeffs);
    if (!in)
      throw InvalidArgument("cannot read '" + a.coeffs + "'");
    json j;
    try {
      in >> j;
    } catch (const std::exception &e) {
      throw InvalidArgument("coefficient file: " + std::string(e.what()));
    }
    if (!j.contains("cutoff") || !j.contains("coeffs") || !j["coeffs"].is_array())
      throw InvalidArgument("coefficient file needs \"cutoff\" and \"coeffs\"");
    BasisSpec b{dim, j["cutoff"].get<int>(), -1};
    b.validate();
    const auto &arr = j["coeffs"];
    if (static_cast<int>(arr.size()) != b.size())
      throw InvalidArgument("coefficient file: expected " + std::to_string(b.size()) +
                            " coefficients");
    VectorXcd c(b.size());
    for (int i = 0; i < b.size(); ++i) {
      const auto &e = arr[i];
      c[i] = e.is_array() ? cplx(e.at(0).get<double>(), e.at(1).get<double>())
                          : cplx(e.get<double>(), 0.0);
    }
    s.f = BandLimitedFunction::from_basis(b, c);
    s.description = "coefficients from " + a.coeffs;
    return s;
  }
  const auto colon = a.preset.find(':');
  const std::string kind = a.preset.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : a.preset.substr(colon + 1);
  s.description = a.preset;
  if (kind == "harmonic") {
    const auto v = parse_list(args.empty() ? "1,0" : args, "--preset");
    if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]))
      throw InvalidArgument("--preset harmonic:l,m needs two integers");
    s.f = BandLimitedFunction::harmonic(dim, static_cast<int>(v[0]), static_cast<int>(v[1]));
  } else if (kind == "random") {
    const auto v = parse_list(args.empty() ? "3" : args, "--preset");
    if (v.size() != 1 || v[0] < 0 || v[0] != std::floor(v[0]) || v[0] > 64)
      throw InvalidArgument("--preset random:L needs an integer 0 <= L <= 64");
    s.f = BandLimitedFunction::random(dim, static_cast<int>(v[0]), seed);
  } else if (kind == "point") {
    const auto v = parse_list(args, "--preset");
    if (static_cast<int>(v.size()) != dim + 1)
      throw InvalidArgument("--preset point: needs d+1 coordinates");
    VectorXd y = Eigen::Map<const VectorXd>(v.data(), dim + 1);
    if (!(y.norm() > 0))
      throw InvalidArgument("--preset point: direction must be nonzero");
    s.point = y / y.norm();
  } else {
    throw InvalidArgument("unknown preset '" + a.preset + "'");
  }
  return s;
}

const BandLimitedFunction &band_limited(const State &s, const std::string &command) {
  if (!s.f)
    throw InvalidArgument(command + " needs a square-integrable state (not a point mass)");
  return *s.f;
}

struct QuadArgs {
  int sphere_order = 0;
  int angular_order = 0;
  int radial_nodes = 24;
  int radial_panels = 4;
  double decay_target = 1e-16;
  QuadOptions options() const {
    return {sphere_order, angular_order, radial_nodes, radial_panels, decay_target};
  }
};

void add_quad(CLI::App *sub, QuadArgs &q) {
  sub->add_option("--sphere-order", q.sphere_order, "sphere rule order (0: automatic)")
      ->capture_default_str();
  sub->add_option("--angular-order", q.angular_order,
                  "momentum direction rule order (0: automatic)")
      ->capture_default_str();
  sub->add_option("--radial-nodes", q.radial_nodes, "Gauss-Legendre nodes per radial panel")
      ->capture_default_str();
  sub->add_option("--radial-panels", q.radial_panels, "radial panels")->capture_default_str();
  sub->add_option("--decay-target", q.decay_target, "relative fiber integrand size at p_max")
      ->capture_default_str();
}

FiberMeasure parse_measure(const std::string &s) {
  if (s == "resolution")
    return FiberMeasure::resolution;
  if (s == "inversion")
    return FiberMeasure::inversion;
  throw InvalidArgument("unknown measure '" + s + "'");
}

json cplx_json(const VectorXcd &v) {
  json re = json::array(), im = json::array();
  for (int i = 0; i < v.size(); ++i) {
    re.push_back(v[i].real());
    im.push_back(v[i].imag());
  }
  return {{"re", re}, {"im", im}};
}

// ---------------------------------------------------------------------------
// Commands. Each returns an exit code; errors propagate as exceptions.

struct KernelArgs {
  std::string space = "sphere";
  std::optional<double> time;
  std::string theta = kDefaultThetaGrid;
  double theta_im = 0.0;
  std::string radius = "0:5:51";
  std::string method = "auto";
  double target = 1e-12;
};

int cmd_kernel(const CLI::App *sub, const Common &c, const KernelArgs &k, json meta,
               std::ostream &out) {
  if (c.dim < 1 || c.dim > 3)
    throw InvalidArgument("--dim must be 1, 2 or 3");
  if (c.tau && k.time)
    throw InvalidArgument("give --tau or --time, not both");
  const double t = c.tau ? *c.tau : k.time.value_or(0.5);
  if (!(t > 0) || !std::isfinite(t))
    throw InvalidArgument("time must be positive");
  meta["options"] = record_options(sub);
  Table tab;
  KernelEvalRequest req;
  req.dim = c.dim;
  req.time = t;
  req.truncation.target_abs_error = k.target;
  req.truncation.validate();
  double worst_bound = 0;
  if (k.space == "sphere") {
    req.method = kernel_method_from_string(k.method);
    const auto grid = parse_grid(k.theta, "--theta");
    tab.columns = {"theta", "theta_im", "re", "im", "method", "terms", "error_bound"};
    tab.rows.resize(grid.size());
    std::vector<KernelValue> vals(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      KernelEvalRequest r = req;
      r.argument = cplx(grid[i], k.theta_im);
      vals[i] = rho_sphere(r);
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto &v = vals[i];
      worst_bound = std::max(worst_bound, v.error_bound);
      tab.rows[i] = {grid[i], k.theta_im, v.value.real(), v.value.imag(),
                     std::string(to_string(v.method)), static_cast<long long>(v.terms),
                     v.error_bound};
    }
  } else if (k.space == "hyperbolic") {
    if (k.theta_im != 0.0)
      throw InvalidArgument("--theta-im applies to the sphere only");
    const auto grid = parse_grid(k.radius, "--radius");
    for (double R : grid)
      if (R < 0)
        throw InvalidArgument("--radius values must be >= 0");
    tab.columns = {"radius", "value", "error_bound", "terms"};
    std::vector<KernelValue> vals(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      KernelEvalRequest r = req;
      r.argument = grid[i];
      vals[i] = nu_hyperbolic(r);
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
      worst_bound = std::max(worst_bound, vals[i].error_bound);
      tab.rows.push_back({grid[i], vals[i].value.real(), vals[i].error_bound,
                          static_cast<long long>(vals[i].terms)});
    }
  } else {
    throw InvalidArgument("--space must be sphere or hyperbolic");
  }
  meta["derived"] = {{"time", t}, {"max_error_bound", worst_bound}};
  write_table("kernel", meta, tab, c, out);
  return kExitOk;
}

struct CoherentArgs {
  std::string x, p;
  std::string theta = kDefaultThetaGrid;
  bool coefficients = false;
  int cutoff = 0;
};

int cmd_coherent(const CLI::App *sub, const Common &c, const CoherentArgs &a, json meta,
                 std::ostream &out) {
  const auto pr = model(c);
  const int D = c.dim + 1;
  VectorXd x = VectorXd::Zero(D), p = VectorXd::Zero(D);
  x[c.dim] = 1.0;
  if (!a.x.empty()) {
    const auto v = parse_list(a.x, "--x");
    if (static_cast<int>(v.size()) != D)
      throw InvalidArgument("--x needs d+1 components");
    x = Eigen::Map<const VectorXd>(v.data(), D);
    if (!(x.norm() > 0))
      throw InvalidArgument("--x must be nonzero");
  }
  x *= pr.r() / x.norm();
  if (!a.p.empty()) {
    const auto v = parse_list(a.p, "--p");
    if (static_cast<int>(v.size()) != D)
      throw InvalidArgument("--p needs d+1 components");
    p = Eigen::Map<const VectorXd>(v.data(), D);
  }
  const auto s = CoherentState::at(pr, PhasePoint::make(pr, x, p));
  meta["options"] = record_options(sub);
  meta["model"] = model_json(pr, c);
  meta["label"] = cplx_json(s.label.a());
  meta["derived"] = {{"norm_squared", norm_squared(s)}};
  Table tab;
  if (a.coefficients) {
    if (c.dim == 3)
      throw InvalidArgument("--coefficients needs d = 1 or 2");
    const double alpha = s.label.alpha() / (pr.r() * pr.r());
    const int L = a.cutoff > 0 ? a.cutoff : certified_cutoff(c.dim, pr.tau(), alpha);
    const BasisSpec b{c.dim, L, -1};
    const auto co = coefficients_in_basis(s, b);
    meta["derived"]["cutoff"] = L;
    meta["derived"]["tail_estimate"] = co.tail_estimate;
    tab.columns = {"index", "degree", "order", "re", "im"};
    for (int i = 0; i < b.size(); ++i)
      tab.rows.push_back({static_cast<long long>(i), static_cast<long long>(b.degree(i)),
                          static_cast<long long>(b.order(i)), co.c[i].real(),
                          co.c[i].imag()});
  } else {
    const VectorXd n = x / x.norm();
    VectorXd e = p - n * n.dot(p);
    e = e.norm() > 1e-12 * pr.momentum_unit() ? VectorXd(e / e.norm())
                                               : VectorXd(tangent_frame(n).col(0));
    const auto grid = parse_grid(a.theta, "--theta");
    std::vector<cplx> vals(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      vals[i] = position_wavefunction(s, std::cos(grid[i]) * n + std::sin(grid[i]) * e);
    });
    tab.columns = {"theta", "re", "im", "abs2"};
    for (std::size_t i = 0; i < grid.size(); ++i)
      tab.rows.push_back({grid[i], vals[i].real(), vals[i].imag(), std::norm(vals[i])});
  }
  write_table("coherent", meta, tab, c, out);
  return kExitOk;
}

struct TransformArgs {
  StateArgs state;
  std::string theta = "0:3.141592653589793:9";
  std::string p = "0:1:5";
  std::string method = "exact";
  int sphere_order = 0;
};

int cmd_transform(const CLI::App *sub, const Common &c, const TransformArgs &a, json meta,
                  std::ostream &out) {
  const auto pr = model(c);
  const double tau = pr.tau();
  const auto st = load_state(c.dim, a.state, c.seed);
  const auto th = parse_grid(a.theta, "--theta");
  const auto pg = parse_grid(a.p, "--p");
  if (a.method != "exact" && a.method != "quadrature")
    throw InvalidArgument("--method must be exact or quadrature");
  std::vector<VectorXcd> grid;
  for (double t : th)
    for (double p : pg)
      grid.push_back(phase_to_complex(circle_point(c.dim, t), p * circle_tangent(c.dim, t)));
  std::vector<cplx> vals(grid.size());
  json derived = {{"state", st.description}};
  if (st.point) {
    const ComplexSpherePoint y = ComplexSpherePoint::real(1.0, *st.point);
    parallel_for(grid.size(), [&](std::size_t i) {
      KernelEvalRequest r;
      r.dim = c.dim;
      r.time = tau;
      r.argument = complex_angle(ComplexSpherePoint::unchecked(1.0, grid[i]), y);
      vals[i] = rho_sphere(r).value;
    });
    derived["method"] = "kernel";
  } else if (a.method == "exact") {
    vals = sb_transform(*st.f, tau, grid);
    derived["method"] = "exact";
    derived["max_degree"] = st.f->max_degree();
  } else {
    const int order = a.sphere_order > 0 ? a.sphere_order : (c.dim == 3 ? 16 : 24);
    const auto &f = *st.f;
    vals = sb_transform([&](const VectorXd &x) { return f(x.cast<cplx>()); }, tau, grid,
                        sphere_rule(c.dim, order));
    derived["method"] = "quadrature";
    derived["sphere_order"] = order;
    derived["max_degree"] = f.max_degree();
  }
  meta["options"] = record_options(sub);
  meta["model"] = model_json(pr, c);
  meta["derived"] = derived;
  Table tab;
  tab.columns = {"theta", "p", "re", "im"};
  std::size_t i = 0;
  for (double t : th)
    for (double p : pg) {
      tab.rows.push_back({t, p, vals[i].real(), vals[i].imag()});
      ++i;
    }
  write_table("transform", meta, tab, c, out);
  return kExitOk;
}

struct InvertArgs {
  StateArgs state;
  QuadArgs quad;
  std::string theta = "0:3.141592653589793:13";
  std::string measure = "inversion";
};

int cmd_invert(const CLI::App *sub, const Common &c, const InvertArgs &a, json meta,
               std::ostream &out) {
  const auto pr = model(c);
  const double tau = pr.tau();
  const auto st = load_state(c.dim, a.state, c.seed);
  const auto &f = band_limited(st, "invert");
  const auto q = QuadratureSpec::make(c.dim, tau, f.max_degree(), parse_measure(a.measure),
                                      a.quad.options());
  const HoloFunction F = [&](const VectorXcd &z) { return f.heat(z, tau); };
  const auto th = parse_grid(a.theta, "--theta");
  Table tab;
  tab.columns = {"theta", "re", "im", "exact_re", "exact_im", "abs_error"};
  double worst = 0;
  for (double t : th) {
    const VectorXd x = circle_point(c.dim, t);
    const cplx v = sb_inverse(F, x, q);
    const cplx e = f(x.cast<cplx>());
    worst = std::max(worst, std::abs(v - e));
    tab.rows.push_back({t, v.real(), v.imag(), e.real(), e.imag(), std::abs(v - e)});
  }
  double err = 0, norm = 0;
  for (const auto &s : sphere_rule(c.dim, f.max_degree() + 2)) {
    const cplx fx = f(s.x.cast<cplx>());
    err += s.w * std::norm(sb_inverse(F, s.x, q) - fx);
    norm += s.w * std::norm(fx);
  }
  meta["options"] = record_options(sub);
  meta["model"] = model_json(pr, c);
  meta["derived"] = {{"state", st.description},
                     {"max_degree", f.max_degree()},
                     {"p_max", q.p_max},
                     {"max_abs_error", worst},
                     {"relative_l2_error", norm > 0 ? std::sqrt(err / norm) : std::sqrt(err)}};
  write_table("invert", meta, tab, c, out);
  return kExitOk;
}

struct HusimiArgs {
  StateArgs state;
  QuadArgs quad;
  std::string grid = "quadrature";
  std::string theta = "0:3.141592653589793:9";
  std::string p = "0:2:9";
};

int cmd_husimi(const CLI::App *sub, const Common &c, const HusimiArgs &a, json meta,
               std::ostream &out) {
  const auto pr = model(c);
  const double tau = pr.tau();
  const auto st = load_state(c.dim, a.state, c.seed);
  const auto f0 = band_limited(st, "husimi");
  const int L = f0.max_degree();
  const double nrm = sphere_norm(f0, sphere_rule(c.dim, L + 2));
  if (!(nrm > 0))
    throw InvalidArgument("state has zero norm");
  const auto f = f0.scaled(1.0 / nrm);
  const auto q = QuadratureSpec::make(c.dim, tau, L, FiberMeasure::resolution, a.quad.options());
  const PhaseDensity dens{c.dim, tau, FiberMeasure::resolution};
  Table tab;
  double mass = 0;
  if (a.grid == "quadrature") {
    const auto g = phase_grid(q, dens);
    const auto h = husimi_density(f, g, tau);
    for (int k = 0; k <= c.dim; ++k)
      tab.columns.push_back("x" + std::to_string(k + 1));
    for (int k = 0; k <= c.dim; ++k)
      tab.columns.push_back("p" + std::to_string(k + 1));
    tab.columns.push_back("density");
    tab.columns.push_back("weight");
    std::vector<double> terms(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double w = g.density[i] > 0 ? g.w[i] / g.density[i] : 0.0;
      terms[i] = h[i] * w;
      std::vector<Cell> row;
      for (int k = 0; k <= c.dim; ++k)
        row.push_back(g.x[i][k]);
      for (int k = 0; k <= c.dim; ++k)
        row.push_back(g.p[i][k]);
      row.push_back(h[i]);
      row.push_back(w);
      tab.rows.push_back(std::move(row));
    }
    mass = pairwise_sum(terms);
  } else if (a.grid == "line") {
    mass = husimi_mass(f, q);
    const auto th = parse_grid(a.theta, "--theta");
    const auto pg = parse_grid(a.p, "--p");
    tab.columns = {"theta", "p", "density"};
    for (double t : th)
      for (double p : pg) {
        const VectorXcd z = phase_to_complex(circle_point(c.dim, t), p * circle_tangent(c.dim, t));
        const double v = std::norm(f.heat(z, tau)) * dens.weight(std::abs(p));
        tab.rows.push_back({t, p, v});
      }
  } else {
    throw InvalidArgument("--grid must be quadrature or line");
  }
  meta["options"] = record_options(sub);
  meta["model"] = model_json(pr, c);
  meta["derived"] = {{"state", st.description},
                     {"max_degree", L},
                     {"nodes", a.grid == "quadrature" ? tab.rows.size() : 0},
                     {"p_max", q.p_max},
                     {"mass", mass}};
  write_table("husimi", meta, tab, c, out);
  return kExitOk;
}

struct ResolveArgs {
  QuadArgs quad;
  int cutoff = 0;
  std::string measure = "resolution";
};

int cmd_resolve(const CLI::App *sub, const Common &c, const ResolveArgs &a, json meta,
                std::ostream &out) {
  const auto pr = model(c);
  if (c.dim == 3)
    throw InvalidArgument("resolve-identity needs d = 1 or 2");
  const int L = a.cutoff > 0 ? a.cutoff : (c.dim == 1 ? 8 : 4);
  const auto q = QuadratureSpec::make(c.dim, pr.tau(), L, parse_measure(a.measure),
                                      a.quad.options());
  const BasisSpec b{c.dim, L, -1};
  const auto M = resolve_identity_matrix(b, q);
  Table tab;
  tab.columns = {"i", "j", "re", "im"};
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      tab.rows.push_back({static_cast<long long>(i), static_cast<long long>(j),
                          M(i, j).real(), M(i, j).imag()});
  const double dev =
      (M - Eigen::MatrixXcd::Identity(M.rows(), M.cols())).cwiseAbs().maxCoeff();
  meta["options"] = record_options(sub);
  meta["model"] = model_json(pr, c);
  meta["derived"] = {{"cutoff", L}, {"p_max", q.p_max}, {"max_deviation", dev}};
  write_table("resolve-identity", meta, tab, c, out);
  return kExitOk;
}

struct VerifyArgs {
  std::vector<std::string> suites;
  std::vector<int> dims;
  std::optional<double> tau;
  bool negative = false;
  std::uint64_t seed = 1;
  std::string output = "-";
};

int cmd_verify(const CLI::App *sub, const VerifyArgs &a, bool timing, std::ostream &out,
               std::ostream &err) {
  std::vector<std::string> suites = a.suites.empty() ? suite_names() : a.suites;
  for (const auto &s : suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw InvalidArgument("unknown suite '" + s + "'");
  for (int d : a.dims)
    if (d < 1 || d > 3)
      throw InvalidArgument("--dim must be 1, 2 or 3");
  if (a.tau && !(*a.tau > 0))
    throw InvalidArgument("--tau must be positive");
  VerifyOptions opt;
  opt.dims = a.dims;
  opt.tau = a.tau;
  opt.negative_controls = a.negative;
  opt.seed = a.seed;
  json report;
  report["metadata"] = {{"command", "verify"}, {"options", record_options(sub)}};
  json arr = json::array();
  bool all = true;
  for (const auto &name : suites) {
    const auto r = run_suite(name, opt);
    json checks = json::array();
    for (const auto &ch : r.checks)
      checks.push_back({{"name", ch.name},
                        {"residual", std::isfinite(ch.residual) ? json(ch.residual)
                                                                 : json(fmt17(ch.residual))},
                        {"tolerance", ch.tolerance},
                        {"bound", ch.bound == Bound::at_most ? "at_most" : "greater_than"},
                        {"informational", ch.informational},
                        {"pass", ch.pass()}});
    json js = {{"suite", name}, {"pass", r.pass()}, {"checks", checks}};
    if (timing)
      js["seconds"] = r.seconds;
    arr.push_back(js);
    all = all && r.pass();
    err << (r.pass() ? "PASS " : "FAIL ") << name << " (" << r.checks.size() << " checks)\n";
    for (const auto &ch : r.checks)
      if (!ch.pass())
        err << "  failed: " << ch.name << " residual " << fmt17(ch.residual)
            << " tolerance " << fmt17(ch.tolerance) << "\n";
  }
  report["suites"] = arr;
  report["pass"] = all;
  Common c;
  c.output = a.output;
  emit(report.dump(2) + "\n", c, out);
  return all ? kExitOk : kExitVerifyFailed;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Coherent states, heat kernels and the Segal-Bargmann transform on S^d",
               "sphcs"};
  app.require_subcommand(1);
  app.fallthrough();
  auto config = std::make_shared<JsonConfig>();
  app.config_formatter(config);
  app.set_config("--config", "", "JSON file mirroring the flags; flags override");
  Global g;
  app.add_option("--threads", g.threads, "worker threads (0: SPHCS_THREADS or all cores)")
      ->envname("SPHCS_THREADS")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--timing", g.timing, "report elapsed seconds (stderr, and per suite in verify reports)");

  Common ck, cc, ct, ci, ch, cr;
  KernelArgs ka;
  auto *kernel = app.add_subcommand("kernel", "heat kernel tables on S^d or H^d");
  add_common(kernel, ck, false);
  kernel->add_option("--space", ka.space, "sphere or hyperbolic")
      ->check(CLI::IsMember({"sphere", "hyperbolic"}))
      ->capture_default_str();
  kernel->add_option("--time", ka.time, "heat time (hyperbolic s, or tau on the sphere)");
  kernel->add_option("--theta", ka.theta, "angle grid start:stop:count")->capture_default_str();
  kernel->add_option("--theta-im", ka.theta_im, "imaginary part added to every angle")
      ->capture_default_str();
  kernel->add_option("--radius", ka.radius, "hyperbolic radius grid start:stop:count")
      ->capture_default_str();
  kernel->add_option("--method", ka.method, "auto, theta or spectral")
      ->check(CLI::IsMember({"auto", "theta", "theta_sum", "spectral"}))
      ->capture_default_str();
  kernel->add_option("--target-error", ka.target, "absolute truncation target")
      ->capture_default_str();

  CoherentArgs ca;
  auto *coherent = app.add_subcommand("coherent", "coherent-state wavefunctions or coefficients");
  add_common(coherent, cc);
  coherent->add_option("--x", ca.x, "label position x1,...,x_{d+1} (scaled to radius r)");
  coherent->add_option("--p", ca.p, "label momentum p1,...,p_{d+1}");
  coherent->add_option("--theta", ca.theta, "geodesic distance grid from the label")
      ->capture_default_str();
  coherent->add_flag("--coefficients", ca.coefficients, "write basis coefficients (d = 1, 2)");
  coherent->add_option("--cutoff", ca.cutoff, "basis cutoff (0: certified)")
      ->capture_default_str();

  TransformArgs ta;
  auto *transform = app.add_subcommand("transform", "Segal-Bargmann transform on a phase grid");
  add_common(transform, ct);
  add_state(transform, ta.state);
  transform->add_option("--theta", ta.theta, "position angle grid")->capture_default_str();
  transform->add_option("--p", ta.p, "momentum grid (units of m omega r)")->capture_default_str();
  transform->add_option("--method", ta.method, "exact or quadrature")->capture_default_str();
  transform->add_option("--sphere-order", ta.sphere_order, "sphere rule order (0: automatic)")
      ->capture_default_str();

  InvertArgs ia;
  auto *invert = app.add_subcommand("invert", "recover f from its transform on the fibers");
  add_common(invert, ci);
  add_state(invert, ia.state);
  add_quad(invert, ia.quad);
  invert->add_option("--theta", ia.theta, "output angle grid")->capture_default_str();
  invert->add_option("--measure", ia.measure, "inversion, or resolution (negative control)")
      ->check(CLI::IsMember({"inversion", "resolution"}))
      ->capture_default_str();

  HusimiArgs ha;
  auto *husimi = app.add_subcommand("husimi", "Husimi density of a state");
  add_common(husimi, ch);
  add_state(husimi, ha.state);
  add_quad(husimi, ha.quad);
  husimi->add_option("--grid", ha.grid, "quadrature (nodes and weights) or line")
      ->check(CLI::IsMember({"quadrature", "line"}))
      ->capture_default_str();
  husimi->add_option("--theta", ha.theta, "angle grid for --grid line")->capture_default_str();
  husimi->add_option("--p", ha.p, "momentum grid for --grid line")->capture_default_str();

  ResolveArgs ra;
  auto *resolve = app.add_subcommand("resolve-identity", "phase-space Gram matrix of the basis");
  add_common(resolve, cr);
  add_quad(resolve, ra.quad);
  resolve->add_option("--cutoff", ra.cutoff, "basis cutoff (0: 8 for d=1, 4 for d=2)")
      ->capture_default_str();
  resolve->add_option("--measure", ra.measure, "resolution, or inversion (negative control)")
      ->check(CLI::IsMember({"inversion", "resolution"}))
      ->capture_default_str();

  VerifyArgs va;
  auto *verify = app.add_subcommand("verify", "run the invariant suites");
  verify->add_option("--suite", va.suites, "suites to run (default all)")
      ->delimiter(',')
      ->check(CLI::IsMember(suite_names()));
  verify->add_option("--dim", va.dims, "restrict to these dimensions")->delimiter(',');
  verify->add_option("--tau", va.tau, "override the suites' tau values");
  verify->add_flag("--negative-controls", va.negative, "also run the negative controls");
  verify->add_option("--seed", va.seed, "random seed")->capture_default_str();
  verify->add_option("-o,--output", va.output, "report file, - for stdout")
      ->capture_default_str();

  for (const auto &a : args)
    for (const CLI::App *s : app.get_subcommands({}))
      if (a == s->get_name() && config->active.empty())
        config->active = a;

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    // Subcommand help is raised as CallForHelp from the subcommand.
    if (e.get_exit_code() == 0) {
      for (const CLI::App *s : app.get_subcommands())
        out << s->help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  set_thread_count(g.threads);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const CLI::App *sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "verify")
      return cmd_verify(sub, va, g.timing, out, err);
    json meta;
    meta["command"] = name;
    int code = kExitOk;
    if (name == "kernel")
      code = cmd_kernel(sub, ck, ka, meta, out);
    else if (name == "coherent")
      code = cmd_coherent(sub, cc, ca, meta, out);
    else if (name == "transform")
      code = cmd_transform(sub, ct, ta, meta, out);
    else if (name == "invert")
      code = cmd_invert(sub, ci, ia, meta, out);
    else if (name == "husimi")
      code = cmd_husimi(sub, ch, ha, meta, out);
    else
      code = cmd_resolve(sub, cr, ra, meta, out);
    if (g.timing)
      err << "elapsed_seconds "
          << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
          << "\n";
    return code;
  } catch (const InvalidArgument &e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const UnsupportedDimension &e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ConstraintViolation &e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const Error &e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

} // namespace sphcs::cli
