#include "greenp2cli/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "greenp2/error.hpp"
#include "greenp2/invariants.hpp"
#include "greenp2/multiplicity.hpp"
#include "greenp2/potentials.hpp"
#include "greenp2/sampling.hpp"

namespace greenp2cli {

using namespace greenp2;

std::uint64_t default_seed() {
  const char* env = std::getenv("GREENP2_DEFAULT_SEED");
  if (env == nullptr) return kFallbackSeed;
  const std::string_view s(env);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return kFallbackSeed;
  return v;
}

namespace {

const char* command_name(Command c) {
  switch (c) {
    case Command::Green: return "green";
    case Command::Mult: return "mult";
    case Command::Invariants: return "invariants";
    case Command::Classify: return "classify";
    case Command::Equidist: return "equidist";
    case Command::Lelong: return "lelong";
    case Command::Kiselman: return "kiselman";
    case Command::Volume: return "volume";
    case Command::Gen: return "gen";
  }
  return "";
}

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Json point_json(const ProjPoint& p) {
  return Json::array({complex_json(p[0]), complex_json(p[1]), complex_json(p[2])});
}

Json poly_json(const HomogPoly3& h) {
  Json terms = Json::array();
  h.for_each_term([&](int i, int j, int k, Complex c) {
    if (c != Complex(0.0)) terms.push_back(Json::array({i, j, k, c.real(), c.imag()}));
  });
  return {{"degree", h.degree()}, {"terms", std::move(terms)}};
}

Json line_json(const InvariantLine& l) {
  return {{"form", poly_json(l.form)}, {"lambda", complex_json(l.lambda)}, {"residual", l.residual}};
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
}

int positive(std::optional<int> v, int fallback, const char* name) {
  const int x = v.value_or(fallback);
  require(x > 0, std::string("--") + name + " must be positive");
  return x;
}

ProjMap read_map(const RunConfig& c, std::istream& input) {
  if (!c.map_path.empty()) return load_map(c.map_path);
  std::ostringstream buf;
  buf << input.rdbuf();
  return parse_map(buf.str());
}

std::vector<ProjPoint> parse_points(const RunConfig& c, const char* cmd) {
  require(!c.points.empty(), std::string(cmd) + " needs at least one --point");
  std::vector<ProjPoint> out;
  for (const auto& s : c.points) out.push_back(parse_point(s));
  return out;
}

class Csv {
 public:
  Csv() { os_ << "n,value,stderr,clip_fraction\n"; }
  void row(int n, double value, double err, double clip) {
    os_ << n << ',' << num(value) << ',' << num(err) << ',' << num(clip) << '\n';
  }
  std::string str() const { return os_.str(); }

 private:
  static std::string num(double v) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(17) << v;
    return s.str();
  }
  std::ostringstream os_;
};

void green_cmd(const RunConfig& c, const ProjMap& f, Outcome& o) {
  const double tol = c.tol.value_or(1e-8);
  std::vector<ProjPoint> pts;
  int samples = 0;
  if (c.points.empty()) {
    samples = positive(c.samples, 10, "samples");
    Rng rng(c.seed);
    for (int i = 0; i < samples; ++i) pts.push_back(ProjPoint::from(rng.fs_point()));
  } else {
    pts = parse_points(c, "green");
  }
  const GreenEvaluator g(f);
  Json results = Json::array();
  std::vector<std::vector<double>> partial;
  std::size_t longest = 0;
  for (const auto& p : pts) {
    const GreenEval e = g(p, tol);
    if (!(e.tail_bound <= tol)) o.flags.push_back("green: tail bound above tolerance");
    results.push_back({{"point", point_json(p)},
                       {"value", e.value},
                       {"n_used", e.n_used},
                       {"tail_bound", e.tail_bound},
                       {"tol", tol}});
    const LogOrbit orbit = iterate_lognorm(f, p, e.n_used);
    std::vector<double> v;
    for (std::size_t n = 0; n < orbit.lognorms.size(); ++n)
      v.push_back(orbit.lognorms[n] * std::pow(static_cast<double>(f.degree()), -static_cast<double>(n)));
    longest = std::max(longest, v.size());
    partial.push_back(std::move(v));
  }
  o.report["tol"] = tol;
  o.report["M"] = g.sup_bound();
  o.report["seed"] = c.seed;
  o.report["samples"] = samples;
  o.report["results"] = std::move(results);
  Csv csv;
  for (std::size_t n = 0; n < longest; ++n) {
    std::vector<double> col;
    for (const auto& v : partial) col.push_back(v[std::min(n, v.size() - 1)]);
    const double m = pairwise_sum(col) / static_cast<double>(col.size());
    std::vector<double> sq;
    for (double x : col) sq.push_back((x - m) * (x - m));
    const double se =
        col.size() > 1 ? std::sqrt(pairwise_sum(sq) / static_cast<double>(col.size() - 1) / col.size()) : 0.0;
    csv.row(static_cast<int>(n), m, se, 0.0);
  }
  o.csv = csv.str();
}

Json int_list(const std::vector<int>& v) { return Json(v); }

void mult_cmd(const RunConfig& c, const ProjMap& f, Outcome& o) {
  const int horizon = positive(c.n, 3, "n");
  Json results = Json::array();
  for (const auto& p : parse_points(c, "mult")) {
    Json r{{"point", point_json(p)}, {"horizon", horizon}, {"order_tol", MultiplicityOptions{}.order_tol}};
    try {
      const MultiplicityReport m = asymptotics(f, p, horizon);
      Json orbit = Json::array();
      ProjPoint x = p;
      for (int j = 0; j <= horizon; ++j) {
        orbit.push_back(point_json(x));
        x = f.apply(x);
      }
      r["orbit"] = std::move(orbit);
      r["mu_series"] = int_list(m.mu_series);
      r["mu_direct_series"] = int_list(m.mu_direct_series);
      r["e_series"] = int_list(m.e_series);
      r["c_series"] = int_list(m.c_series);
      r["mu_step"] = int_list(m.mu_step);
      r["e_step"] = int_list(m.e_step);
      r["c_step"] = int_list(m.c_step);
      r["mu_inf_est"] = m.mu_inf_est;
      r["mu_inf_est_alt"] = m.mu_inf_est_alt;
      r["e_inf_est"] = m.e_inf_est;
      r["c_inf_est"] = m.c_inf_est;
      Json verdicts = Json::object();
      for (const auto& [name, ok] : m.verdicts) verdicts[name] = ok;
      r["verdicts"] = std::move(verdicts);
    } catch (const Error& e) {
      r["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
      o.flags.push_back("mult: " + std::string(to_string(e.code())));
    }
    results.push_back(std::move(r));
  }
  o.report["results"] = std::move(results);
}

Json sets_json(const ExceptionalSets& s, Outcome& o) {
  Json e1 = Json::array(), rejected = Json::array(), e2 = Json::array(), orbits = Json::array();
  for (const auto& l : s.e1_lines) e1.push_back(line_json(l));
  for (const auto& l : s.rejected_lines) rejected.push_back(line_json(l));
  for (const auto& p : s.e2_points)
    e2.push_back({{"point", point_json(p.point)}, {"kind", to_string(p.kind)}, {"period", p.period}});
  for (const auto& orbit : s.invariant_orbits) {
    Json pts = Json::array();
    for (const auto& p : orbit) pts.push_back(point_json(p));
    orbits.push_back(std::move(pts));
  }
  if (s.assumption_flag) o.flags.push_back("invariants: point search incomplete or E2 kind undetermined");
  return {{"e1_lines", std::move(e1)},
          {"e2_points", std::move(e2)},
          {"rejected_lines", std::move(rejected)},
          {"invariant_orbits", std::move(orbits)},
          {"assumption_flag", s.assumption_flag},
          {"notes", s.notes}};
}

void invariants_cmd(const RunConfig& c, const ProjMap& f, Outcome& o) {
  const int horizon = positive(c.n, 2, "n");
  const ExceptionalSets sets = exceptional_sets(f, horizon);
  o.report["horizon"] = horizon;
  o.report["exceptional"] = sets_json(sets, o);
  try {
    const TransitionMatrix t = transition_matrix(f);
    Json comps = Json::array();
    for (const auto& h : t.components) comps.push_back(poly_json(h));
    o.report["transition"] = {{"components", std::move(comps)},
                              {"t", t.t},
                              {"slopes", t.slopes},
                              {"rho", t.rho},
                              {"perron", t.perron}};
  } catch (const Error& e) {
    o.report["transition"] = {{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
    o.flags.push_back("transition: " + std::string(to_string(e.code())));
  }
}

void classify_cmd(const RunConfig& c, const ProjMap& f, Outcome& o) {
  const int horizon = positive(c.n, 2, "n");
  const ExceptionalSets sets = exceptional_sets(f, horizon);
  const Configuration k = classify(sets);
  o.report["horizon"] = horizon;
  o.report["row"] = k.row;
  o.report["label"] = k.label;
  o.report["listed"] = k.listed;
  o.report["lines"] = k.lines;
  o.report["points"] = k.points;
  o.report["incidence"] = k.incidence;
  o.report["exceptional"] = sets_json(sets, o);
}

void equidist_cmd(const RunConfig& c, const ProjMap& f, Outcome& o) {
  const std::string expr = c.curve.value_or("z+w+2t");
  const HomogPoly3 phi = parse_curve(expr);
  const int n_max = c.n.value_or(8);
  require(n_max >= 0, "--n must be nonnegative");
  const int samples = positive(c.samples, 10000, "samples");
  require(samples >= 1000, "equidist needs --samples >= 1000");
  const EquidistReport r = equidist_distance(f, phi, n_max, samples, c.seed, c.threads);
  Json rows = Json::array();
  Csv csv;
  for (const auto& row : r.per_n) {
    if (!std::isfinite(row.l1_distance)) o.flags.push_back("equidist: non-finite distance");
    rows.push_back({{"n", row.n},
                    {"l1_distance", row.l1_distance},
                    {"stderr", row.stderr_},
                    {"clip_fraction", row.clip_fraction}});
    csv.row(row.n, row.l1_distance, row.stderr_, row.clip_fraction);
  }
  o.report["curve"] = expr;
  o.report["curve_poly"] = poly_json(phi);
  o.report["seed"] = r.seed;
  o.report["samples"] = r.samples;
  o.report["clip_floor"] = r.clip_floor;
  o.report["green_tol"] = r.green_tol;
  o.report["per_n"] = std::move(rows);
  o.report["nonconvergence"] = r.nonconvergence;
  o.csv = csv.str();
}

struct PulledCurve {
  HomogPoly3 phi;
  std::string label;
  int n = 0;
  /// k d^n, the degree of phi o F^n.
  double scale = 1.0;
};

PulledCurve pulled_curve(const RunConfig& c, const ProjMap& f) {
  PulledCurve out;
  out.label = c.curve.value_or("jacobian");
  out.phi = c.curve ? parse_curve(*c.curve) : f.lift_jacobian();
  out.n = c.n.value_or(0);
  require(out.n >= 0, "--n must be nonnegative");
  out.scale = out.phi.degree() * std::pow(static_cast<double>(f.degree()), out.n);
  return out;
}

ChartPotential chart_potential(const ProjMap& f, const PulledCurve& pc, int chart) {
  return [&f, &pc, chart](Complex a, Complex b) {
    try {
      return curve_potential(f, pc.phi, pc.n, ProjPoint::from_chart(chart, {a, b}));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OnCurve) throw;
      return -HUGE_VAL;
    }
  };
}

void potential_header(const PulledCurve& pc, Outcome& o) {
  o.report["curve"] = pc.label;
  o.report["curve_poly"] = poly_json(pc.phi);
  o.report["n"] = pc.n;
  o.report["normalization"] = pc.scale;
}

void lelong_cmd(const RunConfig& c, const ProjMap& f, Outcome& o) {
  const PulledCurve pc = pulled_curve(c, f);
  potential_header(pc, o);
  Json results = Json::array();
  for (const auto& p : parse_points(c, "lelong")) {
    const int chart = p.best_chart();
    Json r{{"point", point_json(p)}, {"chart", chart}, {"radii", default_radii()}, {"angular_samples", 64}};
    try {
      const LelongEstimate e = lelong_estimate(chart_potential(f, pc, chart), p.chart_coords(chart));
      r["value"] = e.value;
      r["order"] = e.value * pc.scale;
      r["fit_residual"] = e.fit_residual;
    } catch (const Error& e) {
      r["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
      o.flags.push_back("lelong: " + std::string(to_string(e.code())));
    }
    results.push_back(std::move(r));
  }
  o.report["results"] = std::move(results);
}

void kiselman_cmd(const RunConfig& c, const ProjMap& f, Outcome& o) {
  const PulledCurve pc = pulled_curve(c, f);
  potential_header(pc, o);
  std::vector<double> alphas = c.alphas;
  if (alphas.empty())
    for (int k = 1; k <= 10; ++k) alphas.push_back(0.1 * k);
  for (double a : alphas) require(a > 0.0, "--alpha values must be positive");
  const auto pts = parse_points(c, "kiselman");
  const int chart = pts.front().best_chart();
  std::vector<Pair> coords;
  for (const auto& p : pts) coords.push_back(p.chart_coords(chart));
  Json points = Json::array();
  for (const auto& p : pts) points.push_back(point_json(p));
  o.report["points"] = std::move(points);
  o.report["chart"] = chart;
  o.report["radii"] = default_radii();
  o.report["angular_samples"] = 64;
  try {
    const DecayTable t = kiselman_decay_scan(chart_potential(f, pc, chart), coords, alphas);
    Json rows = Json::array();
    for (std::size_t i = 0; i < t.alphas.size(); ++i)
      rows.push_back({{"weights", {t.alphas[i], 1.0}}, {"value", t.values[i]}, {"order", t.values[i] * pc.scale}});
    o.report["scan"] = std::move(rows);
    o.report["monotone"] = t.monotone;
  } catch (const Error& e) {
    o.report["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    o.flags.push_back("kiselman: " + std::string(to_string(e.code())));
  }
}

void volume_cmd(const RunConfig& c, const ProjMap& f, Outcome& o) {
  require(c.points.size() == 1, "volume needs exactly one --point");
  const ProjPoint p = parse_point(c.points.front());
  const int n_max = c.n.value_or(4);
  require(n_max >= 0, "--n must be nonnegative");
  const int samples = positive(c.samples, 10000, "samples");
  const double radius = c.radius.value_or(0.1);
  require(radius > 0.0, "--radius must be positive");
  const int chart = p.best_chart();
  const ChartBall ball{chart, p.chart_coords(chart), radius};
  Json rows = Json::array();
  Csv csv;
  std::vector<double> logs;
  for (int n = 0; n <= n_max; ++n) {
    const VolumeDecay v = volume_decay(f, ball, n, samples, c.seed, c.threads);
    logs.push_back(v.log_jacobian_bound);
    rows.push_back({{"n", n},
                    {"jacobian_bound", v.jacobian_bound},
                    {"jacobian_stderr", v.jacobian_stderr},
                    {"log_jacobian_bound", v.log_jacobian_bound},
                    {"occupancy", v.occupancy},
                    {"occupancy_stderr", v.occupancy_stderr},
                    {"samples", v.samples},
                    {"seed", v.seed}});
    const double rel = v.jacobian_bound > 0.0 ? v.jacobian_stderr / v.jacobian_bound : 0.0;
    csv.row(n, v.log_jacobian_bound, rel, 0.0);
    if (!std::isfinite(v.log_jacobian_bound)) o.flags.push_back("volume: non-finite Jacobian bound");
    if (n == 0) o.report["ball_volume"] = v.ball_volume;
  }
  o.report["center"] = point_json(p);
  o.report["chart"] = chart;
  o.report["radius"] = radius;
  o.report["seed"] = c.seed;
  o.report["samples"] = samples;
  o.report["per_n"] = std::move(rows);
  o.report["inner_decay_rate"] = inner_decay_rate(logs);
  o.report["log_degree"] = std::log(static_cast<double>(f.degree()));
  o.csv = csv.str();
}

Json gen_cmd(const RunConfig& c) {
  const int d = c.d.value_or(2);
  if (c.generator == "table1") {
    require(c.row.has_value(), "gen table1 needs --row");
    const ProjMap f = gen_table1(*c.row, d, c.seed);
    return map_to_json(f, {{"generator", "table1"}, {"row", *c.row}, {"d", d}, {"seed", c.seed}});
  }
  if (c.generator == "lattes-ueda") {
    const ProjMap f = gen_lattes_ueda(d);
    return map_to_json(f, {{"generator", "lattes-ueda"}, {"d", d}});
  }
  throw Error(ErrorCode::InvalidArgument, "gen expects table1 or lattes-ueda, got \"" + c.generator + "\"");
}

}  // namespace

Outcome execute(const RunConfig& c, std::istream& input) {
  require(c.threads >= 1, "--threads must be positive");
  if (c.tol) require(*c.tol > 0.0, "--tol must be positive");
  Outcome o;
  if (c.command == Command::Gen) {
    o.report = gen_cmd(c);
    return o;
  }
  const ProjMap f = read_map(c, input);
  o.report["schema"] = 1;
  o.report["command"] = command_name(c.command);
  o.report["degree"] = f.degree();
  switch (c.command) {
    case Command::Green: green_cmd(c, f, o); break;
    case Command::Mult: mult_cmd(c, f, o); break;
    case Command::Invariants: invariants_cmd(c, f, o); break;
    case Command::Classify: classify_cmd(c, f, o); break;
    case Command::Equidist: equidist_cmd(c, f, o); break;
    case Command::Lelong: lelong_cmd(c, f, o); break;
    case Command::Kiselman: kiselman_cmd(c, f, o); break;
    case Command::Volume: volume_cmd(c, f, o); break;
    case Command::Gen: break;
  }
  o.report["flags"] = o.flags;
  return o;
}

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, path + ": cannot open for writing");
  out << text;
  if (!out) throw Error(ErrorCode::InvalidArgument, path + ": write failed");
}

void report_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << Json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int run(const RunConfig& c, std::istream& input, std::ostream& out, std::ostream& err) {
  try {
    const Outcome o = execute(c, input);
    if (!c.csv_path.empty()) {
      require(!o.csv.empty(), std::string(command_name(c.command)) + " has no CSV series");
      write_file(c.csv_path, o.csv);
    }
    const std::string text = o.report.dump(2) + "\n";
    if (c.out_path.empty()) out << text << std::flush;
    else write_file(c.out_path, text);
    return o.flags.empty() ? 0 : 2;
  } catch (const Error& e) {
    report_error(err, to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    report_error(err, "Internal", e.what());
  }
  return 1;
}

}  // namespace greenp2cli
