#include "pma/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace pma {

namespace fs = std::filesystem;
using boost::property_tree::ptree;

namespace {

const std::set<std::string> kParamKeys = {"f0",  "f1",  "k01",  "k02",     "k11",   "k12",
                                          "b0i", "b1i", "b0d",  "b1d",     "mass",  "p_break",
                                          "p_min", "p_max"};

std::set<std::string> with(std::set<std::string> base, std::initializer_list<const char*> more) {
  for (const char* k : more) base.insert(k);
  return base;
}

const std::map<std::string, std::set<std::string>>& scenario_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"scenario",
       {"name", "duration", "dt", "proxy_substeps", "controller", "load_mass", "window_start",
        "window_end", "eps", "force", "seed", "trace"}},
      {"trajectory", {"kind", "amplitude", "offset", "frequency", "f_start", "f_end", "span"}},
      {"model", kParamKeys},
      {"plant", with(kParamKeys, {"coefficient_scale"})},
      {"nominal", kParamKeys},
      {"disturbance", {"kind", "offset", "amplitude", "omega", "frequency", "phase", "terms"}},
      {"gains", {"gamma", "c1", "c2", "kp", "ki", "kd", "l1", "l2", "m_p", "gains_file"}},
      {"smc", {"c1", "c2", "k_sw", "phi"}},
  };
  return schema;
}

void check_schema(const ptree& tree, const std::map<std::string, std::set<std::string>>& schema) {
  for (const auto& [section, body] : tree) {
    const auto it = schema.find(section);
    if (it == schema.end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }
}

ptree read_ini(std::istream& in) {
  ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  for (const auto& [key, value] : tree)
    if (value.empty() && !value.data().empty())
      throw ConfigError("key '" + key + "' outside of any section");
  return tree;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& where, const std::string& text) {
  const std::string t = trim(text);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    throw ConfigError(where + ": expected a finite number, got '" + text + "'");
  return v;
}

long long to_integer(const std::string& where, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(where + ": expected an integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& where, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(where + ": expected a boolean, got '" + text + "'");
}

/// Typed accessors for one section; absent keys leave the target untouched.
class Section {
 public:
  Section(const ptree& tree, std::string name) : name_(std::move(name)) {
    if (const auto child = tree.get_child_optional(name_)) body_ = &*child;
  }

  bool present() const { return body_ != nullptr; }

  std::optional<std::string> raw(const std::string& key) const {
    if (!body_) return std::nullopt;
    if (const auto v = body_->get_optional<std::string>(key)) return trim(*v);
    return std::nullopt;
  }

  void get(const std::string& key, double& out) const {
    if (const auto v = raw(key)) out = to_double(where(key), *v);
  }
  void get(const std::string& key, int& out) const {
    if (const auto v = raw(key)) out = int(to_integer(where(key), *v));
  }
  void get(const std::string& key, std::uint64_t& out) const {
    if (const auto v = raw(key)) {
      const long long n = to_integer(where(key), *v);
      if (n < 0) throw ConfigError(where(key) + ": must be >= 0");
      out = std::uint64_t(n);
    }
  }
  void get(const std::string& key, bool& out) const {
    if (const auto v = raw(key)) out = to_bool(where(key), *v);
  }
  void get(const std::string& key, std::string& out) const {
    if (const auto v = raw(key)) out = *v;
  }
  void get(const std::string& key, std::optional<double>& out) const {
    if (const auto v = raw(key)) out = to_double(where(key), *v);
  }

  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

 private:
  std::string name_;
  const ptree* body_ = nullptr;
};

void read_params(const Section& sec, PmaParams<double>& p) {
  sec.get("f0", p.f0);
  sec.get("f1", p.f1);
  sec.get("k01", p.k01);
  sec.get("k02", p.k02);
  sec.get("k11", p.k11);
  sec.get("k12", p.k12);
  sec.get("b0i", p.b0i);
  sec.get("b1i", p.b1i);
  sec.get("b0d", p.b0d);
  sec.get("b1d", p.b1d);
  sec.get("mass", p.mass);
  sec.get("p_break", p.p_break);
  sec.get("p_min", p.p_min);
  sec.get("p_max", p.p_max);
}

void read_gains(const Section& sec, PsmcGains<double>& g) {
  sec.get("gamma", g.gamma);
  sec.get("c1", g.c1);
  sec.get("c2", g.c2);
  sec.get("kp", g.kp);
  sec.get("ki", g.ki);
  sec.get("kd", g.kd);
  sec.get("l1", g.l1);
  sec.get("l2", g.l2);
  sec.get("m_p", g.m_p);
}

// "a:omega[:phase]" items separated by commas.
std::vector<Sinusoid<double>> parse_terms(const std::string& where, const std::string& text) {
  std::vector<Sinusoid<double>> out;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    if (trim(item).empty()) continue;
    std::vector<std::string> parts;
    std::stringstream fields(item);
    std::string f;
    while (std::getline(fields, f, ':')) parts.push_back(f);
    if (parts.size() < 2 || parts.size() > 3)
      throw ConfigError(where + ": term '" + trim(item) + "' is not amplitude:omega[:phase]");
    Sinusoid<double> s{to_double(where, parts[0]), to_double(where, parts[1]), 0.0};
    if (parts.size() == 3) s.phase = to_double(where, parts[2]);
    out.push_back(s);
  }
  if (out.empty()) throw ConfigError(where + ": no terms");
  return out;
}

DisturbanceProfile<double> read_disturbance(const Section& sec) {
  std::string kind = "zero";
  sec.get("kind", kind);
  double offset = 0, amplitude = 0, phase = 0;
  std::optional<double> omega, frequency;
  sec.get("offset", offset);
  sec.get("amplitude", amplitude);
  sec.get("phase", phase);
  sec.get("omega", omega);
  sec.get("frequency", frequency);
  if (omega && frequency) throw ConfigError("[disturbance]: give omega or frequency, not both");
  const double w = omega ? *omega : frequency ? 2.0 * M_PI * *frequency : 0.0;

  if (kind == "zero") return DisturbanceProfile<double>::zero();
  if (kind == "constant") return DisturbanceProfile<double>::constant(offset);
  if (kind == "sinusoid") {
    auto d = DisturbanceProfile<double>::sinusoid(amplitude, w, phase);
    d.offset = offset;
    return d;
  }
  if (kind == "sum") {
    const auto terms = sec.raw("terms");
    if (!terms) throw ConfigError("[disturbance] kind = sum needs 'terms'");
    auto d = DisturbanceProfile<double>::sum_of_sinusoids(parse_terms(sec.where("terms"), *terms));
    d.offset = offset;
    return d;
  }
  throw ConfigError("[disturbance] kind: unknown '" + kind + "'");
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_params(std::ostream& out, const PmaParams<double>& p) {
  out << "f0 = " << num(p.f0) << "\nf1 = " << num(p.f1) << "\nk01 = " << num(p.k01)
      << "\nk02 = " << num(p.k02) << "\nk11 = " << num(p.k11) << "\nk12 = " << num(p.k12)
      << "\nb0i = " << num(p.b0i) << "\nb1i = " << num(p.b1i) << "\nb0d = " << num(p.b0d)
      << "\nb1d = " << num(p.b1d) << "\nmass = " << num(p.mass) << "\np_break = " << num(p.p_break)
      << "\np_min = " << num(p.p_min) << "\np_max = " << num(p.p_max) << "\n";
}

void write_gain_keys(std::ostream& out, const PsmcGains<double>& g) {
  out << "gamma = " << num(g.gamma) << "\nc1 = " << num(g.c1) << "\nc2 = " << num(g.c2)
      << "\nkp = " << num(g.kp) << "\nki = " << num(g.ki) << "\nkd = " << num(g.kd)
      << "\nl1 = " << num(g.l1) << "\nl2 = " << num(g.l2) << "\nm_p = " << num(g.m_p) << "\n";
}

std::ifstream open(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  return in;
}

Gains8 parse_vector(const std::string& where, const std::string& text) {
  Gains8 v;
  std::stringstream items(text);
  std::string item;
  int k = 0;
  while (std::getline(items, item, ',')) {
    if (k == kGainDim) throw ConfigError(where + ": expected " + std::to_string(kGainDim) + " values");
    v(k++) = to_double(where, item);
  }
  if (k != kGainDim) throw ConfigError(where + ": expected " + std::to_string(kGainDim) + " values");
  return v;
}

}  // namespace

Scenario parse_scenario(std::istream& in, const fs::path& base_dir) {
  const ptree tree = read_ini(in);
  check_schema(tree, scenario_schema());
  Scenario s;

  const Section sc(tree, "scenario");
  sc.get("name", s.name);
  sc.get("duration", s.duration);
  sc.get("dt", s.dt);
  sc.get("proxy_substeps", s.proxy_substeps);
  if (const auto c = sc.raw("controller")) s.controller = controller_from_string(*c);
  sc.get("load_mass", s.load_mass);
  bool window_end_given = sc.raw("window_end").has_value();
  sc.get("window_start", s.window_start);
  sc.get("window_end", s.window_end);
  if (!window_end_given) s.window_end = s.duration;
  sc.get("eps", s.eps);
  sc.get("force", s.force);
  sc.get("seed", s.seed);
  if (const auto t = sc.raw("trace")) s.trace_path = resolve(base_dir, *t).string();
  if (s.proxy_substeps < 1) throw ConfigError("[scenario] proxy_substeps must be >= 1");

  const Section tr(tree, "trajectory");
  std::string kind = "fixed-sine";
  tr.get("kind", kind);
  if (kind == "fixed-sine") s.trajectory.kind = TrajectoryKind::kFixedSine;
  else if (kind == "linear-chirp") s.trajectory.kind = TrajectoryKind::kLinearChirp;
  else throw ConfigError("[trajectory] kind: unknown '" + kind + "'");
  tr.get("amplitude", s.trajectory.amplitude);
  tr.get("offset", s.trajectory.offset);
  tr.get("frequency", s.trajectory.frequency);
  tr.get("f_start", s.trajectory.f_start);
  tr.get("f_end", s.trajectory.f_end);
  tr.get("span", s.trajectory.span);

  // [model] sets both instances; [plant] and [nominal] then override each.
  PmaParams<double> model;
  read_params(Section(tree, "model"), model);
  s.plant = model;
  s.nominal = model;
  const Section plant(tree, "plant");
  read_params(plant, s.plant);
  double scale = 1.0;
  plant.get("coefficient_scale", scale);
  s.plant = s.plant.scaled_coefficients(scale);
  read_params(Section(tree, "nominal"), s.nominal);

  s.disturbance = read_disturbance(Section(tree, "disturbance"));

  const Section gains(tree, "gains");
  if (const auto file = gains.raw("gains_file")) s.gains = load_gains(resolve(base_dir, *file));
  read_gains(gains, s.gains);

  const Section smc(tree, "smc");
  smc.get("c1", s.smc.c1);
  smc.get("c2", s.smc.c2);
  smc.get("k_sw", s.smc.k_sw);
  smc.get("phi", s.smc.phi);

  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return s;
}

Scenario load_scenario(const fs::path& path) {
  auto in = open(path);
  return parse_scenario(in, path.parent_path());
}

void write_scenario(std::ostream& out, const Scenario& s) {
  out << "[scenario]\nname = " << s.name << "\nduration = " << num(s.duration)
      << "\ndt = " << num(s.dt) << "\nproxy_substeps = " << s.proxy_substeps
      << "\ncontroller = " << to_string(s.controller) << "\nload_mass = " << num(s.load_mass)
      << "\nwindow_start = " << num(s.window_start) << "\nwindow_end = " << num(s.window_end)
      << "\n";
  if (s.eps) out << "eps = " << num(*s.eps) << "\n";
  out << "force = " << (s.force ? "true" : "false") << "\nseed = " << s.seed << "\n";
  if (!s.trace_path.empty()) out << "trace = " << s.trace_path << "\n";

  const auto& t = s.trajectory;
  out << "\n[trajectory]\nkind = "
      << (t.kind == TrajectoryKind::kFixedSine ? "fixed-sine" : "linear-chirp")
      << "\namplitude = " << num(t.amplitude) << "\noffset = " << num(t.offset)
      << "\nfrequency = " << num(t.frequency) << "\nf_start = " << num(t.f_start)
      << "\nf_end = " << num(t.f_end) << "\nspan = " << num(t.span) << "\n";

  out << "\n[plant]\n";
  write_params(out, s.plant);
  out << "\n[nominal]\n";
  write_params(out, s.nominal);

  out << "\n[disturbance]\n";
  const auto& d = s.disturbance;
  if (d.terms.empty() && d.offset == 0.0) {
    out << "kind = zero\n";
  } else if (d.terms.empty()) {
    out << "kind = constant\noffset = " << num(d.offset) << "\n";
  } else {
    out << "kind = sum\noffset = " << num(d.offset) << "\nterms = ";
    for (std::size_t i = 0; i < d.terms.size(); ++i)
      out << (i ? ", " : "") << num(d.terms[i].amplitude) << ":" << num(d.terms[i].omega) << ":"
          << num(d.terms[i].phase);
    out << "\n";
  }

  out << "\n[gains]\n";
  write_gain_keys(out, s.gains);
  out << "\n[smc]\nc1 = " << num(s.smc.c1) << "\nc2 = " << num(s.smc.c2)
      << "\nk_sw = " << num(s.smc.k_sw) << "\nphi = " << num(s.smc.phi) << "\n";
}

PsmcGains<double> parse_gains(std::istream& in) {
  const ptree tree = read_ini(in);
  check_schema(tree, {{"gains", {"gamma", "c1", "c2", "kp", "ki", "kd", "l1", "l2", "m_p"}}});
  PsmcGains<double> g = published_gains();
  read_gains(Section(tree, "gains"), g);
  return g;
}

PsmcGains<double> load_gains(const fs::path& path) {
  auto in = open(path);
  return parse_gains(in);
}

void write_gains(std::ostream& out, const PsmcGains<double>& g) {
  out << "[gains]\n";
  write_gain_keys(out, g);
}

TuneJob parse_tune_job(std::istream& in, const fs::path& base_dir) {
  const ptree tree = read_ini(in);
  check_schema(tree, {{"fa",
                       {"n", "generations", "beta0", "gamma", "alpha", "alpha_decay", "lambda",
                        "penalty", "seed", "threads", "lower", "upper"}},
                      {"tune", {"name", "scenario"}}});
  TuneJob job;
  const Section tune(tree, "tune");
  tune.get("name", job.name);
  if (const auto p = tune.raw("scenario")) job.scenario = load_scenario(resolve(base_dir, *p));

  // Default box: half to twice the published gains.
  const Gains8 centre = published_gains().to_vector();
  job.fa.lower = 0.5 * centre;
  job.fa.upper = 2.0 * centre;

  const Section fa(tree, "fa");
  fa.get("n", job.fa.n);
  fa.get("generations", job.fa.max_generations);
  fa.get("beta0", job.fa.beta0);
  fa.get("gamma", job.fa.gamma_fa);
  fa.get("alpha", job.fa.alpha);
  fa.get("alpha_decay", job.fa.alpha_decay);
  fa.get("lambda", job.fa.lambda_tradeoff);
  fa.get("seed", job.fa.rng_seed);
  fa.get("threads", job.fa.threads);
  if (const auto v = fa.raw("lower")) job.fa.lower = parse_vector(fa.where("lower"), *v);
  if (const auto v = fa.raw("upper")) job.fa.upper = parse_vector(fa.where("upper"), *v);

  // Reference objective: holding x = 0 against the whole reference excursion.
  const auto& t = job.scenario.trajectory;
  const double reference = (t.offset + t.amplitude) * (1.0 + job.fa.lambda_tradeoff);
  job.fa.penalty = 1e3 * reference;
  fa.get("penalty", job.fa.penalty);

  job.fa.validate();
  return job;
}

TuneJob load_tune_job(const fs::path& path) {
  auto in = open(path);
  return parse_tune_job(in, path.parent_path());
}

}  // namespace pma
