#include "mckle/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "mckle/errors.hpp"
#include "mckle/inference.hpp"
#include "mckle/models.hpp"
#include "mckle/objective.hpp"
#include "mckle/simulate.hpp"
#include "mckle/solver.hpp"

namespace mckle::cli {

namespace {

using json = nlohmann::ordered_json;

// Bad input file or contents: exit 1.
struct InputError : Error {
  using Error::Error;
};
// Flag combination the parser cannot express: exit 64.
struct UsageError : Error {
  using Error::Error;
};

json num(double v) {
  if (!std::isfinite(v)) return v > 0 ? json("inf") : (v < 0 ? json("-inf") : json(nullptr));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return json(std::strtod(buf, nullptr));
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json params_json(const Family& f, const ParamVector& p) {
  json o = json::object();
  for (std::size_t j = 0; j < f.dim(); ++j) {
    o[f.descriptor().params[j].name] = num(p[static_cast<Eigen::Index>(j)]);
  }
  return o;
}

// "name=value" pairs in any order, every family parameter exactly once.
ParamVector parse_params(const Family& f, const std::vector<std::string>& pairs) {
  const auto& specs = f.descriptor().params;
  std::map<std::string, double> given;
  for (const auto& kv : pairs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("expected name=value, got '" + kv + "'");
    const std::string name = kv.substr(0, eq);
    double v = 0.0;
    const std::string val = kv.substr(eq + 1);
    const auto res = std::from_chars(val.data(), val.data() + val.size(), v);
    if (res.ec != std::errc() || res.ptr != val.data() + val.size()) {
      throw UsageError("bad number in '" + kv + "'");
    }
    if (!given.emplace(name, v).second) throw UsageError("parameter " + name + " given twice");
  }
  ParamVector p(static_cast<Eigen::Index>(specs.size()));
  for (std::size_t j = 0; j < specs.size(); ++j) {
    auto it = given.find(specs[j].name);
    if (it == given.end()) throw UsageError("missing parameter " + specs[j].name);
    p[static_cast<Eigen::Index>(j)] = it->second;
    given.erase(it);
  }
  if (!given.empty()) {
    throw UsageError("unknown parameter " + given.begin()->first + " for " + std::string(f.name()));
  }
  f.validate(p);
  return p;
}

// "a:b:c" (inclusive range with step) or "a,b,c".
std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  const auto to_size = [&](const std::string& t) {
    std::size_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || v == 0) {
      throw UsageError("bad sample size '" + t + "'");
    }
    return v;
  };
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string t;
    while (std::getline(ss, t, ':')) parts.push_back(t);
    if (parts.size() != 3) throw UsageError("sizes range must be start:stop:step");
    const std::size_t a = to_size(parts[0]), b = to_size(parts[1]), c = to_size(parts[2]);
    if (b < a) throw UsageError("sizes range stop below start");
    for (std::size_t v = a; v <= b; v += c) out.push_back(v);
  } else {
    std::stringstream ss(s);
    std::string t;
    while (std::getline(ss, t, ',')) out.push_back(to_size(t));
  }
  if (out.empty()) throw UsageError("no sample sizes");
  return out;
}

struct Request {
  std::string model;
  std::string data;
  std::vector<std::string> params;
  std::string method = "auto";
  std::string kind = "divergence";
  std::string format = "csv";
  std::string out_path;
  std::string sizes;
  std::string estimators = "mckle,mle";
  double level = 0.95;
  double alpha = 0.05;
  double beta = 0.8;
  std::optional<double> null_value;
  std::optional<double> alt_value;
  std::optional<double> n_power;
  long long reps = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

Sample load_sample(const Request& r) {
  if (r.data.empty()) throw UsageError("--data is required");
  std::vector<double> v;
  try {
    v = read_data_file(r.data);
    return Sample::build(v);
  } catch (const Error& e) {
    throw InputError(e.what());
  }
}

FitOptions fit_options(const Request& r) {
  FitOptions o;
  o.method = parse_fit_method(r.method);
  return o;
}

double scalar_arg(const std::optional<double>& v, const char* flag) {
  if (!v) throw UsageError(std::string(flag) + " is required");
  return *v;
}

void require_scalar(const Family& f, const char* cmd) {
  if (f.dim() != 1) {
    throw UsageError(std::string(cmd) + " supports one-parameter families only (exponential, laplace)");
  }
}

int cmd_fit(const Request& r, std::ostream& out) {
  const auto f = make_family(r.model);
  const Sample s = load_sample(r);
  const FitResult fr = fit(*f, s, fit_options(r));
  json doc;
  doc["family"] = std::string(f->name());
  doc["n"] = s.n();
  doc["theta_hat"] = params_json(*f, fr.theta_hat);
  if (f->id() == FamilyId::exponential) doc["lambda_u"] = num(exponential_unbiased_mckle(s));
  doc["g_at_opt"] = num(fr.g_at_opt);
  doc["method"] = std::string(fit_path_name(fr.method));
  doc["iterations"] = fr.iterations;
  doc["converged"] = fr.converged;
  doc["hessian_pd"] = fr.hessian_pd;
  doc["support_warning"] = fr.support_warning;
  doc["gradient_norm"] = num(fr.gradient_norm);
  json warnings = fr.warnings;
  try {
    doc["V_hat"] = matrix_json(sandwich(*f, fr, s).V_hat);
  } catch (const Error& e) {
    doc["V_hat"] = nullptr;
    warnings.push_back(e.what());
  }
  doc["warnings"] = warnings;
  out << doc.dump(2) << '\n';
  return fr.converged ? kOk : kNotConverged;
}

int cmd_interval(const Request& r, std::ostream& out) {
  const auto f = make_family(r.model);
  require_scalar(*f, "interval");
  const Sample s = load_sample(r);
  const FitResult fr = fit(*f, s, fit_options(r));
  IntervalResult iv{};
  if (r.kind == "wald") {
    iv = wald_ci(*f, fr, s, r.level);
  } else if (r.kind == "divergence") {
    iv = divergence_interval(*f, s, fr, r.level);
  } else {
    throw UsageError("--kind must be wald or divergence");
  }
  json doc;
  doc["family"] = std::string(f->name());
  doc["n"] = s.n();
  doc["kind"] = std::string(interval_kind_name(iv.kind));
  doc["level"] = num(iv.level);
  doc["theta_hat"] = params_json(*f, fr.theta_hat);
  if (f->id() == FamilyId::exponential) doc["lambda_u"] = num(exponential_unbiased_mckle(s));
  doc["lower"] = num(iv.lower);
  doc["upper"] = num(iv.upper);
  if (iv.cutoff_k) doc["cutoff_k"] = num(*iv.cutoff_k);
  if (iv.c_theta) doc["c_theta"] = num(*iv.c_theta);
  if (iv.kind == IntervalKind::divergence) {
    doc["lower_at_boundary"] = iv.lower_at_boundary;
    doc["upper_at_boundary"] = iv.upper_at_boundary;
  }
  doc["converged"] = fr.converged;
  out << doc.dump(2) << '\n';
  return fr.converged ? kOk : kNotConverged;
}

int cmd_test(const Request& r, std::ostream& out) {
  const auto f = make_family(r.model);
  require_scalar(*f, "test");
  const double theta0 = scalar_arg(r.null_value, "--null");
  const Sample s = load_sample(r);
  const FitResult fr = fit(*f, s, fit_options(r));
  const TestResult t = gddt_test(*f, s, fr, theta0, r.alpha);
  json doc;
  doc["family"] = std::string(f->name());
  doc["n"] = s.n();
  doc["theta0"] = num(t.theta0);
  doc["theta_hat"] = num(t.theta_hat);
  doc["statistic"] = num(t.statistic_gddt);
  doc["c_at_null"] = num(t.c_at_null);
  doc["critical_value"] = num(t.critical_value);
  doc["p_value"] = num(t.p_value);
  doc["reject"] = t.reject;
  doc["alpha"] = num(t.alpha);
  if (t.region) {
    json reg;
    reg["a"] = num(t.region->a);
    reg["b"] = num(t.region->b);
    reg["c"] = num(t.region->c);
    reg["lower_root"] = t.region->lower_root ? num(*t.region->lower_root) : json(nullptr);
    reg["upper_root"] = t.region->upper_root ? num(*t.region->upper_root) : json(nullptr);
    reg["sqrt_mean_sq"] = num(std::sqrt(s.mean_sq()));
    reg["reject"] = t.region->reject;
    doc["region"] = reg;
  }
  doc["converged"] = fr.converged;
  out << doc.dump(2) << '\n';
  return fr.converged ? kOk : kNotConverged;
}

json power_inputs_json(const PowerInputs& in) {
  json o;
  o["g0"] = num(in.g0);
  o["g1"] = num(in.g1);
  o["c0"] = num(in.c0);
  o["c1"] = num(in.c1);
  return o;
}

int cmd_power(const Request& r, std::ostream& out, bool sample_size) {
  const auto f = make_family(r.model);
  require_scalar(*f, sample_size ? "samplesize" : "power");
  const double theta0 = scalar_arg(r.null_value, "--null");
  const double theta1 = scalar_arg(r.alt_value, "--alt");
  std::optional<Sample> s;
  if (!r.data.empty()) s = load_sample(r);
  const PowerInputs in = power_inputs(*f, theta0, theta1, s ? &*s : nullptr);
  json doc;
  doc["family"] = std::string(f->name());
  doc["theta0"] = num(theta0);
  doc["theta1"] = num(theta1);
  doc["alpha"] = num(r.alpha);
  doc["objective"] = s ? "sample" : "population";
  doc["inputs"] = power_inputs_json(in);
  if (sample_size) {
    const SampleSizeResult ss = required_sample_size(in, r.alpha, r.beta);
    doc["beta"] = num(r.beta);
    doc["n0"] = num(ss.n0);
    doc["n_star"] = ss.n_star;
    doc["power_at_n_star"] = num(power_approx(in, r.alpha, static_cast<double>(ss.n_star)));
    if (ss.warning) doc["warning"] = *ss.warning;
  } else {
    if (!r.n_power || !(*r.n_power >= 1.0)) throw UsageError("--n >= 1 is required");
    doc["n"] = num(*r.n_power);
    doc["power"] = num(power_approx(in, r.alpha, *r.n_power));
  }
  out << doc.dump(2) << '\n';
  return kOk;
}

int cmd_gof(const Request& r, std::ostream& out) {
  const auto f = make_family(r.model);
  const Sample s = load_sample(r);
  const FitResult fr = fit(*f, s, fit_options(r));
  const double cn = empirical_entropy_constant(s);
  // Clamp the rounding residue of an exact fit.
  const double div = std::max(0.0, cn + fr.g_at_opt - s.mean_abs());
  json doc;
  doc["family"] = std::string(f->name());
  doc["n"] = s.n();
  doc["theta_hat"] = params_json(*f, fr.theta_hat);
  doc["divergence"] = num(div);
  doc["g_at_opt"] = num(fr.g_at_opt);
  doc["entropy_constant"] = num(cn);
  doc["converged"] = fr.converged;
  doc["support_warning"] = fr.support_warning;
  out << doc.dump(2) << '\n';
  return fr.converged ? kOk : kNotConverged;
}

int cmd_simulate(const Request& r, std::ostream& out) {
  const auto f = make_family(r.model);
  StudyConfig cfg;
  cfg.family = f->id();
  cfg.params = parse_params(*f, r.params);
  if (r.sizes.empty()) throw UsageError("--sizes is required");
  cfg.sizes = parse_sizes(r.sizes);
  cfg.replicates = static_cast<std::size_t>(r.reps);
  cfg.seed = r.seed;
  cfg.threads = r.threads;
  cfg.estimators.clear();
  std::stringstream ss(r.estimators);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      cfg.estimators.push_back(parse_estimator(tok));
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
  const SimulationReport rep = run_study(cfg);
  if (r.format == "json") {
    json doc;
    doc["family"] = std::string(f->name());
    doc["params"] = params_json(*f, cfg.params);
    doc["seed"] = cfg.seed;
    doc["replicates"] = cfg.replicates;
    json rows = json::array();
    for (const auto& row : rep.rows) {
      json o;
      o["size"] = row.size;
      o["estimator"] = std::string(estimator_name(row.estimator));
      o["parameter"] = row.parameter;
      o["mean"] = num(row.mean);
      o["ratio"] = num(row.ratio);
      o["variance"] = num(row.variance);
      o["failures"] = row.failures;
      o["flagged"] = row.flagged;
      rows.push_back(o);
    }
    doc["rows"] = rows;
    out << doc.dump(2) << '\n';
  } else {
    write_report_csv(rep, out);
  }
  return kOk;
}

// Open interval (0,1) check for level/alpha/beta.
const auto kOpenUnit = CLI::Validator(
    [](std::string& s) -> std::string {
      double v = 0.0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || !(v > 0.0 && v < 1.0)) return "value must lie in (0,1)";
      return {};
    },
    "in (0,1)");

}  // namespace

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::size_t i = 0;
  bool first = true;
  while (i < text.size()) {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',')) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != ',') ++j;
    const std::string tok = text.substr(i, j - i);
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      if (!first) throw DataError("non-numeric token '" + tok + "'");
      // Header: skip the rest of the first line.
      while (j < text.size() && text[j] != '\n') ++j;
    } else {
      out.push_back(v);
    }
    first = false;
    i = j;
  }
  if (out.empty()) throw DataError("no numeric values in input");
  return out;
}

std::vector<double> read_data_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_numbers(ss.str());
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimum cumulative KL estimation toolkit", "mckle"};
  app.require_subcommand(1);
  Request r;
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"fit", "Fit a family to data"},
      {"interval", "Wald or divergence confidence interval"},
      {"test", "Divergence difference test of a point null"},
      {"power", "Approximate power of the divergence difference test"},
      {"samplesize", "Sample size for a target power"},
      {"gof", "Cumulative KL divergence at the fitted model"},
      {"simulate", "Seeded Monte Carlo study (CSV)"},
  };
  std::map<std::string, CLI::App*> cmd;
  for (const auto& [name, desc] : subs) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->add_option("--model", r.model, "exponential|laplace|twoparamexp|pareto|normal")->required();
    s->add_option("--out", r.out_path, "Write the document here instead of stdout");
    cmd[name] = s;
  }
  for (const char* name : {"fit", "interval", "test", "gof"}) {
    cmd[name]->add_option("--data", r.data, "CSV of observations")->required();
    cmd[name]->add_option("--method", r.method, "auto|closed|numeric")
        ->check(CLI::IsMember({"auto", "closed", "numeric"}));
  }
  for (const char* name : {"power", "samplesize"}) {
    cmd[name]->add_option("--data", r.data, "Use this sample's objective");
  }
  cmd["interval"]->add_option("--kind", r.kind)->check(CLI::IsMember({"wald", "divergence"}));
  cmd["interval"]->add_option("--level", r.level)->check(kOpenUnit);
  for (const char* name : {"test", "power", "samplesize"}) {
    cmd[name]->add_option("--null", r.null_value, "Null value theta0")->required();
    cmd[name]->add_option("--alpha", r.alpha)->check(kOpenUnit);
  }
  for (const char* name : {"power", "samplesize"}) {
    cmd[name]->add_option("--alt", r.alt_value, "Alternative theta1")->required();
  }
  cmd["power"]->add_option("--n", r.n_power, "Sample size")->required();
  cmd["samplesize"]->add_option("--beta", r.beta, "Target power")->check(kOpenUnit);
  CLI::App* sim = cmd["simulate"];
  sim->add_option("--params", r.params, "name=value pairs")->required();
  sim->add_option("--sizes", r.sizes, "start:stop:step or a,b,c")->required();
  sim->add_option("--reps", r.reps)->check(CLI::PositiveNumber);
  sim->add_option("--seed", r.seed);
  sim->add_option("--threads", r.threads)->check(CLI::NonNegativeNumber);
  sim->add_option("--estimators", r.estimators, "mckle,mckle_unbiased,mle,mle_unbiased");
  sim->add_option("--format", r.format)->check(CLI::IsMember({"csv", "json"}));

  std::vector<const char*> argv{"mckle"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    err << "usage error: " << msg << '\n';
    return kUsage;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!r.out_path.empty()) {
    file.open(r.out_path);
    if (!file) {
      err << "cannot open output file " << r.out_path << '\n';
      return kParseError;
    }
    sink = &file;
  }

  try {
    // Unknown model names are a usage problem, not a domain one.
    try {
      (void)parse_family_id(r.model);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    if (cmd["fit"]->parsed()) return cmd_fit(r, *sink);
    if (cmd["interval"]->parsed()) return cmd_interval(r, *sink);
    if (cmd["test"]->parsed()) return cmd_test(r, *sink);
    if (cmd["power"]->parsed()) return cmd_power(r, *sink, false);
    if (cmd["samplesize"]->parsed()) return cmd_power(r, *sink, true);
    if (cmd["gof"]->parsed()) return cmd_gof(r, *sink);
    if (cmd["simulate"]->parsed()) return cmd_simulate(r, *sink);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kParseError;
  } catch (const ConvergenceError& e) {
    err << "not converged: " << e.what() << '\n';
    return kNotConverged;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kUsage;
}

}  // namespace mckle::cli
