#include "hazsbf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hazsbf {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_real(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw InputError("cannot parse number '" + t + "' in " + what);
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // LF endings everywhere
  if (!out) throw InputError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open for reading: " + path);
  return in;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  auto out = open_out(path);
  out << "entry,exit,event";
  for (int j = 1; j <= data.dim; ++j) out << ",z" << j;
  out << "\n#types,time,time,flag";
  for (int j = 0; j < data.dim; ++j) {
    bool offset = !data.records.empty() &&
                  data.records.front().covariates[j].kind == CovariateChannel::Kind::TimeOffset;
    out << (offset ? ",offset" : ",const");
  }
  out << "\n";
  for (const auto& r : data.records) {
    out << format_real(r.entry_time) << ',' << format_real(r.exit_time) << ','
        << (r.event ? '1' : '0');
    for (const auto& c : r.covariates) out << ',' << format_real(c.param);
    out << "\n";
  }
}

Dataset read_dataset_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty dataset file: " + path);
  auto header = split(trim(line), ',');
  if (header.size() < 3 || header[0] != "entry" || header[1] != "exit" || header[2] != "event")
    throw InputError("dataset header must start with entry,exit,event: " + path);
  const int d = static_cast<int>(header.size()) - 3;
  for (int j = 0; j < d; ++j)
    if (header[3 + j] != "z" + std::to_string(j + 1))
      throw InputError("dataset header: expected z" + std::to_string(j + 1) + ", got '" +
                       header[3 + j] + "'");

  std::vector<bool> offset_channel(d, false);
  Dataset data;
  data.dim = d;
  bool first = true;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (first && t.rfind("#types", 0) == 0) {
      first = false;
      auto types = split(t, ',');
      if (static_cast<int>(types.size()) != d + 4)
        throw InputError("types row has wrong column count");
      for (int j = 0; j < d; ++j) {
        const std::string& kind = types[4 + j];
        if (kind == "offset") offset_channel[j] = true;
        else if (kind != "const")
          throw InputError("types row: covariate kind must be const or offset, got '" + kind +
                           "'");
      }
      continue;
    }
    first = false;
    if (t[0] == '#') continue;
    auto cells = split(t, ',');
    if (static_cast<int>(cells.size()) != d + 3)
      throw InputError("dataset row has wrong column count: '" + t + "'");
    SurvivalRecord r;
    r.entry_time = parse_real(cells[0], "entry column");
    r.exit_time = parse_real(cells[1], "exit column");
    std::string ev = trim(cells[2]);
    if (ev != "0" && ev != "1") throw InputError("event column must be 0 or 1, got '" + ev + "'");
    r.event = ev == "1";
    for (int j = 0; j < d; ++j) {
      double v = parse_real(cells[3 + j], "covariate column z" + std::to_string(j + 1));
      r.covariates.push_back(offset_channel[j] ? CovariateChannel::time_offset(v)
                                               : CovariateChannel::constant(v));
    }
    data.records.push_back(std::move(r));
  }
  if (data.records.empty()) throw InputError("dataset has no data rows: " + path);
  return data;
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (cfg.values_.count(key))
      throw ConfigError("config: duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::string Config::get_string(const std::string& key, const std::string& fallback) {
  touched_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_real(const std::string& key, double fallback) {
  touched_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return parse_real(it->second, "config key " + key);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
}

long Config::get_int(const std::string& key, long fallback) {
  double v = get_real(key, static_cast<double>(fallback));
  long l = static_cast<long>(v);
  if (static_cast<double>(l) != v)
    throw ConfigError("config key " + key + " must be an integer");
  return l;
}

std::vector<double> Config::get_real_list(const std::string& key,
                                          const std::vector<double>& fallback) {
  touched_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  try {
    for (const auto& cell : split(it->second, ','))
      out.push_back(parse_real(cell, "config key " + key));
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  return out;
}

std::vector<std::string> Config::get_string_list(const std::string& key,
                                                 const std::vector<std::string>& fallback) {
  touched_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<std::string> out;
  for (const auto& cell : split(it->second, ',')) out.push_back(trim(cell));
  return out;
}

void Config::finish() const {
  for (const auto& [key, value] : values_)
    if (!touched_.count(key)) throw ConfigError("config: unknown key '" + key + "'");
}

Estimator parse_estimator(const std::string& name) {
  if (name == "lc-sbf") return Estimator::LocalConstantSbf;
  if (name == "ll-sbf") return Estimator::LocalLinearSbf;
  if (name == "lc-bf") return Estimator::LocalConstantClassic;
  if (name == "ll-bf") return Estimator::LocalLinearClassic;
  throw ConfigError("unknown estimator '" + name + "' (use lc-sbf, ll-sbf, lc-bf, ll-bf)");
}

Norming parse_norming(const std::string& name) {
  if (name == "exposure") return Norming::ExposureWeighted;
  if (name == "uniform") return Norming::Uniform;
  throw ConfigError("unknown norming '" + name + "' (use exposure or uniform)");
}

std::string norming_name(Norming n) {
  return n == Norming::ExposureWeighted ? "exposure" : "uniform";
}

namespace {

void write_curve(std::ofstream& out, const std::string& tag, const std::vector<double>& v) {
  out << tag;
  for (double x : v) out << ' ' << format_real(x);
  out << "\n";
}

void write_mask(std::ofstream& out, const std::string& tag,
                const std::vector<std::uint8_t>& v) {
  out << tag;
  for (auto x : v) out << ' ' << static_cast<int>(x);
  out << "\n";
}

}  // namespace

void write_fit_file(const AdditiveFit& fit, const std::string& path) {
  auto out = open_out(path);
  out << "hazard-sbf-fit/v1\n";
  out << "estimator " << estimator_name(fit.estimator) << "\n";
  out << "norming " << norming_name(fit.norming) << "\n";
  out << "intercept " << format_real(fit.intercept) << "\n";
  out << "converged " << (fit.converged ? 1 : 0) << "\n";
  out << "diverged " << (fit.diverged ? 1 : 0) << "\n";
  out << "iterations " << fit.iterations_used << "\n";
  out << "final_criterion " << format_real(fit.final_criterion) << "\n";
  out << "dimensions " << fit.grid.n_dims() << "\n";
  for (int k = 0; k < fit.grid.n_dims(); ++k) {
    const auto& g = fit.grid.dims[k];
    out << "dim " << k << "\n";
    out << "lo " << format_real(g.lo) << "\n";
    out << "hi " << format_real(g.hi) << "\n";
    out << "n_points " << g.n_points << "\n";
    out << "bandwidth " << format_real(fit.bandwidth.empty() ? 0.0 : fit.bandwidth[k]) << "\n";
    write_curve(out, "values", fit.components[k]);
    write_mask(out, "supported", fit.supported[k]);
    write_curve(out, "weights", fit.centering_weights[k]);
    if (!fit.derivatives.empty()) write_curve(out, "derivatives", fit.derivatives[k]);
  }
  out << "end\n";
}

namespace {

struct LineReader {
  std::ifstream in;
  std::string path;

  std::string next() {
    std::string line;
    while (std::getline(in, line)) {
      std::string t = trim(line);
      if (!t.empty()) return t;
    }
    throw InputError("unexpected end of fit file: " + path);
  }
};

std::vector<double> parse_curve(const std::string& line, const std::string& tag, int n) {
  auto cells = split(line, ' ');
  if (cells.empty() || cells[0] != tag)
    throw InputError("fit file: expected '" + tag + "' line, got '" + line + "'");
  std::vector<double> out;
  for (std::size_t i = 1; i < cells.size(); ++i)
    if (!trim(cells[i]).empty()) out.push_back(parse_real(cells[i], tag + " line"));
  if (static_cast<int>(out.size()) != n)
    throw InputError("fit file: '" + tag + "' has wrong length");
  return out;
}

std::string expect_kv(LineReader& r, const std::string& key) {
  std::string line = r.next();
  if (line.rfind(key + " ", 0) != 0 && line != key)
    throw InputError("fit file: expected '" + key + "', got '" + line + "'");
  return trim(line.substr(key.size()));
}

}  // namespace

AdditiveFit read_fit_file(const std::string& path) {
  LineReader r{open_in(path), path};
  if (r.next() != "hazard-sbf-fit/v1")
    throw InputError("not a hazard-sbf-fit/v1 file: " + path);
  AdditiveFit fit;
  fit.estimator = parse_estimator(expect_kv(r, "estimator"));
  fit.norming = parse_norming(expect_kv(r, "norming"));
  fit.intercept = parse_real(expect_kv(r, "intercept"), "intercept");
  fit.converged = expect_kv(r, "converged") == "1";
  fit.diverged = expect_kv(r, "diverged") == "1";
  fit.iterations_used = static_cast<int>(parse_real(expect_kv(r, "iterations"), "iterations"));
  fit.final_criterion = parse_real(expect_kv(r, "final_criterion"), "final_criterion");
  int nd = static_cast<int>(parse_real(expect_kv(r, "dimensions"), "dimensions"));
  if (nd < 1 || nd > 1000) throw InputError("fit file: implausible dimension count");
  bool with_derivatives = fit.estimator == Estimator::LocalLinearSbf ||
                          fit.estimator == Estimator::LocalLinearClassic;
  for (int k = 0; k < nd; ++k) {
    if (static_cast<int>(parse_real(expect_kv(r, "dim"), "dim")) != k)
      throw InputError("fit file: dim blocks out of order");
    DimensionGrid g;
    g.lo = parse_real(expect_kv(r, "lo"), "lo");
    g.hi = parse_real(expect_kv(r, "hi"), "hi");
    g.n_points = static_cast<int>(parse_real(expect_kv(r, "n_points"), "n_points"));
    fit.grid.dims.push_back(g);
    fit.bandwidth.push_back(parse_real(expect_kv(r, "bandwidth"), "bandwidth"));
    fit.components.push_back(parse_curve(r.next(), "values", g.n_points));
    auto supp = parse_curve(r.next(), "supported", g.n_points);
    std::vector<std::uint8_t> mask(supp.size());
    for (std::size_t i = 0; i < supp.size(); ++i) mask[i] = supp[i] != 0.0;
    fit.supported.push_back(std::move(mask));
    fit.centering_weights.push_back(parse_curve(r.next(), "weights", g.n_points));
    if (with_derivatives) fit.derivatives.push_back(parse_curve(r.next(), "derivatives", g.n_points));
  }
  if (r.next() != "end") throw InputError("fit file: missing end marker");
  return fit;
}

void write_mc_report(const std::vector<EvalReport>& reports, const StudyScenario& scenario,
                     const std::string& path) {
  auto out = open_out(path);
  out << "# hazard-sbf-report/v1\n";
  out << "# scenario d=" << scenario.sim.d << " n=" << scenario.sim.n
      << " rho=" << format_real(scenario.sim.rho) << " seed=" << scenario.sim.seed
      << " horizon=" << format_real(scenario.horizon) << "\n";
  out << "estimator\tbandwidth\tmise\tbias_sq\tvariance\tmise_ref\tn_reps\tn_converged\n";
  auto cell = [](double v) { return std::isnan(v) ? std::string("NA") : format_real(v); };
  for (const auto& r : reports) {
    int headline = r.per_component.size() > 1 ? 1 : 0;
    const auto& m = r.per_component[headline];
    out << estimator_name(r.estimator) << '\t' << format_real(r.bandwidth) << '\t'
        << cell(m.mise) << '\t' << cell(m.bias_sq) << '\t' << cell(m.variance) << '\t'
        << cell(m.mise_ref) << '\t' << r.n_reps << '\t' << r.n_converged << "\n";
  }
  out << "# per-component rows: estimator k mise bias_sq variance mise_ref\n";
  for (const auto& r : reports)
    for (std::size_t k = 0; k < r.per_component.size(); ++k) {
      const auto& m = r.per_component[k];
      out << "component\t" << estimator_name(r.estimator) << '\t' << k << '\t' << cell(m.mise)
          << '\t' << cell(m.bias_sq) << '\t' << cell(m.variance) << '\t' << cell(m.mise_ref)
          << "\n";
    }
}

void write_bandwidth_profile(const BandwidthSearchResult& result, Estimator estimator,
                             const std::string& path) {
  auto out = open_out(path);
  out << "# hazard-sbf-bandwidth-profile/v1\n";
  out << "estimator " << estimator_name(estimator) << "\n";
  out << "bandwidth\tscore\tn_converged\n";
  for (std::size_t i = 0; i < result.candidates.size(); ++i) {
    out << format_real(result.candidates[i]) << '\t'
        << (std::isfinite(result.score[i]) ? format_real(result.score[i]) : std::string("NA"))
        << '\t' << result.reports[i][0].n_converged << "\n";
  }
  out << "selected " << format_real(result.best) << "\n";
}

void write_sim_digest(const SimConfig& config, const SimulatedData& sim,
                      const std::string& path) {
  auto out = open_out(path);
  out << "hazard-sbf-digest/v1\n";
  out << "n " << config.n << "\n";
  out << "d " << config.d << "\n";
  out << "rho " << format_real(config.rho) << "\n";
  out << "seed " << config.seed << "\n";
  out << "gompertz_rate " << format_real(config.gompertz_rate) << "\n";
  out << "amplitude " << format_real(config.amplitude) << "\n";
  out << "censor_scale_divisor " << format_real(config.censor_scale_divisor) << "\n";
  out << "horizon " << format_real(sim.horizon) << "\n";
  out << "censored_fraction " << format_real(sim.censored_fraction) << "\n";
}

}  // namespace hazsbf
