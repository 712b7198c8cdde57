#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hazsbf/evaluation.hpp"
#include "hazsbf/types.hpp"

namespace hazsbf {

// Exit-code carrying errors: 1 for malformed input data, 2 for bad config.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- dataset CSV ----------------------------------------------------------
// header:  entry,exit,event,z1,...,zd
// types:   #types,time,time,flag,const|offset,...   (optional on read)
// numbers are written with 17 significant digits; LF line endings.

void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

// ---- flat key = value config ----------------------------------------------

class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_real(const std::string& key, double fallback);
  long get_int(const std::string& key, long fallback);
  std::vector<double> get_real_list(const std::string& key,
                                    const std::vector<double>& fallback);
  std::vector<std::string> get_string_list(const std::string& key,
                                           const std::vector<std::string>& fallback);

  // every key must have been consumed; unknown keys are config errors
  void finish() const;

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> touched_;
};

Estimator parse_estimator(const std::string& name);
Norming parse_norming(const std::string& name);
std::string norming_name(Norming n);

// ---- fit file (hazard-sbf-fit/v1) ------------------------------------------

void write_fit_file(const AdditiveFit& fit, const std::string& path);
AdditiveFit read_fit_file(const std::string& path);

// ---- report files -----------------------------------------------------------

struct StudyScenario {
  SimConfig sim;
  double horizon = 0.0;
};

void write_mc_report(const std::vector<EvalReport>& reports, const StudyScenario& scenario,
                     const std::string& path);
void write_bandwidth_profile(const BandwidthSearchResult& result, Estimator estimator,
                             const std::string& path);
void write_sim_digest(const SimConfig& config, const SimulatedData& sim,
                      const std::string& path);

std::string format_real(double v);  // %.17g, locale-independent

}  // namespace hazsbf
