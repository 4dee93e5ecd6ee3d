#include "steinmc/report_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace steinmc {

namespace {

using nlohmann::json;

json value_json(const char* name, const ValueWithError& v) {
  return json{{"name", name},
              {"value", v.value},
              {"stderr", v.std_error},
              {"reps", v.reps},
              {"clamped", v.clamped}};
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string to_json(const GammaEstimates& est) {
  json out;
  out["method"] = est.method;
  out["seed"] = est.seed;
  out["estimates"] = json::array({value_json("gamma1", est.gamma1),
                                  value_json("gamma2", est.gamma2),
                                  value_json("gamma3", est.gamma3),
                                  value_json("gamma4", est.gamma4),
                                  value_json("sigma_term", est.sigma_term)});
  return out.dump(2);
}

std::string to_json(const BoundReport& report) {
  json out;
  out["theorem"] = report.theorem;
  out["bound_value"] = report.bound_value;
  out["sigma_inv_opnorm"] = report.sigma_inv_opnorm;
  out["breakdown"] = report.breakdown;
  out["sigma"] = matrix_json(report.sigma);
  out["audit_value"] = report.audit_value();
  return out.dump(2);
}

std::string to_json(const SigmaSeries& series) {
  json out;
  out["sigma"] = matrix_json(series.sigma);
  out["stderr"] = matrix_json(series.std_error);
  out["term_max"] = series.term_max;
  out["k_used"] = series.k_used;
  out["mc_samples"] = series.mc_samples;
  out["seed"] = series.seed;
  out["decayed"] = series.decayed;
  return out.dump(2);
}

std::string to_json(const LocalDependenceReport& report) {
  json out;
  out["n"] = report.n;
  out["k"] = report.k;
  out["p"] = report.p;
  out["alpha_d"] = report.alpha_d;
  out["delta_moment4"] = report.delta_moment4;
  out["m8"] = report.m8;
  out["m10"] = report.m10;
  out["m12"] = report.m12;
  out["eta_p"] = report.eta_p;
  out["gamma1"] = report.gamma1;
  out["gamma2"] = report.gamma2;
  out["sigma_inv_opnorm"] = report.sigma_inv_opnorm;
  out["c_config"] = report.c_config;
  out["bounds"] = report.bounds;
  out["max_m_observed"] = report.max_m_observed;
  out["m_structural_bound"] = report.m_structural_bound;
  out["m_bound_ok"] = report.m_bound_ok;
  out["seed"] = report.seed;
  return out.dump(2);
}

std::string to_json(const BnTerms& terms) {
  json out;
  out["bn"] = value_json("bn", terms.bn);
  out["bn_prime"] = value_json("bn_prime", terms.bn_prime);
  out["delta1_fourth"] = value_json("delta1_fourth", terms.delta1_fourth);
  out["lemma_bound"] = terms.lemma_bound;
  out["argmax_bn"] = terms.argmax_bn;
  out["argmax_bn_prime"] = terms.argmax_bn_prime;
  return out.dump(2);
}

std::uint64_t config_hash(const std::string& canonical_config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_config) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("write_file_atomic: cannot open " +
                               tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

CsvBuilder::CsvBuilder(std::uint64_t hash, std::uint64_t seed,
                       const std::string& columns) {
  std::ostringstream prefix;
  prefix << hash << "," << kVersion << "," << seed << ",";
  prefix_ = prefix.str();
  content_ = "config_hash,version,seed," + columns + "\n";
}

void CsvBuilder::add_row(const std::string& row) {
  content_ += prefix_ + row + "\n";
}

}  // namespace steinmc
