#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "kimflow/common.hpp"
#include "kimflow/ou.hpp"

namespace kimflow {

// Everything a report needs to be reproduced. No timestamps or host data:
// the same config and seed must give byte-identical files.
struct Provenance {
  int schema = 1;
  std::string tool_version = std::string(kVersion);
  std::string rng_id = std::string(kRngId);
  std::string experiment;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct ProfileInfo {
  std::string kind;  // slc | perturbed | convexity_profile
  double alpha = 0.0;
  double L = 0.0;
  double ghat0 = 0.0;
};

inline ProfileInfo profile_info(const ThetaProfile& p) {
  ProfileInfo out;
  switch (p.kind) {
    case ThetaProfile::Kind::slc: out.kind = "slc"; break;
    case ThetaProfile::Kind::perturbed: out.kind = "perturbed"; break;
    case ThetaProfile::Kind::convexity_profile:
      out.kind = "convexity_profile";
      break;
  }
  out.alpha = p.alpha;
  out.L = p.L;
  out.ghat0 = p.ghat0;
  return out;
}

inline ThetaProfile profile_from_info(const ProfileInfo& i) {
  if (i.kind == "slc") return ThetaProfile::slc(i.alpha);
  if (i.kind == "perturbed") return ThetaProfile::perturbed(i.alpha, i.L);
  if (i.kind == "convexity_profile")
    return ThetaProfile::convexity_profile(i.alpha, i.ghat0);
  throw ConfigError("unknown profile kind '" + i.kind + "'");
}

namespace detail {

inline nlohmann::json num_json(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;  // NaN and inf have no JSON literal
}

inline double num_from(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

inline nlohmann::json vec_json(const std::vector<double>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(num_json(x));
  return a;
}

inline std::vector<double> vec_from(const nlohmann::json& j) {
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(num_from(x));
  return out;
}

inline std::string g17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline nlohmann::json profile_json(const ProfileInfo& p) {
  return {{"kind", p.kind},
          {"alpha", num_json(p.alpha)},
          {"L", num_json(p.L)},
          {"ghat0", num_json(p.ghat0)}};
}

inline ProfileInfo profile_from(const nlohmann::json& j) {
  ProfileInfo p;
  p.kind = j.at("kind").get<std::string>();
  p.alpha = num_from(j.at("alpha"));
  p.L = num_from(j.at("L"));
  p.ghat0 = num_from(j.at("ghat0"));
  return p;
}

inline nlohmann::json prov_json(const Provenance& p) {
  return {{"schema", p.schema},
          {"tool_version", p.tool_version},
          {"rng_id", p.rng_id},
          {"experiment", p.experiment},
          {"config_hash", p.config_hash},
          {"seed", p.seed},
          {"stream", p.stream}};
}

inline Provenance prov_from(const nlohmann::json& j) {
  Provenance p;
  p.schema = j.at("schema").get<int>();
  p.tool_version = j.at("tool_version").get<std::string>();
  p.rng_id = j.at("rng_id").get<std::string>();
  p.experiment = j.at("experiment").get<std::string>();
  p.config_hash = j.at("config_hash").get<std::uint64_t>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.stream = j.at("stream").get<std::uint64_t>();
  return p;
}

}  // namespace detail

// --------------------------------------------------------------------------
// stability_l2 / stability_linf
// --------------------------------------------------------------------------

struct StabilityReport {
  Provenance prov;
  std::string metric;  // "l2" or "linf": which distance the bound covers
  std::string mu_family, nu_family;
  int dim = 0;
  double T = 0.0;
  int steps = 0;
  std::string scheme, schedule, init;
  int n = 0;
  ProfileInfo profile;

  double empirical_l2 = 0.0, empirical_l2_se = 0.0;
  double empirical_linf = 0.0;
  double fi = 0.0, fi_se = 0.0;  // the FI quantity the bound consumes
  std::string fi_method;  // gaussian_closed | quadrature | monte_carlo |
                          // constant_shift | hull_diameter
  double fi_inf_probe = std::numeric_limits<double>::quiet_NaN();
  double w2_reference = std::numeric_limits<double>::quiet_NaN();

  double constant = 0.0;  // the L2 or Linf stability constant
  double bound = 0.0;     // constant * sqrt(fi)
  double slack = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;  // mu == nu: slack is 0/0, reported as null
  bool pass = false;
};

inline nlohmann::json to_json(const StabilityReport& r) {
  using detail::num_json;
  return {
      {"schema", r.prov.schema},
      {"provenance", detail::prov_json(r.prov)},
      {"target",
       {{"dim", r.dim}, {"mu_family", r.mu_family}, {"nu_family", r.nu_family}}},
      {"flow",
       {{"T", num_json(r.T)},
        {"steps", r.steps},
        {"scheme", r.scheme},
        {"schedule", r.schedule},
        {"init", r.init}}},
      {"profile", detail::profile_json(r.profile)},
      {"estimates",
       {{"n", r.n},
        {"empirical_l2", num_json(r.empirical_l2)},
        {"empirical_l2_se", num_json(r.empirical_l2_se)},
        {"empirical_linf", num_json(r.empirical_linf)},
        {"fi", num_json(r.fi)},
        {"fi_se", num_json(r.fi_se)},
        {"fi_method", r.fi_method},
        {"fi_inf_probe", num_json(r.fi_inf_probe)},
        {"w2_reference", num_json(r.w2_reference)}}},
      {"verdict",
       {{"metric", r.metric},
        {"constant", num_json(r.constant)},
        {"bound", num_json(r.bound)},
        {"slack", num_json(r.slack)},
        {"degenerate", r.degenerate},
        {"pass", r.pass}}}};
}

inline StabilityReport stability_from_json(const nlohmann::json& j) {
  using detail::num_from;
  StabilityReport r;
  r.prov = detail::prov_from(j.at("provenance"));
  const auto& t = j.at("target");
  r.dim = t.at("dim").get<int>();
  r.mu_family = t.at("mu_family").get<std::string>();
  r.nu_family = t.at("nu_family").get<std::string>();
  const auto& f = j.at("flow");
  r.T = num_from(f.at("T"));
  r.steps = f.at("steps").get<int>();
  r.scheme = f.at("scheme").get<std::string>();
  r.schedule = f.at("schedule").get<std::string>();
  r.init = f.at("init").get<std::string>();
  r.profile = detail::profile_from(j.at("profile"));
  const auto& e = j.at("estimates");
  r.n = e.at("n").get<int>();
  r.empirical_l2 = num_from(e.at("empirical_l2"));
  r.empirical_l2_se = num_from(e.at("empirical_l2_se"));
  r.empirical_linf = num_from(e.at("empirical_linf"));
  r.fi = num_from(e.at("fi"));
  r.fi_se = num_from(e.at("fi_se"));
  r.fi_method = e.at("fi_method").get<std::string>();
  r.fi_inf_probe = num_from(e.at("fi_inf_probe"));
  r.w2_reference = num_from(e.at("w2_reference"));
  const auto& v = j.at("verdict");
  r.metric = v.at("metric").get<std::string>();
  r.constant = num_from(v.at("constant"));
  r.bound = num_from(v.at("bound"));
  r.slack = num_from(v.at("slack"));
  r.degenerate = v.at("degenerate").get<bool>();
  r.pass = v.at("pass").get<bool>();
  return r;
}

inline std::string to_csv(const StabilityReport& r) {
  using detail::g17;
  std::string out = "quantity,estimate,se,bound\n";
  out += "l2," + g17(r.empirical_l2) + "," + g17(r.empirical_l2_se) + ",";
  out += (r.metric == "l2" ? g17(r.bound) : std::string()) + "\n";
  out += "linf," + g17(r.empirical_linf) + ",0,";
  out += (r.metric == "linf" ? g17(r.bound) : std::string()) + "\n";
  return out;
}

// --------------------------------------------------------------------------
// fi_decay
// --------------------------------------------------------------------------

struct DecayReport {
  Provenance prov;
  std::string mu_family, nu_family;
  int dim = 0, n = 0;
  ProfileInfo profile;
  std::vector<double> times, fi, se, envelope;
  double base_fi = 0.0, base_se = 0.0;
  bool envelope_ok = false;  // fi <= envelope + 3 se pointwise
  bool monotone_ok = false;  // non-increasing up to 3 se slack
  bool pass = false;
};

inline nlohmann::json to_json(const DecayReport& r) {
  using detail::num_json;
  return {{"schema", r.prov.schema},
          {"provenance", detail::prov_json(r.prov)},
          {"target",
           {{"dim", r.dim},
            {"mu_family", r.mu_family},
            {"nu_family", r.nu_family}}},
          {"profile", detail::profile_json(r.profile)},
          {"curve",
           {{"n", r.n},
            {"times", detail::vec_json(r.times)},
            {"fi", detail::vec_json(r.fi)},
            {"se", detail::vec_json(r.se)},
            {"envelope", detail::vec_json(r.envelope)},
            {"base_fi", num_json(r.base_fi)},
            {"base_se", num_json(r.base_se)}}},
          {"verdict",
           {{"envelope_ok", r.envelope_ok},
            {"monotone_ok", r.monotone_ok},
            {"pass", r.pass}}}};
}

inline DecayReport decay_from_json(const nlohmann::json& j) {
  using detail::num_from;
  DecayReport r;
  r.prov = detail::prov_from(j.at("provenance"));
  const auto& t = j.at("target");
  r.dim = t.at("dim").get<int>();
  r.mu_family = t.at("mu_family").get<std::string>();
  r.nu_family = t.at("nu_family").get<std::string>();
  r.profile = detail::profile_from(j.at("profile"));
  const auto& c = j.at("curve");
  r.n = c.at("n").get<int>();
  r.times = detail::vec_from(c.at("times"));
  r.fi = detail::vec_from(c.at("fi"));
  r.se = detail::vec_from(c.at("se"));
  r.envelope = detail::vec_from(c.at("envelope"));
  r.base_fi = num_from(c.at("base_fi"));
  r.base_se = num_from(c.at("base_se"));
  const auto& v = j.at("verdict");
  r.envelope_ok = v.at("envelope_ok").get<bool>();
  r.monotone_ok = v.at("monotone_ok").get<bool>();
  r.pass = v.at("pass").get<bool>();
  return r;
}

inline std::string to_csv(const DecayReport& r) {
  using detail::g17;
  std::string out = "t,fi,se,envelope\n";
  for (std::size_t i = 0; i < r.times.size(); ++i)
    out += g17(r.times[i]) + "," + g17(r.fi[i]) + "," + g17(r.se[i]) + "," +
           g17(r.envelope[i]) + "\n";
  return out;
}

// --------------------------------------------------------------------------
// theta_check
// --------------------------------------------------------------------------

struct ThetaReport {
  Provenance prov;
  std::string family;
  int dim = 0, components = 0;
  ProfileInfo profile;
  int probes = 0;
  double probe_radius = 0.0;
  double tol = 0.0;
  std::vector<double> times, violation;
  double worst = 0.0;
  bool pass = false;
};

inline nlohmann::json to_json(const ThetaReport& r) {
  using detail::num_json;
  return {{"schema", r.prov.schema},
          {"provenance", detail::prov_json(r.prov)},
          {"target",
           {{"dim", r.dim},
            {"family", r.family},
            {"components", r.components}}},
          {"profile", detail::profile_json(r.profile)},
          {"check",
           {{"probes", r.probes},
            {"probe_radius", num_json(r.probe_radius)},
            {"tol", num_json(r.tol)},
            {"times", detail::vec_json(r.times)},
            {"violation", detail::vec_json(r.violation)},
            {"worst", num_json(r.worst)}}},
          {"verdict", {{"pass", r.pass}}}};
}

inline ThetaReport theta_from_json(const nlohmann::json& j) {
  using detail::num_from;
  ThetaReport r;
  r.prov = detail::prov_from(j.at("provenance"));
  const auto& t = j.at("target");
  r.dim = t.at("dim").get<int>();
  r.family = t.at("family").get<std::string>();
  r.components = t.at("components").get<int>();
  r.profile = detail::profile_from(j.at("profile"));
  const auto& c = j.at("check");
  r.probes = c.at("probes").get<int>();
  r.probe_radius = num_from(c.at("probe_radius"));
  r.tol = num_from(c.at("tol"));
  r.times = detail::vec_from(c.at("times"));
  r.violation = detail::vec_from(c.at("violation"));
  r.worst = num_from(c.at("worst"));
  r.pass = j.at("verdict").at("pass").get<bool>();
  return r;
}

inline std::string to_csv(const ThetaReport& r) {
  using detail::g17;
  std::string out = "t,violation,se,tol\n";
  for (std::size_t i = 0; i < r.times.size(); ++i)
    out += g17(r.times[i]) + "," + g17(r.violation[i]) + ",0," + g17(r.tol) +
           "\n";
  return out;
}

// --------------------------------------------------------------------------
// constants_table
// --------------------------------------------------------------------------

struct ConstantsRow {
  std::string kind;  // slc | perturbed | convexity_profile
  double alpha = 0.0, L = 0.0, ghat0 = 0.0;
  double lambda_inf = 0.0, eta_inf = 0.0;
  double lambda_T = 0.0, lambda_T_exact = 0.0;
  double rel_gap = 0.0;  // |lambda_T - lambda_inf| / lambda_inf
  double lsi = 0.0;      // LSI constant at the report's evaluation time
};

struct LhatRow {
  double L_V = 0.0, R_V = 0.0, alpha_V = 0.0;
  double lhat_value = 0.0;
  double ratio_small = 0.0;  // lhat / (L_V / 2)
  double ratio_large = 0.0;  // lhat / (L_V^2 R_V^2 / 4)
  double lambda_inf = 0.0;   // via the derived convexity profile
};

struct ConstantsReport {
  Provenance prov;
  double T = 0.0;      // horizon for the finite-T columns
  double lsi_s = 0.0;  // evaluation time for the lsi column
  double gap_tol = 0.0;
  std::vector<ConstantsRow> rows;
  std::vector<LhatRow> lhat_rows;
  double max_rel_gap = 0.0;
  bool eta_matches = false;  // eta_inf == lambda_inf to 1e-14 on every row
  bool pass = false;
};

inline nlohmann::json to_json(const ConstantsReport& r) {
  using detail::num_json;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"kind", x.kind},
                    {"alpha", num_json(x.alpha)},
                    {"L", num_json(x.L)},
                    {"ghat0", num_json(x.ghat0)},
                    {"lambda_inf", num_json(x.lambda_inf)},
                    {"eta_inf", num_json(x.eta_inf)},
                    {"lambda_T", num_json(x.lambda_T)},
                    {"lambda_T_exact", num_json(x.lambda_T_exact)},
                    {"rel_gap", num_json(x.rel_gap)},
                    {"lsi", num_json(x.lsi)}});
  nlohmann::json lhat_rows = nlohmann::json::array();
  for (const auto& x : r.lhat_rows)
    lhat_rows.push_back({{"L_V", num_json(x.L_V)},
                         {"R_V", num_json(x.R_V)},
                         {"alpha_V", num_json(x.alpha_V)},
                         {"lhat", num_json(x.lhat_value)},
                         {"ratio_small", num_json(x.ratio_small)},
                         {"ratio_large", num_json(x.ratio_large)},
                         {"lambda_inf", num_json(x.lambda_inf)}});
  return {{"schema", r.prov.schema},
          {"provenance", detail::prov_json(r.prov)},
          {"grid",
           {{"T", num_json(r.T)},
            {"lsi_s", num_json(r.lsi_s)},
            {"gap_tol", num_json(r.gap_tol)}}},
          {"rows", rows},
          {"lhat_rows", lhat_rows},
          {"verdict",
           {{"max_rel_gap", num_json(r.max_rel_gap)},
            {"eta_matches", r.eta_matches},
            {"pass", r.pass}}}};
}

inline ConstantsReport constants_from_json(const nlohmann::json& j) {
  using detail::num_from;
  ConstantsReport r;
  r.prov = detail::prov_from(j.at("provenance"));
  const auto& g = j.at("grid");
  r.T = num_from(g.at("T"));
  r.lsi_s = num_from(g.at("lsi_s"));
  r.gap_tol = num_from(g.at("gap_tol"));
  for (const auto& x : j.at("rows")) {
    ConstantsRow row;
    row.kind = x.at("kind").get<std::string>();
    row.alpha = num_from(x.at("alpha"));
    row.L = num_from(x.at("L"));
    row.ghat0 = num_from(x.at("ghat0"));
    row.lambda_inf = num_from(x.at("lambda_inf"));
    row.eta_inf = num_from(x.at("eta_inf"));
    row.lambda_T = num_from(x.at("lambda_T"));
    row.lambda_T_exact = num_from(x.at("lambda_T_exact"));
    row.rel_gap = num_from(x.at("rel_gap"));
    row.lsi = num_from(x.at("lsi"));
    r.rows.push_back(row);
  }
  for (const auto& x : j.at("lhat_rows")) {
    LhatRow row;
    row.L_V = num_from(x.at("L_V"));
    row.R_V = num_from(x.at("R_V"));
    row.alpha_V = num_from(x.at("alpha_V"));
    row.lhat_value = num_from(x.at("lhat"));
    row.ratio_small = num_from(x.at("ratio_small"));
    row.ratio_large = num_from(x.at("ratio_large"));
    row.lambda_inf = num_from(x.at("lambda_inf"));
    r.lhat_rows.push_back(row);
  }
  const auto& v = j.at("verdict");
  r.max_rel_gap = num_from(v.at("max_rel_gap"));
  r.eta_matches = v.at("eta_matches").get<bool>();
  r.pass = v.at("pass").get<bool>();
  return r;
}

inline std::string to_csv(const ConstantsReport& r) {
  using detail::g17;
  std::string out =
      "kind,alpha,L,ghat0,lambda_inf,eta_inf,lambda_T,lambda_T_exact,rel_gap,"
      "lsi\n";
  for (const auto& x : r.rows)
    out += x.kind + "," + g17(x.alpha) + "," + g17(x.L) + "," + g17(x.ghat0) +
           "," + g17(x.lambda_inf) + "," + g17(x.eta_inf) + "," +
           g17(x.lambda_T) + "," + g17(x.lambda_T_exact) + "," +
           g17(x.rel_gap) + "," + g17(x.lsi) + "\n";
  return out;
}

inline std::string lhat_csv(const ConstantsReport& r) {
  using detail::g17;
  std::string out =
      "L_V,R_V,alpha_V,lhat,ratio_small,ratio_large,lambda_inf\n";
  for (const auto& x : r.lhat_rows)
    out += g17(x.L_V) + "," + g17(x.R_V) + "," + g17(x.alpha_V) + "," +
           g17(x.lhat_value) + "," + g17(x.ratio_small) + "," +
           g17(x.ratio_large) + "," + g17(x.lambda_inf) + "\n";
  return out;
}

// --------------------------------------------------------------------------
// file output
// --------------------------------------------------------------------------

// Readers never see a half-written report: write to a sibling temp file and
// rename over the target.
inline void write_text_atomic(const std::string& path,
                              const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    out << text;
    out.flush();
    if (!out) throw Error("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw Error("rename '" + tmp + "' -> '" + path + "': " + ec.message());
}

inline std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

template <typename Report>
inline void write_report_files(const Report& r, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string base = out_dir + "/" + r.prov.experiment;
  write_text_atomic(base + ".json", json_text(to_json(r)));
  write_text_atomic(base + ".csv", to_csv(r));
  if constexpr (std::is_same_v<Report, ConstantsReport>) {
    write_text_atomic(base + "_lhat.csv", lhat_csv(r));
  }
}

}  // namespace kimflow
