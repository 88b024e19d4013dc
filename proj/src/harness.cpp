#include "socchain/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "socchain/density.hpp"
#include "socchain/errors.hpp"
#include "socchain/stats.hpp"

namespace soc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

}  // namespace

ConfigMap parse_config(const std::string& text) {
  ConfigMap m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("config line " + std::to_string(lineno) + ": expected key=value");
    m[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return m;
}

ConfigMap load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ExperimentConfig ExperimentConfig::from_map(const ConfigMap& m) {
  ExperimentConfig c;
  auto get = [&](const std::string& k) -> const std::string* {
    auto it = m.find(k);
    return it == m.end() ? nullptr : &it->second;
  };
  if (auto v = get("regime")) c.regime = parse_regime(*v);
  if (auto v = get("n")) {
    for (const auto& t : split(*v, ',')) c.n_list.push_back(std::stol(t));
  }
  if (auto v = get("r")) c.r_rule = *v;
  if (auto v = get("samples")) c.samples = std::stol(*v);
  if (auto v = get("seed")) c.seed = std::stoull(*v);
  if (auto v = get("lambda")) c.lambda = std::stod(*v);
  if (auto v = get("record_timing")) c.record_timing = (*v == "1" || *v == "true");
  for (const auto& [k, v] : m)
    if (k.rfind("tol.", 0) == 0) c.tolerances[k.substr(4)] = std::stod(v);
  if (!c.tolerances.count("ks")) c.tolerances["ks"] = 0.05;
  for (long n : c.n_list) validate_params(n, resolve_r(c.r_rule, n));
  return c;
}

long resolve_r(const std::string& rule, long n) {
  long r = 0;
  if (rule == "half") {
    r = (n - 1) / 2;
  } else if (rule.rfind("const:", 0) == 0) {
    r = std::stol(rule.substr(6));
  } else if (rule.rfind("pow:", 0) == 0) {
    const auto parts = split(rule.substr(4), ':');
    if (parts.size() != 2) throw DomainError("r rule pow:C:A needs two numbers");
    r = static_cast<long>(std::floor(std::stod(parts[0]) * std::pow(static_cast<double>(n), std::stod(parts[1]))));
    r = std::min(r, (n - 1) / 2);
  } else {
    throw DomainError("unknown r rule '" + rule + "'");
  }
  validate_params(n, r);
  return r;
}

std::string recompute_verdict(const ReportRow& row, const std::map<std::string, double>& tol) {
  if (row.verdict.rfind("error", 0) == 0) return row.verdict;
  auto it = tol.find(row.regime);
  if (it == tol.end()) it = tol.find("ks");
  if (it == tol.end()) throw DomainError("no tolerance for '" + row.regime + "'");
  return (std::isfinite(row.ks) && row.ks <= it->second) ? "pass" : "fail";
}

double limit_scale(const LimitLaw& law, long n, long r) {
  const double nd = static_cast<double>(n);
  switch (law.kind) {
    case LimitLaw::Kind::Quartic:
    case LimitLaw::Kind::Threshold:
      return std::pow(nd, 0.75);
    case LimitLaw::Kind::Gaussian:
      return std::sqrt(nd);
    case LimitLaw::Kind::IntermediateGaussian:
      return std::cbrt(static_cast<double>(r)) * std::sqrt(nd);
  }
  return 1.0;
}

std::function<double(double)> limit_cdf(const LimitLaw& law) {
  switch (law.kind) {
    case LimitLaw::Kind::Quartic:
      return [](double x) { return quartic_cdf(x); };
    case LimitLaw::Kind::Threshold: {
      const double lam = law.lambda;
      auto tab = std::make_shared<TabulatedCdf>([lam](double x) { return threshold_pdf(x, lam); }, -4.0, 4.0, 800);
      return [tab](double x) { return (*tab)(x); };
    }
    case LimitLaw::Kind::Gaussian:
    case LimitLaw::Kind::IntermediateGaussian: {
      const double sd = std::sqrt(law.variance);
      return [sd](double x) { return 0.5 * std::erfc(-x / (sd * std::sqrt(2.0))); };
    }
  }
  throw UnknownRegime("limit_cdf: unknown law");
}

Report run_experiment(const ExperimentConfig& cfg) {
  Report rep;
  for (std::size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
    ReportRow row;
    row.n = cfg.n_list[idx];
    row.regime = regime_name(cfg.regime);
    row.seed = cfg.seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      row.r = resolve_r(cfg.r_rule, row.n);
      if (cfg.samples < 1) throw EmptyInput("samples must be positive");
      const ModelParams p{row.n, row.r};
      const Spectrum s = compute_spectrum_fast(p);
      const LimitLaw law =
          limit_for_regime(cfg.regime, cfg.regime == Regime::Finite ? static_cast<double>(row.r) : cfg.lambda);
      const TiltPlan plan = default_tilt(p, cfg.regime);
      SampleRun run = sample_many(s, plan, cfg.samples, derive_seed(cfg.seed, idx), SampleKind::Magnetization);
      if (run.samples.empty()) throw EmptyInput("no accepted proposals");
      const double scale = limit_scale(law, row.n, row.r);
      for (auto& w : run.samples) w.value /= scale;
      const auto mom = weighted_moments(run.samples);
      row.ks = ks_distance(weighted_ecdf(run.samples), limit_cdf(law));
      row.mean = mom.mean;
      row.var = mom.var;
      row.acc_rate = static_cast<double>(run.samples.size()) / static_cast<double>(run.proposals);
      row.verdict = recompute_verdict(row, cfg.tolerances);
    } catch (const std::exception& e) {
      row.ks = std::numeric_limits<double>::quiet_NaN();
      row.verdict = std::string("error: ") + e.what();
    }
    if (cfg.record_timing)
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.rows.push_back(row);
  }
  return rep;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

const char* kHeader = "n,r,regime,ks,mean,var,acc_rate,seconds,seed,verdict";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc()) throw IOError("bad number '" + s + "' in report");
  return v;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// JSON has no NaN or infinity; such values are written as strings.
nlohmann::json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double json_double(const nlohmann::json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  return j.get<double>();
}

}  // namespace

std::string emit_report(const Report& rep, const std::string& format) {
  if (format == "csv") {
    std::ostringstream out;
    out << kHeader << '\n';
    for (const auto& r : rep.rows) {
      out << r.n << ',' << r.r << ',' << csv_field(r.regime) << ',' << format_double(r.ks) << ','
          << format_double(r.mean) << ',' << format_double(r.var) << ',' << format_double(r.acc_rate) << ','
          << format_double(r.seconds) << ',' << r.seed << ',' << csv_field(r.verdict) << '\n';
    }
    return out.str();
  }
  if (format == "json") {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows) {
      nlohmann::ordered_json o;
      o["n"] = r.n;
      o["r"] = r.r;
      o["regime"] = r.regime;
      o["ks"] = json_number(r.ks);
      o["mean"] = json_number(r.mean);
      o["var"] = json_number(r.var);
      o["acc_rate"] = json_number(r.acc_rate);
      o["seconds"] = json_number(r.seconds);
      o["seed"] = r.seed;
      o["verdict"] = r.verdict;
      rows.push_back(o);
    }
    nlohmann::ordered_json doc;
    doc["rows"] = rows;
    return doc.dump(2) + "\n";
  }
  throw DomainError("unknown report format '" + format + "'");
}

Report parse_report(const std::string& text, const std::string& format) {
  Report rep;
  if (format == "csv") {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kHeader) throw IOError("report CSV header mismatch");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = csv_split(line);
      if (f.size() != 10) throw IOError("report CSV row has " + std::to_string(f.size()) + " fields");
      ReportRow r;
      r.n = std::stol(f[0]);
      r.r = std::stol(f[1]);
      r.regime = f[2];
      r.ks = parse_double(f[3]);
      r.mean = parse_double(f[4]);
      r.var = parse_double(f[5]);
      r.acc_rate = parse_double(f[6]);
      r.seconds = parse_double(f[7]);
      r.seed = std::stoull(f[8]);
      r.verdict = f[9];
      rep.rows.push_back(r);
    }
    return rep;
  }
  if (format == "json") {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& o : doc.at("rows")) {
      ReportRow r;
      r.n = o.at("n").get<long>();
      r.r = o.at("r").get<long>();
      r.regime = o.at("regime").get<std::string>();
      r.ks = json_double(o.at("ks"));
      r.mean = json_double(o.at("mean"));
      r.var = json_double(o.at("var"));
      r.acc_rate = json_double(o.at("acc_rate"));
      r.seconds = json_double(o.at("seconds"));
      r.seed = o.at("seed").get<std::uint64_t>();
      r.verdict = o.at("verdict").get<std::string>();
      rep.rows.push_back(r);
    }
    return rep;
  }
  throw DomainError("unknown report format '" + format + "'");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot write " + path);
  out << text;
  if (!out) throw IOError("write failed for " + path);
}

}  // namespace soc
