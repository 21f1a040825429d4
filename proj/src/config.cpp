#include "rosq/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rosq/csv.hpp"

namespace rosq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            std::size_t line) {
  std::ostringstream msg;
  msg << "line " << line << ": bad value '" << value << "' for " << key;
  throw ConfigError(msg.str());
}

double parse_real(const std::string& key, const std::string& text, std::size_t line) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty()) {
    bad_value(key, text, line);
  }
  return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& text,
                          std::size_t line) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty()) {
    // Accept integral values written in scientific form, e.g. 1e7.
    const double d = parse_real(key, text, line);
    if (!(d >= 0.0) || d != std::floor(d) || d > 1.8e19) bad_value(key, text, line);
    return static_cast<std::uint64_t>(d);
  }
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text,
                               std::size_t line) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item, line));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s;
}

}  // namespace

QueueModel ExperimentConfig::build_model() const {
  const auto arrival = make_distribution(model.arrival_kind, model.arrival_params);
  const auto service = make_distribution(model.service_kind, model.service_params);
  if (model.load) {
    if (!(*model.load > 0.0 && *model.load < 1.0)) {
      std::ostringstream msg;
      msg << "model.load must lie in (0, 1), got " << *model.load;
      throw StabilityError(msg.str());
    }
    // Any positive arrival law works as a template; rescale to the load.
    const double factor = service.mean() / (*model.load * arrival.mean());
    return {arrival.scaled(factor), service, model.discipline};
  }
  return {arrival, service, model.discipline};
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  out << "model.arrival.kind = " << model.arrival_kind << '\n';
  out << "model.arrival.params = " << join(model.arrival_params) << '\n';
  out << "model.service.kind = " << model.service_kind << '\n';
  out << "model.service.params = " << join(model.service_params) << '\n';
  out << "model.discipline = " << to_string(model.discipline) << '\n';
  if (model.load) out << "model.load = " << format_double(*model.load) << '\n';
  out << "run.customers = " << run.customers << '\n';
  out << "run.warmup = " << run.warmup << '\n';
  out << "run.seed = " << run.seed << '\n';
  out << "run.replications = " << run.replications << '\n';
  out << "analysis.x_grid = " << join(analysis.x_grid) << '\n';
  out << "analysis.s_grid = " << join(analysis.s_grid) << '\n';
  out << "analysis.omega_grid = " << join(analysis.omega_grid) << '\n';
  out << "analysis.rho_grid = " << join(analysis.rho_grid) << '\n';
  out << "analysis.nu_grid = " << join(analysis.nu_grid) << '\n';
  out << "analysis.confidence = " << format_double(analysis.confidence) << '\n';
  out << "analysis.quantity = " << analysis.quantity << '\n';
  out << "analysis.q = " << analysis.q << '\n';
  out << "output.dir = " << output_dir << '\n';
  return out.str();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected key = value";
      throw ConfigError(msg.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "model.arrival.kind") cfg.model.arrival_kind = value;
    else if (key == "model.arrival.params") cfg.model.arrival_params = parse_list(key, value, line_no);
    else if (key == "model.service.kind") cfg.model.service_kind = value;
    else if (key == "model.service.params") cfg.model.service_params = parse_list(key, value, line_no);
    else if (key == "model.discipline") cfg.model.discipline = parse_discipline(value);
    else if (key == "model.load") cfg.model.load = parse_real(key, value, line_no);
    else if (key == "run.customers") cfg.run.customers = parse_count(key, value, line_no);
    else if (key == "run.warmup") cfg.run.warmup = parse_count(key, value, line_no);
    else if (key == "run.seed") cfg.run.seed = parse_count(key, value, line_no);
    else if (key == "run.replications") cfg.run.replications = parse_count(key, value, line_no);
    else if (key == "analysis.x_grid") cfg.analysis.x_grid = parse_list(key, value, line_no);
    else if (key == "analysis.s_grid") cfg.analysis.s_grid = parse_list(key, value, line_no);
    else if (key == "analysis.omega_grid") cfg.analysis.omega_grid = parse_list(key, value, line_no);
    else if (key == "analysis.rho_grid") cfg.analysis.rho_grid = parse_list(key, value, line_no);
    else if (key == "analysis.nu_grid") cfg.analysis.nu_grid = parse_list(key, value, line_no);
    else if (key == "analysis.confidence") cfg.analysis.confidence = parse_real(key, value, line_no);
    else if (key == "analysis.quantity") cfg.analysis.quantity = value;
    else if (key == "analysis.q") cfg.analysis.q = parse_count(key, value, line_no);
    else if (key == "output.dir") cfg.output_dir = value;
    else {
      std::ostringstream msg;
      msg << "line " << line_no << ": unknown key '" << key << "'";
      throw ConfigError(msg.str());
    }
  }
  if (cfg.run.customers <= cfg.run.warmup) {
    throw ConfigError("run.customers must exceed run.warmup");
  }
  if (!(cfg.analysis.confidence > 0.0 && cfg.analysis.confidence < 1.0)) {
    throw ConfigError("analysis.confidence must lie in (0, 1)");
  }
  cfg.build_model();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const StabilityError& e) {
    throw StabilityError(path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace rosq
