#include "sdnls/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace sdnls {

ParseError::ParseError(const std::string& message, std::string key, int line)
    : ConfigError("line " + std::to_string(line) + ", key '" + key + "': " + message),
      key_(std::move(key)),
      line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

struct Entry {
  std::string key;
  std::string value;
  int line;
};

class ValueReader {
 public:
  explicit ValueReader(const Entry& e) : e_(e) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, e_.key, e_.line);
  }

  double real(const std::string& text) const {
    const char* begin = text.data();
    const char* end = begin + text.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
      fail("expected a real number, got '" + text + "'");
    }
    return v;
  }
  double real() const { return real(e_.value); }

  long long integer(const std::string& text) const {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      fail("expected an integer, got '" + text + "'");
    }
    return v;
  }
  int integer() const { return narrow(integer(e_.value)); }

  std::uint64_t seed(const std::string& text) const {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      fail("expected a non-negative integer seed, got '" + text + "'");
    }
    return v;
  }

  bool boolean() const {
    if (e_.value == "true" || e_.value == "yes" || e_.value == "1") return true;
    if (e_.value == "false" || e_.value == "no" || e_.value == "0") return false;
    fail("expected true or false, got '" + e_.value + "'");
  }

  std::vector<double> reals() const {
    std::vector<double> out;
    for (const auto& item : split_list(e_.value)) out.push_back(real(item));
    return out;
  }
  std::vector<int> integers() const {
    std::vector<int> out;
    for (const auto& item : split_list(e_.value)) out.push_back(narrow(integer(item)));
    return out;
  }
  std::vector<std::string> words() const { return split_list(e_.value); }

  const std::string& text() const { return e_.value; }

 private:
  int narrow(long long v) const {
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      fail("integer out of range");
    }
    return static_cast<int>(v);
  }

  const Entry& e_;
};

void apply(Scenario& s, const std::string& section, const Entry& e,
           std::map<std::string, int>& lines) {
  const ValueReader v(e);
  const auto& k = e.key;
  lines[section + "." + k] = e.line;
  if (section == "scenario") {
    if (k == "name") s.name = v.text();
    else if (k == "kind") {
      auto kind = scenario_kind_from_string(v.text());
      if (!kind) v.fail("unknown scenario kind '" + v.text() + "'");
      s.kind = *kind;
    } else if (k == "exploratory") s.exploratory = v.boolean();
    else v.fail("unknown key");
  } else if (section == "grid") {
    if (k == "dim") s.grid.dim = v.integer();
    else if (k == "points") s.grid.points = v.integers();
    else if (k == "lengths") s.grid.lengths = v.reals();
    else v.fail("unknown key");
  } else if (section == "damping") {
    if (k == "gamma") {
      s.damping.gamma = v.real();
      if (s.damping.gamma < 0.0) v.fail("gamma must be >= 0");
    } else if (k == "alpha") {
      s.damping.alpha = v.real();
      if (!(s.damping.alpha > 0.0 && s.damping.alpha <= 1.0)) {
        v.fail("alpha must lie in (0, 1]");
      }
    } else if (k == "delta") {
      s.damping.delta = v.real();
      if (s.damping.delta < 0.0) v.fail("delta must be >= 0");
    } else v.fail("unknown key");
  } else if (section == "nls") {
    if (k == "enabled") s.nls.enabled = v.boolean();
    else if (k == "lambda") s.nls.lambda = v.real();
    else if (k == "sigma") {
      s.nls.sigma = v.real();
      if (!(s.nls.sigma > 0.0)) v.fail("sigma must be > 0");
    } else v.fail("unknown key");
  } else if (section == "scheme") {
    if (k == "dt") {
      s.scheme.dt = v.real();
      if (!(s.scheme.dt > 0.0)) v.fail("dt must be > 0");
    } else if (k == "splitting") {
      if (v.text() == "strang") s.scheme.splitting = Splitting::strang;
      else if (v.text() == "lie") s.scheme.splitting = Splitting::lie;
      else v.fail("splitting must be 'strang' or 'lie'");
    } else if (k == "substeps") {
      if (v.text() == "adaptive") s.scheme.substeps = SubstepPolicy::adaptive_rk;
      else if (v.text() == "fixed") s.scheme.substeps = SubstepPolicy::fixed_substeps;
      else v.fail("substeps must be 'adaptive' or 'fixed'");
    } else if (k == "fixed_substeps") {
      s.scheme.fixed_substeps = v.integer();
      if (s.scheme.fixed_substeps < 1) v.fail("fixed_substeps must be >= 1");
    } else if (k == "rel_tol") s.scheme.rel_tol = v.real();
    else if (k == "abs_tol") s.scheme.abs_tol = v.real();
    else v.fail("unknown key");
  } else if (section == "initial") {
    if (k == "kind") {
      const auto& t = v.text();
      if (t == "constant") s.initial.kind = InitialKind::constant;
      else if (t == "single_mode") s.initial.kind = InitialKind::single_mode;
      else if (t == "random") s.initial.kind = InitialKind::random;
      else if (t == "file") s.initial.kind = InitialKind::file;
      else v.fail("unknown initial data kind '" + t + "'");
    } else if (k == "amplitude") s.initial.amplitude = v.real();
    else if (k == "phase") s.initial.phase = v.real();
    else if (k == "modes") s.initial.modes = v.integers();
    else if (k == "seed") s.initial.seed = v.seed(v.text());
    else if (k == "regularity") s.initial.regularity = v.integer();
    else if (k == "decay") s.initial.decay = v.real();
    else if (k == "band_fraction") s.initial.band_fraction = v.real();
    else if (k == "path") s.initial.path = v.text();
    else v.fail("unknown key");
  } else if (section == "run") {
    if (k == "t_max") {
      s.t_max = v.real();
      if (!(*s.t_max > 0.0)) v.fail("t_max must be > 0");
    } else if (k == "record_every") {
      s.record_every = v.integer();
      if (s.record_every < 1) v.fail("record_every must be >= 1");
    } else if (k == "checks") {
      s.checks = v.words();
      const auto& known = known_checks();
      for (const auto& c : s.checks) {
        if (std::find(known.begin(), known.end(), c) == known.end()) {
          v.fail("unknown check '" + c + "'");
        }
      }
    } else if (k == "seeds") {
      s.seeds.clear();
      for (const auto& w : v.words()) s.seeds.push_back(v.seed(w));
    } else if (k == "deltas") s.deltas = v.reals();
    else if (k == "gammas") s.gammas = v.reals();
    else if (k == "couplings") {
      s.couplings.clear();
      for (const auto& w : v.words()) {
        const auto colon = w.find(':');
        if (colon == std::string::npos) v.fail("couplings are lambda:sigma pairs");
        s.couplings.emplace_back(v.real(trim(w.substr(0, colon))),
                                 v.real(trim(w.substr(colon + 1))));
      }
    } else if (k == "slope_window") {
      const auto w = v.reals();
      if (w.size() != 2 || !(w[0] > 0.0 && w[0] < w[1])) {
        v.fail("slope_window needs two increasing positive values");
      }
      s.slope_window_lo = w[0];
      s.slope_window_hi = w[1];
    } else v.fail("unknown key");
  } else if (section == "ensemble") {
    if (k == "count") s.ensemble_count = v.integer();
    else if (k == "alphas") s.ensemble_alphas = v.reals();
    else if (k == "orders") s.ensemble_orders = v.integers();
    else if (k == "dims") s.ensemble_dims = v.integers();
    else v.fail("unknown key");
  } else {
    v.fail("unknown section [" + section + "]");
  }
}

int line_of(const std::map<std::string, int>& lines, const std::string& key) {
  auto it = lines.find(key);
  return it == lines.end() ? 0 : it->second;
}

void finish_scenario(Scenario& s, const std::map<std::string, int>& lines,
                     int header_line) {
  if (s.nls.lambda < 0.0 && s.nls.sigma >= 2.0) {
    const int line = std::max(line_of(lines, "nls.sigma"), line_of(lines, "nls.lambda"));
    throw ParseError(
        "lambda < 0 requires sigma < 2 (extinction is only established without "
        "undamped blow-up)",
        "sigma", line);
  }
  if (s.grid.dim >= 1 && s.grid.dim <= 3) {
    // Axes left unspecified take the desk-scale grid of the dimension.
    const GridSpec fallback = default_grid(s.grid.dim);
    if (!lines.contains("grid.points")) s.grid.points = fallback.points;
    if (!lines.contains("grid.lengths")) s.grid.lengths = fallback.lengths;
    // Single values broadcast over axes.
    if (s.grid.points.size() == 1 && s.grid.dim > 1) {
      s.grid.points.assign(s.grid.dim, s.grid.points.front());
    }
    if (s.grid.lengths.size() == 1 && s.grid.dim > 1) {
      s.grid.lengths.assign(s.grid.dim, s.grid.lengths.front());
    }
  }
  try {
    s.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), "scenario", header_line);
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::string section;
  bool explicit_scenarios = false;
  Scenario current;
  bool have_current = false;
  std::map<std::string, int> lines;
  int header_line = 1;

  auto close_current = [&] {
    if (!have_current) return;
    finish_scenario(current, lines, header_line);
    config.scenarios.push_back(current);
    have_current = false;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("malformed section header", line, line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section == "scenario") {
        close_current();
        explicit_scenarios = true;
        current = Scenario{};
        lines.clear();
        have_current = true;
        header_line = line_no;
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line, line_no);
    const Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
    if (section.empty()) throw ParseError("key outside any section", e.key, line_no);
    if (section == "output") {
      const ValueReader v(e);
      if (e.key == "directory") config.output_dir = e.value;
      else if (e.key == "verbosity") config.verbosity = v.integer();
      else if (e.key == "threads") {
        config.threads = v.integer();
        if (config.threads < 1) v.fail("threads must be >= 1");
      } else v.fail("unknown key");
      continue;
    }
    if (!have_current) {
      if (explicit_scenarios) {
        throw ParseError("section [" + section + "] outside a scenario", e.key, line_no);
      }
      current = Scenario{};
      have_current = true;
      header_line = line_no;
    }
    apply(current, section, e, lines);
  }
  close_current();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += fmt(items[i]);
  }
  return out;
}

const char* initial_kind_name(InitialKind k) {
  switch (k) {
    case InitialKind::constant: return "constant";
    case InitialKind::single_mode: return "single_mode";
    case InitialKind::random: return "random";
    case InitialKind::file: return "file";
  }
  return "?";
}

}  // namespace

std::string to_config_text(const RunConfig& config) {
  std::ostringstream out;
  auto ints = [](int v) { return std::to_string(v); };
  auto reals = [](double v) { return num(v); };
  out << "[output]\n"
      << "directory = " << config.output_dir << "\n"
      << "verbosity = " << config.verbosity << "\n"
      << "threads = " << config.threads << "\n";
  for (const auto& s : config.scenarios) {
    out << "\n[scenario]\n"
        << "name = " << s.name << "\n"
        << "kind = " << to_string(s.kind) << "\n"
        << "exploratory = " << (s.exploratory ? "true" : "false") << "\n"
        << "[grid]\n"
        << "dim = " << s.grid.dim << "\n"
        << "points = " << join(s.grid.points, ints) << "\n"
        << "lengths = " << join(s.grid.lengths, reals) << "\n"
        << "[damping]\n"
        << "gamma = " << num(s.damping.gamma) << "\n"
        << "alpha = " << num(s.damping.alpha) << "\n"
        << "delta = " << num(s.damping.delta) << "\n"
        << "[nls]\n"
        << "enabled = " << (s.nls.enabled ? "true" : "false") << "\n"
        << "lambda = " << num(s.nls.lambda) << "\n"
        << "sigma = " << num(s.nls.sigma) << "\n"
        << "[scheme]\n"
        << "dt = " << num(s.scheme.dt) << "\n"
        << "splitting = " << (s.scheme.splitting == Splitting::strang ? "strang" : "lie") << "\n"
        << "substeps = "
        << (s.scheme.substeps == SubstepPolicy::adaptive_rk ? "adaptive" : "fixed") << "\n"
        << "fixed_substeps = " << s.scheme.fixed_substeps << "\n"
        << "rel_tol = " << num(s.scheme.rel_tol) << "\n"
        << "abs_tol = " << num(s.scheme.abs_tol) << "\n"
        << "[initial]\n"
        << "kind = " << initial_kind_name(s.initial.kind) << "\n"
        << "amplitude = " << num(s.initial.amplitude) << "\n"
        << "phase = " << num(s.initial.phase) << "\n";
    if (!s.initial.modes.empty()) out << "modes = " << join(s.initial.modes, ints) << "\n";
    out << "seed = " << s.initial.seed << "\n"
        << "regularity = " << s.initial.regularity << "\n";
    if (s.initial.decay) out << "decay = " << num(*s.initial.decay) << "\n";
    out << "band_fraction = " << num(s.initial.band_fraction) << "\n";
    if (!s.initial.path.empty()) out << "path = " << s.initial.path << "\n";
    out << "[run]\n";
    if (s.t_max) out << "t_max = " << num(*s.t_max) << "\n";
    out << "record_every = " << s.record_every << "\n";
    if (!s.checks.empty()) {
      out << "checks = " << join(s.checks, [](const std::string& c) { return c; }) << "\n";
    }
    if (!s.seeds.empty()) {
      out << "seeds = "
          << join(s.seeds, [](std::uint64_t v) { return std::to_string(v); }) << "\n";
    }
    if (!s.deltas.empty()) out << "deltas = " << join(s.deltas, reals) << "\n";
    if (!s.gammas.empty()) out << "gammas = " << join(s.gammas, reals) << "\n";
    if (!s.couplings.empty()) {
      out << "couplings = "
          << join(s.couplings,
                  [](const std::pair<double, double>& c) {
                    return num(c.first) + ":" + num(c.second);
                  })
          << "\n";
    }
    out << "slope_window = " << num(s.slope_window_lo) << ", " << num(s.slope_window_hi)
        << "\n"
        << "[ensemble]\n"
        << "count = " << s.ensemble_count << "\n"
        << "alphas = " << join(s.ensemble_alphas, reals) << "\n"
        << "orders = " << join(s.ensemble_orders, ints) << "\n"
        << "dims = " << join(s.ensemble_dims, ints) << "\n";
  }
  return out.str();
}

}  // namespace sdnls
