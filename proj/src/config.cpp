#include "kcap/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <boost/program_options/options_description.hpp>
#include <boost/program_options/parsers.hpp>

#include "kcap/error.hpp"
#include "kcap/trace_io.hpp"

namespace kcap {

namespace po = boost::program_options;

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::discrete: return "discrete";
    case Mode::continuous: return "continuous";
    case Mode::bounds: return "bounds";
    case Mode::fire_prob: return "fire-prob";
  }
  return "discrete";
}

namespace {

const std::map<std::string, std::string>& key_sections() {
  static const std::map<std::string, std::string> table = {
      {"mode", ""},
      {"output_dir", ""},
      {"n", "graph"},
      {"k", "graph"},
      {"d", "graph"},
      {"beta", "graph"},
      {"sigma", "graph"},
      {"kernel", "graph"},
      {"c", "graph"},
      {"graph_seed", "graph"},
      {"init_seed", "run"},
      {"process_seed", "run"},
      {"max_steps", "run"},
      {"radius_tolerance", "run"},
      {"patience", "run"},
      {"epsilon", "run"},
      {"exact", "run"},
      {"self_edges", "run"},
      {"separation", "run"},
      {"replicates", "run"},
      {"record_members", "run"},
      {"containment_radii", "run"},
      {"intervals", "continuous"},
      {"random_intervals", "continuous"},
      {"alpha", "continuous"},
      {"interval_seed", "continuous"},
      {"continuous_max_steps", "continuous"},
      {"trials", "fire_prob"},
      {"at_steps", "fire_prob"},
      {"fire_seed", "fire_prob"},
      {"bound_trials", "bounds"},
      {"bound_seed", "bounds"},
      {"k_values", "sweep"},
      {"sigma_multipliers", "sweep"},
      {"seeds", "sweep"},
      {"parallelism", "sweep"},
  };
  return table;
}

using RawConfig = std::map<std::string, std::string>;

RawConfig read_raw(std::istream& in, bool allow_sweep) {
  po::options_description none;
  po::parsed_options parsed(&none);
  try {
    parsed = po::parse_config_file(in, none, true);
  } catch (const po::error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  RawConfig raw;
  for (const auto& opt : parsed.options) {
    std::string key = opt.string_key;
    std::string section;
    if (auto dot = key.rfind('.'); dot != std::string::npos) {
      section = key.substr(0, dot);
      key = key.substr(dot + 1);
    }
    const auto it = key_sections().find(key);
    if (it == key_sections().end() || (it->second == "sweep" && !allow_sweep))
      throw UsageError("config: unknown key '" + opt.string_key + "'");
    if (!section.empty() && section != it->second)
      throw UsageError("config: key '" + key + "' does not belong in section [" + section + "]");
    if (raw.count(key)) throw UsageError("config: key '" + key + "' given twice");
    raw[key] = opt.value.empty() ? std::string() : opt.value.front();
  }
  return raw;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    throw UsageError("config: key '" + key + "' expects a number, got '" + text + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec == std::errc() && ptr == t.data() + t.size()) return v;
  // Accept integral values in float notation such as 1e6.
  const double r = parse_real(key, text);
  if (r < 0.0 || r != std::floor(r) || r > 1.8e19)
    throw UsageError("config: key '" + key + "' expects a nonnegative integer, got '" + text + "'");
  return static_cast<std::uint64_t>(r);
}

bool parse_bool(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw UsageError("config: key '" + key + "' expects true or false, got '" + text + "'");
}

class Reader {
 public:
  explicit Reader(RawConfig raw) : raw_(std::move(raw)) {}

  const std::string* get(const std::string& key) const {
    auto it = raw_.find(key);
    return it == raw_.end() ? nullptr : &it->second;
  }
  template <class T, class F>
  void read(const std::string& key, T& target, F parse) const {
    if (auto v = get(key)) target = parse(key, *v);
  }

 private:
  RawConfig raw_;
};

void apply(const Reader& r, ExperimentConfig& c) {
  if (auto v = r.get("mode")) {
    const auto m = trim(*v);
    if (m == "discrete")
      c.mode = Mode::discrete;
    else if (m == "continuous")
      c.mode = Mode::continuous;
    else if (m == "bounds")
      c.mode = Mode::bounds;
    else if (m == "fire-prob" || m == "fire_prob")
      c.mode = Mode::fire_prob;
    else
      throw UsageError("config: key 'mode' must be discrete, continuous, bounds or fire-prob, got '" + m + "'");
  }
  if (auto v = r.get("output_dir")) c.output_dir = trim(*v);
  r.read("n", c.n, parse_uint);
  r.read("k", c.k, parse_uint);
  r.read("d", c.d, parse_uint);
  if (auto v = r.get("beta")) c.beta = parse_real("beta", *v);
  if (auto v = r.get("sigma"); v && trim(*v) != "auto") c.sigma = parse_real("sigma", *v);
  if (auto v = r.get("kernel")) {
    const auto kname = trim(*v);
    if (kname == "gaussian")
      c.kernel = Kernel::Kind::gaussian;
    else if (kname == "inverse-square" || kname == "inverse_square")
      c.kernel = Kernel::Kind::inverse_square;
    else
      throw UsageError("config: key 'kernel' must be gaussian or inverse-square, got '" + kname + "'");
  }
  r.read("c", c.c, parse_real);
  r.read("graph_seed", c.graph_seed, parse_uint);
  r.read("init_seed", c.init_seed, parse_uint);
  r.read("process_seed", c.process_seed, parse_uint);
  r.read("max_steps", c.stop.max_steps, parse_uint);
  r.read("radius_tolerance", c.stop.radius_tolerance, parse_real);
  r.read("patience", c.stop.patience, parse_uint);
  r.read("epsilon", c.engine.epsilon, parse_real);
  r.read("exact", c.engine.exact, parse_bool);
  r.read("self_edges", c.engine.self_edges, parse_bool);
  r.read("separation", c.separation, parse_real);
  r.read("replicates", c.replicates, parse_uint);
  r.read("record_members", c.record_members, parse_bool);
  if (auto v = r.get("containment_radii")) {
    c.containment_radii.clear();
    for (const auto& item : split_list(*v)) c.containment_radii.push_back(parse_real("containment_radii", item));
  }
  if (auto v = r.get("intervals")) {
    c.intervals.clear();
    for (const auto& item : split_list(*v)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw UsageError("config: key 'intervals' expects a:b pairs separated by commas, got '" + item + "'");
      c.intervals.push_back(
          {parse_real("intervals", item.substr(0, colon)), parse_real("intervals", item.substr(colon + 1))});
    }
  }
  r.read("random_intervals", c.random_intervals, parse_uint);
  r.read("alpha", c.alpha, parse_real);
  r.read("interval_seed", c.interval_seed, parse_uint);
  r.read("continuous_max_steps", c.continuous_max_steps, parse_uint);
  r.read("trials", c.trials, parse_uint);
  if (auto v = r.get("at_steps")) {
    c.at_steps.clear();
    for (const auto& item : split_list(*v)) c.at_steps.push_back(parse_uint("at_steps", item));
  }
  r.read("fire_seed", c.fire_seed, parse_uint);
  r.read("bound_trials", c.bound_trials, parse_uint);
  r.read("bound_seed", c.bound_seed, parse_uint);
}

void validate(ExperimentConfig& c) {
  if (c.mode == Mode::bounds) {
    require(c.bound_trials >= 1000, "config: key 'bound_trials' must be at least 1000");
    return;
  }
  if (c.mode == Mode::continuous) {
    if (c.kernel == Kernel::Kind::gaussian)
      require(c.sigma.has_value(), "config: key 'sigma' is required in continuous mode with the gaussian kernel");
    require(!c.intervals.empty() || c.random_intervals >= 1,
            "config: continuous mode needs 'intervals' or 'random_intervals'");
    if (c.intervals.empty()) require(c.alpha > 0.0 && c.alpha <= 1.0, "config: key 'alpha' must lie in (0,1]");
    require(c.continuous_max_steps >= 1, "config: key 'continuous_max_steps' must be at least 1");
    (void)c.initial_union();
    (void)c.make_kernel();
    return;
  }
  require(c.k >= 1, "config: key 'k' is required and must be at least 1");
  require(c.d >= 1, "config: key 'd' must be at least 1");
  if (c.beta) {
    require(*c.beta > 0.0, "config: key 'beta' must be positive");
    const double n = std::round(std::pow(static_cast<double>(c.k), *c.beta));
    require(n < 4.0e9, "config: k^beta exceeds the vertex id range");
    c.n = static_cast<std::size_t>(n);
  }
  require(c.n >= 1, "config: key 'n' (or 'beta') is required");
  require(c.n < 4000000000ULL, "config: key 'n' exceeds the vertex id range");
  require(c.k <= c.n, "config: k must not exceed n");
  if (c.sigma) require(*c.sigma > 0.0, "config: key 'sigma' must be positive");
  require(c.c > 0.0, "config: key 'c' must be positive");
  require(c.replicates >= 1, "config: key 'replicates' must be at least 1");
  require(c.stop.max_steps >= 1, "config: key 'max_steps' must be at least 1");
  require(c.stop.radius_tolerance >= 0.0, "config: key 'radius_tolerance' must be nonnegative");
  require(c.engine.epsilon > 0.0 && c.engine.epsilon < 1.0, "config: key 'epsilon' must lie in (0,1)");
  for (double r : c.containment_radii) require(r >= 0.0, "config: containment radii must be nonnegative");
  if (c.mode == Mode::fire_prob) {
    require(c.trials >= 1, "config: key 'trials' must be at least 1");
    require(!c.at_steps.empty(), "config: key 'at_steps' must list at least one step");
  }
}

ExperimentConfig config_from(const Reader& reader, std::optional<Mode> mode) {
  ExperimentConfig c;
  apply(reader, c);
  if (mode) c.mode = *mode;
  validate(c);
  return c;
}

std::string join_reals(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + format_double(xs[i]);
  return out;
}

}  // namespace

double ExperimentConfig::resolved_sigma() const {
  if (sigma) return *sigma;
  require(k >= 1, "config: sigma = auto needs k");
  return std::pow(static_cast<double>(k), -1.0 / static_cast<double>(d));
}

Kernel ExperimentConfig::make_kernel() const {
  return kernel == Kernel::Kind::gaussian ? Kernel::gaussian(resolved_sigma()) : Kernel::inverse_square(c);
}

IntervalUnion ExperimentConfig::initial_union() const {
  if (!intervals.empty()) return IntervalUnion::normalize(intervals);
  return random_interval_union(random_intervals, alpha, interval_seed);
}

std::vector<double> ExperimentConfig::resolved_radii() const {
  if (!containment_radii.empty()) return containment_radii;
  return {resolved_sigma() * std::pow(static_cast<double>(k), -1.0 / 3.0 + 0.1)};
}

ExperimentConfig parse_config(std::istream& in, std::optional<Mode> mode) {
  return config_from(Reader(read_raw(in, false)), mode);
}

ExperimentConfig parse_config_file(const std::string& path, std::optional<Mode> mode) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open " + path);
  return parse_config(in, mode);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  out << "mode = " << to_string(c.mode) << '\n';
  if (!c.output_dir.empty()) out << "output_dir = " << c.output_dir << '\n';
  out << "\n[graph]\n";
  out << "n = " << c.n << '\n' << "k = " << c.k << '\n';
  out << "d = " << c.d << '\n';
  if (c.sigma)
    out << "sigma = " << format_double(*c.sigma) << '\n';
  else
    out << "sigma = auto\n";
  out << "kernel = " << (c.kernel == Kernel::Kind::gaussian ? "gaussian" : "inverse-square") << '\n';
  out << "c = " << format_double(c.c) << '\n';
  out << "graph_seed = " << c.graph_seed << '\n';
  out << "\n[run]\n";
  out << "init_seed = " << c.init_seed << '\n';
  out << "process_seed = " << c.process_seed << '\n';
  out << "max_steps = " << c.stop.max_steps << '\n';
  out << "radius_tolerance = " << format_double(c.stop.radius_tolerance) << '\n';
  out << "patience = " << c.stop.patience << '\n';
  out << "epsilon = " << format_double(c.engine.epsilon) << '\n';
  out << "exact = " << (c.engine.exact ? "true" : "false") << '\n';
  out << "self_edges = " << (c.engine.self_edges ? "true" : "false") << '\n';
  out << "separation = " << format_double(c.separation) << '\n';
  out << "replicates = " << c.replicates << '\n';
  out << "record_members = " << (c.record_members ? "true" : "false") << '\n';
  if (!c.containment_radii.empty()) out << "containment_radii = " << join_reals(c.containment_radii) << '\n';
  out << "\n[continuous]\n";
  if (!c.intervals.empty()) {
    out << "intervals = ";
    for (std::size_t i = 0; i < c.intervals.size(); ++i)
      out << (i ? ", " : "") << format_double(c.intervals[i].lo) << ':' << format_double(c.intervals[i].hi);
    out << '\n';
  }
  out << "random_intervals = " << c.random_intervals << '\n';
  out << "alpha = " << format_double(c.alpha) << '\n';
  out << "interval_seed = " << c.interval_seed << '\n';
  out << "continuous_max_steps = " << c.continuous_max_steps << '\n';
  out << "\n[fire_prob]\n";
  out << "trials = " << c.trials << '\n';
  out << "at_steps = ";
  for (std::size_t i = 0; i < c.at_steps.size(); ++i) out << (i ? ", " : "") << c.at_steps[i];
  out << '\n';
  out << "fire_seed = " << c.fire_seed << '\n';
  out << "\n[bounds]\n";
  out << "bound_trials = " << c.bound_trials << '\n';
  out << "bound_seed = " << c.bound_seed << '\n';
}

std::vector<ExperimentConfig> SweepSpec::expand() const {
  std::vector<ExperimentConfig> cells;
  for (auto k : k_values)
    for (std::size_t m = 0; m < sigma_multipliers.size(); ++m)
      for (std::size_t s = 0; s < seeds; ++s) {
        ExperimentConfig c = base;
        c.k = k;
        if (base.beta) c.n = static_cast<std::size_t>(std::round(std::pow(static_cast<double>(k), *base.beta)));
        ExperimentConfig probe = c;
        probe.sigma.reset();
        c.sigma = sigma_multipliers[m] * (base.sigma ? *base.sigma : probe.resolved_sigma());
        c.graph_seed = base.graph_seed + s;
        c.init_seed = base.init_seed + s;
        c.process_seed = base.process_seed + s;
        c.replicates = 1;
        require(c.k <= c.n, "sweep: k = " + std::to_string(k) + " exceeds n");
        cells.push_back(std::move(c));
      }
  return cells;
}

SweepSpec parse_sweep(std::istream& in) {
  RawConfig raw = read_raw(in, true);
  SweepSpec spec;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = raw.find(key);
    if (it == raw.end()) return std::nullopt;
    auto v = it->second;
    raw.erase(it);
    return v;
  };
  const auto ks = take("k_values");
  require(ks.has_value(), "sweep: key 'k_values' is required");
  for (const auto& item : split_list(*ks)) spec.k_values.push_back(parse_uint("k_values", item));
  require(!spec.k_values.empty(), "sweep: key 'k_values' is empty");
  if (auto v = take("sigma_multipliers")) {
    spec.sigma_multipliers.clear();
    for (const auto& item : split_list(*v)) {
      spec.sigma_multipliers.push_back(parse_real("sigma_multipliers", item));
      require(spec.sigma_multipliers.back() > 0.0, "sweep: sigma multipliers must be positive");
    }
    require(!spec.sigma_multipliers.empty(), "sweep: key 'sigma_multipliers' is empty");
  }
  if (auto v = take("seeds")) spec.seeds = parse_uint("seeds", *v);
  if (auto v = take("parallelism")) spec.parallelism = parse_uint("parallelism", *v);
  require(spec.seeds >= 1, "sweep: key 'seeds' must be at least 1");
  require(spec.parallelism >= 1, "sweep: key 'parallelism' must be at least 1");

  // The base config is validated with the first k so that k <= n is checked.
  raw["k"] = std::to_string(spec.k_values.front());
  Reader reader(raw);
  ExperimentConfig base;
  apply(reader, base);
  require(base.mode == Mode::discrete, "sweep: only discrete mode can be swept");
  ExperimentConfig check = base;
  validate(check);
  spec.base = base;
  (void)spec.expand();
  return spec;
}

SweepSpec parse_sweep_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("sweep: cannot open " + path);
  return parse_sweep(in);
}

}  // namespace kcap
