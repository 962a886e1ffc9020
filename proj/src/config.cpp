#include "nhchain/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>

#include "nhchain/errors.hpp"

namespace nhchain {

namespace {

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

double number_at(const nlohmann::json& j, const std::string& key) {
  if (!j.at(key).is_number()) bad("config key '" + key + "' must be a number");
  return j.at(key).get<double>();
}

double number_or(const nlohmann::json& j, const std::string& key, double fallback) {
  return j.contains(key) ? number_at(j, key) : fallback;
}

std::int64_t integer_at(const nlohmann::json& j, const std::string& key) {
  if (!j.at(key).is_number_integer()) bad("config key '" + key + "' must be an integer");
  return j.at(key).get<std::int64_t>();
}

std::string string_at(const nlohmann::json& j, const std::string& key) {
  if (!j.at(key).is_string()) bad("config key '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

}  // namespace

double parse_angle(const nlohmann::json& value) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string()) bad("angles must be numbers or strings like \"pi/2\"");
  std::string s = value.get<std::string>();
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) bad("empty angle string");
  try {
    const std::size_t pi_pos = s.find("pi");
    if (pi_pos == std::string::npos) return std::stod(s);
    double coeff = 1.0;
    const std::string head = s.substr(0, pi_pos);
    if (head == "-") {
      coeff = -1.0;
    } else if (!head.empty()) {
      coeff = std::stod(head);
    }
    double divisor = 1.0;
    const std::string tail = s.substr(pi_pos + 2);
    if (!tail.empty()) {
      if (tail[0] != '/') bad("cannot parse angle '" + s + "'");
      divisor = std::stod(tail.substr(1));
      if (divisor == 0.0) bad("angle '" + s + "' divides by zero");
    }
    return coeff * M_PI / divisor;
  } catch (const std::logic_error&) {
    bad("cannot parse angle '" + s + "'");
  }
}

namespace {

std::vector<double> angle_list(const nlohmann::json& value) {
  std::vector<double> out;
  if (value.is_array()) {
    for (const auto& v : value) out.push_back(parse_angle(v));
  } else {
    out.push_back(parse_angle(value));
  }
  if (out.empty()) bad("angle list is empty");
  return out;
}

std::vector<double> number_list(const nlohmann::json& value, const std::string& key) {
  std::vector<double> out;
  if (value.is_array()) {
    for (const auto& v : value) {
      if (!v.is_number()) bad("config key '" + key + "' must hold numbers");
      out.push_back(v.get<double>());
    }
  } else if (value.is_number()) {
    out.push_back(value.get<double>());
  } else {
    bad("config key '" + key + "' must be a number or an array of numbers");
  }
  if (out.empty()) bad("config key '" + key + "' is empty");
  return out;
}

const std::set<std::string> kKnownKeys = {
    "model",     "lambda",     "beta",        "phi",
    "alpha",     "v",          "va",          "vb",
    "center",    "halfwidth",  "order",       "T",
    "theta",     "theta_count", "theta_min",  "theta_max",
    "sizes",     "boundary",   "seeds",       "replicas",
    "output",    "format",     "threads",     "mode",
    "quantity",  "matrix_output", "profile_output", "balance",
    "residual_tolerance", "sweeps_per_eigenvalue", "verbose"};

}  // namespace

RunSettings parse_settings(const nlohmann::json& config) {
  if (!config.is_object()) bad("config must be a JSON object");
  for (auto it = config.begin(); it != config.end(); ++it)
    if (!kKnownKeys.count(it.key())) bad("unknown config key '" + it.key() + "'");

  RunSettings s;

  // sizes
  if (config.contains("sizes")) {
    const auto& sz = config.at("sizes");
    if (sz.is_array()) {
      for (const auto& v : sz) {
        if (!v.is_number_integer()) bad("config key 'sizes' must hold integers");
        s.sizes.push_back(v.get<Eigen::Index>());
      }
    } else if (sz.is_number_integer()) {
      s.sizes.push_back(sz.get<Eigen::Index>());
    } else {
      bad("config key 'sizes' must be an integer or an array of integers");
    }
  } else {
    s.sizes = {987};
  }
  if (s.sizes.empty()) bad("config key 'sizes' is empty");
  for (const auto n : s.sizes)
    if (n < 2) bad("every size must be >= 2");

  // hopping grids
  s.t_values = config.contains("T") ? number_list(config.at("T"), "T")
                                    : std::vector<double>{1.0};
  for (const double t : s.t_values)
    if (!(t >= 0.0) || !std::isfinite(t)) bad("every T must be finite and >= 0");
  if (config.contains("theta") && config.contains("theta_count"))
    bad("give either 'theta' or 'theta_count', not both");
  if (config.contains("theta")) {
    s.theta_values = angle_list(config.at("theta"));
  } else if (config.contains("theta_count")) {
    const auto count = integer_at(config, "theta_count");
    if (count < 1) bad("'theta_count' must be >= 1");
    const double lo = config.contains("theta_min") ? parse_angle(config.at("theta_min")) : 0.0;
    const double hi =
        config.contains("theta_max") ? parse_angle(config.at("theta_max")) : M_PI / 2.0;
    s.theta_values = linspace(lo, hi, static_cast<int>(count));
  } else {
    s.theta_values = {0.0};
  }

  // replicas and seed
  if (config.contains("replicas")) {
    const auto r = integer_at(config, "replicas");
    if (r < 1) bad("'replicas' must be >= 1");
    s.replicas = static_cast<int>(r);
  }
  if (config.contains("seeds")) {
    if (!config.at("seeds").is_number_integer())
      bad("'seeds' must be an integer base seed (replicas use seed, seed+1, ...)");
    s.seed = config.at("seeds").get<std::uint64_t>();
    s.seed_given = true;
  }

  // model
  const std::string model = config.contains("model") ? string_at(config, "model") : "aaf";
  const double v = number_or(config, "v", 1.0);
  if (model == "aaf") {
    AAFParams p;
    p.lambda = number_or(config, "lambda", 1.0);
    if (config.contains("beta")) {
      const auto& b = config.at("beta");
      if (b.is_string()) {
        const std::string sv = b.get<std::string>();
        if (sv != "inf" && sv != "infinity") bad("'beta' string form must be \"inf\"");
        p.beta = std::numeric_limits<double>::infinity();
      } else if (b.is_number()) {
        p.beta = b.get<double>();
      } else {
        bad("'beta' must be a number or \"inf\"");
      }
    }
    p.phi = config.contains("phi") ? parse_angle(config.at("phi")) : 0.0;
    p.alpha = number_or(config, "alpha", kGoldenRatio);
    s.chain.model = p;
  } else if (model == "fibonacci") {
    FibonacciWordParams p;
    p.v_a = config.contains("va") ? number_at(config, "va") : v;
    p.v_b = config.contains("vb") ? number_at(config, "vb") : -v;
    const Eigen::Index largest = *std::max_element(s.sizes.begin(), s.sizes.end());
    if (config.contains("order")) {
      p.order = static_cast<int>(integer_at(config, "order"));
    } else {
      const auto order = fibonacci_order_for_length(largest);
      if (!order)
        bad("size " + std::to_string(largest) +
            " is not a Fibonacci word length; give 'order' explicitly or use 2, 3, 5, 8, "
            "13, ..., 987");
      p.order = *order;
    }
    s.chain.model = p;
  } else if (model == "alternating") {
    AlternatingParams p;
    p.v_a = config.contains("va") ? number_at(config, "va") : v;
    p.v_b = config.contains("vb") ? number_at(config, "vb") : -v;
    s.chain.model = p;
  } else if (model == "random") {
    RandomDisorderParams p;
    p.center = number_or(config, "center", -1.0);
    p.halfwidth = number_or(config, "halfwidth", 0.5);
    if (!s.seed_given) bad("the random model needs a seed: pass --seed or config key 'seeds'");
    p.seed = s.seed;
    s.chain.model = p;
  } else {
    bad("unknown model '" + model + "' (expected aaf, fibonacci, alternating or random)");
  }
  if (s.replicas > 1 && model != "random") bad("replicas > 1 need the random model");

  // boundary
  if (config.contains("boundary")) {
    const std::string b = string_at(config, "boundary");
    if (b == "open") {
      s.chain.boundary = Boundary::Open;
    } else if (b == "periodic") {
      s.chain.boundary = Boundary::Periodic;
    } else {
      bad("'boundary' must be \"open\" or \"periodic\"");
    }
  }
  s.chain.n_sites = s.sizes.front();

  // output and execution
  if (config.contains("output")) s.output = string_at(config, "output");
  if (config.contains("matrix_output")) s.matrix_output = string_at(config, "matrix_output");
  if (config.contains("profile_output")) s.profile_output = string_at(config, "profile_output");
  if (config.contains("format")) {
    const std::string f = string_at(config, "format");
    if (f == "csv") {
      s.format = EmitFormat::Csv;
    } else if (f == "json") {
      s.format = EmitFormat::Json;
    } else {
      bad("'format' must be \"csv\" or \"json\"");
    }
  }
  if (config.contains("threads")) {
    const auto t = integer_at(config, "threads");
    if (t < 1) bad("'threads' must be >= 1");
    s.threads = static_cast<int>(t);
  }
  if (config.contains("mode")) {
    const std::string m = string_at(config, "mode");
    if (m == "max" || m == "max_ipr") {
      s.mode = ExtremeMode::MaxIpr;
    } else if (m == "min" || m == "min_ipr") {
      s.mode = ExtremeMode::MinIpr;
    } else {
      bad("'mode' must be max_ipr or min_ipr");
    }
  }
  if (config.contains("quantity")) {
    const std::string q = string_at(config, "quantity");
    if (q == "log_ipr") {
      s.quantity = LandscapeQuantity::LogIpr;
    } else if (q == "d2") {
      s.quantity = LandscapeQuantity::D2;
    } else if (q == "rigidity") {
      s.quantity = LandscapeQuantity::Rigidity;
    } else {
      bad("'quantity' must be log_ipr, d2 or rigidity");
    }
  }
  if (config.contains("balance")) {
    if (!config.at("balance").is_boolean()) bad("'balance' must be a boolean");
    s.eig.balance = config.at("balance").get<bool>();
  }
  if (config.contains("residual_tolerance")) {
    s.eig.residual_tolerance = number_at(config, "residual_tolerance");
    if (!(s.eig.residual_tolerance > 0.0)) bad("'residual_tolerance' must be > 0");
  }
  if (config.contains("sweeps_per_eigenvalue")) {
    const auto sw = integer_at(config, "sweeps_per_eigenvalue");
    if (sw < 1) bad("'sweeps_per_eigenvalue' must be >= 1");
    s.eig.sweeps_per_eigenvalue = static_cast<int>(sw);
  }
  if (config.contains("verbose")) {
    if (!config.at("verbose").is_boolean()) bad("'verbose' must be a boolean");
    s.verbose = config.at("verbose").get<bool>();
  }
  return s;
}

SweepGrid RunSettings::grid() const {
  SweepGrid g;
  g.chain = chain;
  g.theta_values = theta_values;
  g.t_values = t_values;
  g.sizes = sizes;
  g.replicas = replicas;
  g.eig_options = eig;
  return g;
}

nlohmann::ordered_json settings_metadata(const RunSettings& s) {
  nlohmann::ordered_json m;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, AAFParams>) {
          m["model"] = "aaf";
          m["lambda"] = p.lambda;
          m["beta"] = std::isinf(p.beta) ? nlohmann::ordered_json("inf")
                                         : nlohmann::ordered_json(p.beta);
          m["phi"] = p.phi;
          m["alpha"] = p.alpha;
        } else if constexpr (std::is_same_v<P, FibonacciWordParams>) {
          m["model"] = "fibonacci";
          m["order"] = p.order;
          m["va"] = p.v_a;
          m["vb"] = p.v_b;
        } else if constexpr (std::is_same_v<P, AlternatingParams>) {
          m["model"] = "alternating";
          m["va"] = p.v_a;
          m["vb"] = p.v_b;
        } else {
          m["model"] = "random";
          m["center"] = p.center;
          m["halfwidth"] = p.halfwidth;
        }
      },
      s.chain.model);
  m["boundary"] = s.chain.boundary == Boundary::Open ? "open" : "periodic";
  m["sizes"] = s.sizes;
  m["T"] = s.t_values;
  m["theta"] = s.theta_values;
  m["replicas"] = s.replicas;
  if (s.seed_given) m["seed"] = s.seed;
  m["balance"] = s.eig.balance;
  m["residual_tolerance"] = s.eig.residual_tolerance;
  m["sweeps_per_eigenvalue"] = s.eig.sweeps_per_eigenvalue;
  return m;
}

}  // namespace nhchain
