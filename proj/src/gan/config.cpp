#include "equigan/gan/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace equigan::gan {

std::string to_string(StageId stage) {
  switch (stage) {
    case StageId::Skeleton: return "skeleton";
    case StageId::NodeAttrs: return "node";
    case StageId::EdgeAttrs: return "edge";
  }
  return "?";
}

StageId parse_stage(std::string_view text) {
  if (text == "1" || text == "skeleton") return StageId::Skeleton;
  if (text == "2" || text == "node") return StageId::NodeAttrs;
  if (text == "3" || text == "edge") return StageId::EdgeAttrs;
  throw Error(ErrorCode::BadConfig, "unknown stage '" + std::string(text) + "'");
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw Error(ErrorCode::BadConfig, key + ": bad value '" + value + "'");
  return out;
}

// from_chars for double is missing in libstdc++ 11.
double parse_double(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  in.imbue(std::locale::classic());
  double out = 0.0;
  in >> out;
  if (in.fail() || !in.eof()) throw Error(ErrorCode::BadConfig, key + ": bad value '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(ErrorCode::BadConfig, key + ": expected true or false, got '" + value + "'");
}

std::string format_double(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << v;
  return out.str();
}

using Setter = std::function<void(StageConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const StageConfig&)>;

struct Field {
  const char* key;
  Setter set;
  Getter get;
};

const std::vector<Field>& fields() {
  auto int_field = [](const char* key, int StageConfig::*member) {
    return Field{key, [member](StageConfig& c, const std::string& k, const std::string& v) {
                   c.*member = parse_number<int>(k, v);
                 },
                 [member](const StageConfig& c) { return std::to_string(c.*member); }};
  };
  auto double_field = [](const char* key, double StageConfig::*member) {
    return Field{key, [member](StageConfig& c, const std::string& k, const std::string& v) {
                   c.*member = parse_double(k, v);
                 },
                 [member](const StageConfig& c) { return format_double(c.*member); }};
  };
  static const std::vector<Field> table = {
      {"stage", [](StageConfig& c, const std::string&, const std::string& v) { c.stage = parse_stage(v); },
       [](const StageConfig& c) { return to_string(c.stage); }},
      int_field("latent_width", &StageConfig::latent_width),
      int_field("layers", &StageConfig::layers),
      int_field("node_width", &StageConfig::node_width),
      int_field("edge_width", &StageConfig::edge_width),
      int_field("head_width", &StageConfig::head_width),
      {"pair_form",
       [](StageConfig& c, const std::string& k, const std::string& v) {
         if (v == "literal") c.pair_form = gnn::PairForm::Literal;
         else if (v == "classic") c.pair_form = gnn::PairForm::Classic;
         else throw Error(ErrorCode::BadConfig, k + ": expected literal or classic, got '" + v + "'");
       },
       [](const StageConfig& c) { return std::string(c.pair_form == gnn::PairForm::Literal ? "literal" : "classic"); }},
      double_field("learning_rate", &StageConfig::learning_rate),
      double_field("beta1", &StageConfig::beta1),
      double_field("beta2", &StageConfig::beta2),
      int_field("batch_size", &StageConfig::batch_size),
      int_field("critic_steps", &StageConfig::critic_steps),
      {"lipschitz",
       [](StageConfig& c, const std::string& k, const std::string& v) {
         if (v == "gradient_penalty") c.lipschitz = Lipschitz::GradientPenalty;
         else if (v == "weight_clipping") c.lipschitz = Lipschitz::WeightClipping;
         else throw Error(ErrorCode::BadConfig, k + ": expected gradient_penalty or weight_clipping, got '" + v + "'");
       },
       [](const StageConfig& c) {
         return std::string(c.lipschitz == Lipschitz::GradientPenalty ? "gradient_penalty" : "weight_clipping");
       }},
      double_field("gp_weight", &StageConfig::gp_weight),
      double_field("clip", &StageConfig::clip),
      double_field("tau_start", &StageConfig::tau_start),
      double_field("tau_end", &StageConfig::tau_end),
      double_field("tau_decay", &StageConfig::tau_decay),
      {"gumbel", [](StageConfig& c, const std::string& k, const std::string& v) { c.gumbel = parse_bool(k, v); },
       [](const StageConfig& c) { return std::string(c.gumbel ? "true" : "false"); }},
      int_field("max_steps", &StageConfig::max_steps),
      {"seed",
       [](StageConfig& c, const std::string& k, const std::string& v) { c.seed = parse_number<std::uint64_t>(k, v); },
       [](const StageConfig& c) { return std::to_string(c.seed); }},
      int_field("log_every", &StageConfig::log_every),
      int_field("checkpoint_every", &StageConfig::checkpoint_every),
  };
  return table;
}

}  // namespace

void check(const StageConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::BadConfig, what);
  };
  require(c.latent_width > 0 && c.node_width > 0 && c.edge_width > 0 && c.head_width > 0, "widths must be positive");
  require(c.layers > 0, "layers must be positive");
  require(c.learning_rate > 0.0, "learning_rate must be positive");
  require(c.beta1 >= 0.0 && c.beta1 < 1.0 && c.beta2 >= 0.0 && c.beta2 < 1.0, "betas must lie in [0, 1)");
  require(c.batch_size > 0 && c.critic_steps > 0, "batch_size and critic_steps must be positive");
  require(c.gp_weight > 0.0 && c.clip > 0.0, "gp_weight and clip must be positive");
  require(c.tau_start > 0.0 && c.tau_end > 0.0 && c.tau_end <= c.tau_start, "need 0 < tau_end <= tau_start");
  require(c.tau_decay > 0.0 && c.tau_decay <= 1.0, "tau_decay must lie in (0, 1]");
  require(c.max_steps >= 0 && c.log_every > 0 && c.checkpoint_every >= 0, "bad step counts");
}

StageConfig parse_config(std::string_view text, StageConfig base) {
  std::map<std::string, const Field*> by_key;
  for (const auto& f : fields()) by_key[f.key] = &f;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string content = trim(line.substr(0, line.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::BadConfig, "line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    auto it = by_key.find(key);
    if (it == by_key.end()) throw Error(ErrorCode::BadConfig, "line " + std::to_string(number) + ": unknown key '" + key + "'");
    it->second->set(base, key, value);
  }
  check(base);
  return base;
}

std::string dump(const StageConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + " = " + f.get(config) + "\n";
  return out;
}

std::uint64_t digest(const StageConfig& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump(config)) h = (h ^ c) * 1099511628211ULL;
  return h;
}

double temperature(const StageConfig& c, int step) {
  return std::max(c.tau_end, c.tau_start * std::pow(c.tau_decay, step));
}

}  // namespace equigan::gan
