#include "statedisc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace statedisc {
namespace {

using nlohmann::json;

const char* label_name(Label label) {
  switch (label) {
    case Label::Class1: return "class1";
    case Label::Class2: return "class2";
    case Label::Inconclusive: return "inconclusive";
  }
  throw std::invalid_argument("unknown label");
}

// Accumulates issues while pulling typed fields out of one JSON object and
// tracks which keys were consumed so leftovers can be flagged as typos.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path,
               std::vector<std::string>& issues)
      : obj_(obj), path_(std::move(path)), issues_(issues) {}

  bool has(const char* key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  template <class T>
  void number(const char* key, T& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) {
        fail(key, "expected a number");
        return;
      }
    } else {
      if (!v.is_number_integer() && !v.is_number_unsigned()) {
        fail(key, "expected an integer");
        return;
      }
    }
    out = v.get<T>();
  }

  template <class T>
  void optional_number(const char* key, std::optional<T>& out) {
    T value{};
    bool present = obj_.contains(key);
    number(key, value);
    if (present && issues_empty_for(key)) out = value;
  }

  void boolean(const char* key, bool& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) {
      fail(key, "expected true or false");
      return;
    }
    out = v.get<bool>();
  }

  void string(const char* key, std::string& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_string()) {
      fail(key, "expected a string");
      return;
    }
    out = v.get<std::string>();
  }

  const json* array(const char* key) {
    if (!has(key)) return nullptr;
    const json& v = obj_.at(key);
    if (!v.is_array()) {
      fail(key, "expected an array");
      return nullptr;
    }
    return &v;
  }

  const json* object(const char* key) {
    if (!has(key)) return nullptr;
    const json& v = obj_.at(key);
    if (!v.is_object()) {
      fail(key, "expected an object");
      return nullptr;
    }
    return &v;
  }

  void reject_unknown_keys() {
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) {
        issues_.push_back(member(item.key()) + ": unknown field");
      }
    }
  }

  void fail(const std::string& key, const std::string& what) {
    issues_.push_back(member(key) + ": " + what);
  }

  std::string member(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  bool issues_empty_for(const std::string& key) {
    const std::string prefix = member(key) + ":";
    for (const auto& issue : issues_) {
      if (issue.rfind(prefix, 0) == 0) return false;
    }
    return true;
  }

  const json& obj_;
  std::string path_;
  std::vector<std::string>& issues_;
  std::set<std::string> seen_;
};

std::optional<ExperimentKind> parse_kind(const std::string& name) {
  for (ExperimentKind kind :
       {ExperimentKind::CenteredA0, ExperimentKind::FullRange,
        ExperimentKind::Generalization,
        ExperimentKind::DistributionClassification,
        ExperimentKind::PenaltySweep, ExperimentKind::ShotConvergence,
        ExperimentKind::OptimizerComparison}) {
    if (experiment_kind_name(kind) == name) return kind;
  }
  return std::nullopt;
}

std::optional<OptimizerKind> parse_optimizer(const std::string& name) {
  for (OptimizerKind kind :
       {OptimizerKind::Adam, OptimizerKind::Sgd, OptimizerKind::RmsProp}) {
    if (optimizer_name(kind) == name) return kind;
  }
  return std::nullopt;
}

std::optional<Label> parse_label(const std::string& name) {
  for (Label label : {Label::Class1, Label::Class2, Label::Inconclusive}) {
    if (label_name(label) == name) return label;
  }
  return std::nullopt;
}

std::optional<BaseDistribution> parse_base_distribution(
    const json& obj, const std::string& path, const std::string& type,
    std::vector<std::string>& issues) {
  ObjectReader reader(obj, path, issues);
  std::string ignored;
  reader.string("type", ignored);
  if (type == "fixed") {
    FixedValue dist;
    reader.number("value", dist.value);
    reader.reject_unknown_keys();
    return BaseDistribution{dist};
  }
  if (type == "truncated_normal") {
    TruncatedNormalDist dist{0.0, 1.0, 0.0, 1.0};
    reader.number("mean", dist.mean);
    reader.number("stddev", dist.stddev);
    reader.number("lo", dist.lo);
    reader.number("hi", dist.hi);
    reader.reject_unknown_keys();
    return BaseDistribution{dist};
  }
  if (type == "uniform") {
    UniformDist dist{0.0, 1.0};
    reader.number("lo", dist.lo);
    reader.number("hi", dist.hi);
    reader.reject_unknown_keys();
    return BaseDistribution{dist};
  }
  issues.push_back(path + ".type: unknown distribution type '" + type + "'");
  return std::nullopt;
}

std::optional<ParamDistribution> parse_distribution(
    const json& value, const std::string& path,
    std::vector<std::string>& issues) {
  if (!value.is_object()) {
    issues.push_back(path + ": expected a distribution object");
    return std::nullopt;
  }
  if (!value.contains("type") || !value.at("type").is_string()) {
    issues.push_back(path + ".type: expected a string");
    return std::nullopt;
  }
  const std::string type = value.at("type").get<std::string>();
  if (type == "mixture") {
    ObjectReader reader(value, path, issues);
    std::string ignored;
    reader.string("type", ignored);
    const json* components = reader.array("components");
    MixtureDist mixture;
    if (components != nullptr) {
      for (std::size_t i = 0; i < components->size(); ++i) {
        const std::string item_path =
            path + ".components[" + std::to_string(i) + "]";
        const json& item = (*components)[i];
        if (!item.is_object()) {
          issues.push_back(item_path + ": expected an object");
          continue;
        }
        ObjectReader item_reader(item, item_path, issues);
        MixtureComponent component;
        item_reader.number("weight", component.weight);
        if (const json* dist = item_reader.object("dist")) {
          if (!dist->contains("type") || !dist->at("type").is_string()) {
            issues.push_back(item_path + ".dist.type: expected a string");
          } else {
            const std::string inner = dist->at("type").get<std::string>();
            if (inner == "mixture") {
              issues.push_back(item_path +
                               ".dist: nested mixtures are not supported");
            } else if (auto base = parse_base_distribution(
                           *dist, item_path + ".dist", inner, issues)) {
              component.dist = *base;
            }
          }
        }
        item_reader.reject_unknown_keys();
        mixture.components.push_back(std::move(component));
      }
    }
    reader.reject_unknown_keys();
    return ParamDistribution{std::move(mixture)};
  }
  auto base = parse_base_distribution(value, path, type, issues);
  if (!base) return std::nullopt;
  return std::visit([](auto dist) { return ParamDistribution{dist}; }, *base);
}

json base_distribution_to_json(const BaseDistribution& dist) {
  if (const auto* f = std::get_if<FixedValue>(&dist)) {
    return {{"type", "fixed"}, {"value", f->value}};
  }
  if (const auto* n = std::get_if<TruncatedNormalDist>(&dist)) {
    return {{"type", "truncated_normal"},
            {"mean", n->mean},
            {"stddev", n->stddev},
            {"lo", n->lo},
            {"hi", n->hi}};
  }
  const auto& u = std::get<UniformDist>(dist);
  return {{"type", "uniform"}, {"lo", u.lo}, {"hi", u.hi}};
}

}  // namespace

ParamDistribution distribution_from_json(const nlohmann::json& value,
                                         const std::string& path) {
  std::vector<std::string> issues;
  auto dist = parse_distribution(value, path, issues);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  if (!dist) throw ValidationError({path + ": not a distribution"});
  return std::move(*dist);
}

std::optional<OptimizerKind> optimizer_from_name(const std::string& name) {
  return parse_optimizer(name);
}

nlohmann::json distribution_to_json(const ParamDistribution& dist) {
  if (const auto* mix = std::get_if<MixtureDist>(&dist)) {
    json components = json::array();
    for (const MixtureComponent& component : mix->components) {
      components.push_back(
          {{"weight", component.weight},
           {"dist", base_distribution_to_json(component.dist)}});
    }
    return {{"type", "mixture"}, {"components", std::move(components)}};
  }
  if (const auto* f = std::get_if<FixedValue>(&dist)) {
    return base_distribution_to_json(BaseDistribution{*f});
  }
  if (const auto* n = std::get_if<TruncatedNormalDist>(&dist)) {
    return base_distribution_to_json(BaseDistribution{*n});
  }
  return base_distribution_to_json(
      BaseDistribution{std::get<UniformDist>(dist)});
}

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("json: ") + e.what()});
  }
  std::vector<std::string> issues;
  if (!root.is_object()) {
    throw ValidationError({"json: top level must be an object"});
  }

  ExperimentSpec spec;
  ObjectReader reader(root, "", issues);

  std::string kind_name;
  reader.string("kind", kind_name);
  if (kind_name.empty()) {
    issues.push_back("kind: required field is missing");
  } else if (auto kind = parse_kind(kind_name)) {
    spec.kind = *kind;
  } else {
    issues.push_back("kind: unknown experiment kind '" + kind_name + "'");
  }

  reader.string("name", spec.name);
  reader.number("seed", spec.seed);
  reader.optional_number("repetitions", spec.repetitions);
  reader.optional_number("alpha_err", spec.alpha_err);
  reader.optional_number("alpha_inc", spec.alpha_inc);
  reader.number("cost_scale", spec.cost_scale);
  reader.optional_number("gradient_step", spec.gradient_step);
  reader.number("iterations", spec.iterations);
  reader.number("minibatch_size", spec.minibatch_size);
  reader.number("shots", spec.shots);
  reader.number("train_points", spec.train_points);
  reader.optional_number("test_points", spec.test_points);
  reader.number("prior1", spec.prior1);
  reader.number("prior2", spec.prior2);
  reader.number("b_value", spec.b_value);
  reader.number("a0", spec.a0);
  reader.number("a_sigma", spec.a_sigma);
  reader.number("train_lo", spec.train_lo);
  reader.number("train_hi", spec.train_hi);
  reader.boolean("include_full_range_baseline",
                 spec.include_full_range_baseline);
  reader.boolean("include_exact_baseline", spec.include_exact_baseline);

  std::string optimizer_str;
  reader.string("optimizer", optimizer_str);
  if (!optimizer_str.empty()) {
    if (auto kind = parse_optimizer(optimizer_str)) {
      spec.optimizer = *kind;
    } else {
      issues.push_back("optimizer: unknown optimizer '" + optimizer_str + "'");
    }
  }

  if (const json* hp = reader.object("hyperparams")) {
    ObjectReader hp_reader(*hp, "hyperparams", issues);
    hp_reader.number("learning_rate", spec.hyperparams.learning_rate);
    hp_reader.number("beta1", spec.hyperparams.beta1);
    hp_reader.number("beta2", spec.hyperparams.beta2);
    hp_reader.number("epsilon_hat", spec.hyperparams.epsilon_hat);
    hp_reader.number("rms_decay", spec.hyperparams.rms_decay);
    hp_reader.reject_unknown_keys();
  }

  if (const json* labels = reader.array("assignment")) {
    if (labels->size() != 4) {
      issues.push_back("assignment: expected exactly 4 outcome labels");
    } else {
      for (std::size_t i = 0; i < 4; ++i) {
        const std::string path = "assignment[" + std::to_string(i) + "]";
        if (!(*labels)[i].is_string()) {
          issues.push_back(path + ": expected a string");
          continue;
        }
        const std::string name = (*labels)[i].get<std::string>();
        if (auto label = parse_label(name)) {
          spec.assignment.label_of_outcome[i] = *label;
        } else {
          issues.push_back(path + ": unknown label '" + name + "'");
        }
      }
    }
  }

  if (const json* grid = reader.array("penalty_grid")) {
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const std::string path = "penalty_grid[" + std::to_string(i) + "]";
      const json& item = (*grid)[i];
      if (!item.is_object()) {
        issues.push_back(path + ": expected an object");
        continue;
      }
      ObjectReader item_reader(item, path, issues);
      PenaltyPoint point;
      item_reader.number("alpha_err", point.alpha_err);
      item_reader.number("alpha_inc", point.alpha_inc);
      item_reader.reject_unknown_keys();
      spec.penalty_grid.push_back(point);
    }
  }

  if (const json* shots = reader.array("shots_grid")) {
    for (std::size_t i = 0; i < shots->size(); ++i) {
      const json& item = (*shots)[i];
      if (!item.is_number_integer() && !item.is_number_unsigned()) {
        issues.push_back("shots_grid[" + std::to_string(i) +
                         "]: expected an integer");
        continue;
      }
      spec.shots_grid.push_back(item.get<long long>());
    }
  }

  auto number_list = [&](const char* key, std::vector<double>& out) {
    if (const json* list = reader.array(key)) {
      for (std::size_t i = 0; i < list->size(); ++i) {
        const json& item = (*list)[i];
        if (!item.is_number()) {
          issues.push_back(std::string(key) + "[" + std::to_string(i) +
                           "]: expected a number");
          continue;
        }
        out.push_back(item.get<double>());
      }
    }
  };
  number_list("gradient_steps", spec.gradient_steps);
  number_list("learning_rates", spec.learning_rates);

  if (const json* sources = reader.array("sources")) {
    for (std::size_t i = 0; i < sources->size(); ++i) {
      if (auto dist = parse_distribution(
              (*sources)[i], "sources[" + std::to_string(i) + "]", issues)) {
        spec.sources.push_back(std::move(*dist));
      }
    }
  }

  if (const json* optimizers = reader.array("optimizers")) {
    for (std::size_t i = 0; i < optimizers->size(); ++i) {
      const std::string path = "optimizers[" + std::to_string(i) + "]";
      const json& item = (*optimizers)[i];
      if (!item.is_string()) {
        issues.push_back(path + ": expected a string");
        continue;
      }
      const std::string name = item.get<std::string>();
      if (auto kind = parse_optimizer(name)) {
        spec.optimizers.push_back(*kind);
      } else {
        issues.push_back(path + ": unknown optimizer '" + name + "'");
      }
    }
  }

  reader.reject_unknown_keys();

  if (issues.empty()) {
    // Structural parse succeeded; surface semantic problems in one pass too.
    issues = validate_spec(resolve_defaults(spec));
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw std::runtime_error("cannot read config file: " + path);
  return parse_experiment_spec(buffer.str());
}

nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec) {
  json j;
  j["kind"] = experiment_kind_name(spec.kind);
  if (!spec.name.empty()) j["name"] = spec.name;
  j["seed"] = spec.seed;
  if (spec.repetitions) j["repetitions"] = *spec.repetitions;
  if (spec.alpha_err) j["alpha_err"] = *spec.alpha_err;
  if (spec.alpha_inc) j["alpha_inc"] = *spec.alpha_inc;
  j["cost_scale"] = spec.cost_scale;
  j["optimizer"] = optimizer_name(spec.optimizer);
  j["hyperparams"] = {{"learning_rate", spec.hyperparams.learning_rate},
                      {"beta1", spec.hyperparams.beta1},
                      {"beta2", spec.hyperparams.beta2},
                      {"epsilon_hat", spec.hyperparams.epsilon_hat},
                      {"rms_decay", spec.hyperparams.rms_decay}};
  json labels = json::array();
  for (Label label : spec.assignment.label_of_outcome) {
    labels.push_back(label_name(label));
  }
  j["assignment"] = std::move(labels);
  if (spec.gradient_step) j["gradient_step"] = *spec.gradient_step;
  j["iterations"] = spec.iterations;
  j["minibatch_size"] = spec.minibatch_size;
  j["shots"] = spec.shots;
  j["train_points"] = spec.train_points;
  if (spec.test_points) j["test_points"] = *spec.test_points;
  j["prior1"] = spec.prior1;
  j["prior2"] = spec.prior2;
  j["b_value"] = spec.b_value;
  if (spec.kind == ExperimentKind::CenteredA0) {
    j["a0"] = spec.a0;
    j["a_sigma"] = spec.a_sigma;
  }
  if (spec.kind == ExperimentKind::Generalization) {
    j["train_lo"] = spec.train_lo;
    j["train_hi"] = spec.train_hi;
    j["include_full_range_baseline"] = spec.include_full_range_baseline;
  }
  if (!spec.penalty_grid.empty()) {
    json grid = json::array();
    for (const PenaltyPoint& point : spec.penalty_grid) {
      grid.push_back(
          {{"alpha_err", point.alpha_err}, {"alpha_inc", point.alpha_inc}});
    }
    j["penalty_grid"] = std::move(grid);
  }
  if (spec.kind == ExperimentKind::ShotConvergence) {
    j["shots_grid"] = spec.shots_grid;
    j["gradient_steps"] = spec.gradient_steps;
    j["learning_rates"] = spec.learning_rates;
    j["include_exact_baseline"] = spec.include_exact_baseline;
  }
  if (!spec.sources.empty()) {
    json sources = json::array();
    for (const ParamDistribution& dist : spec.sources) {
      sources.push_back(distribution_to_json(dist));
    }
    j["sources"] = std::move(sources);
  }
  if (!spec.optimizers.empty()) {
    json optimizers = json::array();
    for (OptimizerKind kind : spec.optimizers) {
      optimizers.push_back(optimizer_name(kind));
    }
    j["optimizers"] = std::move(optimizers);
  }
  return j;
}

}  // namespace statedisc
