#include "adalogn/config.hpp"

#include <filesystem>
#include <functional>
#include <map>

#include "json_io.hpp"

namespace adalogn {

namespace {

using nlohmann::json;
using detail::ojson;

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
}

using Setter = std::function<void(const json&)>;

void apply(const json& obj, const std::string& section, const std::map<std::string, Setter>& keys) {
  if (!obj.is_object()) throw ConfigError("section '" + section + "' must be an object");
  for (const auto& [k, v] : obj.items()) {
    const auto it = keys.find(k);
    if (it == keys.end()) throw ConfigError("unknown key '" + k + "' in section '" + section + "'");
    try {
      it->second(v);
    } catch (const json::exception&) {
      throw ConfigError("bad value for '" + section + "." + k + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("bad value for '" + section + "." + k + "': " + e.what());
    }
  }
}

template <class T>
Setter set(T& field) {
  return [&field](const json& v) { field = v.get<T>(); };
}

Setter set_rules(RuleSet& field) {
  return [&field](const json& v) {
    RuleSet out;
    if (v.is_string()) {
      out = parse_rules(v.get<std::string>());
    } else {
      for (const auto& r : v) out.insert(rule_from_string(r.get<std::string>()));
    }
    field = out;
  };
}

void model_section(ModelConfig& c, const json& j) {
  apply(j, "model",
        {{"d", set(c.d)},
         {"iterations", set(c.iterations)},
         {"tau", set(c.tau)},
         {"gamma", set(c.gamma)},
         {"rules", set_rules(c.rules)},
         {"variant", [&c](const json& v) { c.variant = variant_from_string(v.get<std::string>()); }},
         {"seed", set(c.seed)},
         {"heads", set(c.heads)},
         {"share_attention", set(c.share_attention)},
         {"embedding",
          [&c](const json& v) { c.embedding = embedding_mode_from_string(v.get<std::string>()); }},
         {"vocab", set(c.vocab)},
         {"closure_max_nodes", set(c.closure_max_nodes)}});
}

void train_section(TrainConfig& c, const json& j) {
  apply(j, "train",
        {{"lr", set(c.lr)},
         {"batch_size", set(c.batch_size)},
         {"epochs", set(c.epochs)},
         {"beta1", set(c.beta1)},
         {"beta2", set(c.beta2)},
         {"adam_eps", set(c.adam_eps)},
         {"clip_norm", set(c.clip_norm)},
         {"eval_every", set(c.eval_every)},
         {"seed", set(c.seed)}});
}

void generator_section(GeneratorSpec& s, const json& j) {
  apply(j, "generator",
        {{"vars", set(s.vars)},
         {"chain_len", set(s.chain_len)},
         {"chains", set(s.chains)},
         {"needs_rules", set_rules(s.needs_rules)},
         {"distractors", set(s.distractors)},
         {"neg_pairs", set(s.neg_pairs)},
         {"option_form",
          [&s](const json& v) { s.option_form = option_form_from_string(v.get<std::string>()); }},
         {"options", set(s.options)},
         {"seed", set(s.seed)},
         {"max_retries", set(s.max_retries)}});
}

std::vector<std::string> rule_names(const RuleSet& rules) {
  std::vector<std::string> out;
  for (RuleId r : rules) out.emplace_back(to_string(r));
  return out;
}

}  // namespace

void merge_model_config(ModelConfig& cfg, std::string_view text) { model_section(cfg, parse(text)); }
void merge_train_config(TrainConfig& cfg, std::string_view text) { train_section(cfg, parse(text)); }
void merge_generator_spec(GeneratorSpec& spec, std::string_view text) {
  generator_section(spec, parse(text));
}

void merge_global_config(GlobalConfig& cfg, std::string_view text) {
  const json j = parse(text);
  apply(j, "root",
        {{"seed",
          [&cfg](const json& v) {
            const auto s = v.get<std::uint64_t>();
            cfg.model.seed = cfg.train.seed = cfg.generator.seed = s;
          }},
         {"model", [&cfg](const json& v) { model_section(cfg.model, v); }},
         {"train", [&cfg](const json& v) { train_section(cfg.train, v); }},
         {"generator", [&cfg](const json& v) { generator_section(cfg.generator, v); }}});
}

std::string to_json(const ModelConfig& c) {
  ojson j;
  j["d"] = c.d;
  j["iterations"] = c.iterations;
  j["tau"] = c.tau;
  j["gamma"] = c.gamma;
  j["rules"] = rule_names(c.rules);
  j["variant"] = std::string(to_string(c.variant));
  j["seed"] = c.seed;
  j["heads"] = c.heads;
  j["share_attention"] = c.share_attention;
  j["embedding"] = std::string(to_string(c.embedding));
  j["vocab"] = c.vocab;
  j["closure_max_nodes"] = c.closure_max_nodes;
  return j.dump(2) + "\n";
}

std::string to_json(const TrainConfig& c) {
  ojson j;
  j["lr"] = c.lr;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["adam_eps"] = c.adam_eps;
  j["clip_norm"] = c.clip_norm;
  j["eval_every"] = c.eval_every;
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

std::string to_json(const GeneratorSpec& s) {
  ojson j;
  j["vars"] = s.vars;
  j["chain_len"] = s.chain_len;
  j["chains"] = s.chains;
  j["needs_rules"] = rule_names(s.needs_rules);
  j["distractors"] = s.distractors;
  j["neg_pairs"] = s.neg_pairs;
  j["option_form"] = std::string(to_string(s.option_form));
  j["options"] = s.options;
  j["seed"] = s.seed;
  j["max_retries"] = s.max_retries;
  return j.dump(2) + "\n";
}

void save_model(const Model& model, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir + "': " + ec.message());
  model.params().save(dir + "/params.bin");
  detail::write_file(dir + "/model.json", to_json(model.config()));
}

Model load_model(const std::string& dir) {
  ModelConfig cfg;
  merge_model_config(cfg, detail::read_file(dir + "/model.json"));
  return Model(cfg, ParameterStore::load(dir + "/params.bin"));
}

}  // namespace adalogn
