#include "adalogn/dataset.hpp"

#include "json_io.hpp"

namespace adalogn {

std::string serialize_instance(const TaskInstance& inst) {
  detail::ojson j;
  j["id"] = inst.id;
  j["context_graph"] = detail::tlg_to_json(inst.context);
  j["question"] = inst.question;
  detail::ojson opts = detail::ojson::array();
  for (const Tlg& o : inst.options) opts.push_back(detail::tlg_to_json(o));
  j["option_graphs"] = opts;
  j["option_texts"] = inst.option_texts;
  j["gold"] = inst.gold;
  return j.dump();
}

TaskInstance deserialize_instance(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed dataset record: ") + e.what());
  }
  TaskInstance inst;
  try {
    inst.id = j.at("id").get<std::string>();
    inst.context = detail::tlg_from_json_checked(j.at("context_graph"));
    inst.question = j.at("question").get<std::string>();
    for (const auto& o : j.at("option_graphs")) inst.options.push_back(detail::tlg_from_json_checked(o));
    inst.option_texts = j.at("option_texts").get<std::vector<std::string>>();
    inst.gold = j.at("gold").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed dataset record: ") + e.what());
  }
  if (inst.options.empty()) throw Error("record '" + inst.id + "' has no options");
  if (inst.option_texts.size() != inst.options.size()) {
    throw Error("record '" + inst.id + "': option_texts and option_graphs differ in length");
  }
  if (inst.gold < 0 || static_cast<std::size_t>(inst.gold) >= inst.options.size()) {
    throw Error("record '" + inst.id + "': gold index out of range");
  }
  return inst;
}

std::string serialize_dataset(const std::vector<TaskInstance>& data) {
  std::string out;
  for (const TaskInstance& inst : data) out += serialize_instance(inst) + "\n";
  return out;
}

std::vector<TaskInstance> parse_dataset(std::string_view text) {
  std::vector<TaskInstance> out;
  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(deserialize_instance(line));
    } catch (const Error& e) {
      throw Error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void save_dataset(const std::vector<TaskInstance>& data, const std::string& path) {
  detail::write_file(path, serialize_dataset(data));
}

std::vector<TaskInstance> load_dataset(const std::string& path) {
  return parse_dataset(detail::read_file(path));
}

}  // namespace adalogn
