#pragma once

// Line-delimited dataset files, one instance per line:
// {"id", "context_graph", "question", "option_graphs", "option_texts", "gold"}
// with graphs in the TLG document format.

#include <string>
#include <string_view>
#include <vector>

#include "adalogn/task.hpp"

namespace adalogn {

std::string serialize_instance(const TaskInstance& inst);  // one line, no newline
TaskInstance deserialize_instance(std::string_view line);

std::string serialize_dataset(const std::vector<TaskInstance>& data);
std::vector<TaskInstance> parse_dataset(std::string_view text);

void save_dataset(const std::vector<TaskInstance>& data, const std::string& path);
std::vector<TaskInstance> load_dataset(const std::string& path);

}  // namespace adalogn
